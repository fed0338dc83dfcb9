"""Resource budgets.  Defaults may be overridden by environment variables
(the only configuration the environment is allowed to override); exceeding a
budget raises building.BudgetError rather than silently truncating."""

from __future__ import annotations

import os

_DEFAULTS = {
    "FQBUILDING_ENUM_CAP": 12,        # max stabilizer dimension to enumerate
    "FQBUILDING_SOLUTION_CAP": 2 ** 20,  # max affine solution space to filter
    "FQBUILDING_BRUTE_BUDGET": 2 ** 20,  # max brute-force search space
    "FQBUILDING_VERTEX_BUDGET": 200_000,  # max ball size
}


def budget(name: str, override: int | None = None) -> int:
    if override is not None:
        return override
    raw = os.environ.get(name)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"environment budget {name} must be an integer") from None
    return _DEFAULTS[name]
