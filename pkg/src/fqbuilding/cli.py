"""Batch command-line front-end.

Commands: ball, stabilizer, unstable-map, homology, components, restrict,
verify.  Configuration comes from flags plus an optional key=value config
file (flags win; unknown file keys are rejected).  Output is a JSON run
report on stdout or --out (DOT for `ball --format dot`), byte-identical for
identical configuration: the wall-clock field stays null unless --timing is
passed.  Exit codes: 0 pass, 1 assertion/check failure, 2 usage error,
3 budget exceeded.  Budgets may also be overridden by FQBUILDING_* environment
variables (the only environment configuration honored).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .building import Ball, BudgetError, ball
from .congruence import Level, Splitting, StabilizerCache, SubspaceK, brute_stab, \
    enumerate_stab, fixed_space, in_sigma_region, orbit_witness, stabilizer_order
from .gf import GF, factor_prime_power
from .homology import components, full_complex, homology, restriction_map, \
    stable_complex, unstable_complex
from .lattices import LatticeClass
from .rfunc import Poly, Rat, rat_one, rat_zero
from .verify import CHECK_NAMES, run_checks

TRUNCATION_CAPTION = (
    "truncated: values are computed on a finite radius-N window of the "
    "infinite complex and may change when the radius grows"
)

INCONCLUSIVE_CAPTION = "orbit searches without a witness are inconclusive at their bound"


class UsageError(Exception):
    pass


# --- parsing helpers ---------------------------------------------------------


def parse_poly(K: GF, text: str) -> Poly:
    """Polynomial in t over F_q.  Accepts 't^2+t+1', '2*t^3-1', 't', '5', or
    a comma-separated coefficient list '1,0,2' (low degree first).
    Integer literals are base-p encodings of F_q elements."""
    text = text.strip()
    if "," in text:
        try:
            coeffs = [int(c) for c in text.split(",")]
        except ValueError:
            raise UsageError(f"bad coefficient list {text!r}") from None
        for c in coeffs:
            if not 0 <= c < K.q:
                raise UsageError(f"coefficient {c} out of range for q={K.q}")
        return Poly(K, coeffs)
    s = text.replace(" ", "").replace("-", "+-")
    if s.startswith("+"):
        s = s[1:]
    if not s:
        raise UsageError("empty polynomial")
    coeffs: dict[int, int] = {}
    for term in s.split("+"):
        if not term:
            raise UsageError(f"malformed polynomial {text!r}")
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        try:
            if "t" in term:
                head, _, tail = term.partition("t")
                c = head.rstrip("*")
                coeff = int(c) if c else 1
                if tail.startswith("^"):
                    k = int(tail[1:])
                elif tail:
                    raise ValueError(tail)
                else:
                    k = 1
            else:
                coeff = int(term)
                k = 0
        except ValueError:
            raise UsageError(f"malformed term {term!r} in {text!r}") from None
        if not 0 <= coeff < K.q:
            raise UsageError(f"coefficient {coeff} out of range for q={K.q}")
        if neg:
            coeff = K.neg(coeff)
        coeffs[k] = K.add(coeffs.get(k, 0), coeff)
    out = [0] * (max(coeffs) + 1)
    for k, c in coeffs.items():
        out[k] = c
    return Poly(K, out)


def parse_w1(K: GF, r: int, text: str) -> SubspaceK:
    """Subspace spec: either 'e1', 'e1+e2', 'e1,e2' (sums of unit vectors,
    comma-separated generators) or a JSON list of vectors whose entries are
    polynomial strings."""
    text = text.strip()
    one, z = rat_one(K), rat_zero(K)
    vectors = []
    if text.startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"bad JSON subspace: {e}") from None
        for row in rows:
            if len(row) != r:
                raise UsageError("subspace vector has wrong length")
            vectors.append([Rat(parse_poly(K, str(entry))) for entry in row])
    else:
        for part in text.split(","):
            vec = [z] * r
            for term in part.strip().split("+"):
                term = term.strip()
                if not term.startswith("e"):
                    raise UsageError(f"bad subspace term {term!r} (use e1..e{r})")
                try:
                    idx = int(term[1:])
                except ValueError:
                    raise UsageError(f"bad subspace term {term!r}") from None
                if not 1 <= idx <= r:
                    raise UsageError(f"unit vector e{idx} out of range 1..{r}")
                vec[idx - 1] = vec[idx - 1] + one
            vectors.append(vec)
    sub = SubspaceK.from_vectors(K, r, vectors)
    if not (0 < sub.dim < r):
        raise UsageError("sigma subspace must be proper and nonzero")
    return sub


class Config:
    """Effective run configuration (spec fields: field data, rank, ideal,
    radius, center, optional sigma data, output, budgets)."""

    def __init__(self, K: GF, r: int, ideal: Poly | None, radius: int | None,
                 center: LatticeClass, fine_ideal: Poly | None,
                 w1: SubspaceK | None, out: str | None, fmt: str,
                 threads: int, timing: bool, budgets: dict):
        self.K = K
        self.r = r
        self.ideal = ideal
        self.radius = radius
        self.center = center
        self.fine_ideal = fine_ideal
        self.w1 = w1
        self.out = out
        self.fmt = fmt
        self.threads = threads
        self.timing = timing
        self.budgets = budgets

    def level(self) -> Level:
        if self.ideal is None:
            raise UsageError("this command requires --ideal")
        return Level(self.K, self.r, self.ideal)

    def echo(self) -> dict:
        return {
            "p": self.K.p,
            "n": self.K.n,
            "modulus": list(self.K.modulus) if self.K.n > 1 else None,
            "r": self.r,
            "ideal": list(self.ideal.coeffs) if self.ideal else None,
            "fine_ideal": list(self.fine_ideal.coeffs) if self.fine_ideal else None,
            "radius": self.radius,
            "center": self.center.to_json_dict(),
            "w1": self.w1.to_json_dict() if self.w1 else None,
            "format": self.fmt,
            # threads deliberately omitted: output must be byte-identical
            # across worker budgets
            "budgets": self.budgets,
        }


_FILE_KEYS = {
    "q", "p", "n", "modulus", "r", "ideal", "fine_ideal", "radius", "center",
    "w1", "out", "format", "threads", "enum_cap", "solution_cap",
    "brute_budget", "vertex_budget", "deg_bound", "ids", "checks",
}


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(
                        f"{path}:{lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _FILE_KEYS:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = value.strip()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from None
    return values


def _common_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value config file (flags override it)")
    p.add_argument("--q", type=int, help="field size, a prime power")
    p.add_argument("--p", type=int, help="field characteristic")
    p.add_argument("--n", type=int, help="extension degree, q = p^n")
    p.add_argument("--modulus", help="comma coeff list of the F_p[x] modulus")
    p.add_argument("--r", type=int, help="rank (>= 2)")
    p.add_argument("--ideal", help="level ideal generator, e.g. 't' or 't^2+1'")
    p.add_argument("--fine-ideal", dest="fine_ideal",
                   help="finer level for `restrict` (a multiple of --ideal)")
    p.add_argument("--radius", type=int, help="ball radius N >= 0")
    p.add_argument("--center", help="center class: JSON file or inline JSON")
    p.add_argument("--w1", help="sigma subspace, e.g. 'e1' or 'e1+e2'")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", dest="fmt", choices=("json", "dot"),
                   help="output format (ball only; default json)")
    p.add_argument("--threads", type=int,
                   help="worker budget (execution is sequential; accepted "
                        "for interface stability)")
    p.add_argument("--timing", action="store_true",
                   help="fill the timing field (off keeps output byte-stable)")
    p.add_argument("--enum-cap", dest="enum_cap", type=int)
    p.add_argument("--solution-cap", dest="solution_cap", type=int)
    p.add_argument("--brute-budget", dest="brute_budget", type=int)
    p.add_argument("--vertex-budget", dest="vertex_budget", type=int)
    p.add_argument("--deg-bound", dest="deg_bound", type=int,
                   help="degree bound override for brute cross-checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fqbuilding",
        description="Exact truncations of the Bruhat-Tits building for GL_r "
                    "over F_q(t) with principal congruence levels.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, extra in (
        ("ball", None),
        ("stabilizer", "stab"),
        ("unstable-map", None),
        ("homology", None),
        ("components", None),
        ("restrict", None),
        ("verify", "verify"),
    ):
        sp = sub.add_parser(name)
        _common_args(sp)
        if extra == "stab":
            sp.add_argument("--ids", help="comma vertex ids selecting one simplex")
            sp.add_argument("--with-brute", action="store_true",
                            help="cross-check against the brute-force oracle")
            sp.add_argument("--orbit", metavar="IDS",
                            help="with --ids: search a level element mapping "
                                 "the --ids simplex to this one (bounded "
                                 "degree, one-sided)")
        if extra == "verify":
            sp.add_argument("--checks", help="comma list of check names "
                                             f"(default: all of {len(CHECK_NAMES)})")
    return parser


def _resolve_config(args) -> Config:
    file_vals = _load_config_file(args.config) if args.config else {}

    def pick(flag_val, key, conv=lambda x: x):
        if flag_val is not None:
            return flag_val
        if key in file_vals:
            try:
                return conv(file_vals[key])
            except (ValueError, TypeError):
                raise UsageError(f"config key {key}: bad value "
                                 f"{file_vals[key]!r}") from None
        return None

    q = pick(args.q, "q", int)
    p = pick(args.p, "p", int)
    n = pick(args.n, "n", int)
    modulus_text = pick(args.modulus, "modulus")
    if q is not None:
        try:
            fp, fn = factor_prime_power(q)
        except ValueError as e:
            raise UsageError(f"q: {e}") from None
        if p is not None and p != fp or n is not None and n != fn:
            raise UsageError("q contradicts p/n")
        p, n = fp, fn
    if p is None:
        raise UsageError("missing field: pass --q or --p/--n")
    n = n or 1
    modulus = None
    if modulus_text:
        try:
            modulus = tuple(int(c) for c in modulus_text.split(","))
        except ValueError:
            raise UsageError("modulus: expected comma-separated integers") from None
    try:
        K = GF(p, n, modulus)
    except ValueError as e:
        raise UsageError(f"field: {e}") from None

    r = pick(args.r, "r", int)
    if r is None:
        raise UsageError("missing --r")
    if r < 2:
        raise UsageError("r must be >= 2")

    ideal = None
    ideal_text = pick(args.ideal, "ideal")
    if ideal_text is not None:
        ideal = parse_poly(K, ideal_text)
        if ideal.is_zero() or ideal.is_constant():
            raise UsageError("ideal must be proper and nonzero "
                             "(nonconstant generator)")
    fine = None
    fine_text = pick(args.fine_ideal, "fine_ideal")
    if fine_text is not None:
        fine = parse_poly(K, fine_text)
        if fine.is_zero() or fine.is_constant():
            raise UsageError("fine_ideal must be proper and nonzero")

    radius = pick(args.radius, "radius", int)
    if radius is not None and radius < 0:
        raise UsageError("radius must be >= 0")

    center_text = pick(args.center, "center")
    if center_text:
        text = center_text.strip()
        if not text.startswith("{"):
            try:
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as e:
                raise UsageError(f"center: {e}") from None
        try:
            center = LatticeClass.from_json_dict(K, json.loads(text))
        except (json.JSONDecodeError, ValueError, KeyError) as e:
            raise UsageError(f"center: {e}") from None
        if center.dim != r:
            raise UsageError("center class rank does not match --r")
    else:
        center = LatticeClass.standard(K, r)

    w1 = None
    w1_text = pick(args.w1, "w1")
    if w1_text:
        w1 = parse_w1(K, r, w1_text)

    threads = pick(args.threads, "threads", int) or 1
    if threads < 1:
        raise UsageError("threads must be >= 1")
    budgets = {}
    for key in ("enum_cap", "solution_cap", "brute_budget", "vertex_budget",
                "deg_bound"):
        val = pick(getattr(args, key), key, int)
        if val is not None:
            budgets[key] = val
    fmt = pick(args.fmt, "format") or "json"
    if fmt not in ("json", "dot"):
        raise UsageError("format must be json or dot")
    out = pick(args.out, "out")
    return Config(K, r, ideal, radius, center, fine, w1, out, fmt,
                  threads, args.timing, budgets)


def _require_radius(cfg: Config) -> int:
    if cfg.radius is None:
        raise UsageError("missing --radius")
    return cfg.radius


def _make_ball(cfg: Config) -> Ball:
    kw = {}
    if "vertex_budget" in cfg.budgets:
        kw["vertex_budget"] = cfg.budgets["vertex_budget"]
    return ball(cfg.center, _require_radius(cfg), **kw)


def _simplex_rows(b: Ball):
    for d in range(b.max_dim + 1):
        for s in b.simplices(d):
            yield d, s


# --- commands ----------------------------------------------------------------


def cmd_ball(cfg: Config, opts) -> tuple[dict | str, list[str]]:
    b = _make_ball(cfg)
    ideal_coeffs = list(cfg.ideal.coeffs) if cfg.ideal else None
    if cfg.fmt == "dot":
        return b.export_dot(), []
    return {"ball": b.to_json_dict(ideal_coeffs),
            "counts": {"vertices": b.vertex_count(),
                       "edges": b.edge_count(),
                       "simplices": {str(d): len(b.simplices(d))
                                     for d in range(b.max_dim + 1)}}}, \
        [TRUNCATION_CAPTION]


def cmd_stabilizer(cfg: Config, opts) -> tuple[dict, list[str]]:
    lv = cfg.level()
    b = _make_ball(cfg)
    cache = StabilizerCache(lv)
    wanted = None
    if getattr(opts, "ids", None):
        try:
            wanted = frozenset(int(x) for x in opts.ids.split(","))
        except ValueError:
            raise UsageError("--ids must be comma-separated integers") from None
    rows = []
    selected = None
    for d, s in _simplex_rows(b):
        ids = b.ids(s)
        if wanted is not None and frozenset(ids) != wanted:
            continue
        if wanted is not None:
            selected = s
        H = cache.space(s)
        row = {
            "d": d,
            "ids": list(ids),
            "dim": H.dim,
            "order": stabilizer_order(H),
            "space": H.to_json_dict(),
        }
        if getattr(opts, "with_brute", False):
            bound = cfg.budgets.get("deg_bound",
                                    max(H.space.meta["deg_bound"], 0))
            brute = brute_stab(s, lv, bound,
                               cfg.budgets.get("brute_budget"))
            row["brute_matches"] = set(enumerate_stab(
                H, cfg.budgets.get("enum_cap"))) == set(brute)
            row["brute_bound"] = bound
        rows.append(row)
    if wanted is not None and not rows:
        raise UsageError("--ids does not name a simplex of the ball")
    warnings = [TRUNCATION_CAPTION]
    result = {"level": list(lv.ideal_gen.coeffs), "simplices": rows}
    orbit_spec = getattr(opts, "orbit", None)
    if orbit_spec:
        if selected is None:
            raise UsageError("--orbit requires --ids")
        try:
            target_ids = frozenset(int(x) for x in orbit_spec.split(","))
        except ValueError:
            raise UsageError("--orbit must be comma-separated integers") from None
        target = None
        for _, s in _simplex_rows(b):
            if frozenset(b.ids(s)) == target_ids:
                target = s
        if target is None:
            raise UsageError("--orbit does not name a simplex of the ball")
        bound = cfg.budgets.get("deg_bound",
                                len(lv.ideal_gen.coeffs) - 1 + 2 * b.radius)
        res = orbit_witness(selected, target, lv, bound,
                            cfg.budgets.get("solution_cap"))
        result["orbit"] = res.to_json_dict()
        if res.witness is None and not res.conclusive:
            warnings.append(INCONCLUSIVE_CAPTION)
    return result, warnings


def cmd_unstable_map(cfg: Config, opts) -> tuple[dict, list[str]]:
    lv = cfg.level()
    b = _make_ball(cfg)
    cache = StabilizerCache(lv)
    split = Splitting(cfg.w1) if cfg.w1 else None
    rows = []
    counts: dict[str, int] = {}
    for d, s in _simplex_rows(b):
        H = cache.space(s)
        unstable = H.dim > 0
        row = {"d": d, "ids": list(b.ids(s)), "unstable": unstable,
               "stab_dim": H.dim}
        if unstable:
            row["fixed_space"] = fixed_space(H).to_json_dict()
            counts[str(d)] = counts.get(str(d), 0) + 1
        if split is not None:
            row["in_sigma_region"] = in_sigma_region(s, split, lv)
        rows.append(row)
    return {"level": list(lv.ideal_gen.coeffs), "simplices": rows,
            "unstable_counts": counts}, [TRUNCATION_CAPTION]


def cmd_homology(cfg: Config, opts) -> tuple[dict, list[str]]:
    lv = cfg.level()
    b = _make_ball(cfg)
    cache = StabilizerCache(lv)
    full_aug = full_complex(b, augmented=True, level=lv)
    full_plain = full_complex(b, augmented=False, level=lv)
    un = unstable_complex(b, lv, cache)
    st = stable_complex(b, lv, cache)
    chi = {"full": full_plain.euler(), "unstable": un.euler(),
           "stable": st.complex.euler()}
    chi["additive"] = chi["full"] == chi["unstable"] + chi["stable"]
    top = cfg.r - 1
    rank_by_radius = {}
    for n in range(1, _require_radius(cfg) + 1):
        bn = b if n == b.radius else ball(cfg.center, n)
        stn = stable_complex(bn, lv, cache)
        rank_by_radius[str(n)] = homology(stn.complex).betti.get(top, 0)
    result = {
        "full_reduced": homology(full_aug).to_json_dict(),
        "unstable": homology(un).to_json_dict(),
        "stable": homology(st.complex).to_json_dict(),
        "chi": chi,
        "steinberg_window": {"degree": top, "rank_by_radius": rank_by_radius},
    }
    return result, [TRUNCATION_CAPTION]


def cmd_components(cfg: Config, opts) -> tuple[dict, list[str]]:
    lv = cfg.level()
    b = _make_ball(cfg)
    rep = components(b, lv)
    return rep.to_json_dict(), [TRUNCATION_CAPTION]


def cmd_restrict(cfg: Config, opts) -> tuple[dict, list[str]]:
    lv = cfg.level()
    if cfg.fine_ideal is None:
        raise UsageError("restrict requires --fine-ideal")
    fine_lv = Level(cfg.K, cfg.r, cfg.fine_ideal)
    if not lv.contains_level(fine_lv):
        raise UsageError("level containment violation: --ideal must divide "
                         "--fine-ideal")
    b = _make_ball(cfg)
    fine = stable_complex(b, fine_lv)
    coarse = stable_complex(b, lv)
    rm = restriction_map(fine, coarse)
    return {"restriction": rm.to_json_dict(), "verified_chain_map": True}, \
        [TRUNCATION_CAPTION]


def cmd_verify(cfg: Config, opts) -> tuple[dict, list[str]]:
    names = None
    if getattr(opts, "checks", None):
        names = [c.strip() for c in opts.checks.split(",") if c.strip()]
        bad = [c for c in names if c not in CHECK_NAMES]
        if bad:
            raise UsageError(f"unknown checks: {', '.join(bad)} "
                             f"(known: {', '.join(CHECK_NAMES)})")
    results = run_checks(names, emit=lambda line: print(line, flush=True))
    payload = {
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    return payload, []


_COMMANDS = {
    "ball": cmd_ball,
    "stabilizer": cmd_stabilizer,
    "unstable-map": cmd_unstable_map,
    "homology": cmd_homology,
    "components": cmd_components,
    "restrict": cmd_restrict,
    "verify": cmd_verify,
}


def run(command: str, cfg: Config, opts=None) -> tuple[dict | str, int]:
    """Execute one command; returns (report-or-dot, exit_code)."""
    start = time.perf_counter()
    result, warnings = _COMMANDS[command](cfg, opts)
    elapsed = time.perf_counter() - start
    if isinstance(result, str):  # raw DOT
        return result, 0
    code = 0
    if command == "verify" and not result.get("passed", True):
        code = 1
    report = {
        "command": command,
        "config": cfg.echo(),
        "timing": {"seconds": round(elapsed, 3)} if cfg.timing else None,
        "result": result,
        "warnings": warnings,
    }
    return report, code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        # the verification suite fixes its own configurations
        args.q = args.q or 2
        args.r = args.r or 2
    try:
        cfg = _resolve_config(args)
        payload, code = run(args.command, cfg, args)
    except UsageError as e:
        print(f"fqbuilding: usage error: {e}", file=sys.stderr)
        return 2
    except BudgetError as e:
        print(f"fqbuilding: budget exceeded: {e}", file=sys.stderr)
        return 3
    except AssertionError as e:
        print(json.dumps({"failure": str(e) or "assertion failed"}),
              file=sys.stderr)
        return 1
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"fqbuilding: cannot write output: {e}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
