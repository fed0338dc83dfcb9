"""Finite truncations of the building: neighbor enumeration, BFS balls,
simplex tables, DOT/JSON export.

Vertices are homothety classes of lattices (lattices.LatticeClass).  Two
classes are adjacent when suitable representatives satisfy
pi L < L' < L; the neighbors of <L> correspond exactly to the proper nonzero
F_q-subspaces of L/(pi L) = F_q^r, enumerated here by echelon form so each
neighbor appears once.  A d-simplex is a set of d+1 pairwise adjacent classes
admitting representatives L_0 > L_1 > ... > L_d > pi L_0; Simplex construction
verifies this chain and stores the vertices sorted by type.

A Ball is the radius-N BFS closure of a center class, with deterministic
vertex ids (BFS level order, canonical-form tie-break inside a level) and,
optionally, all simplices whose vertices lie in the ball.  Truncation
semantics: a simplex belongs to the ball iff every vertex does; consumers of
ball homology must treat the results as truncated windows of the infinite
complex.
"""

from __future__ import annotations

import json
from itertools import combinations, product
from typing import NamedTuple

from .fqlinalg import rref
from .gf import GF
from .lattices import LatticeClass, rel_position
from .rfunc import laurent_coeffs
from .rfunc import rat_const, rat_pi, rat_zero


class BudgetError(RuntimeError):
    """A configured resource budget was exceeded."""


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def neighbor_count(r: int, q: int) -> int:
    """Number of proper nonzero subspaces of F_q^r."""
    return sum(gaussian_binomial(r, k, q) for k in range(1, r))


def echelon_subspaces(K: GF, r: int, k: int):
    """All k-dimensional subspaces of F_q^r, one reduced-echelon basis each,
    in deterministic order.  Rows are tuples of field elements."""
    for pivots in combinations(range(r), k):
        free_slots = [
            (i, j)
            for i in range(k)
            for j in range(r)
            if j > pivots[i] and j not in pivots
        ]
        for values in product(K.elements(), repeat=len(free_slots)):
            rows = [[0] * r for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free_slots, values):
                rows[i][j] = v
            yield tuple(tuple(row) for row in rows)


def neighbors(cls: LatticeClass) -> list[LatticeClass]:
    """All classes <L'> with pi L < L' < L, via subspaces of L/(pi L)."""
    K = cls.K
    r = cls.dim
    H = cls.lattice.mat
    z = rat_zero(K)
    pi = rat_pi(K, 1)
    consts = [rat_const(K, c) for c in range(K.q)]
    pi_cols = [tuple(H[i][j] * pi if not H[i][j].is_zero() else z
                     for i in range(r)) for j in range(r)]
    out = []
    for k in range(1, r):
        for rows in echelon_subspaces(K, r, k):
            lift_cols = []
            for s in rows:
                col = []
                for i in range(r):
                    acc = None
                    for j, c in enumerate(s):
                        if c and not H[i][j].is_zero():
                            term = H[i][j] * consts[c]
                            acc = term if acc is None else acc + term
                    col.append(acc if acc is not None else z)
                lift_cols.append(tuple(col))
            mat = [
                [lift_cols[c][i] for c in range(k)] + [pi_cols[j][i] for j in range(r)]
                for i in range(r)
            ]
            out.append(LatticeClass.from_columns(K, mat))
    return out


class Vertex(NamedTuple):
    id: int
    cls: LatticeClass


class Simplex:
    """Type-sorted tuple of pairwise adjacent classes forming a flag chain.

    Construction verifies the defining chain condition: representatives are
    built with the first vertex on top and the rest scaled into [pi L, L],
    then checked to be totally ordered by inclusion.
    """

    __slots__ = ("classes",)

    def __init__(self, classes, _validated: bool = False):
        classes = tuple(sorted(classes, key=lambda c: c.vtype))
        if not classes:
            raise ValueError("empty simplex")
        if not _validated:
            _validate_chain(classes)
        object.__setattr__(self, "classes", classes)

    def __setattr__(self, *a):
        raise AttributeError("Simplex is immutable")

    @property
    def dim(self) -> int:
        return len(self.classes) - 1

    @property
    def types(self) -> tuple[int, ...]:
        return tuple(c.vtype for c in self.classes)

    def faces(self) -> list["Simplex"]:
        if self.dim == 0:
            return []
        return [
            Simplex(self.classes[:j] + self.classes[j + 1:], _validated=True)
            for j in range(len(self.classes))
        ]

    def __eq__(self, other):
        return isinstance(other, Simplex) and self.classes == other.classes

    def __hash__(self):
        return hash(self.classes)

    def __repr__(self):
        return f"Simplex(dim={self.dim}, types={self.types})"


def _validate_chain(classes):
    types = [c.vtype for c in classes]
    if len(set(types)) != len(types):
        raise ValueError("simplex vertices must have pairwise distinct types")
    if len(classes) == 1:
        return
    K = classes[0].K
    r = classes[0].dim
    top = classes[0].lattice
    scaled = []
    for c in classes[1:]:
        exps = rel_position(top, c.lattice)
        if exps[-1] - exps[0] != 1:
            raise ValueError("simplex vertices must be pairwise adjacent to the top")
        scaled.append(c.lattice.scale(-exps[0]))
    # reduce each middle lattice to its subspace of top/(pi top)
    subs = []
    for M in scaled:
        rows = []
        for j in range(r):
            col = top.coords(tuple(M.mat[i][j] for i in range(r)))
            rows.append(tuple(_residue(x) for x in col))
        red, _ = rref(K, [list(row) for row in rows])
        subs.append((len(red), tuple(tuple(r_) for r_ in red), M))
    subs.sort(key=lambda t: -t[0])
    dims = [s[0] for s in subs]
    if len(set(dims)) != len(dims) or any(d in (0, r) for d in dims):
        raise ValueError("no chain of representatives exists (dimension clash)")
    for (d1, s1, _), (d2, s2, _) in zip(subs, subs[1:]):
        if not _subspace_contains(K, s1, s2):
            raise ValueError("no chain of representatives exists")


def _residue(x) -> int:
    """Image of x in R/(pi R) = F_q (constant term of the pi expansion)."""
    if x.is_zero():
        return 0
    lo, cs = laurent_coeffs(x, 1)
    if lo > 0:
        return 0
    if lo < 0:
        raise ValueError("element is not integral")
    return cs[0]


def _subspace_contains(K: GF, big_rows, small_rows) -> bool:
    red, pivots = rref(K, [list(r) for r in big_rows])
    for v in small_rows:
        v = list(v)
        for r, pc in zip(red, pivots):
            if v[pc]:
                f = v[pc]
                v = [K.sub(x, K.mul(f, y)) for x, y in zip(v, r)]
        if any(v):
            return False
    return True


class Ball:
    """Radius-N BFS closure of a center vertex with simplex tables."""

    def __init__(self, center: LatticeClass, radius: int, *, max_dim: int | None = None,
                 vertex_budget: int | None = None):
        from .budgets import budget

        vertex_budget = budget("FQBUILDING_VERTEX_BUDGET", vertex_budget)
        if radius < 0:
            raise ValueError("radius must be >= 0")
        self.K: GF = center.K
        self.r: int = center.dim
        self.center = center
        self.radius = radius
        self.vertices: list[Vertex] = [Vertex(0, center)]
        self.index: dict[LatticeClass, int] = {center: 0}
        self.dist: list[int] = [0]
        top_dim = self.r - 1 if max_dim is None else min(max_dim, self.r - 1)
        self.max_dim = top_dim

        nbr_cache: dict[LatticeClass, list[LatticeClass]] = {}
        frontier = [center]
        for level in range(1, radius + 1):
            seen_new: dict[LatticeClass, None] = {}
            for c in frontier:
                nbr_cache[c] = neighbors(c)
                for nb in nbr_cache[c]:
                    if nb not in self.index and nb not in seen_new:
                        seen_new[nb] = None
            new = sorted(seen_new, key=lambda c: c.sort_key())
            for c in new:
                vid = len(self.vertices)
                self.vertices.append(Vertex(vid, c))
                self.index[c] = vid
                self.dist.append(level)
                if len(self.vertices) > vertex_budget:
                    raise BudgetError(
                        f"ball exceeded vertex budget {vertex_budget}")
            frontier = new
            if not frontier:
                break

        self.adj: list[set[int]] = [set() for _ in self.vertices]
        for v in self.vertices:
            nbrs = nbr_cache.get(v.cls)
            if nbrs is None:
                nbrs = neighbors(v.cls)
            for nb in nbrs:
                j = self.index.get(nb)
                if j is not None and j != v.id:
                    self.adj[v.id].add(j)
                    self.adj[j].add(v.id)

        self._simplices: dict[int, list[Simplex]] = {}
        self._build_simplices(top_dim)

    def _build_simplices(self, top_dim: int):
        self._simplices[0] = [Simplex((v.cls,), _validated=True) for v in self.vertices]
        if top_dim < 1:
            return
        cliques = [(i, j) for i in range(len(self.vertices)) for j in sorted(self.adj[i])
                   if j > i]
        simps = [Simplex((self.vertices[i].cls, self.vertices[j].cls)) for i, j in cliques]
        order = sorted(range(len(simps)), key=lambda s: self.ids(simps[s]))
        self._simplices[1] = [simps[s] for s in order]
        prev = [cliques[s] for s in order]
        for d in range(2, top_dim + 1):
            cur_ids = []
            cur = []
            for tup in prev:
                common = set(self.adj[tup[0]])
                for i in tup[1:]:
                    common &= self.adj[i]
                for j in sorted(common):
                    if j > tup[-1]:
                        ids = tup + (j,)
                        cur_ids.append(ids)
                        cur.append(Simplex(tuple(self.vertices[i].cls for i in ids)))
            order = sorted(range(len(cur)), key=lambda s: self.ids(cur[s]))
            self._simplices[d] = [cur[s] for s in order]
            prev = [cur_ids[s] for s in order]
            if not cur:
                break

    # --- queries -----------------------------------------------------------

    def vertex_count(self) -> int:
        return len(self.vertices)

    def edge_count(self) -> int:
        return len(self._simplices.get(1, ()))

    def simplices(self, d: int) -> list[Simplex]:
        if d < 0:
            raise ValueError("dimension must be >= 0")
        return list(self._simplices.get(d, ()))

    def contains_class(self, cls: LatticeClass) -> bool:
        return cls in self.index

    def contains_simplex(self, s: Simplex) -> bool:
        return all(c in self.index for c in s.classes)

    def ids(self, s: Simplex) -> tuple[int, ...]:
        return tuple(self.index[c] for c in s.classes)

    def vertex_distance_to_center(self, vid: int) -> int:
        return self.dist[vid]

    def bfs_distance(self, a, b):
        """Shortest-path length inside the 1-skeleton; None when unreachable
        within the ball (distinct from 0)."""
        ia = a.id if isinstance(a, Vertex) else (self.index[a] if isinstance(a, LatticeClass) else a)
        ib = b.id if isinstance(b, Vertex) else (self.index[b] if isinstance(b, LatticeClass) else b)
        if ia == ib:
            return 0
        seen = {ia: 0}
        frontier = [ia]
        while frontier:
            nxt = []
            for u in frontier:
                du = seen[u]
                for w in self.adj[u]:
                    if w not in seen:
                        seen[w] = du + 1
                        if w == ib:
                            return du + 1
                        nxt.append(w)
            frontier = nxt
        return None

    # --- export ------------------------------------------------------------

    def export_dot(self) -> str:
        lines = ["graph ball {"]
        for v in self.vertices:
            lines.append(f'  "{v.id}" [label="{v.id}:{v.cls.vtype}"];')
        for s in self._simplices.get(1, ()):
            i, j = sorted(self.ids(s))
            lines.append(f'  "{i}" -- "{j}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self, ideal_coeffs=None) -> dict:
        return {
            "params": {
                "p": self.K.p,
                "n": self.K.n,
                "r": self.r,
                "ideal": list(ideal_coeffs) if ideal_coeffs is not None else None,
                "radius": self.radius,
            },
            "vertices": [
                {"id": v.id, "class": v.cls.to_json_dict(), "type": v.cls.vtype}
                for v in self.vertices
            ],
            "simplices": {
                str(d): [list(self.ids(s)) for s in self._simplices[d]]
                for d in sorted(self._simplices)
                if d >= 1
            },
        }

    def export_json(self, ideal_coeffs=None) -> str:
        return json.dumps(self.to_json_dict(ideal_coeffs), sort_keys=True) + "\n"


def ball(center: LatticeClass, radius: int, **kw) -> Ball:
    return Ball(center, radius, **kw)


def ball_from_json(data, K: GF | None = None) -> Ball:
    """Reconstruct a Ball from the JSON schema; the result re-derives its
    internal tables and must round-trip to identical JSON."""
    from .gf import gf

    if isinstance(data, str):
        data = json.loads(data)
    params = data["params"]
    if K is None:
        K = gf(params["p"] ** params["n"])
    verts = sorted(data["vertices"], key=lambda v: v["id"])
    if [v["id"] for v in verts] != list(range(len(verts))):
        raise ValueError("vertex ids must be dense and 0-based")
    center = LatticeClass.from_json_dict(K, verts[0]["class"])
    b = Ball(center, params["radius"])
    if b.to_json_dict(params["ideal"]) != data:
        raise ValueError("ball JSON does not match its canonical reconstruction")
    return b
