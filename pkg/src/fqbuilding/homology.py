"""Integer chain complexes of truncated balls, the unstable subcomplex, the
stable quotient, homology via Smith normal form, unstable components, and
level-restriction chain maps.

Conventions.  Generators in degree d are the d-simplices of the ball with
vertices written in increasing type order; the boundary is the alternating
face sum (drop vertex j with sign (-1)^j) and the optional augmentation sends
every vertex to 1.  Generator order is the lexicographic order of the
vertex-id tuples (ball BFS ids), which fixes every matrix layout.

Truncation honesty: every result object carries (radius, level) metadata and
consumers must treat the values as windows onto the infinite complex.  The
top-degree homology of the stable complex is the truncated stand-in for the
level's Steinberg module; only its behavior under radius growth is reported,
never a claim about the infinite module.
"""

from __future__ import annotations

from .building import Ball, Simplex
from .congruence import Level, StabilizerCache, SubspaceK, fixed_space
from .intsnf import IntMatrix, snf


class ChainComplex:
    """Graded free Z-modules on simplices with sparse boundary matrices;
    boundary(d): C_d -> C_(d-1) for d >= 1, plus an augmentation row when
    augmented.  d^2 = 0 is verified at construction."""

    def __init__(self, gens: dict[int, list[Simplex]], augmented: bool,
                 meta: dict | None = None, _boundaries=None):
        self.gens = {d: list(g) for d, g in gens.items() if g}
        if 0 not in self.gens:
            self.gens[0] = []
        self.augmented = augmented
        self.meta = dict(meta or {})
        self.index = {
            d: {s: i for i, s in enumerate(g)} for d, g in self.gens.items()
        }
        self.boundaries: dict[int, IntMatrix] = {}
        if _boundaries is not None:
            self.boundaries = dict(_boundaries)
        else:
            for d in sorted(self.gens):
                if d == 0:
                    continue
                self.boundaries[d] = _face_boundary(
                    self.gens[d], self.index.get(d - 1, {}),
                    len(self.gens.get(d - 1, ())))
        if augmented:
            n0 = len(self.gens[0])
            self.aug = IntMatrix(1, n0, {(0, j): 1 for j in range(n0)})
        else:
            self.aug = None
        self._check_d_squared()

    def _check_d_squared(self):
        for d in sorted(self.boundaries):
            if d - 1 in self.boundaries:
                if not self.boundaries[d - 1].mul(self.boundaries[d]).is_zero():
                    raise AssertionError(f"d^2 != 0 between degrees {d} and {d-2}")
        if self.aug is not None and 1 in self.boundaries:
            if not self.aug.mul(self.boundaries[1]).is_zero():
                raise AssertionError("augmentation does not kill boundaries")

    @property
    def top(self) -> int:
        return max(self.gens)

    def rank(self, d: int) -> int:
        return len(self.gens.get(d, ()))

    def euler(self) -> int:
        """Alternating sum of chain ranks over degrees >= 0."""
        return sum((-1) ** d * len(g) for d, g in self.gens.items())

    def boundary(self, d: int) -> IntMatrix:
        if d in self.boundaries:
            return self.boundaries[d]
        return IntMatrix(self.rank(d - 1), self.rank(d), {})


def _face_boundary(gens_d, index_dm1, nrows) -> IntMatrix:
    data = {}
    for c, s in enumerate(gens_d):
        for j, face in enumerate(s.faces()):
            i = index_dm1.get(face)
            if i is None:
                raise AssertionError("face of a generator is missing from the complex")
            data[(i, c)] = 1 if j % 2 == 0 else -1
    return IntMatrix(nrows, len(gens_d), data)


def full_complex(b: Ball, augmented: bool = True,
                 level: Level | None = None) -> ChainComplex:
    """Chain complex of all ball simplices, type-sorted generators, boundary
    signs (-1)^j on the j-th face; the augmentation row (present iff
    requested) sends every vertex to 1."""
    gens = {d: b.simplices(d) for d in range(b.max_dim + 1) if b.simplices(d)}
    meta = {"radius": b.radius, "augmented": augmented, "kind": "full",
            "level": list(level.ideal_gen.coeffs) if level else None}
    return ChainComplex(gens, augmented, meta)


def unstable_complex(b: Ball, lv: Level,
                     cache: StabilizerCache | None = None) -> ChainComplex:
    """Subcomplex on the simplices with nontrivial level stabilizer.  The
    generator set is face-closed (stabilizers only grow along faces); this is
    asserted during construction."""
    cache = cache or StabilizerCache(lv)
    gens: dict[int, list[Simplex]] = {}
    for d in range(b.max_dim + 1):
        sel = [s for s in b.simplices(d) if cache.is_unstable(s)]
        if sel:
            gens[d] = sel
    for d in sorted(gens):
        if d == 0:
            continue
        idx = {s: None for s in gens.get(d - 1, ())}
        for s in gens[d]:
            for face in s.faces():
                if face not in idx:
                    raise AssertionError("unstable simplex set is not face-closed")
    meta = {"radius": b.radius, "augmented": False, "kind": "unstable",
            "level": list(lv.ideal_gen.coeffs)}
    return ChainComplex(gens, False, meta)


class StableComplex:
    """Quotient of the full complex by the unstable subcomplex, realized on
    the stable generators with boundary entries to unstable faces deleted
    ("the unstable symbol is zero").  Built both as a cokernel presentation
    and directly, and the two are compared entry by entry."""

    def __init__(self, complex_: ChainComplex, level: Level, ball: Ball,
                 unstable_counts: dict[int, int]):
        self.complex = complex_
        self.level = level
        self.ball = ball
        self.unstable_counts = unstable_counts

    @property
    def top(self) -> int:
        return self.complex.top

    def __repr__(self):
        return f"StableComplex(level={self.level!r}, ranks={ {d: self.complex.rank(d) for d in sorted(self.complex.gens)} })"


def stable_complex(b: Ball, lv: Level,
                   cache: StabilizerCache | None = None) -> StableComplex:
    cache = cache or StabilizerCache(lv)
    full = full_complex(b, augmented=False, level=lv)
    stable_gens: dict[int, list[Simplex]] = {}
    unstable_counts: dict[int, int] = {}
    flags: dict[int, list[bool]] = {}
    for d in sorted(full.gens):
        fl = [cache.is_unstable(s) for s in full.gens[d]]
        flags[d] = fl
        sel = [s for s, unst in zip(full.gens[d], fl) if not unst]
        unstable_counts[d] = sum(fl)
        if sel:
            stable_gens[d] = sel

    # direct construction: boundary with unstable faces dropped
    direct_bnd: dict[int, IntMatrix] = {}
    stable_index = {d: {s: i for i, s in enumerate(g)} for d, g in stable_gens.items()}
    for d in sorted(stable_gens):
        if d == 0:
            continue
        data = {}
        for c, s in enumerate(stable_gens[d]):
            for j, face in enumerate(s.faces()):
                i = stable_index.get(d - 1, {}).get(face)
                if i is not None:
                    data[(i, c)] = 1 if j % 2 == 0 else -1
        direct_bnd[d] = IntMatrix(len(stable_gens.get(d - 1, ())),
                                  len(stable_gens[d]), data)

    # cokernel presentation: full boundary restricted to stable columns with
    # unstable rows projected away
    for d in sorted(stable_gens):
        if d == 0:
            continue
        fb = full.boundary(d)
        row_map = {}
        i_new = 0
        for i, s in enumerate(full.gens.get(d - 1, ())):
            if not flags[d - 1][i]:
                row_map[i] = i_new
                i_new += 1
        col_map = {}
        c_new = 0
        for c, s in enumerate(full.gens[d]):
            if not flags[d][c]:
                col_map[c] = c_new
                c_new += 1
        data = {}
        for (i, c), v in fb.data.items():
            if i in row_map and c in col_map:
                data[(row_map[i], col_map[c])] = v
        coker = IntMatrix(len(stable_gens.get(d - 1, ())),
                          len(stable_gens[d]), data)
        if coker != direct_bnd[d]:
            raise AssertionError(
                "cokernel and direct stable constructions disagree")

    meta = {"radius": b.radius, "augmented": False, "kind": "stable",
            "level": list(lv.ideal_gen.coeffs)}
    cc = ChainComplex(stable_gens, False, meta, _boundaries=direct_bnd)
    return StableComplex(cc, lv, b, unstable_counts)


class HomologyResult:
    """Per-degree betti numbers and torsion, with truncation metadata.  The
    Euler characteristic recomputed from betti numbers must match the
    alternating chain-rank sum (enforced at construction)."""

    def __init__(self, betti: dict[int, int], torsion: dict[int, list[int]],
                 meta: dict):
        self.betti = betti
        self.torsion = torsion
        self.meta = meta

    def to_json_dict(self) -> dict:
        return {
            "degrees": {
                str(d): {"betti": self.betti[d], "torsion": list(self.torsion[d])}
                for d in sorted(self.betti)
            },
            "meta": self.meta,
        }

    def __repr__(self):
        return f"HomologyResult(betti={self.betti}, torsion={self.torsion})"


def homology(cc: ChainComplex) -> HomologyResult:
    """Kernel/image ranks and torsion per degree via integer SNF.  For an
    augmented complex the degree-0 value is the reduced one."""
    degrees = sorted(cc.gens)
    top = degrees[-1]
    rank_of: dict[int, int] = {}
    torsion_of: dict[int, list[int]] = {}
    for d in degrees:
        if d == 0:
            continue
        res = snf(cc.boundary(d))
        rank_of[d] = res.rank
        torsion_of[d] = res.torsion
    betti: dict[int, int] = {}
    torsion: dict[int, list[int]] = {}
    for d in degrees:
        n = cc.rank(d)
        r_d = rank_of.get(d, 0)
        if d == 0 and cc.augmented:
            r_d = 1 if n else 0
        r_up = rank_of.get(d + 1, 0)
        betti[d] = n - r_d - r_up
        torsion[d] = torsion_of.get(d + 1, [])
    total = sum((-1) ** d * betti[d] for d in degrees)
    chain = sum((-1) ** d * cc.rank(d) for d in degrees)
    if cc.augmented:
        chain -= 1
    if total != chain:
        raise AssertionError("Euler characteristic mismatch between homology "
                             "and chain ranks")
    meta = dict(cc.meta)
    return HomologyResult(betti, torsion, meta)


class Component:
    """One connected component of the unstable 1-skeleton."""

    def __init__(self, vertex_ids, simplex_ids, fixed: SubspaceK,
                 tree_in_ball: bool, touches_boundary: bool):
        self.vertex_ids = vertex_ids
        self.simplex_ids = simplex_ids  # dict d -> list of id tuples
        self.fixed = fixed
        self.tree_in_ball = tree_in_ball
        self.touches_boundary = touches_boundary

    def to_json_dict(self) -> dict:
        return {
            "vertices": list(self.vertex_ids),
            "simplices": {str(d): [list(t) for t in ts]
                          for d, ts in self.simplex_ids.items()},
            "fixed_space": self.fixed.to_json_dict(),
            "tree_in_ball": self.tree_in_ball,
            "touches_boundary": self.touches_boundary,
        }


class ComponentReport:
    def __init__(self, components: list[Component], meta: dict):
        self.components = components
        self.meta = meta

    def __len__(self):
        return len(self.components)

    def to_json_dict(self) -> dict:
        return {"components": [c.to_json_dict() for c in self.components],
                "meta": self.meta}


def components(b: Ball, lv: Level,
               cache: StabilizerCache | None = None) -> ComponentReport:
    """Connected components of the unstable 1-skeleton inside the ball, each
    with all its unstable simplices, the common fixed subspace of all their
    stabilizers, a within-ball acyclicity flag, and a boundary-contact flag."""
    cache = cache or StabilizerCache(lv)
    unstable_v = [v.id for v in b.vertices if cache.is_unstable(v.cls)]
    vset = set(unstable_v)
    parent = {i: i for i in unstable_v}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for s in b.simplices(1):
        if cache.is_unstable(s):
            i, j = b.ids(s)
            edges.append((i, j))
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in unstable_v:
        groups.setdefault(find(i), []).append(i)
    out = []
    for root in sorted(groups, key=lambda r: min(groups[r])):
        ids = sorted(groups[root])
        idset = set(ids)
        simplex_ids: dict[int, list] = {}
        comp_simplices = []
        for d in range(b.max_dim + 1):
            picked = [s for s in b.simplices(d)
                      if cache.is_unstable(s) and set(b.ids(s)) <= idset]
            if picked:
                simplex_ids[d] = [b.ids(s) for s in picked]
                comp_simplices.extend(picked)
        fixed = None
        for s in comp_simplices:
            fs = fixed_space(cache.space(s))
            fixed = fs if fixed is None else fixed.intersect(fs)
        n_edges = sum(1 for (i, j) in edges if i in idset)
        tree = n_edges == len(ids) - 1
        touches = any(b.dist[i] == b.radius for i in ids)
        out.append(Component(ids, simplex_ids, fixed, tree, touches))
    assert sum(len(c.vertex_ids) for c in out) == len(vset)
    meta = {"radius": b.radius, "level": list(lv.ideal_gen.coeffs)}
    return ComponentReport(out, meta)


class RestrictionMap:
    """Chain map from the stable complex at a finer level onto the stable
    complex at a coarser level: a generator maps to itself when it stays
    stable and to zero when it becomes unstable."""

    def __init__(self, maps: dict[int, IntMatrix], fine: StableComplex,
                 coarse: StableComplex, killed: dict[int, int]):
        self.maps = maps
        self.fine = fine
        self.coarse = coarse
        self.killed = killed

    def to_json_dict(self) -> dict:
        return {
            "fine_level": list(self.fine.level.ideal_gen.coeffs),
            "coarse_level": list(self.coarse.level.ideal_gen.coeffs),
            "killed_per_degree": {str(d): k for d, k in self.killed.items()},
            "matrices": {
                str(d): [[i, j, v] for (i, j), v in sorted(m.data.items())]
                for d, m in self.maps.items()
            },
        }


def restriction_map(fine: StableComplex, coarse: StableComplex) -> RestrictionMap:
    """Generator-wise restriction between stable complexes on the same ball;
    requires level containment (coarse generator divides fine generator) and
    asserts commutation with the boundaries."""
    if not coarse.level.contains_level(fine.level):
        raise ValueError("level containment violation: coarse ideal must "
                         "contain the fine ideal")
    if fine.ball is not coarse.ball:
        if fine.ball.to_json_dict() != coarse.ball.to_json_dict():
            raise ValueError("restriction requires the same ball")
    maps: dict[int, IntMatrix] = {}
    killed: dict[int, int] = {}
    fine_cc, coarse_cc = fine.complex, coarse.complex
    degrees = sorted(set(fine_cc.gens) | set(coarse_cc.gens))
    for d in degrees:
        data = {}
        kill = 0
        cidx = coarse_cc.index.get(d, {})
        for c, s in enumerate(fine_cc.gens.get(d, ())):
            i = cidx.get(s)
            if i is None:
                kill += 1
            else:
                data[(i, c)] = 1
        maps[d] = IntMatrix(coarse_cc.rank(d), fine_cc.rank(d), data)
        killed[d] = kill
        # every coarse-stable simplex is fine-stable, so the map is onto
        if len(data) != coarse_cc.rank(d):
            raise AssertionError("restriction map is not onto the coarse generators")
    for d in degrees:
        if d == 0:
            continue
        lhs = coarse_cc.boundary(d).mul(maps[d])
        rhs = maps[d - 1].mul(fine_cc.boundary(d))
        if lhs != rhs:
            raise AssertionError("restriction map does not commute with boundaries")
    return RestrictionMap(maps, fine, coarse, killed)
