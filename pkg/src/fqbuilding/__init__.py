"""Exact finite truncations of the Bruhat-Tits building for GL_r over
F_q(t), principal congruence stabilizers, the unstable/stable decomposition,
and truncated Steinberg homology."""

from .gf import GF, gf
from .rfunc import Poly, Rat, poly, poly_const, poly_one, poly_t, rat, rat_pi, v_inf
from .fqlinalg import LinearSystem, kernel_basis, rref, solve_fq
from .intsnf import IntMatrix, SnfResult, snf, snf_with_transforms
from .lattices import (
    Lattice,
    LatticeClass,
    SectionSpace,
    SingularBasisError,
    canonical_class,
    distance,
    global_sections,
    hom_sections,
    matrix_sections,
    rel_position,
)
from .building import (
    Ball,
    BudgetError,
    Simplex,
    Vertex,
    ball,
    ball_from_json,
    gaussian_binomial,
    neighbor_count,
    neighbors,
)
from .congruence import (
    GroupElt,
    Level,
    OrbitSearchResult,
    Splitting,
    StabilizerCache,
    StabilizerSpace,
    SubspaceK,
    apply_elt,
    augmentation,
    brute_stab,
    deform_lattice,
    enumerate_stab,
    fixed_space,
    in_sigma_region,
    is_unstable,
    lift_lattice,
    orbit_witness,
    project_lattice,
    random_element,
    sigma_fixing_space,
    stabilizer_order,
    stabilizer_space,
    vertex_stab_space,
)
from .homology import (
    ChainComplex,
    Component,
    ComponentReport,
    HomologyResult,
    RestrictionMap,
    StableComplex,
    components,
    full_complex,
    homology,
    restriction_map,
    stable_complex,
    unstable_complex,
)

__version__ = "0.1.0"
