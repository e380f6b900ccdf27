"""Mutual averaged non-commutativity of finite-dimensional operator algebras."""

from .rng import RngStream
from .linalg import (
    SuperOperator,
    haar_state,
    haar_unitary,
    hs_inner,
    hs_norm,
    hs_norm_sq,
    orthonormalize_hs,
    partial_trace,
    reshuffle,
    swap_operator,
)
from .algebras import (
    BlockBases,
    OperatorAlgebra,
    StructuralDecomposition,
    algebra_from_generators,
    algebra_intersection,
    algebras_equal,
    block_bases,
    center,
    commutant,
    decompose,
    diagonal_masa,
    full_algebra,
    haar_algebra_unitary,
    is_collinear,
    lattice_algebra,
    masa_from_unitary,
    projection_map,
    structural_algebra,
    trivial_algebra,
)
from .man import (
    ManReport,
    OmegaOperator,
    a_otoc,
    entropy_decomposition_man,
    lattice_man,
    man_bounds,
    man_collinear,
    man_omega,
    man_projection,
    masa_man,
    omega_operator,
    orbit_averaged_man,
    quantumness,
    self_man,
)
from .protocols import (
    AlgebraState,
    EstimatorResult,
    algebra_state,
    markov_bound_check,
    mc_man_direct,
    mc_orbit_averaged_man,
    protocol_choi,
    protocol_stochastic,
    restricted_distance,
)

__version__ = "0.1.0"
