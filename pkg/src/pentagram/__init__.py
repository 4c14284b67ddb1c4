"""Pentagram map on twisted polygons: coordinates, Lax matrices, spectral data
and the invariant Poisson structure."""
from .coords import (
    ABCoords,
    XYCoords,
    ab_to_xy,
    orbit,
    pentagram,
    pentagram_ab,
    pentagram_xy,
    xy_to_ab,
)
from .errors import DegeneracyError, PentagramError
from .io import PolygonFile
from .laurent import LaurentMatrix3, LaurentPoly
from .lax import (
    gauge_reduce,
    gauge_relation_check,
    lax_matrix,
    monodromy_T,
    monodromy_T_inv,
    pmatrix,
    zero_curvature_residual,
)
from .polygon import (
    ProjectiveLine,
    ProjectivePoint,
    VertexChain,
    ab_from_chain,
    chain_from_ab,
    pentagram_step_geometric,
    projectively_equivalent,
    xy_from_chain,
)
from .spectral import (
    SpectralInvariants,
    branch_points,
    casimir_map,
    chain_invariants,
    closed_polygon_relations,
    conservation_drift,
    floquet_bloch,
    invariants,
    marked_point_limits,
    singularity_expansions_check,
)
from .symplectic import (
    bracket_invariance_check,
    involution_check,
    omega0_matrix,
    omega_invariance_check,
    onleaf_inverse_check,
    poisson_matrix,
)

__all__ = [
    "ABCoords",
    "XYCoords",
    "ab_to_xy",
    "xy_to_ab",
    "pentagram",
    "pentagram_ab",
    "pentagram_xy",
    "orbit",
    "PentagramError",
    "DegeneracyError",
    "PolygonFile",
    "LaurentPoly",
    "LaurentMatrix3",
    "lax_matrix",
    "pmatrix",
    "monodromy_T",
    "monodromy_T_inv",
    "zero_curvature_residual",
    "gauge_reduce",
    "gauge_relation_check",
    "ProjectivePoint",
    "ProjectiveLine",
    "VertexChain",
    "ab_from_chain",
    "chain_from_ab",
    "xy_from_chain",
    "pentagram_step_geometric",
    "projectively_equivalent",
    "SpectralInvariants",
    "invariants",
    "chain_invariants",
    "conservation_drift",
    "casimir_map",
    "closed_polygon_relations",
    "branch_points",
    "singularity_expansions_check",
    "floquet_bloch",
    "marked_point_limits",
    "poisson_matrix",
    "omega0_matrix",
    "involution_check",
    "bracket_invariance_check",
    "onleaf_inverse_check",
    "omega_invariance_check",
]
