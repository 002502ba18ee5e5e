"""Geodesic-based verification of the near-diagonal kernel expansions."""

from .expansions import (
    DiagonalExpansionFits,
    ExpansionFit,
    diagonal_expansions,
    default_t_samples,
    expansion_predictions,
    fit_powers,
    v1_diagonal,
)
from .geodesic import (
    GeodesicSolver,
    GeodesicState,
    ShootingResult,
    integrate_geodesic,
    shoot_connect,
    volume_distortion,
    world_function,
)
from .riesz import LimitConstants, limit_constants, riesz_constant

__all__ = [
    "DiagonalExpansionFits",
    "ExpansionFit",
    "diagonal_expansions",
    "default_t_samples",
    "expansion_predictions",
    "fit_powers",
    "v1_diagonal",
    "GeodesicSolver",
    "GeodesicState",
    "ShootingResult",
    "integrate_geodesic",
    "shoot_connect",
    "volume_distortion",
    "world_function",
    "LimitConstants",
    "limit_constants",
    "riesz_constant",
]
