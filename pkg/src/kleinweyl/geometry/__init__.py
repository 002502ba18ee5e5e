"""Chart-based differential geometry engine for stationary spacetimes."""

from .chart import Field, PeriodicChart, TrigSeries, array_derivative, spectral_derivative
from .curvature import CurvaturePack, christoffel, curvature
from .killing import (
    ConformalPack,
    KillingPack,
    conformal_pack,
    killing_equation_residual,
    killing_quantities,
)
from .stationary import (
    SpacetimeMetric,
    StationaryData,
    assemble_spacetime_metric,
    dalembert_scalar,
    read_back_stationary,
)

__all__ = [
    "Field",
    "PeriodicChart",
    "TrigSeries",
    "array_derivative",
    "spectral_derivative",
    "CurvaturePack",
    "christoffel",
    "curvature",
    "ConformalPack",
    "KillingPack",
    "conformal_pack",
    "killing_equation_residual",
    "killing_quantities",
    "SpacetimeMetric",
    "StationaryData",
    "assemble_spacetime_metric",
    "dalembert_scalar",
    "read_back_stationary",
]
