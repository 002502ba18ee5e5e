"""Discretized and analytic spectra of the time-translation generator."""

from .pencil import Pencil, build_pencil, linearize, mode_table
from .solve import (
    SpectralFilters,
    SpectrumResult,
    analytic_spectrum,
    solve_spectrum,
    spectrum_of_pencil,
)
from .traces import (
    ExpansionFitHeat,
    WeylCheckReport,
    counting_function,
    fit_heat_expansion,
    heat_t_floor,
    heat_trace,
    weyl_check,
)

__all__ = [
    "Pencil",
    "build_pencil",
    "linearize",
    "mode_table",
    "SpectralFilters",
    "SpectrumResult",
    "analytic_spectrum",
    "solve_spectrum",
    "spectrum_of_pencil",
    "ExpansionFitHeat",
    "WeylCheckReport",
    "counting_function",
    "fit_heat_expansion",
    "heat_t_floor",
    "heat_trace",
    "weyl_check",
]
