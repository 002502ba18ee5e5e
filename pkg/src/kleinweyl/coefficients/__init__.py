"""Trace-coefficient formulas, spectral constants, and the invariance suite."""

from .densities import (
    CoefficientReport,
    c0_density,
    c0_prefactor,
    c2_density,
    c2_prefactor,
    c2_tilde_density,
    coefficient_report,
    heat_coefficients,
    heat_prefactor,
    integrate_density,
    unit_ball_volume,
    weyl_constant,
    zeta_residues,
)
from .shear import (
    InvarianceReport,
    ShearField,
    VariationReport,
    apply_time_shear,
    invariance_suite,
    variation_check,
)

__all__ = [
    "CoefficientReport",
    "c0_density",
    "c0_prefactor",
    "c2_density",
    "c2_prefactor",
    "c2_tilde_density",
    "coefficient_report",
    "heat_coefficients",
    "heat_prefactor",
    "integrate_density",
    "unit_ball_volume",
    "weyl_constant",
    "zeta_residues",
    "InvarianceReport",
    "ShearField",
    "VariationReport",
    "apply_time_shear",
    "invariance_suite",
    "variation_check",
]
