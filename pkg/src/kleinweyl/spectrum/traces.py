"""Counting function, heat trace, and asymptotic-expansion fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma, gammaincc

from ..errors import FitConditionError, WindowError


def counting_function(spec, lam):
    """Number of positive eigenvalues <= lam (positive-part convention).

    The two-sided literal count diverges; the growth law stated for the
    counting function matches the positive part.
    """
    if lam > spec.lambda_cut * (1.0 + 1e-12):
        raise WindowError(
            f"counting requested at lambda={lam:.6g} beyond the trust cutoff "
            f"{spec.lambda_cut:.6g}"
        )
    pos = spec.positive()
    return int(np.searchsorted(pos, lam, side="right"))


def _tail_fraction(spec, t):
    """Estimated truncated-tail fraction of the heat sum at time t.

    The density beyond the cutoff is extrapolated from the counted growth
    C lambda^(n-2); the incomplete-Gamma closed form covers every n >= 3.
    """
    n = spec.dim_spacetime
    cut = spec.lambda_cut
    n_below = max(len(spec.positive()), 1)
    c_density = (n - 1) * n_below / cut ** (n - 1)
    s = (n - 1) / 2.0
    # integral_cut^inf lambda^(n-2) exp(-t lambda^2) d lambda
    tail = 0.5 * t ** (-s) * gamma(s) * gammaincc(s, t * cut**2)
    body = 0.5 * t ** (-s) * gamma(s) * (1.0 - gammaincc(s, t * cut**2))
    # both branches doubled; near-zero block adds O(1)
    total = 2.0 * c_density * body + len(spec.near_zero)
    return 2.0 * c_density * tail / max(total, 1e-300)


def heat_t_floor(spec, rel_tol=1e-8):
    """Smallest t at which the truncated tail stays below rel_tol of the sum."""
    lo, hi = 1e-10, 50.0
    f = lambda logt: _tail_fraction(spec, np.exp(logt)) - rel_tol
    if f(np.log(lo)) < 0:
        return lo
    if f(np.log(hi)) > 0:
        raise WindowError("spectrum too short for any trusted heat-trace window")
    return float(np.exp(brentq(f, np.log(lo), np.log(hi), xtol=1e-3)))


def heat_trace(spec, t, include_near_zero=True):
    """Sum of exp(-t lambda^2) over the retained spectrum.

    The kernel-block eigenvalues are added behind the flag (default on,
    matching the full trace).  Times below the trust floor are rejected.
    """
    t = float(t)
    floor = heat_t_floor(spec)
    if t < floor:
        raise WindowError(
            f"heat trace requested at t={t:.4g}; truncation tail only "
            f"controlled for t >= {floor:.4g}"
        )
    total = float(np.exp(-t * spec.lambdas**2).sum())
    if include_near_zero:
        total += float(np.exp(-t * np.abs(spec.near_zero) ** 2).sum())
    return total


@dataclass
class ExpansionFitHeat:
    """Fit of the heat trace against its asymptotic basis plus diagnostics."""

    window: tuple
    powers: tuple          # exponents of t in the fitted basis
    coefficients: np.ndarray
    half_power: float      # exponent of the vanishing-coefficient diagnostic
    a_half: float
    residual: float
    condition: float

    @property
    def a0(self):
        return float(self.coefficients[0])

    @property
    def a1(self):
        return float(self.coefficients[1])

    def coefficient(self, k):
        return float(self.coefficients[k])


def fit_heat_expansion(spec, n=None, window=None, k_max=2, num_samples=40,
                       include_near_zero=True, max_condition=1e10):
    """Weighted LS fit of the heat trace over a log-spaced window.

    Basis: t^(-(n-1)/2 + k) for k = 0..k_max plus the half-power diagnostic
    t^(-(n-2)/2) whose fitted size tests the vanishing of the odd trace term.
    """
    n = spec.dim_spacetime if n is None else n
    floor = heat_t_floor(spec)
    if window is None:
        window = (max(floor, 1e-6), max(50.0 * floor, 0.5))
    t0, t1 = float(window[0]), float(window[1])
    if t0 < floor:
        raise WindowError(
            f"window start {t0:.4g} below the trusted floor {floor:.4g}"
        )
    if num_samples < 20:
        raise WindowError("need at least 20 samples across the window")
    ts = np.geomspace(t0, t1, num_samples)
    ys = np.array([heat_trace(spec, t, include_near_zero) for t in ts])

    powers = tuple(-(n - 1) / 2.0 + k for k in range(k_max + 1))
    half = -(n - 2) / 2.0
    design = np.stack([ts**p for p in powers] + [ts**half], axis=1)
    w = ts ** ((n - 1) / 2.0)  # weight relative to the leading term
    a = design * w[:, None]
    b = ys * w
    cond = float(np.linalg.cond(a))
    if cond > max_condition:
        raise FitConditionError(
            f"heat-expansion fit condition {cond:.2e} > {max_condition:.0e}; "
            "try a narrower window"
        )
    coef, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    resid = float(np.sqrt(np.mean((a @ coef - b) ** 2)))
    return ExpansionFitHeat(
        window=(t0, t1),
        powers=powers,
        coefficients=coef[:-1],
        half_power=half,
        a_half=float(coef[-1]),
        residual=resid,
        condition=cond,
    )


@dataclass
class WeylCheckReport:
    fitted_constant: float
    predicted_constant: float
    window: tuple
    samples: int

    @property
    def rel_deviation(self):
        return abs(self.fitted_constant - self.predicted_constant) / abs(
            self.predicted_constant
        )


def weyl_check(spec, counting_volume, window, num_samples=40):
    """Fit the counting constant N(lambda)/lambda^(n-1) and compare.

    counting_volume: either a StationaryData (the phase-space volume is then
    computed from it) or the precomputed volume.
    """
    from ..coefficients.densities import weyl_constant as _weyl

    if hasattr(counting_volume, "killing_norm_sq"):
        counting_volume = _weyl(counting_volume)
    n = spec.dim_spacetime
    lo, hi = float(window[0]), float(window[1])
    if hi > spec.lambda_cut * (1.0 + 1e-12):
        raise WindowError(
            f"window end {hi:.6g} beyond the trust cutoff {spec.lambda_cut:.6g}"
        )
    lams = np.linspace(lo, hi, num_samples)
    ratios = [counting_function(spec, lam) / lam ** (n - 1) for lam in lams]
    fitted = float(np.mean(ratios))
    predicted = counting_volume / (2.0 * np.pi) ** (n - 1)
    return WeylCheckReport(
        fitted_constant=fitted,
        predicted_constant=float(predicted),
        window=(lo, hi),
        samples=num_samples,
    )
