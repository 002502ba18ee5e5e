"""Small-time expansion fits along the Killing flow and their predictions.

For a base point y on the initial slice and the flow-translated diagonal
point (t, y), three quantities are sampled over a shrinking window and fitted
against their power laws (a = grad_Z Z, b = grad_Z a):

    world function:       |Z|^2 t^2 + (1/12) g(a, a) t^4 + O(t^5)
    normal derivative:    2 N t + g(a, nu) t^2 - (1/3) g(b, nu) t^3 + O(t^4)
    scalar transport V0:  1 + (1/12) Ric(Z, Z) t^2 + O(t^3)

The first two follow from the backwards flow line expressed in normal
coordinates at the base point (the Gauss lemma turns the normal-slot pairing
into an exact frame pairing there); timelike geodesics maximize proper time,
which fixes the positive t^4 correction.  Each fit carries these powers plus
one guard power; the world-function fit also carries the odd powers so their
smallness can be asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FitConditionError, NumericalError
from ..geometry.chart import Field
from ..geometry.curvature import curvature
from .geodesic import GeodesicSolver

WORLD_POWERS = (2, 3, 4, 5)
NORMAL_POWERS = (1, 2, 3, 4)
TRANSPORT_POWERS = (0, 2, 3)


@dataclass
class ExpansionFit:
    """Weighted power-law fit over a sample window."""

    abscissae: np.ndarray
    powers: tuple
    coefficients: np.ndarray
    residual: float
    condition: float

    def coefficient(self, power):
        return float(self.coefficients[self.powers.index(power)])


def fit_powers(ts, ys, powers, weight_power=-2.0, max_condition=1e12):
    """Weighted least squares of ys against sum_p c_p t^p.

    Rows are weighted by t^weight_power (default t^-2) to balance the scales
    of a log-spaced window.
    """
    ts = np.asarray(ts, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    design = np.stack([ts**p for p in powers], axis=1)
    w = ts**weight_power
    a = design * w[:, None]
    b = ys * w
    cond = float(np.linalg.cond(a))
    if cond > max_condition:
        raise FitConditionError(
            f"power-basis fit condition {cond:.2e} exceeds {max_condition:.0e}"
        )
    coef, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    resid = float(np.sqrt(np.mean((a @ coef - b) ** 2)))
    return ExpansionFit(
        abscissae=ts,
        powers=tuple(powers),
        coefficients=coef,
        residual=resid,
        condition=cond,
    )


def default_t_samples(n=12, t_min=1e-3, t_max=0.2):
    return np.geomspace(t_min, t_max, n)


@dataclass
class DiagonalExpansionFits:
    point_index: tuple
    t_samples: np.ndarray
    world: ExpansionFit
    normal_derivative: ExpansionFit
    transport: ExpansionFit


def diagonal_expansions(data, point_index, t_samples=None, solver=None,
                        metric=None, nu_step=1e-3):
    """Fit the three diagonal expansions at one grid point.

    The world function is sampled at targets translated along the Killing
    flow; its normal-slot derivative uses a fourth-order central difference
    with step nu_step along the unit normal, decoupling boundary-value
    accuracy from derivative accuracy.  Rows are weighted by the inverse of
    each quantity's leading power so the shooting-noise floor of the small-t
    samples is not amplified.
    """
    if solver is None:
        if metric is None:
            from ..geometry.stationary import assemble_spacetime_metric

            metric = assemble_spacetime_metric(data)
        solver = GeodesicSolver(metric)
    chart = data.chart
    point_index = tuple(point_index)
    if t_samples is None:
        t_samples = default_t_samples()
    t_samples = np.sort(np.asarray(t_samples, dtype=np.float64))

    y_sp = chart.point(point_index)
    base = np.concatenate([[0.0], y_sp])
    lapse = float(data.lapse.values[point_index])
    shift = data.shift.values[(slice(None),) + point_index]
    nu = np.concatenate([[1.0 / lapse], -shift / lapse])

    worlds = np.empty_like(t_samples)
    normals = np.empty_like(t_samples)
    transports = np.empty_like(t_samples)
    v_guess = None
    for i, t in enumerate(t_samples):
        target = base.copy()
        target[0] += t
        if v_guess is not None:
            v_guess = v_guess * (t / t_samples[i - 1])
        value, shot = solver.world_function(target, base, v_start=v_guess)
        worlds[i] = value
        v_guess = shot.velocity

        stencil = {}
        guess = shot.velocity
        for k in (-2, -1, 1, 2):
            stencil[k], s = solver.world_function(target + k * nu_step * nu, base,
                                                  v_start=guess)
            guess = s.velocity
        normals[i] = (
            stencil[-2] - 8.0 * stencil[-1] + 8.0 * stencil[1] - stencil[2]
        ) / (12.0 * nu_step)

        state = solver.integrate(base, shot.velocity, 1.0, jacobi=True)
        mu = solver._distortion_from(state, base)
        if mu <= 0:
            raise NumericalError("volume distortion non-positive along the diagonal")
        transports[i] = mu**-0.5

    return DiagonalExpansionFits(
        point_index=point_index,
        t_samples=t_samples,
        world=fit_powers(t_samples, worlds, WORLD_POWERS, weight_power=-2.0),
        normal_derivative=fit_powers(t_samples, normals, NORMAL_POWERS, weight_power=-1.0),
        transport=fit_powers(t_samples, transports, TRANSPORT_POWERS, weight_power=0.0),
    )


def expansion_predictions(data, kp, point_index):
    """Killing/curvature-pipeline predictions for the fitted coefficients."""
    idx = tuple(point_index)
    return {
        "world_t2": float(kp.norm_sq[idx]),
        "world_t4": float(kp.accel_sq[idx]) / 12.0,
        "normal_t1": 2.0 * float(data.lapse.values[idx]),
        "normal_t2": float(kp.accel_nu[idx]),
        "normal_t3": -float(kp.accel2_nu[idx]) / 3.0,
        "transport_t0": 1.0,
        "transport_t2": float(kp.ricci_zz[idx]) / 12.0,
    }


def v1_diagonal(data, curv=None):
    """Diagonal value of the first subleading transport coefficient.

    Equals scal/6 - W pointwise; the scalar curvature is that of the full
    stationary metric.
    """
    if curv is None:
        from ..geometry.stationary import assemble_spacetime_metric

        curv = curvature(assemble_spacetime_metric(data))
    return Field(data.chart, "scalar", curv.scal / 6.0 - data.potential.values)
