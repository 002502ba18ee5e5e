"""Geodesic flow, two-point shooting, world function, volume distortion.

Off-grid metric and connection values come from trigonometric interpolation
of the grid samples, so the solver inherits the spectral accuracy of the
differentiation scheme.  The inner integration loop runs on the compiled
kernel when available and on the numpy fallback otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .._kernels import (
    STATUS_MAX_STEPS,
    STATUS_OK,
    STATUS_STEP_UNDERFLOW,
    ChristoffelSeriesData,
    integrate as kernel_integrate,
    symmetric_pairs,
)
from ..errors import IntegrationError, ShootingConvergenceError
from ..geometry.chart import TrigSeries
from ..geometry.curvature import christoffel


@dataclass
class GeodesicState:
    position: np.ndarray
    velocity: np.ndarray
    parameter: float
    energy_initial: float
    energy_final: float
    steps: int
    jac_position: Optional[np.ndarray] = None  # d(endpoint)/d(initial velocity)
    jac_velocity: Optional[np.ndarray] = None

    @property
    def energy_drift(self):
        scale = max(abs(self.energy_initial), float(self.velocity @ self.velocity), 1e-300)
        return abs(self.energy_final - self.energy_initial) / scale


@dataclass
class ShootingResult:
    velocity: np.ndarray       # exp_base^{-1}(target)
    position_error: float
    iterations: int
    jac_position: np.ndarray   # d(endpoint)/d(velocity) at the solution
    energy: float              # g(v, v) at the base point


class GeodesicSolver:
    """Cached series data plus integration/shooting entry points for a metric."""

    def __init__(self, metric, curv=None, rtol=1e-12, atol=1e-13,
                 max_steps=100_000, backend=None):
        self.metric = metric
        self.chart = metric.chart
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.max_steps = int(max_steps)
        self.backend = backend

        D = metric.dim
        if curv is None:
            curv = christoffel(metric)
        mu, nu, mult = symmetric_pairs(D)
        gamma_pairs = np.stack(
            [curv.christoffel[l, mu[p], nu[p]] for l in range(D) for p in range(len(mu))]
        )
        series = TrigSeries.from_samples(self.chart, gamma_pairs)
        self.kernel_data = ChristoffelSeriesData(
            kvecs=series.kvecs,
            re=series.re,
            im=series.im,
            pair_mu=mu,
            pair_nu=nu,
            pair_mult=mult,
            dim_spacetime=D,
        )
        metric_pairs = np.stack([metric.components[mu[p], nu[p]] for p in range(len(mu))])
        self._metric_series = TrigSeries.from_samples(self.chart, metric_pairs)
        self._pairs = (mu, nu, mult)

    def metric_at(self, x):
        """Full metric matrix at an arbitrary point (only spatial coords matter)."""
        D = self.metric.dim
        mu, nu, _ = self._pairs
        vals = self._metric_series.evaluate(np.asarray(x, dtype=np.float64)[1:])
        g = np.zeros((D, D))
        g[mu, nu] = vals
        g[nu, mu] = vals
        return g

    def energy(self, x, v):
        """g(v, v) at x."""
        g = self.metric_at(x)
        return float(v @ g @ v)

    def integrate(self, x0, v0, s_max, jacobi=False):
        x0 = np.asarray(x0, dtype=np.float64)
        v0 = np.asarray(v0, dtype=np.float64)
        x, v, jx, jv, n_acc, n_rej, status = kernel_integrate(
            self.kernel_data, x0, v0, s_max, self.rtol, self.atol,
            self.max_steps, jacobi, backend=self.backend,
        )
        if status == STATUS_STEP_UNDERFLOW:
            raise IntegrationError(
                f"step size underflow at parameter within [0, {s_max}] "
                f"after {n_acc} accepted / {n_rej} rejected steps"
            )
        if status == STATUS_MAX_STEPS:
            raise IntegrationError(
                f"step budget {self.max_steps} exhausted "
                f"({n_acc} accepted / {n_rej} rejected)"
            )
        assert status == STATUS_OK
        return GeodesicState(
            position=x,
            velocity=v,
            parameter=float(s_max),
            energy_initial=self.energy(x0, v0),
            energy_final=self.energy(x, v),
            steps=n_acc,
            jac_position=jx,
            jac_velocity=jv,
        )

    def shoot(self, x_target, x_base, tol=1e-10, max_iter=25, v_start=None):
        """Newton iteration for exp_base(v) = target using the Jacobi flow."""
        x_target = np.asarray(x_target, dtype=np.float64)
        x_base = np.asarray(x_base, dtype=np.float64)
        v = np.array(x_target - x_base) if v_start is None else np.array(v_start, dtype=np.float64)
        last = np.inf
        for it in range(1, max_iter + 1):
            state = self.integrate(x_base, v, 1.0, jacobi=True)
            resid = state.position - x_target
            last = float(np.linalg.norm(resid))
            if last <= tol:
                return ShootingResult(
                    velocity=v,
                    position_error=last,
                    iterations=it,
                    jac_position=state.jac_position,
                    energy=self.energy(x_base, v),
                )
            try:
                delta = np.linalg.solve(state.jac_position, -resid)
            except np.linalg.LinAlgError as exc:
                raise ShootingConvergenceError(last, it) from exc
            v = v + delta
        raise ShootingConvergenceError(last, max_iter)

    def world_function(self, x, x_base, v_start=None):
        """Signed squared geodesic distance -g(exp^{-1}(x), exp^{-1}(x))."""
        shot = self.shoot(x, x_base, v_start=v_start)
        return -shot.energy, shot

    def volume_distortion(self, x_base, v):
        """|det d(exp_base)|_v| between orthonormal frames at both endpoints."""
        state = self.integrate(np.asarray(x_base, dtype=np.float64),
                               np.asarray(v, dtype=np.float64), 1.0, jacobi=True)
        return self._distortion_from(state, x_base)

    def _distortion_from(self, state, x_base):
        det_j = abs(float(np.linalg.det(state.jac_position)))
        g0 = self.metric_at(np.asarray(x_base, dtype=np.float64))
        g1 = self.metric_at(state.position)
        det0 = abs(float(np.linalg.det(g0)))
        det1 = abs(float(np.linalg.det(g1)))
        return det_j * np.sqrt(det1 / det0)


def integrate_geodesic(metric, x0, v0, s_max, steps=100_000):
    """One-shot geodesic integration (see GeodesicSolver for repeated use)."""
    solver = GeodesicSolver(metric, max_steps=steps)
    return solver.integrate(x0, v0, s_max)


def shoot_connect(metric, x, x_base):
    return GeodesicSolver(metric).shoot(x, x_base)


def world_function(metric, x, x_base):
    value, _ = GeodesicSolver(metric).world_function(x, x_base)
    return value


def volume_distortion(metric, x_base, v):
    return GeodesicSolver(metric).volume_distortion(x_base, v)
