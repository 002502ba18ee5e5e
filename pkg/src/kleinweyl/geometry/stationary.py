"""Stationary spacetime data and the assembled Lorentzian metric.

The spacetime metric on R_t x torus is built from a positive lapse, a shift
vector and a Riemannian spatial metric, all time-independent:

    g_tt = -lapse**2 + |shift|^2,   g_tj = h_jk shift^k,   g_jk = h_jk,

in signature (-, +, ..., +).  The coordinate vector field along t is the
timelike Killing field whose spectral invariants the rest of the package
computes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, TimelikeViolationError
from .chart import Field, PeriodicChart, array_derivative, spatial_gradient


@dataclass(frozen=True)
class StationaryData:
    """Lapse/shift/spatial-metric/potential sample set on a periodic chart."""

    chart: PeriodicChart
    lapse: Field
    shift: Field
    spatial_metric: Field
    potential: Field

    def __post_init__(self):
        for name, f, rank in (
            ("lapse", self.lapse, "scalar"),
            ("shift", self.shift, "vector"),
            ("spatial_metric", self.spatial_metric, "sym2"),
            ("potential", self.potential, "scalar"),
        ):
            if f.chart is not self.chart and f.chart != self.chart:
                raise ConfigError(f"{name} lives on a different chart")
            if f.rank != rank:
                raise ConfigError(f"{name} must have rank {rank!r}")
        if not np.all(self.lapse.values > 0):
            raise ConfigError("lapse must be positive everywhere")
        h = np.moveaxis(self.spatial_metric.values, (0, 1), (-2, -1))
        eigs = np.linalg.eigvalsh(h)
        if not np.all(eigs > 0):
            raise ConfigError("spatial metric must be positive definite everywhere")
        ksq = self.killing_norm_sq()
        if not np.all(ksq > 0):
            flat = int(np.argmin(ksq))
            idx = np.unravel_index(flat, self.chart.sizes)
            raise TimelikeViolationError(ksq[idx], self.chart.point(idx))

    @property
    def dim_spacetime(self):
        return self.chart.dim + 1

    def shift_covector(self):
        """shift with index lowered by the spatial metric."""
        return np.einsum("jk...,k...->j...", self.spatial_metric.values, self.shift.values)

    def shift_norm_sq(self):
        return np.einsum("j...,j...->...", self.shift_covector(), self.shift.values)

    def killing_norm_sq(self):
        """|Z|^2 = lapse^2 - |shift|^2 of the Killing field Z = d/dt."""
        return self.lapse.values**2 - self.shift_norm_sq()

    @classmethod
    def from_arrays(cls, chart, lapse, shift, spatial_metric, potential=None):
        if potential is None:
            potential = np.zeros(chart.sizes)
        return cls(
            chart,
            Field(chart, "scalar", lapse),
            Field(chart, "vector", shift),
            Field(chart, "sym2", spatial_metric),
            Field(chart, "scalar", potential),
        )


@dataclass(frozen=True)
class SpacetimeMetric:
    """Assembled metric components, inverse, and volume density on the grid."""

    data: StationaryData
    components: np.ndarray   # (D, D, *grid)
    inverse: np.ndarray      # (D, D, *grid)
    sqrt_abs_det: np.ndarray  # (*grid)

    @property
    def chart(self):
        return self.data.chart

    @property
    def dim(self):
        return self.data.dim_spacetime

    def validation_residuals(self):
        """Max deviations of the defining identities (identity, det)."""
        g = np.moveaxis(self.components, (0, 1), (-2, -1))
        ginv = np.moveaxis(self.inverse, (0, 1), (-2, -1))
        eye = np.eye(self.dim)
        id_res = np.abs(g @ ginv - eye).max()
        det_g = np.linalg.det(g)
        h = np.moveaxis(self.data.spatial_metric.values, (0, 1), (-2, -1))
        det_res = np.abs(self.data.lapse.values**2 * np.linalg.det(h) + det_g).max()
        return float(id_res), float(det_res)


def assemble_spacetime_metric(data):
    """Build the (d+1)-metric, its inverse and sqrt|det g| from stationary data."""
    chart = data.chart
    d = chart.dim
    D = d + 1
    g = np.zeros((D, D) + chart.sizes)
    w_cov = data.shift_covector()
    g[0, 0] = -data.lapse.values**2 + data.shift_norm_sq()
    g[0, 1:] = w_cov
    g[1:, 0] = w_cov
    g[1:, 1:] = data.spatial_metric.values

    gm = np.moveaxis(g, (0, 1), (-2, -1))
    det_g = np.linalg.det(gm)
    if not np.all(det_g < 0):
        raise ConfigError("assembled metric is not Lorentzian (det g >= 0 somewhere)")
    ginv = np.moveaxis(np.linalg.inv(gm), (-2, -1), (0, 1))

    metric = SpacetimeMetric(
        data=data,
        components=g,
        inverse=np.ascontiguousarray(ginv),
        sqrt_abs_det=np.sqrt(-det_g),
    )
    id_res, det_res = metric.validation_residuals()
    if id_res > 1e-10 or det_res > 1e-10 * max(1.0, np.abs(det_g).max()):
        raise ConfigError(
            f"metric assembly failed self-checks (inverse residual {id_res:.2e}, "
            f"determinant residual {det_res:.2e})"
        )
    return metric


def read_back_stationary(metric):
    """Recover (lapse, shift, spatial metric) arrays from metric components."""
    g = metric.components
    h = g[1:, 1:]
    hinv = np.moveaxis(
        np.linalg.inv(np.moveaxis(h, (0, 1), (-2, -1))), (-2, -1), (0, 1)
    )
    w = np.einsum("jk...,k...->j...", hinv, g[0, 1:])
    w_sq = np.einsum("j...,j...->...", g[0, 1:], w)
    lapse = np.sqrt(w_sq - g[0, 0])
    return lapse, w, h


def dalembert_scalar(metric, f):
    """Wave operator (sign -tr grad^2) applied to a time-independent scalar.

    With time-independent input only the spatial part contributes:
    box f = -rho^{-1} d_j(rho g^{jk} d_k f), rho = sqrt|det g|.
    """
    vals = f.values if isinstance(f, Field) else np.asarray(f, dtype=np.float64)
    chart = metric.chart
    rho = metric.sqrt_abs_det
    grad = spatial_gradient(vals, chart)
    flux = np.einsum("jk...,k...->j...", metric.inverse[1:, 1:], grad)
    div = sum(
        array_derivative(rho * flux[j], chart, j) for j in range(chart.dim)
    )
    out = -div / rho
    if isinstance(f, Field):
        return Field(chart, "scalar", out)
    return out
