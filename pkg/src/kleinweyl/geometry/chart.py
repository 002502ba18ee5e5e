"""Flat periodic charts, sampled tensor fields, and Fourier collocation tools.

All grid-sampled arrays in this package put component indices first and the
grid axes last, e.g. a spatial vector field on a 64x64 chart has shape
(2, 64, 64).  Coordinate index 0 of spacetime arrays is the Killing time
direction; spatial axes follow in chart order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError

_RANK_NDIM = {"scalar": 0, "vector": 1, "covector": 1, "sym2": 2}


@dataclass(frozen=True)
class PeriodicChart:
    """Uniform periodic grid on a flat spatial torus.

    sizes   : grid points per axis (each even and >= 8)
    periods : coordinate period per axis
    """

    sizes: tuple
    periods: tuple

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        periods = tuple(float(p) for p in self.periods)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "periods", periods)
        if len(sizes) != len(periods):
            raise ConfigError("sizes and periods must have equal length")
        if len(sizes) not in (2, 3):
            raise ConfigError(f"spatial dimension must be 2 or 3, got {len(sizes)}")
        for n in sizes:
            if n < 8 or n % 2:
                raise ConfigError(f"grid sizes must be even and >= 8, got {n}")
        for p in periods:
            if not p > 0:
                raise ConfigError(f"periods must be positive, got {p}")

    @property
    def dim(self):
        """Spatial dimension d (spacetime dimension is d + 1)."""
        return len(self.sizes)

    @property
    def npoints(self):
        return int(np.prod(self.sizes))

    @property
    def cell_volume(self):
        return float(np.prod([p / n for p, n in zip(self.periods, self.sizes)]))

    def axis_coordinates(self, axis):
        n, p = self.sizes[axis], self.periods[axis]
        return p * np.arange(n) / n

    def grids(self):
        """Coordinate arrays, each of shape ``sizes`` (ij indexing)."""
        axes = [self.axis_coordinates(i) for i in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    def wavenumbers(self, axis):
        """Physical wavenumbers 2*pi*m/L in FFT ordering along one axis."""
        n, p = self.sizes[axis], self.periods[axis]
        return 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / p

    def mode_integers(self, axis):
        n = self.sizes[axis]
        return np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)

    def point(self, index):
        """Chart coordinates of a grid multi-index."""
        return np.array(
            [self.periods[i] * index[i] / self.sizes[i] for i in range(self.dim)]
        )


@dataclass(frozen=True)
class Field:
    """Tensor field sampled on every grid point of a periodic chart."""

    chart: PeriodicChart
    rank: str
    values: np.ndarray

    def __post_init__(self):
        if self.rank not in _RANK_NDIM:
            raise ConfigError(f"unknown field rank {self.rank!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        d = self.chart.dim
        comp = (d,) * _RANK_NDIM[self.rank]
        expected = comp + self.chart.sizes
        if vals.shape != expected:
            raise ConfigError(
                f"{self.rank} field on this chart must have shape {expected}, "
                f"got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ConfigError("field values must be finite")
        if self.rank == "sym2":
            sym = 0.5 * (vals + np.swapaxes(vals, 0, 1))
            if not np.allclose(vals, sym, rtol=0.0, atol=1e-12 * max(1.0, np.abs(vals).max())):
                raise ConfigError("sym2 field values are not symmetric")
            vals = sym
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, chart, rank, value):
        d = chart.dim
        comp = (d,) * _RANK_NDIM[rank]
        vals = np.broadcast_to(
            np.asarray(value, dtype=np.float64).reshape(comp + (1,) * d),
            comp + chart.sizes,
        ).copy()
        return cls(chart, rank, vals)

    def map(self, fn):
        return Field(self.chart, self.rank, fn(self.values))


def _grid_axis(values, chart, axis):
    if not 0 <= axis < chart.dim:
        raise ConfigError(f"axis {axis} out of range for d={chart.dim}")
    return values.ndim - chart.dim + axis


def array_derivative(values, chart, axis):
    """Fourier-collocation d/dx_axis of a (possibly complex) sampled array.

    Exact for trigonometric polynomials resolvable on the grid.  The Nyquist
    mode of an even grid is annihilated (its derivative is not representable).
    """
    values = np.asarray(values)
    ax = _grid_axis(values, chart, axis)
    n = chart.sizes[axis]
    k = chart.wavenumbers(axis)
    k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[ax] = n
    spec = np.fft.fft(values, axis=ax) * (1j * k).reshape(shape)
    out = np.fft.ifft(spec, axis=ax)
    if np.isrealobj(values):
        return np.ascontiguousarray(out.real)
    return out


def spectral_derivative(f, axis):
    """Coordinate derivative of a Field along one chart axis (componentwise)."""
    return Field(f.chart, f.rank, array_derivative(f.values, f.chart, axis))


def spatial_gradient(values, chart):
    """Stack of d/dx_i along a new leading axis."""
    return np.stack([array_derivative(values, chart, i) for i in range(chart.dim)])


class TrigSeries:
    """Truncated real trigonometric interpolant of grid-sampled components.

    Built from the FFT of the samples; evaluation anywhere on the torus
    reproduces the grid values exactly and interpolates off-grid with the
    same spectral accuracy as the differentiation scheme.  Components share
    one mode set, stored as a Hermitian half with folded weights so that

        value_c(x) = sum_m  re[c, m] * cos(k_m . x) - im[c, m] * sin(k_m . x).
    """

    def __init__(self, chart, kvecs, re, im):
        self.chart = chart
        self.kvecs = np.ascontiguousarray(kvecs, dtype=np.float64)
        self.re = np.ascontiguousarray(re, dtype=np.float64)
        self.im = np.ascontiguousarray(im, dtype=np.float64)

    @property
    def ncomp(self):
        return self.re.shape[0]

    @property
    def nmodes(self):
        return self.kvecs.shape[0]

    @classmethod
    def from_samples(cls, chart, comps, rel_tol=1e-15):
        """Build from an array of shape (ncomp, *chart.sizes)."""
        comps = np.asarray(comps, dtype=np.float64)
        if comps.shape[1:] != chart.sizes:
            raise ConfigError("component array does not match the chart grid")
        d = chart.dim
        ncomp = comps.shape[0]
        coef = np.fft.fftn(comps, axes=tuple(range(1, 1 + d))) / chart.npoints
        coef = coef.reshape(ncomp, -1)

        mode_axes = [chart.mode_integers(i) for i in range(d)]
        mesh = np.meshgrid(*mode_axes, indexing="ij")
        modes = np.stack([m.ravel() for m in mesh], axis=1)  # (npoints, d)

        nyq = np.array([-(n // 2) for n in chart.sizes])
        degenerate = (modes == 0) | (modes == nyq)  # axes self-paired under m -> -m
        self_conj = degenerate.all(axis=1)
        # canonical half: first non-degenerate axis has positive mode index
        first = np.argmax(~degenerate, axis=1)
        lead = modes[np.arange(len(modes)), first]
        keep = self_conj | (lead > 0)

        mag = np.abs(coef).max(axis=0)
        floor = rel_tol * max(mag.max(), 1e-300)
        keep &= mag > floor

        weight = np.where(self_conj[keep], 1.0, 2.0)
        scale = np.array([2.0 * np.pi / p for p in chart.periods])
        kvecs = modes[keep] * scale
        re = coef[:, keep].real * weight
        im = coef[:, keep].imag * weight
        return cls(chart, kvecs, re, im)

    def evaluate(self, points):
        """Evaluate all components at spatial points of shape (P, d) or (d,)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        phase = pts @ self.kvecs.T
        vals = np.cos(phase) @ self.re.T - np.sin(phase) @ self.im.T
        return vals[0] if np.asarray(points).ndim == 1 else vals

    def evaluate_with_gradient(self, point):
        """Values (ncomp,) and spatial gradients (ncomp, d) at one point."""
        phase = self.kvecs @ np.asarray(point, dtype=np.float64)
        c, s = np.cos(phase), np.sin(phase)
        vals = self.re @ c - self.im @ s
        grads = np.empty((self.ncomp, self.chart.dim))
        for r in range(self.chart.dim):
            kr = self.kvecs[:, r]
            grads[:, r] = -(self.re @ (s * kr)) - (self.im @ (c * kr))
        return vals, grads
