"""Quadratic eigenvalue pencil of the stationary wave operator.

Separating the time dependence as exp(-i lambda t) in the coordinate wave
operator produces, on the truncated Fourier mode set |k_i| <= K per axis
collocated on the chart grid,

    (lambda^2 A + lambda B + C) phi = 0

with (rho = sqrt|det g|)

    A = mult(g^tt)
    B = i (g^tj d_j + rho^{-1} d_j (rho g^jt . ))
    C = -rho^{-1} d_j (rho g^jk d_k . ) + W.

On constant-coefficient data the modes decouple and the pencil reproduces the
dispersion polynomial exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import ConfigError, TruncationError
from ..geometry.chart import array_derivative


def mode_table(chart, K):
    """Retained integer modes (m, d) in deterministic lexicographic order."""
    ranges = [np.arange(-K, K + 1)] * chart.dim
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class Pencil:
    """Dense mode-space operators of the quadratic eigenvalue problem."""

    chart: "PeriodicChart"
    truncation: int
    modes: np.ndarray        # (m, d) integer mode vectors
    a: np.ndarray            # (m, m) complex
    b: np.ndarray
    c: np.ndarray
    weight: np.ndarray       # N * sqrt(det h) on the grid (pairing weight)
    dim_spacetime: int

    @property
    def size(self):
        return self.a.shape[0]

    @property
    def lambda_cut(self):
        """Trust cutoff: half the truncation Nyquist of the slowest axis."""
        return 0.5 * self.truncation * 2.0 * np.pi / max(self.chart.periods)

    def gram(self):
        """Bilinear (transpose) pairing matrix of the retained modes.

        G[p, q] = integral of e_p e_q weight dx, read off the FFT of the
        weight at mode -(m_p + m_q).
        """
        chart = self.chart
        coef = np.fft.fftn(self.weight) / chart.npoints * (
            np.prod(chart.periods)
        )
        idx = tuple(
            (-(self.modes[:, None, i] + self.modes[None, :, i])) % chart.sizes[i]
            for i in range(chart.dim)
        )
        return coef[idx]

    def pairing_residuals(self):
        """Weighted-pairing (anti)symmetry residuals and A-structure checks."""
        g = self.gram()
        gb = g @ self.b
        gc = g @ self.c
        return {
            "b_antisymmetry": float(
                np.abs(gb + gb.T).max() / max(np.abs(gb).max(), 1e-300)
            ),
            "c_symmetry": float(
                np.abs(gc - gc.T).max() / max(np.abs(gc).max(), 1e-300)
            ),
            "a_hermitian": float(
                np.abs(self.a - self.a.conj().T).max() / np.abs(self.a).max()
            ),
        }

    def multiplication_definiteness(self, trials=8, seed=0):
        """Max of x^H A x over random unit vectors (negative for valid data)."""
        rng = np.random.default_rng(seed)
        worst = -np.inf
        for _ in range(trials):
            x = rng.standard_normal(self.size) + 1j * rng.standard_normal(self.size)
            x /= np.linalg.norm(x)
            worst = max(worst, float((x.conj() @ self.a @ x).real))
        return worst


def build_pencil(data, K, chunk=96):
    """Assemble the dense pencil by applying the operator to every mode."""
    K = int(K)
    if K < 4:
        raise ConfigError(f"truncation K must be >= 4, got {K}")
    chart = data.chart
    if 2 * K + 2 > min(chart.sizes):
        raise TruncationError(
            f"truncation K={K} aliases on grid {chart.sizes}; "
            f"need 2K + 2 <= min grid size"
        )

    from ..geometry.stationary import assemble_spacetime_metric

    metric = assemble_spacetime_metric(data)
    ginv = metric.inverse
    rho = metric.sqrt_abs_det
    w_pot = data.potential.values
    d = chart.dim

    modes = mode_table(chart, K)
    m_count = modes.shape[0]
    scale = np.array([2.0 * np.pi / p for p in chart.periods])
    kvecs = modes * scale

    grids = chart.grids()
    a = np.empty((m_count, m_count), dtype=np.complex128)
    b = np.empty_like(a)
    c = np.empty_like(a)

    # FFT extraction indices of the retained modes
    fft_idx = tuple(modes[:, i] % chart.sizes[i] for i in range(d))
    grid_axes = tuple(range(1, 1 + d))

    def project(batch):
        coef = np.fft.fftn(batch, axes=grid_axes) / chart.npoints
        return coef[(slice(None),) + fft_idx].T  # (m_count, batch)

    for start in range(0, m_count, chunk):
        sel = slice(start, min(start + chunk, m_count))
        kb = kvecs[sel]  # (nb, d)
        phase = sum(kb[:, i][(slice(None),) + (None,) * d] * grids[i] for i in range(d))
        e = np.exp(1j * phase)  # (nb, *grid)

        a_cols = ginv[0, 0] * e

        b_cols = 1j * sum(ginv[0, 1 + j] * (1j * kb[:, j][(slice(None),) + (None,) * d]) * e
                          for j in range(d))
        div = np.zeros_like(e)
        for j in range(d):
            div += array_derivative(rho * ginv[1 + j, 0] * e, chart, j)
        b_cols = b_cols + 1j * div / rho

        flux = np.zeros_like(e)
        for j in range(d):
            inner = sum(
                ginv[1 + j, 1 + k] * (1j * kb[:, k][(slice(None),) + (None,) * d]) * e
                for k in range(d)
            )
            flux += array_derivative(rho * inner, chart, j)
        c_cols = -flux / rho + w_pot * e

        a[:, sel] = project(a_cols)
        b[:, sel] = project(b_cols)
        c[:, sel] = project(c_cols)

    return Pencil(
        chart=chart,
        truncation=K,
        modes=modes,
        a=a,
        b=b,
        c=c,
        weight=metric.sqrt_abs_det,  # = lapse * sqrt(det h)
        dim_spacetime=data.dim_spacetime,
    )


def linearize(pencil_or_abc):
    """Companion linearization with the quadratic block eliminated by A.

    Returns a generalized pair (M, N) with N the identity whose eigenvalues
    are exactly the pencil roots; valid because the multiplication operator
    A = mult(g^tt) is bounded away from zero.
    """
    if isinstance(pencil_or_abc, Pencil):
        a, b, c = pencil_or_abc.a, pencil_or_abc.b, pencil_or_abc.c
    else:
        a, b, c = (np.atleast_2d(np.asarray(x, dtype=np.complex128)) for x in pencil_or_abc)
    m = a.shape[0]
    ainv_c = scipy.linalg.solve(a, c)
    ainv_b = scipy.linalg.solve(a, b)
    big = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    big[:m, m:] = np.eye(m)
    big[m:, :m] = -ainv_c
    big[m:, m:] = -ainv_b
    return big, np.eye(2 * m)
