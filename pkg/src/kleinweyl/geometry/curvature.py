"""Christoffel symbols and curvature tensors of the assembled metric.

Conventions (index order: component axes first, grid axes last):

    Gamma^l_{mn} = 1/2 g^{lr} (d_m g_{rn} + d_n g_{rm} - d_r g_{mn})
    R^r_{s m n}  = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
                   + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}
    Ric_{sn}     = R^m_{s m n},    scal = g^{sn} Ric_{sn}.

All coordinate derivatives are Fourier-collocation derivatives; the time
derivative vanishes identically for stationary data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chart import array_derivative


def _spacetime_gradient(values, chart):
    """d_r applied along all D = d+1 coordinates; the t-derivative is zero."""
    out = np.zeros((chart.dim + 1,) + values.shape)
    for j in range(chart.dim):
        out[j + 1] = array_derivative(values, chart, j)
    return out


@dataclass
class CurvaturePack:
    """Christoffels and (optionally) Riemann/Ricci/scalar curvature fields."""

    metric: "SpacetimeMetric"
    christoffel: np.ndarray                 # (D, D, D, *grid), Gamma^l_{mn}
    riemann: Optional[np.ndarray] = None    # (D, D, D, D, *grid), R^r_{smn}
    ricci: Optional[np.ndarray] = None      # (D, D, *grid)
    scal: Optional[np.ndarray] = None       # (*grid)

    @property
    def chart(self):
        return self.metric.chart

    def riemann_lowered(self):
        return np.einsum("rk...,ksmn...->rsmn...", self.metric.components, self.riemann)

    def symmetry_residuals(self):
        """Max residuals of the index (anti)symmetries and the cyclic identity.

        Returned relative to the largest lowered-Riemann component (or
        absolute when the curvature is numerically zero).
        """
        low = self.riemann_lowered()
        scale = max(float(np.abs(low).max()), 1.0)
        anti_last = np.abs(low + np.swapaxes(low, 2, 3)).max() / scale
        anti_first = np.abs(low + np.swapaxes(low, 0, 1)).max() / scale
        pair = np.abs(low - np.transpose(low, (2, 3, 0, 1) + tuple(range(4, low.ndim)))).max() / scale
        cyclic = np.abs(
            low + np.transpose(low, (0, 2, 3, 1) + tuple(range(4, low.ndim)))
            + np.transpose(low, (0, 3, 1, 2) + tuple(range(4, low.ndim)))
        ).max() / scale
        ricci_sym = np.abs(self.ricci - np.swapaxes(self.ricci, 0, 1)).max() / max(
            float(np.abs(self.ricci).max()), 1.0
        )
        return {
            "riemann_antisym_last": float(anti_last),
            "riemann_antisym_first": float(anti_first),
            "riemann_pair_symmetry": float(pair),
            "first_bianchi": float(cyclic),
            "ricci_symmetry": float(ricci_sym),
        }


def christoffel(metric):
    """Christoffel symbols only (curvature entries of the pack left unset)."""
    chart = metric.chart
    dg = _spacetime_gradient(metric.components, chart)  # dg[r, m, n]
    gamma = 0.5 * np.einsum(
        "lr...,mrn...->lmn...",
        metric.inverse,
        dg
        + np.transpose(dg, (2, 1, 0) + tuple(range(3, dg.ndim)))
        - np.transpose(dg, (1, 0, 2) + tuple(range(3, dg.ndim))),
    )
    gamma = 0.5 * (gamma + np.swapaxes(gamma, 1, 2))  # exact lower-index symmetry
    return CurvaturePack(metric=metric, christoffel=gamma)


def curvature(metric):
    """Full curvature pack: Christoffels, Riemann, Ricci, scalar curvature."""
    pack = christoffel(metric)
    gamma = pack.christoffel
    chart = metric.chart
    dgamma = _spacetime_gradient(gamma, chart)  # dgamma[m, r, n, s] = d_m Gamma^r_{ns}
    quad = np.einsum("rml...,lns...->rsmn...", gamma, gamma)
    riemann = (
        np.transpose(dgamma, (1, 3, 0, 2) + tuple(range(4, dgamma.ndim)))
        - np.transpose(dgamma, (1, 3, 2, 0) + tuple(range(4, dgamma.ndim)))
        + quad
        - np.swapaxes(quad, 2, 3)
    )
    ricci = np.einsum("msmn...->sn...", riemann)
    ricci = 0.5 * (ricci + np.swapaxes(ricci, 0, 1))
    scal = np.einsum("sn...,sn...->...", metric.inverse, ricci)
    pack.riemann = riemann
    pack.ricci = ricci
    pack.scal = scal
    return pack
