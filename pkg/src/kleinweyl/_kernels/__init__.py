"""Backend selection for the geodesic integration kernel.

The compiled Cython extension is preferred; the numpy implementation is the
drop-in fallback.  Set KLEINWEYL_PURE_PYTHON=1 to force the fallback (used by
the backend benchmark and parity tests).
"""

import os
from dataclasses import dataclass

import numpy as np

from . import geodesic_py, tableau

_FORCE_PY = os.environ.get("KLEINWEYL_PURE_PYTHON", "") == "1"

try:
    if _FORCE_PY:
        raise ImportError("pure-python backend forced via KLEINWEYL_PURE_PYTHON")
    from . import _geodesic  # type: ignore[attr-defined]

    DEFAULT_BACKEND = "cython"
except ImportError:
    _geodesic = None
    DEFAULT_BACKEND = "python"

STATUS_OK = geodesic_py.STATUS_OK
STATUS_STEP_UNDERFLOW = geodesic_py.STATUS_STEP_UNDERFLOW
STATUS_MAX_STEPS = geodesic_py.STATUS_MAX_STEPS


def available_backends():
    return ("cython", "python") if _geodesic is not None else ("python",)


@dataclass(frozen=True)
class ChristoffelSeriesData:
    """Contiguous arrays describing the connection's trigonometric series.

    Component index of re/im is l * npairs + p where l is the upper index and
    p enumerates symmetric lower-index pairs (mu <= nu); pair_mult folds the
    off-diagonal double count.
    """

    kvecs: np.ndarray     # (M, d)
    re: np.ndarray        # (D * T, M)
    im: np.ndarray        # (D * T, M)
    pair_mu: np.ndarray   # (T,)
    pair_nu: np.ndarray   # (T,)
    pair_mult: np.ndarray  # (T,)
    dim_spacetime: int

    @property
    def dim_spatial(self):
        return self.kvecs.shape[1]

    @property
    def npairs(self):
        return self.pair_mu.shape[0]


def symmetric_pairs(D):
    """(mu, nu, mult) table of the lower-index pairs with mu <= nu."""
    mu, nu, mult = [], [], []
    for i in range(D):
        for j in range(i, D):
            mu.append(i)
            nu.append(j)
            mult.append(1.0 if i == j else 2.0)
    return (
        np.asarray(mu, dtype=np.int64),
        np.asarray(nu, dtype=np.int64),
        np.asarray(mult, dtype=np.float64),
    )


def integrate(kd, x0, v0, s_max, rtol, atol, max_steps, with_jacobi, backend=None):
    """Dispatch one geodesic integration to the selected backend."""
    name = backend or DEFAULT_BACKEND
    if name == "cython":
        if _geodesic is None:
            raise RuntimeError("compiled kernel requested but not available")
        return _geodesic.integrate(
            kd.kvecs, kd.re, kd.im, kd.pair_mu, kd.pair_nu, kd.pair_mult,
            kd.dim_spacetime, x0, v0, float(s_max), float(rtol), float(atol),
            int(max_steps), bool(with_jacobi),
            tableau.A, tableau.B8, tableau.ERR_WEIGHT,
        )
    if name == "python":
        return geodesic_py.integrate(
            kd, x0, v0, float(s_max), float(rtol), float(atol),
            int(max_steps), bool(with_jacobi),
        )
    raise ValueError(f"unknown backend {name!r}")
