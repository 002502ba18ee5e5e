"""Pure numpy geodesic integrator (fallback backend).

Implements exactly the same adaptive Fehlberg 7(8) scheme as the compiled
extension, with the connection coefficients evaluated from their truncated
trigonometric series at every stage.  Slower, but algorithmically identical.
"""

from __future__ import annotations

import numpy as np

from .tableau import A, B8, C, ERR_WEIGHT, STAGES

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


def _gamma_at(kd, xsp, need_grad):
    """Christoffel table (D, T) and optionally its spatial gradient (D, T, d)."""
    phase = kd.kvecs @ xsp
    c, s = np.cos(phase), np.sin(phase)
    flat = kd.re @ c - kd.im @ s
    gam = flat.reshape(kd.dim_spacetime, kd.npairs)
    if not need_grad:
        return gam, None
    dgam = np.empty((kd.dim_spacetime, kd.npairs, kd.dim_spatial))
    for r in range(kd.dim_spatial):
        kr = kd.kvecs[:, r]
        dflat = -(kd.re @ (s * kr)) - (kd.im @ (c * kr))
        dgam[:, :, r] = dflat.reshape(kd.dim_spacetime, kd.npairs)
    return gam, dgam


def _rhs(kd, y, with_jacobi):
    D = kd.dim_spacetime
    x = y[:D]
    v = y[D : 2 * D]
    gam, dgam = _gamma_at(kd, x[1:], with_jacobi)

    vv = kd.pair_mult * v[kd.pair_mu] * v[kd.pair_nu]  # (T,)
    acc = -(gam @ vv)

    dy = np.empty_like(y)
    dy[:D] = v
    dy[D : 2 * D] = acc
    if not with_jacobi:
        return dy

    jx = y[2 * D : 2 * D + D * D].reshape(D, D)
    jv = y[2 * D + D * D :].reshape(D, D)
    # d/ds Jv = -(dGamma . Jx) v v - 2 Gamma v Jv   (pairwise-symmetrized)
    grad_term = np.einsum("ltr,t->lr", dgam, vv)  # (D, d)
    mixed = kd.pair_mult[:, None] * 0.5 * (
        v[kd.pair_mu, None] * jv[kd.pair_nu, :] + v[kd.pair_nu, None] * jv[kd.pair_mu, :]
    )  # (T, D)
    djv = -(grad_term @ jx[1:, :]) - 2.0 * (gam @ mixed)
    dy[2 * D : 2 * D + D * D] = jv.reshape(-1)
    dy[2 * D + D * D :] = djv.reshape(-1)
    return dy


def integrate(kd, x0, v0, s_max, rtol, atol, max_steps, with_jacobi):
    """Integrate the geodesic (+ optional velocity-Jacobian) flow to s_max.

    Returns (x, v, jx, jv, n_accepted, n_rejected, status).
    """
    D = kd.dim_spacetime
    y = np.concatenate([np.asarray(x0, dtype=np.float64), np.asarray(v0, dtype=np.float64)])
    if with_jacobi:
        jx0 = np.zeros((D, D))
        jv0 = np.eye(D)
        y = np.concatenate([y, jx0.ravel(), jv0.ravel()])

    s = 0.0
    direction = 1.0 if s_max >= 0 else -1.0
    h = direction * max(abs(s_max) / 100.0, 1e-8)
    k = np.empty((STAGES, y.size))
    n_acc = n_rej = 0
    status = STATUS_OK

    while direction * (s_max - s) > 0:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if abs(h) < 1e-14 * max(abs(s_max), 1.0):
            status = STATUS_STEP_UNDERFLOW
            break
        if direction * (s + h - s_max) > 0:
            h = s_max - s

        for i in range(STAGES):
            yi = y + h * (A[i, :i] @ k[:i]) if i else y.copy()
            k[i] = _rhs(kd, yi, with_jacobi)
        y_new = y + h * (B8 @ k)
        err = h * ERR_WEIGHT * (k[0] + k[10] - k[11] - k[12])
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))

        if err_norm <= 1.0:
            s += h
            y = y_new
            n_acc += 1
            factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** (-1.0 / 8.0))
        else:
            n_rej += 1
            factor = max(0.2, 0.9 * err_norm ** (-1.0 / 8.0))
        h *= factor

    x = y[:D].copy()
    v = y[D : 2 * D].copy()
    if with_jacobi:
        jx = y[2 * D : 2 * D + D * D].reshape(D, D).copy()
        jv = y[2 * D + D * D :].reshape(D, D).copy()
    else:
        jx = jv = None
    return x, v, jx, jv, n_acc, n_rej, status
