# cython: language_level=3
"""Compiled geodesic integrator: trigonometric-series connection evaluation
plus an adaptive Fehlberg 7(8) stepper.  Mirrors geodesic_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs, fmin, fmax, pow

cnp.import_array()

cdef int _OK = 0
cdef int _STEP_UNDERFLOW = 1
cdef int _MAX_STEPS = 2

STATUS_OK = _OK
STATUS_STEP_UNDERFLOW = _STEP_UNDERFLOW
STATUS_MAX_STEPS = _MAX_STEPS


cdef void _rhs(
    double[:, ::1] kvecs, double[:, ::1] re, double[:, ::1] im,
    long[::1] pair_mu, long[::1] pair_nu, double[::1] pair_mult,
    int D, int d, int T, bint with_jacobi,
    double[::1] y, double[::1] dy,
    double[::1] gam, double[:, ::1] dgam,
) noexcept nogil:
    cdef int M = kvecs.shape[0]
    cdef int C = D * T
    cdef int m, r, ci, l, p, col
    cdef double ph, a, b, kr, acc, vv, mixed, grad

    for ci in range(C):
        gam[ci] = 0.0
    if with_jacobi:
        for ci in range(C):
            for r in range(d):
                dgam[ci, r] = 0.0

    for m in range(M):
        ph = 0.0
        for r in range(d):
            ph += kvecs[m, r] * y[1 + r]
        a = cos(ph)
        b = sin(ph)
        for ci in range(C):
            gam[ci] += re[ci, m] * a - im[ci, m] * b
        if with_jacobi:
            for r in range(d):
                kr = kvecs[m, r]
                for ci in range(C):
                    dgam[ci, r] += kr * (-re[ci, m] * b - im[ci, m] * a)

    # dx = v
    for l in range(D):
        dy[l] = y[D + l]
    # dv^l = -Gamma^l_{mu nu} v^mu v^nu
    for l in range(D):
        acc = 0.0
        for p in range(T):
            vv = pair_mult[p] * y[D + pair_mu[p]] * y[D + pair_nu[p]]
            acc -= gam[l * T + p] * vv
        dy[D + l] = acc

    if not with_jacobi:
        return

    # layout: y[2D : 2D + D*D] = Jx (row major), then Jv
    cdef int ox = 2 * D
    cdef int ov = 2 * D + D * D
    for l in range(D):
        for col in range(D):
            dy[ox + l * D + col] = y[ov + l * D + col]
    for l in range(D):
        for col in range(D):
            acc = 0.0
            for p in range(T):
                vv = pair_mult[p] * y[D + pair_mu[p]] * y[D + pair_nu[p]]
                grad = 0.0
                for r in range(d):
                    grad += dgam[(l * T + p), r] * y[ox + (1 + r) * D + col]
                mixed = 0.5 * pair_mult[p] * (
                    y[D + pair_mu[p]] * y[ov + pair_nu[p] * D + col]
                    + y[D + pair_nu[p]] * y[ov + pair_mu[p] * D + col]
                )
                acc -= grad * vv + 2.0 * gam[l * T + p] * mixed
            dy[ov + l * D + col] = acc


def integrate(
    double[:, ::1] kvecs, double[:, ::1] re, double[:, ::1] im,
    long[::1] pair_mu, long[::1] pair_nu, double[::1] pair_mult,
    int D, x0, v0, double s_max, double rtol, double atol,
    long max_steps, bint with_jacobi,
    double[:, ::1] tab_a, double[::1] tab_b8, double err_weight,
):
    """Same contract as geodesic_py.integrate."""
    cdef int d = kvecs.shape[1]
    cdef int T = pair_mu.shape[0]
    cdef int n = 2 * D + (2 * D * D if with_jacobi else 0)
    cdef int stages = tab_b8.shape[0]

    y_arr = np.empty(n, dtype=np.float64)
    y_arr[:D] = np.asarray(x0, dtype=np.float64)
    y_arr[D:2 * D] = np.asarray(v0, dtype=np.float64)
    if with_jacobi:
        y_arr[2 * D:2 * D + D * D] = 0.0
        y_arr[2 * D + D * D:] = np.eye(D).ravel()

    k_arr = np.empty((stages, n), dtype=np.float64)
    yi_arr = np.empty(n, dtype=np.float64)
    ynew_arr = np.empty(n, dtype=np.float64)
    gam_arr = np.empty(D * T, dtype=np.float64)
    dgam_arr = np.empty((D * T, d), dtype=np.float64)

    cdef double[::1] y = y_arr
    cdef double[:, ::1] k = k_arr
    cdef double[::1] yi = yi_arr
    cdef double[::1] ynew = ynew_arr
    cdef double[::1] gam = gam_arr
    cdef double[:, ::1] dgam = dgam_arr

    cdef double s = 0.0
    cdef double direction = 1.0 if s_max >= 0 else -1.0
    cdef double h = direction * fmax(fabs(s_max) / 100.0, 1e-8)
    cdef long n_acc = 0, n_rej = 0
    cdef int status = _OK
    cdef int i, j, q
    cdef double err, scale, err_norm, factor, acc_sum

    with nogil:
        while direction * (s_max - s) > 0:
            if n_acc + n_rej >= max_steps:
                status = _MAX_STEPS
                break
            if fabs(h) < 1e-14 * fmax(fabs(s_max), 1.0):
                status = _STEP_UNDERFLOW
                break
            if direction * (s + h - s_max) > 0:
                h = s_max - s

            for i in range(stages):
                for q in range(n):
                    acc_sum = 0.0
                    for j in range(i):
                        acc_sum += tab_a[i, j] * k[j, q]
                    yi[q] = y[q] + h * acc_sum
                _rhs(kvecs, re, im, pair_mu, pair_nu, pair_mult,
                     D, d, T, with_jacobi, yi, k[i], gam, dgam)

            err_norm = 0.0
            for q in range(n):
                acc_sum = 0.0
                for i in range(stages):
                    acc_sum += tab_b8[i] * k[i, q]
                ynew[q] = y[q] + h * acc_sum
                err = h * err_weight * (k[0, q] + k[10, q] - k[11, q] - k[12, q])
                scale = atol + rtol * fmax(fabs(y[q]), fabs(ynew[q]))
                err_norm += (err / scale) * (err / scale)
            err_norm = sqrt(err_norm / n)

            if err_norm <= 1.0:
                s += h
                for q in range(n):
                    y[q] = ynew[q]
                n_acc += 1
                factor = 5.0 if err_norm == 0.0 else fmin(5.0, 0.9 * pow(err_norm, -1.0 / 8.0))
            else:
                n_rej += 1
                factor = fmax(0.2, 0.9 * pow(err_norm, -1.0 / 8.0))
            h *= factor

    x_out = y_arr[:D].copy()
    v_out = y_arr[D:2 * D].copy()
    if with_jacobi:
        jx = y_arr[2 * D:2 * D + D * D].reshape(D, D).copy()
        jv = y_arr[2 * D + D * D:].reshape(D, D).copy()
    else:
        jx = jv = None
    return x_out, v_out, jx, jv, int(n_acc), int(n_rej), int(status)
