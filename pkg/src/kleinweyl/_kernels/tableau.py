"""Fehlberg 13-stage embedded Runge-Kutta 7(8) coefficients.

Shared by the compiled and the pure-Python integrator so that both backends
perform identical arithmetic.  The error estimate of the embedded pair
collapses to h * 41/840 * (k0 + k10 - k11 - k12); steps advance with the
eighth-order solution.
"""

import numpy as np

STAGES = 13

C = np.array(
    [0.0, 2 / 27, 1 / 9, 1 / 6, 5 / 12, 1 / 2, 5 / 6, 1 / 6, 2 / 3, 1 / 3, 1.0, 0.0, 1.0]
)

A = np.zeros((STAGES, STAGES))
A[1, 0] = 2 / 27
A[2, :2] = [1 / 36, 1 / 12]
A[3, :3] = [1 / 24, 0, 1 / 8]
A[4, :4] = [5 / 12, 0, -25 / 16, 25 / 16]
A[5, :5] = [1 / 20, 0, 0, 1 / 4, 1 / 5]
A[6, :6] = [-25 / 108, 0, 0, 125 / 108, -65 / 27, 125 / 54]
A[7, :7] = [31 / 300, 0, 0, 0, 61 / 225, -2 / 9, 13 / 900]
A[8, :8] = [2, 0, 0, -53 / 6, 704 / 45, -107 / 9, 67 / 90, 3]
A[9, :9] = [-91 / 108, 0, 0, 23 / 108, -976 / 135, 311 / 54, -19 / 60, 17 / 6, -1 / 12]
A[10, :10] = [
    2383 / 4100, 0, 0, -341 / 164, 4496 / 1025, -301 / 82,
    2133 / 4100, 45 / 82, 45 / 164, 18 / 41,
]
A[11, :11] = [3 / 205, 0, 0, 0, 0, -6 / 41, -3 / 205, -3 / 41, 3 / 41, 6 / 41, 0]
A[12, :12] = [
    -1777 / 4100, 0, 0, -341 / 164, 4496 / 1025, -289 / 82,
    2193 / 4100, 51 / 82, 33 / 164, 12 / 41, 0, 1,
]

# Eighth-order weights (stage 0 and 10 dropped, stages 11/12 added).
B8 = np.array(
    [0, 0, 0, 0, 0, 34 / 105, 9 / 35, 9 / 35, 9 / 280, 9 / 280, 0, 41 / 840, 41 / 840]
)

ERR_WEIGHT = 41 / 840  # error = h * ERR_WEIGHT * (k0 + k10 - k11 - k12)
