"""Killing-field quantities of the stationary metric.

The Killing field is the coordinate vector along t (components delta^mu_0).
The future unit normal of the constant-t slices is

    nu = (d_t - shift^j d_j) / lapse,

with orientation nu^0 > 0.  Covariant derivatives along the Killing field
reduce to Christoffel contractions because the component vector is constant:

    (grad_Z Z)^l    = Gamma^l_{00}
    (grad_Z^2 Z)^l  = Gamma^l_{0m} Gamma^m_{00}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError
from .chart import spatial_gradient
from .stationary import dalembert_scalar


@dataclass
class KillingPack:
    """Grid samples of every Killing-field quantity used downstream."""

    metric: "SpacetimeMetric"
    norm_sq: np.ndarray       # |Z|^2 = lapse^2 - |shift|^2
    normal: np.ndarray        # nu components, (D, *grid)
    accel: np.ndarray         # grad_Z Z, (D, *grid)
    accel2: np.ndarray        # grad_Z grad_Z Z, (D, *grid)
    ricci_zz: np.ndarray      # Ric(Z, Z)
    ricci_nu_z: np.ndarray    # Ric(nu, Z)
    twist_cov: np.ndarray     # gamma_j = -|Z|^{-2} h_jk shift^k, (d, *grid)
    accel_sq: np.ndarray      # g(grad_Z Z, grad_Z Z)
    accel_nu: np.ndarray      # g(grad_Z Z, nu)
    accel2_nu: np.ndarray     # g(grad_Z^2 Z, nu)

    @property
    def chart(self):
        return self.metric.chart

    def norm(self):
        return np.sqrt(self.norm_sq)

    def identity_residuals(self):
        """Residuals of the structural identities used as self-checks."""
        g = self.metric.components
        scale = max(float(np.abs(self.accel_sq).max()), 1.0)
        z_accel = np.einsum("m...,m...->...", g[0], self.accel)
        z_accel2 = np.einsum("m...,m...->...", g[0], self.accel2) + self.accel_sq
        nu_norm = np.einsum(
            "m...,mn...,n...->...", self.normal, g, self.normal
        ) + 1.0
        nu_tangent = np.abs(
            np.einsum("m...,mj...->j...", self.normal, g[:, 1:])
        ).max()
        return {
            "killing_accel_orthogonal": float(np.abs(z_accel).max()) / scale,
            "accel2_pairing": float(np.abs(z_accel2).max()) / scale,
            "normal_unit": float(np.abs(nu_norm).max()),
            "normal_tangent_orthogonal": float(nu_tangent),
        }


def killing_quantities(data, curv):
    """Assemble the KillingPack from stationary data and its curvature."""
    metric = curv.metric
    chart = data.chart
    g = metric.components
    gamma = curv.christoffel
    lapse = data.lapse.values

    norm_sq = -g[0, 0]
    if not np.all(norm_sq > 0):
        raise NumericalError("Killing norm squared not positive on the grid")

    D = chart.dim + 1
    normal = np.zeros((D,) + chart.sizes)
    normal[0] = 1.0 / lapse
    normal[1:] = -data.shift.values / lapse

    accel = gamma[:, 0, 0]
    accel2 = np.einsum("lm...,m...->l...", gamma[:, 0, :], accel)

    ricci_zz = curv.ricci[0, 0]
    ricci_nu_z = np.einsum("m...,m...->...", normal, curv.ricci[:, 0])

    twist_cov = -data.shift_covector() / norm_sq

    accel_low = np.einsum("mn...,n...->m...", g, accel)
    accel_sq = np.einsum("m...,m...->...", accel_low, accel)
    accel_nu = np.einsum("m...,m...->...", accel_low, normal)
    accel2_nu = np.einsum(
        "mn...,m...,n...->...", g, accel2, normal
    )

    return KillingPack(
        metric=metric,
        norm_sq=norm_sq,
        normal=normal,
        accel=accel,
        accel2=accel2,
        ricci_zz=ricci_zz,
        ricci_nu_z=ricci_nu_z,
        twist_cov=twist_cov,
        accel_sq=accel_sq,
        accel_nu=accel_nu,
        accel2_nu=accel2_nu,
    )


def killing_equation_residual(metric, curv=None):
    """Max over the grid and index pairs of |grad_m Z_n + grad_n Z_m|."""
    from .curvature import christoffel

    if curv is None:
        curv = christoffel(metric)
    chart = metric.chart
    z_cov = metric.components[:, 0]  # Z_n = g_{n0}
    dz = np.zeros((chart.dim + 1,) + z_cov.shape)
    dz[1:] = spatial_gradient(z_cov, chart)
    nabla = dz - np.einsum("lmn...,l...->mn...", curv.christoffel, z_cov)
    return float(np.abs(nabla + np.swapaxes(nabla, 0, 1)).max())


@dataclass
class ConformalPack:
    """Quantities of the rescaled metric |Z|^{-2} g used by the invariance suite."""

    ric_tilde_zn: np.ndarray   # Ric~(Z, nu)
    scal_tilde: np.ndarray     # R~ (formula already carries the |Z|^2 factors)
    box_phi: np.ndarray        # wave operator applied to phi = -log|Z|
    grad_phi_sq: np.ndarray    # g^{-1}(d phi, d phi)
    hess_phi_zn: np.ndarray    # (Hess phi)(Z, nu)


def conformal_pack(data, curv, kp):
    """Conformal-change data for the rescaling by the inverse Killing norm.

    With phi = -log|Z| (time independent):

      Ric~(Z,nu) = Ric(Z,nu) + box(phi) g(Z,nu)
                   - (n-2) g^{-1}(dphi,dphi) g(Z,nu) - (n-2) Hess(phi)(Z,nu)
      R~ = R |Z|^2 + 2(n-1)|Z|^2 box(phi) - (n-2)(n-1)|Z|^2 g^{-1}(dphi,dphi)
    """
    metric = curv.metric
    chart = data.chart
    n = data.dim_spacetime
    phi = -0.5 * np.log(kp.norm_sq)

    box_phi = dalembert_scalar(metric, phi)
    dphi = spatial_gradient(phi, chart)
    grad_phi_sq = np.einsum("jk...,j...,k...->...", metric.inverse[1:, 1:], dphi, dphi)

    # Hess(phi)(Z, nu) = -nu^m Gamma^j_{m 0} d_j phi  (phi time independent)
    hess_zn = -np.einsum(
        "m...,jm...,j...->...", kp.normal, curv.christoffel[1:, :, 0], dphi
    )

    g_zn = -data.lapse.values  # g(Z, nu)
    ric_zn = kp.ricci_nu_z
    ric_tilde_zn = (
        ric_zn
        + box_phi * g_zn
        - (n - 2) * grad_phi_sq * g_zn
        - (n - 2) * hess_zn
    )
    scal_tilde = kp.norm_sq * (
        curv.scal + 2.0 * (n - 1) * box_phi - (n - 2) * (n - 1) * grad_phi_sq
    )
    return ConformalPack(
        ric_tilde_zn=ric_tilde_zn,
        scal_tilde=scal_tilde,
        box_phi=box_phi,
        grad_phi_sq=grad_phi_sq,
        hess_phi_zn=hess_zn,
    )
