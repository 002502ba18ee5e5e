"""Dense eigenvalue solve of the linearized pencil and analytic catalogs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from ..errors import ConfigError, NumericalError


@dataclass(frozen=True)
class SpectralFilters:
    """Partition tolerances for raw linearization eigenvalues."""

    tau_im: float = 1e-6       # relative imaginary-part tolerance
    lambda_min: float = 1e-8   # modulus below which roots join the kernel block


@dataclass
class SpectrumResult:
    """Partitioned time-translation generator spectrum."""

    lambdas: np.ndarray              # retained real eigenvalues, ascending
    near_zero: np.ndarray            # |lambda| < lambda_min (kernel block candidates)
    discarded_complex: np.ndarray    # imaginary part beyond tolerance
    lambda_cut: float                # trust cutoff for asymptotics
    provenance: str                  # "analytic" | "discretized"
    dim_spacetime: int
    pencil_size: Optional[int] = None

    def count_total(self):
        return len(self.lambdas) + len(self.near_zero) + len(self.discarded_complex)

    def positive(self):
        return self.lambdas[self.lambdas > 0]


def solve_spectrum(pair, filters=None, pencil=None, lambda_cut=None, dim_spacetime=None):
    """Solve the linearized pair and partition the eigenvalues.

    `pair` is the (M, N) output of linearize(); N may be the identity.
    """
    filters = filters or SpectralFilters()
    big, nmat = pair
    try:
        if nmat is None or np.allclose(nmat, np.eye(nmat.shape[0])):
            raw = scipy.linalg.eigvals(big)
        else:
            raw = scipy.linalg.eigvals(big, nmat)
    except Exception as exc:  # pragma: no cover - LAPACK failure path
        raise NumericalError(f"dense eigenvalue solve failed: {exc}") from exc

    near = np.abs(raw) < filters.lambda_min
    rest = raw[~near]
    real_ok = np.abs(rest.imag) <= filters.tau_im * (1.0 + np.abs(rest))
    lambdas = np.sort(rest.real[real_ok])
    discarded = rest[~real_ok]

    if pencil is not None:
        lambda_cut = pencil.lambda_cut
        dim_spacetime = pencil.dim_spacetime
    if lambda_cut is None:
        raise ConfigError("lambda_cut required when no pencil is supplied")
    result = SpectrumResult(
        lambdas=lambdas,
        near_zero=raw[near],
        discarded_complex=discarded,
        lambda_cut=float(lambda_cut),
        provenance="discretized",
        dim_spacetime=int(dim_spacetime or 0),
        pencil_size=big.shape[0] // 2,
    )
    if result.count_total() != big.shape[0]:
        raise NumericalError("eigenvalue bookkeeping lost roots")
    return result


def spectrum_of_pencil(pencil, filters=None):
    from .pencil import linearize

    return solve_spectrum(linearize(pencil), filters=filters, pencil=pencil)


def _flat_dispersion_spectrum(periods, shift, cutoff):
    """lambda = -w.k +/- |k| over the dual lattice, |lambda| <= cutoff."""
    periods = np.asarray(periods, dtype=np.float64)
    shift = np.asarray(shift, dtype=np.float64)
    wnorm = float(np.sqrt(shift @ shift))
    if wnorm >= 1.0:
        raise ConfigError("constant shift must satisfy |w| < 1")
    reach = cutoff / (1.0 - wnorm)
    bounds = [int(np.ceil(reach * p / (2.0 * np.pi))) for p in periods]
    ranges = [np.arange(-b, b + 1) for b in bounds]
    mesh = np.meshgrid(*ranges, indexing="ij")
    m = np.stack([g.ravel() for g in mesh], axis=1)
    m = m[np.any(m != 0, axis=1)]
    k = m * (2.0 * np.pi / periods)
    knorm = np.linalg.norm(k, axis=1)
    drift = k @ shift
    lams = np.concatenate([-drift + knorm, -drift - knorm])
    return np.sort(lams[np.abs(lams) <= cutoff])


def _sphere_spectrum(mass, cutoff, l_max):
    """Unit-sphere ultrastatic catalog: lambda = +/- sqrt(l(l+1) + mass^2)."""
    lams = []
    near = []
    l_start = 1 if mass == 0.0 else 0
    if mass == 0.0:
        near = [0.0, 0.0]  # constants and the linear-in-t solution
    for l in range(l_start, l_max + 1):
        lam = np.sqrt(l * (l + 1) + mass**2)
        if lam > cutoff:
            break
        lams.extend([lam] * (2 * l + 1))
        lams.extend([-lam] * (2 * l + 1))
    return np.sort(np.asarray(lams)), np.asarray(near)


def analytic_spectrum(model, cutoff, periods=None, shift=None, mass=0.0, l_max=10_000):
    """Closed-form spectra for the constant-coefficient and sphere catalogs.

    model: "flat_torus" (shift treated as zero), "shift_torus", or
    "sphere_ultrastatic".
    """
    cutoff = float(cutoff)
    if model in ("flat_torus", "shift_torus"):
        if periods is None:
            raise ConfigError("torus models need periods")
        d = len(periods)
        if shift is None or model == "flat_torus":
            shift = np.zeros(d)
        lams = _flat_dispersion_spectrum(periods, shift, cutoff)
        return SpectrumResult(
            lambdas=lams,
            near_zero=np.array([0.0, 0.0]),  # doubled root of the zero mode
            discarded_complex=np.array([], dtype=np.complex128),
            lambda_cut=cutoff,
            provenance="analytic",
            dim_spacetime=d + 1,
        )
    if model == "sphere_ultrastatic":
        lams, near = _sphere_spectrum(float(mass), cutoff, int(l_max))
        return SpectrumResult(
            lambdas=lams,
            near_zero=near,
            discarded_complex=np.array([], dtype=np.complex128),
            lambda_cut=cutoff,
            provenance="analytic",
            dim_spacetime=3,
        )
    raise ConfigError(
        f"unknown analytic model {model!r}; "
        "expected flat_torus, shift_torus or sphere_ultrastatic"
    )
