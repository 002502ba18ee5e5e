"""Normalization constants of the singular-kernel family and their limits.

The family constant is

    C(beta, n) = 2^(-n-2*beta) * pi^((2-n)/2) / (Gamma(beta + n/2) * Gamma(beta + 1)),

total in beta via the reciprocal Gamma convention (value 0 at the poles).
Three specific limits of rescaled constants enter the second trace
coefficient; each has a closed form and an independent small-offset numeric
evaluation through the reflection-formula representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, rgamma

from ..errors import DimensionError


def riesz_constant(beta, n):
    """C(beta, n); factorials read as Gamma(z + 1), reciprocal at the poles."""
    if n < 3:
        raise DimensionError(f"constant defined for n >= 3, got {n}")
    return float(
        2.0 ** (-n - 2.0 * beta)
        * np.pi ** ((2.0 - n) / 2.0)
        * rgamma(beta + (n - 2.0) / 2.0 + 1.0)
        * rgamma(beta + 1.0)
    )


def _rescaled_odd(beta, n):
    """2/(2*beta+n) * C(beta,n) |s|^(2*beta+1) as a mu-family coefficient.

    Reflection-formula representation, finite wherever the limit exists:
    -C(beta,n) / (sin(pi*beta) * Gamma(-2*beta-1)) * 2/(2*beta+n).
    """
    return (
        -riesz_constant(beta, n)
        / (np.sin(np.pi * beta) * gamma(-2.0 * beta - 1.0))
        * 2.0
        / (2.0 * beta + n)
    )


def _rescaled_odd3(beta, n):
    """1/(2*beta+n) * C(beta,n) |s|^(2*beta+3) as a mu-family coefficient."""
    return (
        riesz_constant(beta, n)
        / (np.sin(np.pi * beta) * gamma(-2.0 * beta - 3.0))
        / (2.0 * beta + n)
    )


@dataclass(frozen=True)
class LimitConstants:
    """Closed forms and numeric small-offset limits of the three constants."""

    n: int
    first: float    # at beta -> -n/2 of the |s|^(2b+1) family
    second: float   # at beta -> -n/2 of the |s|^(2b+3) family
    third: float    # at beta -> 1 - n/2 of the |s|^(2b+1) family
    numeric_first: float
    numeric_second: float
    numeric_third: float

    @property
    def max_rel_deviation(self):
        devs = [
            abs(self.numeric_first - self.first) / abs(self.first),
            abs(self.numeric_second - self.second) / abs(self.second),
            abs(self.numeric_third - self.third) / abs(self.third),
        ]
        return float(max(devs))


def limit_constants(n, eps_values=(1e-5, 1e-6), rel_tol=1e-4):
    """Closed-form limit constants, cross-checked numerically.

    The first constant exists for n >= 3; the other two carry Gamma(n-3)
    and are only defined for n >= 4.
    """
    if n < 3:
        raise DimensionError(f"need n >= 3, got {n}")
    first = float(np.pi ** (-n / 2.0) * gamma(n / 2.0) / gamma(n - 1.0))
    if n < 4:
        raise DimensionError(
            "the two Gamma(n-3)-bearing limit constants are undefined for n = 3"
        )
    second = float(-np.pi ** (-n / 2.0) * gamma(1.0 + n / 2.0) / (n * gamma(n - 3.0)))
    third = float(np.pi ** (-n / 2.0) * gamma(n / 2.0 - 1.0) / (4.0 * gamma(n - 3.0)))

    num = {}
    for name, fn, target in (
        ("first", _rescaled_odd, -n / 2.0),
        ("second", _rescaled_odd3, -n / 2.0),
        ("third", _rescaled_odd, 1.0 - n / 2.0),
    ):
        vals = [fn(target + e, n) for e in eps_values]
        num[name] = float(vals[-1])

    out = LimitConstants(
        n=n,
        first=first,
        second=second,
        third=third,
        numeric_first=num["first"],
        numeric_second=num["second"],
        numeric_third=num["third"],
    )
    if out.max_rel_deviation > rel_tol:
        raise DimensionError(
            f"numeric limit check failed at n={n}: deviation {out.max_rel_deviation:.2e}"
        )
    return out
