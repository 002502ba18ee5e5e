"""Exception hierarchy shared by all kleinweyl modules."""


class KleinweylError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(KleinweylError):
    """Invalid configuration file or model parameters (CLI exit code 2)."""


class TimelikeViolationError(ConfigError):
    """The Killing field fails to be timelike somewhere on the chart."""

    def __init__(self, worst_value, location):
        self.worst_value = float(worst_value)
        self.location = tuple(float(c) for c in location)
        super().__init__(
            "lapse**2 - |shift|**2 must be positive everywhere; "
            f"worst value {self.worst_value:.6g} at x = {self.location}"
        )


class TruncationError(ConfigError):
    """Requested mode truncation cannot be represented on the chart grid."""


class NumericalError(KleinweylError):
    """A solver failed outright (CLI exit code 3)."""


class IntegrationError(NumericalError):
    """Adaptive geodesic integration failed (e.g. step-size underflow)."""


class ShootingConvergenceError(NumericalError):
    """Two-point geodesic boundary value iteration did not converge."""

    def __init__(self, residual, iterations):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"shooting failed to converge after {self.iterations} iterations "
            f"(last position residual {self.residual:.3e})"
        )


class FitConditionError(NumericalError):
    """Least-squares design matrix too ill-conditioned to trust."""


class DimensionError(KleinweylError):
    """Operation requested in an unsupported spacetime dimension."""


class WindowError(KleinweylError):
    """Evaluation requested outside the trusted parameter window."""
