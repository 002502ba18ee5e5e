"""kleinweyl: spectral invariants of stationary spacetimes.

Evaluates the wave/heat-trace coefficient formulas of spatially compact
stationary spacetimes from lapse/shift/spatial-metric data and verifies them
independently against the spectrum of the time-translation generator,
geodesic small-time expansions, and slicing-invariance identities.

Subpackages are imported lazily so the CLI can cap BLAS threading before
numpy loads.
"""

__version__ = "0.1.0"

_SUBMODULES = ("geometry", "hadamard", "coefficients", "spectrum", "harness")


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        return importlib.import_module(f"{__name__}.{name}")
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
