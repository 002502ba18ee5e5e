"""Model catalog: trigonometric-polynomial tori and the analytic sphere.

Every grid-model field is a finite trigonometric polynomial specified by
(wave-vector, amplitude, phase) triples, so spectral differentiation and
quadrature are exact and tolerance breaches isolate formula errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield

import numpy as np

from ..errors import ConfigError
from ..geometry.chart import Field, PeriodicChart
from ..geometry.stationary import StationaryData

TWO_PI = 2.0 * math.pi

GRID_KINDS = (
    "flat_torus_ultrastatic",
    "shift_torus",
    "lapse_torus",
    "lapse_shift_torus",
    "curved_h_ultrastatic",
    "generic_torus",
)
KINDS = GRID_KINDS + ("sphere_ultrastatic",)


@dataclass(frozen=True)
class TrigTerm:
    wave: tuple     # integer wave vector
    amp: float
    phase: float = 0.0

    @classmethod
    def parse(cls, obj):
        try:
            return cls(tuple(int(w) for w in obj["wave"]), float(obj["amp"]),
                       float(obj.get("phase", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad trigonometric term {obj!r}: {exc}") from exc

    def to_json(self):
        return {"wave": list(self.wave), "amp": self.amp, "phase": self.phase}


@dataclass(frozen=True)
class TrigPolynomial:
    const: float = 0.0
    terms: tuple = ()

    @classmethod
    def parse(cls, obj):
        if isinstance(obj, (int, float)):
            return cls(const=float(obj))
        terms = tuple(TrigTerm.parse(t) for t in obj.get("terms", ()))
        return cls(const=float(obj.get("const", 0.0)), terms=terms)

    def sample(self, chart):
        grids = chart.grids()
        out = np.full(chart.sizes, self.const)
        for term in self.terms:
            if len(term.wave) != chart.dim:
                raise ConfigError(
                    f"wave vector {term.wave} does not match dimension {chart.dim}"
                )
            phase = sum(
                TWO_PI * m / p * g for m, p, g in zip(term.wave, chart.periods, grids)
            )
            out = out + term.amp * np.cos(phase + term.phase)
        return out

    def to_json(self):
        return {"const": self.const, "terms": [t.to_json() for t in self.terms]}


def _sin_term(wave, amp):
    return TrigTerm(tuple(wave), amp, phase=-math.pi / 2.0)


@dataclass(frozen=True)
class ModelSpec:
    """Validated description of one catalog model."""

    name: str
    kind: str
    periods: tuple = (TWO_PI, TWO_PI)
    lapse: TrigPolynomial = TrigPolynomial(const=1.0)
    shift: tuple = ()          # one TrigPolynomial per spatial component
    metric: dict = dfield(default_factory=dict)  # (j, k) -> TrigPolynomial
    potential: TrigPolynomial = TrigPolynomial(const=0.0)
    mass: float = 0.0          # sphere only
    l_max: int = 80            # sphere only

    @property
    def dim(self):
        return len(self.periods)

    def constant_shift(self):
        """Constant shift vector, or None if any component varies."""
        if not self.shift:
            return np.zeros(self.dim)
        if any(p.terms for p in self.shift):
            return None
        return np.array([p.const for p in self.shift])


@dataclass(frozen=True)
class SphereModel:
    """Analytic unit-sphere ultrastatic handle (no grid operations)."""

    mass: float = 0.0
    l_max: int = 80

    dim_spacetime = 3
    scal = 2.0
    area = 4.0 * math.pi

    def spectrum(self, cutoff):
        from ..spectrum.solve import analytic_spectrum

        return analytic_spectrum(
            "sphere_ultrastatic", cutoff, mass=self.mass, l_max=self.l_max
        )

    def heat_coefficients(self):
        # a0 = 2/(4 pi) * area, a1 = 2/(4 pi) * area * (scal/6 - mass^2)
        a0 = 2.0 / (4.0 * math.pi) * self.area
        a1 = 2.0 / (4.0 * math.pi) * self.area * (self.scal / 6.0 - self.mass**2)
        return a0, a1

    def weyl_constant(self):
        # unit Killing norm: Vol(B_2) * area
        return math.pi * self.area

    def v1_value(self):
        return self.scal / 6.0 - self.mass**2


def _model_defaults(kind, periods):
    d = len(periods)
    zero = TrigPolynomial()
    one = TrigPolynomial(const=1.0)
    delta = {(j, j): one for j in range(d)}
    if kind == "flat_torus_ultrastatic":
        return dict(lapse=one, shift=(), metric=delta, potential=zero)
    if kind == "shift_torus":
        shift = tuple(
            TrigPolynomial(const=0.5 if j == 0 else 0.0) for j in range(d)
        )
        return dict(lapse=one, shift=shift, metric=delta, potential=zero)
    if kind == "lapse_torus":
        lapse = TrigPolynomial(const=1.0, terms=(TrigTerm((1,) + (0,) * (d - 1), 0.2),))
        return dict(lapse=lapse, shift=(), metric=delta, potential=zero)
    if kind == "lapse_shift_torus":
        # reference model
        lapse = TrigPolynomial(const=1.0, terms=(TrigTerm((1,) + (0,) * (d - 1), 0.2),))
        wy = (0, 1) + (0,) * (d - 2)
        shift = tuple(
            TrigPolynomial(const=0.3, terms=(TrigTerm(wy, 0.1),)) if j == 0
            else TrigPolynomial()
            for j in range(d)
        )
        hdiag = TrigPolynomial(const=1.0, terms=(TrigTerm((1,) + (0,) * (d - 1), 0.1),))
        metric = {(j, j): hdiag for j in range(d)}
        return dict(lapse=lapse, shift=shift, metric=metric, potential=zero)
    if kind == "curved_h_ultrastatic":
        wx = (1,) + (0,) * (d - 1)
        wy = (0, 1) + (0,) * (d - 2)
        wxy = (1, 1) + (0,) * (d - 2)
        metric = {(j, j): TrigPolynomial(const=1.0) for j in range(d)}
        metric[(0, 0)] = TrigPolynomial(const=1.0, terms=(TrigTerm(wx, 0.2),))
        metric[(1, 1)] = TrigPolynomial(const=1.0, terms=(TrigTerm(wy, 0.15),))
        metric[(0, 1)] = TrigPolynomial(terms=(TrigTerm(wxy, 0.1),))
        potential = TrigPolynomial(const=0.1, terms=(TrigTerm(wx, 0.05),))
        return dict(lapse=one, shift=(), metric=metric, potential=potential)
    if kind == "generic_torus":
        return dict(lapse=one, shift=(), metric=delta, potential=zero)
    raise ConfigError(f"no grid defaults for kind {kind!r}")


def make_model(kind, name=None, periods=None, overrides=None):
    """Catalog model with defaults, optionally overridden field by field."""
    if kind not in KINDS:
        raise ConfigError(
            f"unknown model kind {kind!r}; valid kinds: {', '.join(KINDS)}"
        )
    overrides = dict(overrides or {})
    if kind == "sphere_ultrastatic":
        return ModelSpec(
            name=name or kind,
            kind=kind,
            periods=(),
            mass=float(overrides.pop("mass", 0.0)),
            l_max=int(overrides.pop("l_max", 80)),
        )
    periods = tuple(float(p) for p in (periods or (TWO_PI, TWO_PI)))
    fields = _model_defaults(kind, periods)
    for key in ("lapse", "potential"):
        if key in overrides:
            fields[key] = TrigPolynomial.parse(overrides.pop(key))
    if "shift" in overrides:
        raw = overrides.pop("shift")
        if isinstance(raw, (list, tuple)) and raw and isinstance(raw[0], (int, float)):
            fields["shift"] = tuple(TrigPolynomial(const=float(v)) for v in raw)
        else:
            fields["shift"] = tuple(TrigPolynomial.parse(p) for p in raw)
    if "metric" in overrides:
        parsed = {}
        for key, val in overrides.pop("metric").items():
            j, k = (int(s) for s in str(key).split(","))
            parsed[(min(j, k), max(j, k))] = TrigPolynomial.parse(val)
        fields["metric"] = parsed
    if overrides:
        raise ConfigError(f"unknown model parameters: {sorted(overrides)}")
    return ModelSpec(name=name or kind, kind=kind, periods=periods, **fields)


def build_model(spec, sizes=None):
    """Realize a ModelSpec as StationaryData (grid kinds) or SphereModel."""
    if spec.kind == "sphere_ultrastatic":
        return SphereModel(mass=spec.mass, l_max=spec.l_max)
    d = spec.dim
    sizes = tuple(int(n) for n in (sizes or (64,) * d))
    if len(sizes) == 1:
        sizes = sizes * d
    chart = PeriodicChart(sizes=sizes, periods=spec.periods)

    lapse = spec.lapse.sample(chart)
    shift = np.zeros((d,) + chart.sizes)
    for j, poly in enumerate(spec.shift):
        shift[j] = poly.sample(chart)
    h = np.zeros((d, d) + chart.sizes)
    for (j, k), poly in spec.metric.items():
        h[j, k] = poly.sample(chart)
        if j != k:
            h[k, j] = h[j, k]
    potential = spec.potential.sample(chart)
    return StationaryData(
        chart,
        Field(chart, "scalar", lapse),
        Field(chart, "vector", shift),
        Field(chart, "sym2", h),
        Field(chart, "scalar", potential),
    )
