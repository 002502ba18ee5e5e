"""Run configuration: JSON schema, validation, and defaults."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from ..errors import ConfigError
from .models import GRID_KINDS, KINDS, ModelSpec, build_model, make_model

SCHEMA_VERSION = 1

ALL_SUITES = ("coefficients", "spectrum", "verify", "expansion", "invariance")
SPHERE_SUITES = ("coefficients", "spectrum", "verify")

_TOP_LEVEL_KEYS = {
    "schema_version", "model", "grid", "truncation", "t_window",
    "lambda_window", "tolerance_scale", "out", "suites", "shear",
}


@dataclass
class ShearConfig:
    """Shear profile used by the invariance suite: amp * sin(x_1) by default."""

    amp: float = 0.3
    eps: float = 0.05


@dataclass
class RunConfig:
    model: ModelSpec
    grid: tuple = (64, 64)
    truncation: int = 12
    t_window: tuple = None
    lambda_window: tuple = None
    tolerance_scale: float = 1.0
    out_dir: str = "kleinweyl-out"
    suites: tuple = ALL_SUITES
    shear: ShearConfig = field(default_factory=ShearConfig)

    def applicable_suites(self):
        return SPHERE_SUITES if self.model.kind == "sphere_ultrastatic" else ALL_SUITES

    def to_json_dict(self):
        """Config echo with every default filled in."""
        model = {"kind": self.model.kind, "name": self.model.name}
        if self.model.kind == "sphere_ultrastatic":
            model.update(mass=self.model.mass, l_max=self.model.l_max)
        else:
            model.update(
                periods=list(self.model.periods),
                lapse=self.model.lapse.to_json(),
                shift=[p.to_json() for p in self.model.shift],
                metric={f"{j},{k}": p.to_json() for (j, k), p in sorted(self.model.metric.items())},
                potential=self.model.potential.to_json(),
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "model": model,
            "grid": list(self.grid),
            "truncation": self.truncation,
            "t_window": list(self.t_window) if self.t_window else None,
            "lambda_window": list(self.lambda_window) if self.lambda_window else None,
            "tolerance_scale": self.tolerance_scale,
            "out": self.out_dir,
            "suites": list(self.suites),
            "shear": {"amp": self.shear.amp, "eps": self.shear.eps},
        }


def _window(raw, name):
    if raw is None:
        return None
    try:
        a, b = (float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a pair of numbers, got {raw!r}") from exc
    if not (math.isfinite(a) and math.isfinite(b) and 0 < a < b):
        raise ConfigError(f"{name} must satisfy 0 < a < b, got {raw!r}")
    return (a, b)


def config_from_dict(doc, base_suites=None):
    """Validate a parsed JSON document into a RunConfig (defaults filled)."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")

    model_doc = dict(doc.get("model") or {})
    kind = model_doc.pop("kind", None)
    if kind is None:
        raise ConfigError("model.kind is required")
    if kind not in KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; valid kinds: {', '.join(KINDS)}")
    name = model_doc.pop("name", None)
    periods = model_doc.pop("periods", None)
    model = make_model(kind, name=name, periods=periods, overrides=model_doc)

    grid = doc.get("grid")
    if grid is None:
        grid = (64,) * (model.dim if kind in GRID_KINDS else 2)
    grid = tuple(int(n) for n in (grid if isinstance(grid, (list, tuple)) else [grid]))
    if kind in GRID_KINDS and len(grid) == 1:
        grid = grid * model.dim

    truncation = int(doc.get("truncation", 12))
    if kind in GRID_KINDS:
        if truncation < 4:
            raise ConfigError(f"truncation must be >= 4, got {truncation}")
        if 2 * truncation + 2 > min(grid):
            raise ConfigError(
                f"truncation K={truncation} incompatible with grid {grid} "
                "(need 2K + 2 <= min grid size)"
            )

    tol_scale = float(doc.get("tolerance_scale", 1.0))
    if not tol_scale > 0:
        raise ConfigError("tolerance_scale must be positive")

    shear_doc = doc.get("shear") or {}
    shear = ShearConfig(
        amp=float(shear_doc.get("amp", 0.3)), eps=float(shear_doc.get("eps", 0.05))
    )

    cfg = RunConfig(
        model=model,
        grid=grid,
        truncation=truncation,
        t_window=_window(doc.get("t_window"), "t_window"),
        lambda_window=_window(doc.get("lambda_window"), "lambda_window"),
        tolerance_scale=tol_scale,
        out_dir=str(doc.get("out", "kleinweyl-out")),
        suites=tuple(doc.get("suites") or base_suites or cfg_default_suites(kind)),
        shear=shear,
    )
    for suite in cfg.suites:
        if suite not in ALL_SUITES:
            raise ConfigError(f"unknown suite {suite!r}; valid: {', '.join(ALL_SUITES)}")
        if suite not in cfg.applicable_suites():
            raise ConfigError(
                f"suite {suite!r} not applicable to kind {kind!r} "
                f"(valid: {', '.join(cfg.applicable_suites())})"
            )
    # building the model validates the field data (positivity, timelike Killing)
    build_model(model, sizes=grid if kind in GRID_KINDS else None)
    return cfg


def cfg_default_suites(kind):
    return SPHERE_SUITES if kind == "sphere_ultrastatic" else ALL_SUITES


def load_config(path, base_suites=None):
    """Parse and validate a JSON configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"configuration parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(doc, base_suites=base_suites)
