"""CLI, model catalog, configuration, and report generation."""

from .config import ALL_SUITES, RunConfig, config_from_dict, load_config
from .models import KINDS, ModelSpec, SphereModel, build_model, make_model
from .report import run_report

__all__ = [
    "ALL_SUITES",
    "RunConfig",
    "config_from_dict",
    "load_config",
    "KINDS",
    "ModelSpec",
    "SphereModel",
    "build_model",
    "make_model",
    "run_report",
]
