"""Command-line entry point.

Subcommands select the suites to run; every numeric flag overrides the
corresponding configuration entry.  KLEINWEYL_THREADS caps the BLAS/OpenMP
parallelism and must therefore be applied before numpy is imported, which is
why the heavy imports live inside main().
"""

from __future__ import annotations

import argparse
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_TOLERANCE = 4

_SUITE_COMMANDS = ("coefficients", "spectrum", "verify", "expansion", "invariance", "all")


def _apply_thread_cap():
    cap = os.environ.get("KLEINWEYL_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def _parser():
    parser = argparse.ArgumentParser(
        prog="kleinweyl",
        description="Trace-coefficient evaluation and spectral verification "
        "for stationary spacetimes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUITE_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} suite(s)")
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--grid", help="grid sizes, e.g. 64 or 64,64")
        p.add_argument("--truncation", type=int, help="Fourier truncation K")
        p.add_argument("--t-window", help="heat-fit window a,b")
        p.add_argument("--lambda-window", help="counting-fit window a,b")
        p.add_argument("--out", help="output directory")
        p.add_argument("--tolerance-scale", type=float, help="multiply all tolerances")
    return parser


def _parse_pair(text, name):
    from ..errors import ConfigError

    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--{name} expects two comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def main(argv=None):
    _apply_thread_cap()
    args = _parser().parse_args(argv)

    from ..errors import ConfigError, KleinweylError
    from .config import load_config
    from .report import run_report

    try:
        config = load_config(args.config)
        if args.command != "all":
            if args.command not in config.applicable_suites():
                raise ConfigError(
                    f"suite {args.command!r} not applicable to this model "
                    f"(valid: {', '.join(config.applicable_suites())})"
                )
            config.suites = (args.command,)
        else:
            config.suites = config.applicable_suites()
        if args.grid:
            doc = config.to_json_dict()
            doc["grid"] = [int(v) for v in args.grid.split(",")]
            config = _reload(doc, config.suites)
        if args.truncation is not None:
            doc = config.to_json_dict()
            doc["truncation"] = args.truncation
            config = _reload(doc, config.suites)
        if args.t_window:
            config.t_window = _parse_pair(args.t_window, "t-window")
        if args.lambda_window:
            config.lambda_window = _parse_pair(args.lambda_window, "lambda-window")
        if args.out:
            config.out_dir = args.out
        if args.tolerance_scale is not None:
            config.tolerance_scale = args.tolerance_scale
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return run_report(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KleinweylError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _reload(doc, suites):
    from .config import config_from_dict

    cfg = config_from_dict(doc)
    cfg.suites = suites
    return cfg


if __name__ == "__main__":
    sys.exit(main())
