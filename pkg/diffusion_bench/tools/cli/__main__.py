"""
Entry point of the `diffusion-bench` CLI.

Commands:

- `figure1`: compare the schemes on logistic-regression posteriors
- `order`: empirical convergence orders on a Gaussian target
- `scores`: final error against score error at fixed step size
- `selftest`: consistency checks of the numerical building blocks

Exit status is 0 on success, 1 if a check or experiment cell failed and 2
if the configuration is invalid.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ...core.exceptions import ConfigError, DiffusionBenchError
from ..config import parse_config
from ..experiments import run_experiment
from ..outputs import emit_outputs
from ..selftest import format_report, self_test

__all__ = [
    "main",
    "build_parser",
]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

COMMANDS = {
    "figure1": "figure1",
    "order": "order_study",
    "scores": "score_sweep",
    "selftest": "self_test",
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffusion-bench",
        description="Benchmark discretization schemes of diffusion samplers",
    )
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--config", type=Path, help="TOML config file")
    parser.add_argument("--seed", type=int, dest="master_seed", help="master seed")
    parser.add_argument("--out", type=Path, dest="out_dir", help="output directory")
    parser.add_argument(
        "--h-list", type=_float_list, dest="h_list", help="step sizes, e.g. 0.2,0.1"
    )
    parser.add_argument(
        "--lambda-list",
        type=_float_list,
        dest="lambda_list",
        help="ridge parameters, e.g. 10,50",
    )
    parser.add_argument(
        "--schemes", type=_str_list, help="schemes, e.g. EM,SO (default: all)"
    )
    parser.add_argument("--n-traj", type=int, dest="n_traj", help="trajectories per cell")

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true")
    verbosity.add_argument("--quiet", "-q", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    level = (
        logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    )
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")

    overrides = {
        "experiment": COMMANDS[args.command],
        "master_seed": args.master_seed,
        "out_dir": args.out_dir,
        "h_list": args.h_list,
        "lambda_list": args.lambda_list,
        "schemes": args.schemes,
        "n_traj": args.n_traj,
    }

    try:
        cfg = parse_config(args.config, overrides)
    except ConfigError as e:
        for error in e.errors:
            print(f"config error: {error}", file=sys.stderr)
        return EXIT_CONFIG

    if cfg.experiment == "self_test":
        results = self_test(cfg)
        print(format_report(results))
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED

    try:
        result = run_experiment(cfg)
        paths = emit_outputs(result, cfg)
    except DiffusionBenchError as e:
        logging.error(str(e))
        return EXIT_FAILED

    for path in paths:
        print(path)

    if result.n_failed:
        logging.error(f"{result.n_failed} of {len(result.rows)} cell(s) failed")
        return EXIT_FAILED

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
