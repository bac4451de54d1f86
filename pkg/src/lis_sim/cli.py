"""Command-line front end.

    lis-sim <experiment> --config <file> [--out <dir>] [--seed <u64>]
            [--paper-scale] [--no-figures]

Experiments: latency-breakdown, sweep-fixed-m, sweep-fixed-n, chain-trace,
validate. Without --config the desk-scale defaults run as-is; --paper-scale
switches to the full published scenario and prints a runtime warning. The
thread count is controlled only by the LIS_SIM_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    load_config,
    paper_scale_config,
    validate_for_experiment,
)
from .experiments import (
    run_chain_trace,
    run_latency_breakdown,
    run_sweep_fixed_m,
    run_sweep_fixed_n,
    run_validate,
)

log = logging.getLogger(__name__)

_RUNNERS = {
    "latency-breakdown": run_latency_breakdown,
    "sweep-fixed-m": run_sweep_fixed_m,
    "sweep-fixed-n": run_sweep_fixed_n,
    "chain-trace": run_chain_trace,
    "validate": run_validate,
}

MAX_SEED = 2 ** 64 - 1


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit value")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lis-sim",
        description="panel-based large intelligent surface uplink simulator",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", metavar="FILE",
                       help="JSON config file (defaults apply when omitted)")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default: out/<experiment>)")
        p.add_argument("--seed", type=_seed, metavar="U64",
                       help="override the Monte-Carlo master seed")
        p.add_argument("--paper-scale", action="store_true",
                       help="full published scenario (hours of runtime)")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering, write CSV/JSON only")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.paper_scale:
        cfg = paper_scale_config(cfg)
        print("paper-scale scenario enabled: M=1024, K=128, 100 x 1000 "
              "realizations; expect a very long run", file=sys.stderr)
    if args.seed is not None:
        cfg = replace(cfg, monte_carlo=replace(cfg.monte_carlo,
                                               master_seed=args.seed))
    if args.no_figures:
        cfg = replace(cfg, figures=False)
    validate_for_experiment(cfg, args.experiment)
    return cfg


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    out_dir = args.out if args.out is not None else f"out/{args.experiment}"
    outcome = _RUNNERS[args.experiment](cfg, out_dir)

    if args.experiment == "validate":
        for r in outcome["results"]:
            print(f"{r.status} {r.name}: {r.detail}")
        if not outcome["passed"]:
            print("validation FAILED", file=sys.stderr)
            return 1
        print("all checks passed")
    else:
        print(f"wrote {outcome['csv']}")
        for fig in outcome.get("figures", []):
            print(f"wrote {fig}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
