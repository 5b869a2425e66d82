"""Command-line interface: ness / decompose / dynamics subcommands.

Exit codes: 0 success (including partial per-point failures), 1 when every
grid point failed, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .sweep import (
    ConfigError,
    SweepConfig,
    parse_config,
    run_decomposition,
    run_dynamics,
    run_ness_sweep,
    validate_config,
)

_RUNNERS = {
    "ness": run_ness_sweep,
    "decompose": run_decomposition,
    "dynamics": run_dynamics,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibrodimer",
        description="Steady states and dynamics of a driven vibronic dimer.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("ness", "steady-state sweep over the (omega, S, lambda) grid"),
        ("decompose", "light-only and light+recombination experiments"),
        ("dynamics", "time propagation from a localized initial excitation"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="INI config file (defaults apply when omitted)")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--workers", type=int, help="parallel workers (overrides config)")
        p.add_argument("--preset", choices=["pe545"], default="pe545",
                       help="base parameter preset (default and only: pe545)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = parse_config(args.config)
        else:
            cfg = SweepConfig()
            problems = validate_config(cfg)
            if problems:
                raise ConfigError(problems)
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError(["workers must be at least 1"])
            cfg = replace(cfg, workers=args.workers)
        summary = _RUNNERS[args.command](cfg, args.out)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return 2

    print(f"{args.command}: {summary['rows']} points, {summary['failed']} failed")
    for path in summary["files"]:
        print(f"  wrote {path}")
    if summary["rows"] > 0 and summary["failed"] == summary["rows"]:
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
