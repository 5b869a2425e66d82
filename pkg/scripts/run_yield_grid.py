#!/usr/bin/env python3
"""Full steady-state yield/coherence grid over (omega, S) for all four
bath-coupling pairs; the dataset behind the heatmap and line figures."""

import argparse
from dataclasses import replace

from vibrodimer.sweep import SweepConfig, parse_config, run_ness_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="INI file overriding the defaults")
    ap.add_argument("--out", default="out/yield_grid")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    cfg = parse_config(args.config) if args.config else SweepConfig()
    cfg = replace(cfg, workers=args.workers)
    summary = run_ness_sweep(cfg, args.out)
    print(f"{summary['rows']} points ({summary['failed']} failed) -> {args.out}")


if __name__ == "__main__":
    main()
