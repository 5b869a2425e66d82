#!/usr/bin/env python3
"""Bath-decomposition experiments: steady states with phonons and trapping
off, once with light only and once with light plus recombination."""

import argparse

from vibrodimer.sweep import SweepConfig, parse_config, run_decomposition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="INI file overriding the defaults")
    ap.add_argument("--out", default="out/decomposition")
    args = ap.parse_args()
    cfg = parse_config(args.config) if args.config else SweepConfig()
    summary = run_decomposition(cfg, args.out)
    print(f"{summary['rows']} points ({summary['failed']} failed) -> {args.out}")


if __name__ == "__main__":
    main()
