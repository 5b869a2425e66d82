#!/usr/bin/env python3
"""Time-dependent runs from a donor-localized excitation, one trajectory
per intramolecular frequency at fixed vibronic coupling."""

import argparse
from dataclasses import replace

from vibrodimer.sweep import SweepConfig, parse_config, run_dynamics


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="INI file overriding the defaults")
    ap.add_argument("--out", default="out/dynamics")
    ap.add_argument("--lambda-elec", type=float,
                    help="electronic reorganization energy override (cm^-1)")
    args = ap.parse_args()
    cfg = parse_config(args.config) if args.config else SweepConfig()
    if args.lambda_elec is not None:
        cfg = replace(cfg, dynamics_lambda=(args.lambda_elec, cfg.dynamics_lambda[1]))
    summary = run_dynamics(cfg, args.out)
    print(f"{summary['rows']} runs ({summary['failed']} failed) -> {args.out}")


if __name__ == "__main__":
    main()
