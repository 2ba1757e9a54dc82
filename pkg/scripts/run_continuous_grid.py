#!/usr/bin/env python3
"""Run the continuous-endpoint reference grid and drop plot-ready tables.

Full size (5000 replicates per grid point) takes a few minutes on one core;
pass --reps to shrink it while iterating.
"""

import argparse
import sys
from pathlib import Path

from hctrial.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def parse_args() -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/continuous_main", help="output directory")
    ap.add_argument("--reps", type=int, default=None, help="override replications")
    ap.add_argument("--seed", type=int, default=None, help="override master seed")
    ap.add_argument("--workers", type=int, default=1)
    return ap.parse_args()


def main() -> int:
    args = parse_args()
    argv = [
        "--config", str(ROOT / "configs" / "continuous_main.yaml"),
        "--out", args.out,
        "--workers", str(args.workers),
    ]
    if args.reps is not None:
        argv += ["--reps-override", str(args.reps)]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
