#!/usr/bin/env python3
"""Run the binary-endpoint reference grid.

The binary credible intervals are Monte Carlo (100k paired draws per trial),
so the full grid is the slowest bundled campaign; start with --reps 500.
"""

import argparse
import sys
from pathlib import Path

from hctrial.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/binary_main")
    ap.add_argument("--reps", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    argv = [
        "--config", str(ROOT / "configs" / "binary_main.yaml"),
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
