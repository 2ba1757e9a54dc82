#!/usr/bin/env python3
"""Calibrate interim timing and borrowing threshold for the bundled case study.

Writes the borrowing-probability table over the configured drift levels plus
the saved-patients block, and prints the selected (t, gamma) pair.
"""

import argparse
import json
import sys
from pathlib import Path

from hctrial.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/case_study")
    ap.add_argument("--reps", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    argv = [
        "--config", str(ROOT / "configs" / "case_study.yaml"),
        "--out", args.out,
    ]
    if args.reps is not None:
        argv += ["--reps-override", str(args.reps)]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    rc = cli_main(argv)
    if rc == 0:
        summary = json.loads((Path(args.out) / "summary.json").read_text())
        print("admissible:", summary["admissible"])
        print("selected:", summary["selected"])
    return rc


if __name__ == "__main__":
    sys.exit(main())
