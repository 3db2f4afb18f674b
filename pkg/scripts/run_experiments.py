#!/usr/bin/env python3
"""Run the full scripted experiment suite and write artifacts + manifest.

Usage: python3 scripts/run_experiments.py OUT_DIR [--include-slow]
"""

import argparse
import sys

from bsmeta.experiments import run_all


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("out_dir")
    p.add_argument("--include-slow", action="store_true",
                   help="add the bounded-horizon eps = 0.003 plateau run")
    args = p.parse_args()
    mpath = run_all(args.out_dir, include_slow=args.include_slow)
    print(f"manifest written to {mpath}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
