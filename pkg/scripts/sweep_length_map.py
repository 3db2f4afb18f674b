#!/usr/bin/env python3
"""Sweep the return-length map L(alpha) for one configuration.

Usage: python3 scripts/sweep_length_map.py --eps 0.06 --h gauss OUT_CSV
"""

import argparse
import sys

from bsmeta.cli import main as cli_main


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("out_csv")
    p.add_argument("--eps", type=float, default=0.06)
    p.add_argument("--h", default="gauss")
    p.add_argument("--alpha-min", type=float, default=0.02)
    p.add_argument("--alpha-max", type=float, default=0.88)
    p.add_argument("--steps", type=int, default=60)
    a = p.parse_args()
    return cli_main(["shoot", "--eps", str(a.eps), "--h", a.h,
                     "--alpha-min", str(a.alpha_min),
                     "--alpha-max", str(a.alpha_max),
                     "--alpha-steps", str(a.steps), "--out", a.out_csv])


if __name__ == "__main__":
    sys.exit(main())
