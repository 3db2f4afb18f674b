#!/usr/bin/env python3
"""Regenerate the full figure set from a completed experiment run.

Usage: python3 scripts/make_figures.py MANIFEST_JSON OUT_DIR
Requires the bsmeta-plots package (see plots/).
"""

import argparse
import sys

from bsplots import render_all


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("manifest")
    p.add_argument("out_dir")
    args = p.parse_args()
    for fid, path in render_all(args.manifest, args.out_dir).items():
        print(f"{fid}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
