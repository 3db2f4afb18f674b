"""Command line entry point: ``plots render`` and ``plots all``.

Exit codes: 0 success, 1 bad arguments or unknown figure id, 2 missing
input data (the absent CSVs are listed on stderr).
"""

from __future__ import annotations

import argparse
import sys

from bsplots.figures import FIGURE_IDS, MissingDataError, render, render_all


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plots",
                                description="Regenerate figures from "
                                            "experiment CSV artifacts.")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("render", help="render a single figure")
    pr.add_argument("figure_id", help=f"one of: {', '.join(FIGURE_IDS)}")
    pr.add_argument("--manifest", required=True, help="path to manifest.json")
    pr.add_argument("--out", required=True, help="output PNG path")

    pa = sub.add_parser("all", help="render the full figure set")
    pa.add_argument("--manifest", required=True, help="path to manifest.json")
    pa.add_argument("--out-dir", required=True, help="output directory")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            path = render(args.figure_id, args.manifest, args.out)
            print(path)
        else:
            for fid, path in render_all(args.manifest, args.out_dir).items():
                print(f"{fid}: {path}")
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 1
    except MissingDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
