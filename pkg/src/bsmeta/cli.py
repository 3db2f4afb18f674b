"""Command line entry point.

Subcommands: steady, shoot, evolve, hyper, repro.  Exit codes: 0 success,
1 flag/validation error, 2 numerical failure (a diagnostic file is written
next to the requested output when possible).  Flags override an optional
flat ``key = value`` config file; there is no environment-variable
configuration, so a run is reproducible from its summary echo alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from bsmeta import experiments
from bsmeta.model import (
    NoSolutionError,
    ProblemSpec,
    builtin_model,
    existence_threshold,
)
from bsmeta.parabolic import (
    StepperConfig,
    cubic_initial,
    discrete_steady,
    evolve,
    piecewise_initial,
    quadratic_initial,
)
from bsmeta.hyperbolic import solve_hyperbolic
from bsmeta.steady import length_map, solve_n_zero, solve_one_zero, \
    solve_negative, solve_positive

log = logging.getLogger("bsmeta")

_KINDS = ("pos", "neg", "1m", "1p")


def _add_model_flags(p: argparse.ArgumentParser, with_eps: bool = True) -> None:
    if with_eps:
        p.add_argument("--eps", type=float, required=True, help="diffusion scale")
    p.add_argument("--ell", type=float, default=1.0, help="interval length")
    p.add_argument("--h", default="gauss", help="diffusion: const, gauss, mullins")
    p.add_argument("--f", default="quadratic", help="flux: quadratic")
    p.add_argument("--n-cells", type=int, default=800, help="grid cells")


def _spec_from(args, eps=None) -> ProblemSpec:
    try:
        model = builtin_model(args.h, args.f)
    except Exception as exc:
        raise SystemExit(f"error: {exc}") from exc
    return ProblemSpec(epsilon=eps if eps is not None else args.eps,
                       ell=args.ell, model=model, n_cells=args.n_cells)


def _parse_u0(text: str, ell: float):
    if text == "quad-pos":
        return quadratic_initial(ell, +1.0)
    if text == "quad-neg":
        return quadratic_initial(ell, -1.0)
    if text.startswith("cubic-neg:"):
        return cubic_initial(ell, float(text.split(":", 1)[1]), -1.0)
    if text.startswith("cubic:"):
        return cubic_initial(ell, float(text.split(":", 1)[1]), +1.0)
    if text.startswith("file:"):
        pts = []
        with open(text.split(":", 1)[1], newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() == "x":
                    continue
                pts.append((float(row[0]), float(row[1])))
        return piecewise_initial(pts)
    raise argparse.ArgumentTypeError(
        f"unknown initial datum {text!r}; use quad-pos, quad-neg, "
        "cubic:<x0>, cubic-neg:<x0> or file:<path>")


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _cmd_steady(args) -> int:
    spec = _spec_from(args)
    kind = args.kind
    try:
        if kind == "pos":
            st = solve_positive(spec)
        elif kind == "neg":
            st = solve_negative(spec)
        elif kind == "1m":
            st = solve_one_zero("minus", spec)
        elif kind == "1p":
            st = solve_one_zero("plus", spec)
        elif kind.startswith("nz:"):
            st = solve_n_zero(int(kind.split(":", 1)[1]), spec)
        else:
            print(f"error: unknown kind {kind!r}; use pos, neg, 1m, 1p or nz:<N>",
                  file=sys.stderr)
            return 1
    except NoSolutionError as exc:
        thr = existence_threshold(spec.model, spec.ell)
        print(f"error: no such steady state at eps = {spec.epsilon:g}: {exc} "
              f"(existence requires eps below ~{thr:g})", file=sys.stderr)
        return 2
    u = st.u.values
    du = st.u.central_derivative()
    out = Path(args.out)
    _write_csv(out, ["x", "u", "du"],
               ((f"{x:.12g}", f"{a:.12g}", f"{b:.12g}")
                for x, a, b in zip(spec.x, u, du)))
    log.info("steady %s written to %s (alpha* = %.9g)", kind, out, st.alpha_star)
    return 0


def _cmd_shoot(args) -> int:
    spec = _spec_from(args)
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)
    try:
        res = length_map(alphas, spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rows = [(f"{a:.12g}", f"{L:.12g}", "return") for a, L in res.points]
    rows += [(f"{a:.12g}", "", "escape") for a in res.escapes]
    rows.sort(key=lambda r: float(r[0]))
    _write_csv(Path(args.out), ["alpha", "L", "outcome"], rows)
    return 0


def _cmd_evolve(args) -> int:
    spec = _spec_from(args)
    u0 = _parse_u0(args.u0, spec.ell)
    cfg = StepperConfig(steady_tol=args.steady_tol)
    targets = []
    try:
        targets = [discrete_steady(solve_positive(spec), spec),
                   discrete_steady(solve_negative(spec), spec)]
    except NoSolutionError:
        log.info("no stable steady states at eps = %g; evolving without targets",
                 spec.epsilon)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        rec = evolve(u0, spec, cfg, t_end=args.t_end, targets=targets)
    except Exception as exc:
        (out / "failure.json").write_text(json.dumps(
            {"error": str(exc), "config": vars(args)}, default=str, indent=2))
        print(f"error: evolution failed: {exc}", file=sys.stderr)
        return 2
    _write_csv(out / "snapshots.csv", ["t", "x", "u"],
               ((f"{t:.12g}", f"{x:.12g}", f"{u:.12g}")
                for t, g in zip(rec.snapshot_times, rec.snapshots)
                for x, u in zip(spec.x, g.values)))
    _write_csv(out / "zeros.csv", ["t", "x0"],
               ((f"{t:.12g}", f"{z:.12g}") for t, z in rec.zero_crossings))
    summary = {
        "termination": rec.termination,
        "converged_to": rec.converged_to,
        "metastable_T": rec.metastable_T,
        "t_final": rec.t_final,
        "n_steps": rec.n_steps,
        "config": {"eps": spec.epsilon, "ell": spec.ell, "h": args.h,
                   "f": args.f, "n_cells": spec.n_cells, "u0": args.u0,
                   "t_end": args.t_end, "steady_tol": args.steady_tol},
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0


def _cmd_hyper(args) -> int:
    # epsilon is irrelevant to the inviscid solver; ProblemSpec requires > 0
    spec = _spec_from(args, eps=1.0)
    u0 = _parse_u0(args.u0, spec.ell)
    if args.cfl > 0.9 or args.cfl <= 0:
        print("error: --cfl must lie in (0, 0.9]", file=sys.stderr)
        return 1
    snaps = list(np.geomspace(0.1, args.t_end, 12)) if args.t_end > 0.1 else []
    run = solve_hyperbolic(u0, spec, t_end=args.t_end, cfl=args.cfl,
                           snapshot_times=snaps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "snapshots.csv", ["t", "x", "u"],
               ((f"{t:.12g}", f"{x:.12g}", f"{u:.12g}")
                for t, g in zip(run.snapshot_times, run.snapshots)
                for x, u in zip(spec.x, g.values)))
    if run.predicted_limit is not None:
        _write_csv(out / "limit.csv", ["x", "u_limit"],
                   ((f"{x:.12g}", f"{u:.12g}")
                    for x, u in zip(spec.x, run.predicted_limit.values)))
    summary = {
        "limit_kind": run.limit_kind,
        "t_final": run.t_final,
        "n_steps": run.n_steps,
        "config": {"ell": spec.ell, "f": args.f, "n_cells": spec.n_cells,
                   "u0": args.u0, "t_end": args.t_end, "cfl": args.cfl},
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0


def _cmd_repro(args) -> int:
    tests = {"1": ("1",), "2": ("2",), "3": ("3",), "4": ("4",),
             "lalpha": ("lalpha",),
             "all": ("1", "2", "3", "4", "lalpha", "steady")}[args.test]
    try:
        mpath = experiments.run_all(args.out, include_slow=args.include_slow,
                                    tests=tests)
    except Exception as exc:
        print(f"error: experiment failed: {exc}", file=sys.stderr)
        return 2
    log.info("manifest written to %s", mpath)
    return 0


def _apply_config_file(args: argparse.Namespace, path: str) -> None:
    """Flat key = value file; only keys not set on the command line apply."""
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if hasattr(args, key) and key not in args._explicit:
            old = getattr(args, key)
            cast = type(old) if old is not None else str
            setattr(args, key, cast(val) if cast is not bool
                    else val.lower() in ("1", "true", "yes"))


class _TrackingParser(argparse.ArgumentParser):
    """Remembers which destinations were set explicitly on the command line."""

    def parse_args(self, argv=None, namespace=None):  # type: ignore[override]
        ns = super().parse_args(argv, namespace)
        explicit = set()
        argv = list(sys.argv[1:] if argv is None else argv)
        for a in argv:
            if a.startswith("--"):
                explicit.add(a[2:].split("=", 1)[0].replace("-", "_"))
        ns._explicit = explicit
        return ns


def build_parser() -> argparse.ArgumentParser:
    p = _TrackingParser(prog="bsmeta",
                        description="Steady states, metastability and the "
                                    "inviscid limit of a nonlinear-diffusion "
                                    "convection-reaction equation.")
    p.add_argument("--log-level", default="WARNING",
                   help="logging level (DEBUG, INFO, WARNING, ...)")
    p.add_argument("--config", default=None,
                   help="flat key = value config file; command line wins")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("steady", help="construct one steady-state branch")
    _add_model_flags(ps)
    ps.add_argument("--kind", required=True,
                    help="branch: pos, neg, 1m, 1p or nz:<N>")
    ps.add_argument("--out", required=True, help="output CSV (x,u,du)")
    ps.set_defaults(func=_cmd_steady)

    ph = sub.add_parser("shoot", help="sweep the return-length map L(alpha)")
    _add_model_flags(ph)
    ph.add_argument("--alpha-min", type=float, required=True)
    ph.add_argument("--alpha-max", type=float, required=True)
    ph.add_argument("--alpha-steps", type=int, default=40)
    ph.add_argument("--out", required=True, help="output CSV (alpha,L,outcome)")
    ph.set_defaults(func=_cmd_shoot)

    pe = sub.add_parser("evolve", help="integrate the parabolic problem")
    _add_model_flags(pe)
    pe.add_argument("--u0", required=True,
                    help="quad-pos, quad-neg, cubic:<x0>, cubic-neg:<x0>, "
                         "file:<csv of x,u rows>")
    pe.add_argument("--t-end", type=float, default=1e3)
    pe.add_argument("--steady-tol", type=float, default=1e-3)
    pe.add_argument("--out", required=True, help="output directory")
    pe.set_defaults(func=_cmd_evolve, n_cells=2000)

    py = sub.add_parser("hyper", help="integrate the inviscid limit")
    _add_model_flags(py, with_eps=False)
    py.add_argument("--u0", required=True)
    py.add_argument("--t-end", type=float, default=10.0)
    py.add_argument("--cfl", type=float, default=0.45)
    py.add_argument("--out", required=True, help="output directory")
    py.set_defaults(func=_cmd_hyper, n_cells=400)

    pr = sub.add_parser("repro", help="run the scripted experiment suite")
    pr.add_argument("--test", required=True,
                    choices=["1", "2", "3", "4", "lalpha", "all"])
    pr.add_argument("--out", required=True, help="output directory")
    pr.add_argument("--include-slow", action="store_true",
                    help="add the bounded-horizon eps = 0.003 plateau run")
    pr.set_defaults(func=_cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), None)
                        or logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.config:
        _apply_config_file(args, args.config)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
