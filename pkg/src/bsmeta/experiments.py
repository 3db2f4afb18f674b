"""Scripted numerical experiments with persisted CSV artifacts.

Every run writes deterministic CSVs (fixed grids, fixed iteration order, no
wall-clock content) plus a manifest JSON that maps each artifact to the
configuration that produced it.  The plotting layer consumes only these
files and never recomputes anything.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from bsmeta.model import ProblemSpec, alpha_bar, builtin_model
from bsmeta.parabolic import (
    EvolveRecord,
    StepperConfig,
    cubic_initial,
    discrete_steady,
    evolve,
    piecewise_initial,
    quadratic_initial,
)
from bsmeta.steady import (
    length_map,
    solve_negative,
    solve_one_zero,
    solve_positive,
)

__all__ = [
    "MetastabilityRow",
    "run_test1",
    "run_test2",
    "run_test3",
    "run_test4",
    "run_lalpha",
    "run_steady_families",
    "run_all",
    "EX51_POINTS",
    "EX52_POINTS",
]

ELL = 1.0
N_CELLS_EVOLVE = 2000
N_CELLS_STEADY = 800
FLOAT_FMT = "%.12g"

# jump datum: -x up to 0.48, then the chord of 0.5 - (0.5/0.7)(x - 0.3) to 0 at 1
EX51_POINTS = [(0.0, 0.0), (0.48, -0.48), (0.48, 0.5 - 0.5 / 0.7 * 0.18), (1.0, 0.0)]
# continuous kinked datum, zero at 0.5
EX52_POINTS = [(0.0, 0.0), (0.2, -0.1), (0.8, 0.1), (1.0, 0.0)]


@dataclass
class MetastabilityRow:
    """One cell of the metastability table."""

    h_name: str
    epsilon: float
    T: float | None
    reached: str | None
    steady_tol: float
    n_cells: int
    complete: bool


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([FLOAT_FMT % v if isinstance(v, float) else v for v in row])


def _snapshot_rows(rec: EvolveRecord, x: np.ndarray):
    for t, g in zip(rec.snapshot_times, rec.snapshots):
        for xi, ui in zip(x, g.values):
            yield (float(t), float(xi), float(ui))


def _evolve_artifacts(tag: str, u0, spec: ProblemSpec, cfg: StepperConfig,
                      t_end: float, out: Path, manifest: dict,
                      targets=None) -> EvolveRecord:
    rec = evolve(u0, spec, cfg, t_end=t_end, targets=targets)
    snap = out / f"{tag}_snapshots.csv"
    _write_csv(snap, ["t", "x", "u"], _snapshot_rows(rec, spec.x))
    zeros = out / f"{tag}_zeros.csv"
    _write_csv(zeros, ["t", "x0"], ((float(t), float(z)) for t, z in rec.zero_crossings))
    config = {
        "u0": u0.description, "epsilon": spec.epsilon, "ell": spec.ell,
        "h": spec.model.name_h, "f": spec.model.name_f,
        "n_cells": spec.n_cells, "t_end": t_end,
        "steady_tol": cfg.steady_tol,
        "termination": rec.termination, "converged_to": rec.converged_to,
        "metastable_T": rec.metastable_T,
    }
    manifest[snap.name] = {"kind": "snapshots", "columns": ["t", "x", "u"],
                           "config": config}
    manifest[zeros.name] = {"kind": "zeros", "columns": ["t", "x0"],
                            "config": config}
    return rec


def _stable_targets(spec: ProblemSpec):
    pos = discrete_steady(solve_positive(spec), spec)
    neg = discrete_steady(solve_negative(spec), spec)
    return [pos, neg]


def run_test1(out_dir, manifest: dict | None = None) -> dict:
    """Fast convergence: u0 = +-x(1-x), eps in {0.06, 0.006}, h = gauss."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest if manifest is not None else {}
    cfg = StepperConfig()
    for eps in (0.06, 0.006):
        spec = ProblemSpec(epsilon=eps, ell=ELL, model=builtin_model("gauss"),
                           n_cells=N_CELLS_EVOLVE)
        targets = _stable_targets(spec)
        for sign, name in ((+1.0, "pos"), (-1.0, "neg")):
            tag = f"test1_{name}_eps{eps:g}"
            rec = _evolve_artifacts(tag, quadratic_initial(ELL, sign), spec,
                                    cfg, 1e3, out, manifest, targets=targets)
            if rec.termination != "Converged":
                raise RuntimeError(f"test1 run {tag} did not converge: "
                                   f"{rec.termination}")
    return manifest


def run_test2(out_dir, manifest: dict | None = None) -> dict:
    """Instability: u0 = -x(1-x)(x-x0), x0 in {0.45, 0.55}, h in {gauss, mullins}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest if manifest is not None else {}
    cfg = StepperConfig()
    for h_name in ("gauss", "mullins"):
        spec = ProblemSpec(epsilon=0.06, ell=ELL, model=builtin_model(h_name),
                           n_cells=N_CELLS_EVOLVE)
        targets = _stable_targets(spec)
        for x0 in (0.45, 0.55):
            tag = f"test2_{h_name}_x0{x0:g}"
            rec = _evolve_artifacts(tag, cubic_initial(ELL, x0, -1.0), spec,
                                    cfg, 1e3, out, manifest, targets=targets)
            expected = "negative" if x0 < 0.5 else "positive"
            if rec.converged_to != expected:
                raise RuntimeError(f"test2 run {tag} reached {rec.converged_to}, "
                                   f"expected {expected}")
    return manifest


def run_test3(out_dir, manifest: dict | None = None,
              epsilons=(0.024, 0.012, 0.006),
              h_names=("const", "mullins", "gauss"),
              t_end: float = 1e7) -> list[MetastabilityRow]:
    """Metastability table: u0 = x(1-x)(x-0.45), T to reach a stable state."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest if manifest is not None else {}
    cfg = StepperConfig()
    rows: list[MetastabilityRow] = []
    for h_name in h_names:
        for eps in epsilons:
            spec = ProblemSpec(epsilon=eps, ell=ELL, model=builtin_model(h_name),
                               n_cells=N_CELLS_EVOLVE)
            targets = _stable_targets(spec)
            tag = f"test3_{h_name}_eps{eps:g}"
            rec = _evolve_artifacts(tag, cubic_initial(ELL, 0.45, +1.0), spec,
                                    cfg, t_end, out, manifest, targets=targets)
            ok = rec.termination == "Converged"
            rows.append(MetastabilityRow(
                h_name=h_name, epsilon=eps,
                T=rec.metastable_T if ok else None,
                reached=rec.converged_to if ok else None,
                steady_tol=cfg.steady_tol, n_cells=spec.n_cells, complete=ok))
    table = out / "test3_table.csv"
    _write_csv(table,
               ["h", "eps", "T", "reached", "steady_tol", "n_cells", "complete"],
               ((r.h_name, r.epsilon,
                 r.T if r.T is not None else "",
                 r.reached or "", r.steady_tol, r.n_cells, int(r.complete))
                for r in rows))
    manifest[table.name] = {
        "kind": "metastability_table",
        "columns": ["h", "eps", "T", "reached", "steady_tol", "n_cells", "complete"],
        "config": {"u0": "x(ell-x)(x-0.45)", "epsilons": list(epsilons),
                   "h_names": list(h_names), "t_end": t_end},
    }
    return rows


def run_test4(out_dir, manifest: dict | None = None) -> dict:
    """Discontinuous / kinked data at eps = 0.006: smoothing then plateau."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest if manifest is not None else {}
    cfg = StepperConfig()
    spec = ProblemSpec(epsilon=0.006, ell=ELL, model=builtin_model("gauss"),
                       n_cells=N_CELLS_EVOLVE)
    for tag, pts in (("test4_ex51", EX51_POINTS), ("test4_ex52", EX52_POINTS)):
        _evolve_artifacts(tag, piecewise_initial(pts), spec, cfg, 1e3,
                          out, manifest)
    return manifest


def run_lalpha(out_dir, manifest: dict | None = None, n_alpha: int = 60) -> dict:
    """Return-length curves L(alpha) for the three diffusions, eps in {0.06, 0.12}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest if manifest is not None else {}
    rows = []
    for eps in (0.06, 0.12):
        for h_name in ("const", "gauss", "mullins"):
            model = builtin_model(h_name)
            spec = ProblemSpec(epsilon=eps, ell=ELL, model=model,
                               n_cells=N_CELLS_STEADY)
            ab = alpha_bar(eps, model)
            alphas = np.linspace(0.02, min(ab * (1.0 - 1e-3), 1.0), n_alpha)
            res = length_map(alphas, spec)
            for a, L in res.points:
                rows.append((h_name, float(eps), float(a), float(L), "return"))
            for a in res.escapes:
                rows.append((h_name, float(eps), float(a), "", "escape"))
    path = Path(out) / "lalpha.csv"
    _write_csv(path, ["h", "eps", "alpha", "L", "outcome"], rows)
    manifest[path.name] = {
        "kind": "lalpha",
        "columns": ["h", "eps", "alpha", "L", "outcome"],
        "config": {"epsilons": [0.06, 0.12],
                   "h_names": ["const", "gauss", "mullins"],
                   "n_alpha": n_alpha, "ell": ELL},
    }
    return manifest


def run_steady_families(out_dir, manifest: dict | None = None) -> dict:
    """Steady-state profile families.

    staz.csv: the four branches at eps = 0.01;
    lemma.csv: u_{+,eps} and u_{-,eps} for several eps (pointwise ordering);
    convergenza.csv: the one-zero branches for decreasing eps.
    All with h = gauss.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest if manifest is not None else {}
    model = builtin_model("gauss")

    def spec_at(eps):
        return ProblemSpec(epsilon=eps, ell=ELL, model=model,
                           n_cells=N_CELLS_STEADY)

    # staz: four branches at eps = 0.01
    sp = spec_at(0.01)
    branches = [("pos", solve_positive(sp)), ("neg", solve_negative(sp)),
                ("one_minus", solve_one_zero("minus", sp)),
                ("one_plus", solve_one_zero("plus", sp))]
    rows = [(kind, float(x), float(u))
            for kind, st in branches
            for x, u in zip(sp.x, st.u.values)]
    path = out / "staz.csv"
    _write_csv(path, ["kind", "x", "u"], rows)
    manifest[path.name] = {"kind": "steady_branches",
                           "columns": ["kind", "x", "u"],
                           "config": {"epsilon": 0.01, "h": "gauss", "ell": ELL}}

    # lemma: stable branches over eps
    eps_family = (0.06, 0.03, 0.015, 0.0075)
    rows = []
    for eps in eps_family:
        sp = spec_at(eps)
        for kind, st in (("pos", solve_positive(sp)), ("neg", solve_negative(sp))):
            rows.extend((kind, float(eps), float(x), float(u))
                        for x, u in zip(sp.x, st.u.values))
    path = out / "lemma.csv"
    _write_csv(path, ["kind", "eps", "x", "u"], rows)
    manifest[path.name] = {"kind": "steady_family",
                           "columns": ["kind", "eps", "x", "u"],
                           "config": {"epsilons": list(eps_family), "h": "gauss"}}

    # convergenza: one-zero branches over eps
    rows = []
    for eps in (0.02, 0.01, 0.005):
        sp = spec_at(eps)
        for kind, st in (("one_plus", solve_one_zero("plus", sp)),
                         ("one_minus", solve_one_zero("minus", sp))):
            rows.extend((kind, float(eps), float(x), float(u))
                        for x, u in zip(sp.x, st.u.values))
    path = out / "convergenza.csv"
    _write_csv(path, ["kind", "eps", "x", "u"], rows)
    manifest[path.name] = {"kind": "steady_family",
                           "columns": ["kind", "eps", "x", "u"],
                           "config": {"epsilons": [0.02, 0.01, 0.005], "h": "gauss"}}
    return manifest


def run_all(out_dir, include_slow: bool = False,
            tests=("1", "2", "3", "4", "lalpha", "steady")) -> Path:
    """Run the requested experiments and write manifest.json.

    include_slow adds an eps = 0.003 plateau-persistence run (bounded horizon,
    expected not to converge).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {}
    if "1" in tests:
        run_test1(out, manifest)
    if "2" in tests:
        run_test2(out, manifest)
    if "3" in tests:
        run_test3(out, manifest)
    if "4" in tests:
        run_test4(out, manifest)
    if "lalpha" in tests:
        run_lalpha(out, manifest)
    if "steady" in tests:
        run_steady_families(out, manifest)
    if include_slow:
        spec = ProblemSpec(epsilon=0.003, ell=ELL, model=builtin_model("gauss"),
                           n_cells=N_CELLS_EVOLVE)
        _evolve_artifacts("test3_gauss_eps0.003", cubic_initial(ELL, 0.45, +1.0),
                          spec, StepperConfig(), 1e6, out, manifest,
                          targets=_stable_targets(spec))
    mpath = out / "manifest.json"
    with open(mpath, "w") as fh:
        json.dump({"version": 1, "files": manifest}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return mpath
