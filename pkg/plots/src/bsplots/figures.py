"""Figure recipes: one renderer per figure id, strict about inputs."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

DPI = 150
# no Software/creation tags in the PNG chunks: byte-stable output
SAVE_KW = {"dpi": DPI, "metadata": {"Software": None}}

STYLE = {
    "figure.figsize": (8.0, 5.0),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "legend.fontsize": 8,
}

_TEST3_EPS = ("0.024", "0.012", "0.006")
_TEST3_H = ("const", "mullins", "gauss")


class MissingDataError(FileNotFoundError):
    """Raised when a figure's input CSVs are absent; lists every one."""

    def __init__(self, figure_id: str, missing: list[str]):
        self.figure_id = figure_id
        self.missing = list(missing)
        super().__init__(
            f"figure {figure_id!r} is missing input files: {', '.join(missing)}")


def _required(figure_id: str) -> list[str]:
    if figure_id in ("staz", "lemma", "convergenza"):
        return [f"{figure_id}.csv"]
    if figure_id == "lal":
        return ["lalpha.csv"]
    if figure_id == "test1":
        return [f"test1_{s}_eps{e}_snapshots.csv"
                for s in ("pos", "neg") for e in ("0.06", "0.006")]
    if figure_id == "test2":
        return [f"test2_{h}_x0{x0}_snapshots.csv"
                for h in ("gauss", "mullins") for x0 in ("0.45", "0.55")]
    if figure_id == "test3":
        return ["test3_table.csv"] + [f"test3_{h}_eps{e}_snapshots.csv"
                                      for h in _TEST3_H for e in _TEST3_EPS]
    if figure_id == "test4":
        return [f"test4_{t}_snapshots.csv" for t in ("ex51", "ex52")]
    if figure_id == "spost":
        return [f"test3_{h}_eps{e}_zeros.csv"
                for h in _TEST3_H for e in _TEST3_EPS]
    raise KeyError(f"unknown figure id {figure_id!r}; "
                   f"known ids: {', '.join(FIGURE_IDS)}")


def _resolve(figure_id: str, manifest_path) -> Path:
    mpath = Path(manifest_path)
    base = mpath.parent
    try:
        listed = set(json.loads(mpath.read_text())["files"])
    except FileNotFoundError:
        raise MissingDataError(figure_id, [mpath.name] + _required(figure_id))
    need = _required(figure_id)
    missing = [n for n in need
               if n not in listed or not (base / n).exists()]
    if missing:
        raise MissingDataError(figure_id, missing)
    return base


def _snapshot_panel(ax, df: pd.DataFrame, title: str, max_curves: int = 7):
    times = sorted(df["t"].unique())
    if len(times) > max_curves:
        stride = max(1, len(times) // max_curves)
        times = times[::stride] + ([times[-1]] if times[-1] not in
                                   times[::stride] else [])
    for t in times:
        sel = df[df["t"] == t]
        ax.plot(sel["x"], sel["u"], label=f"t={t:.3g}")
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(loc="best")


def _fig_staz(base: Path):
    df = pd.read_csv(base / "staz.csv")
    fig, ax = plt.subplots()
    for kind in ("pos", "neg", "one_minus", "one_plus"):
        sel = df[df["kind"] == kind]
        ax.plot(sel["x"], sel["u"], label=kind)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title("stationary branches")
    ax.legend()
    return fig


def _fig_lemma(base: Path):
    df = pd.read_csv(base / "lemma.csv")
    fig, ax = plt.subplots()
    for eps in sorted(df["eps"].unique(), reverse=True):
        for kind, ls in (("pos", "-"), ("neg", "--")):
            sel = df[(df["kind"] == kind) & (df["eps"] == eps)]
            ax.plot(sel["x"], sel["u"], ls, label=f"{kind}, eps={eps:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title("stable branches vs eps (pointwise ordering)")
    ax.legend(ncol=2)
    return fig


def _fig_convergenza(base: Path):
    df = pd.read_csv(base / "convergenza.csv")
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for ax, kind in zip(axes, ("one_plus", "one_minus")):
        for eps in sorted(df["eps"].unique(), reverse=True):
            sel = df[(df["kind"] == kind) & (df["eps"] == eps)]
            ax.plot(sel["x"], sel["u"], label=f"eps={eps:g}")
        ax.set_title(kind)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.legend()
    return fig


def _fig_lal(base: Path):
    df = pd.read_csv(base / "lalpha.csv")
    epss = sorted(df["eps"].unique())
    fig, axes = plt.subplots(1, len(epss), figsize=(9.0, 4.0))
    for ax, eps in zip(axes, epss):
        for h in ("const", "gauss", "mullins"):
            sel = df[(df["h"] == h) & (df["eps"] == eps)
                     & (df["outcome"] == "return")]
            ax.plot(sel["alpha"], sel["L"], label=h)
        ax.set_title(f"L(alpha), eps={eps:g}")
        ax.set_xlabel("alpha")
        ax.set_ylabel("L")
        ax.legend()
    return fig


def _fig_test1(base: Path):
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 7.0))
    for i, sign in enumerate(("pos", "neg")):
        for j, eps in enumerate(("0.06", "0.006")):
            df = pd.read_csv(base / f"test1_{sign}_eps{eps}_snapshots.csv")
            _snapshot_panel(axes[i][j], df, f"{sign}, eps={eps}")
    fig.tight_layout()
    return fig


def _fig_test2(base: Path):
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 7.0))
    for i, h in enumerate(("gauss", "mullins")):
        for j, x0 in enumerate(("0.45", "0.55")):
            df = pd.read_csv(base / f"test2_{h}_x0{x0}_snapshots.csv")
            _snapshot_panel(axes[i][j], df, f"h={h}, x0={x0}")
    fig.tight_layout()
    return fig


def _fig_test3(base: Path):
    fig, axes = plt.subplots(3, 3, figsize=(10.0, 9.0))
    for i, h in enumerate(_TEST3_H):
        for j, eps in enumerate(_TEST3_EPS):
            df = pd.read_csv(base / f"test3_{h}_eps{eps}_snapshots.csv")
            _snapshot_panel(axes[i][j], df, f"h={h}, eps={eps}", max_curves=5)
    fig.tight_layout()
    return fig


def _fig_test4(base: Path):
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for ax, tag in zip(axes, ("ex51", "ex52")):
        df = pd.read_csv(base / f"test4_{tag}_snapshots.csv")
        _snapshot_panel(ax, df, tag)
    fig.tight_layout()
    return fig


def _fig_spost(base: Path):
    fig, ax = plt.subplots()
    for h in _TEST3_H:
        for eps in _TEST3_EPS:
            df = pd.read_csv(base / f"test3_{h}_eps{eps}_zeros.csv")
            sel = df[df["t"] > 0]
            ax.semilogx(sel["t"], sel["x0"], label=f"{h}, eps={eps}")
    ax.set_xlabel("t")
    ax.set_ylabel("x0(t)")
    ax.set_title("zero-crossing trajectories")
    ax.legend(ncol=3)
    return fig


_RENDERERS = {
    "staz": _fig_staz,
    "lemma": _fig_lemma,
    "convergenza": _fig_convergenza,
    "lal": _fig_lal,
    "test1": _fig_test1,
    "test2": _fig_test2,
    "test3": _fig_test3,
    "test4": _fig_test4,
    "spost": _fig_spost,
}

FIGURE_IDS = tuple(_RENDERERS)


def render(figure_id: str, manifest_path, out_path) -> Path:
    """Render one figure id from a manifest to a PNG; returns the path."""
    if figure_id not in _RENDERERS:
        raise KeyError(f"unknown figure id {figure_id!r}; "
                       f"known ids: {', '.join(FIGURE_IDS)}")
    base = _resolve(figure_id, manifest_path)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig = _RENDERERS[figure_id](base)
        try:
            fig.savefig(out, **SAVE_KW)
        finally:
            plt.close(fig)
    return out


def render_all(manifest_path, out_dir) -> dict[str, Path]:
    """Render every figure id into out_dir as <id>.png."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return {fid: render(fid, manifest_path, out / f"{fid}.png")
            for fid in FIGURE_IDS}
