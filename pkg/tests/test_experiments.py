import csv
import json
from pathlib import Path

import pytest

from bsmeta.experiments import (
    EX51_POINTS,
    EX52_POINTS,
    run_lalpha,
    run_steady_families,
    run_test3,
)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestLalphaArtifact:
    @pytest.fixture(scope="class")
    def outputs(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("lalpha")
        manifest = run_lalpha(out, n_alpha=8)
        return out, manifest

    def test_schema(self, outputs):
        out, manifest = outputs
        header, rows = read_csv(out / "lalpha.csv")
        assert header == ["h", "eps", "alpha", "L", "outcome"]
        assert manifest["lalpha.csv"]["columns"] == header
        hs = {r[0] for r in rows}
        assert hs == {"const", "gauss", "mullins"}
        for r in rows:
            assert r[4] in ("return", "escape")
            if r[4] == "return":
                assert 0.0 < float(r[3]) < 2.0
            else:
                assert r[3] == ""

    def test_lengths_increase_in_alpha(self, outputs):
        out, _ = outputs
        _, rows = read_csv(out / "lalpha.csv")
        for h in ("const", "gauss", "mullins"):
            sel = sorted((float(r[2]), float(r[3])) for r in rows
                         if r[0] == h and r[1] == "0.06" and r[4] == "return")
            ls = [L for _, L in sel]
            assert all(b > a for a, b in zip(ls, ls[1:]))

    def test_byte_determinism(self, outputs, tmp_path):
        out, _ = outputs
        run_lalpha(tmp_path, n_alpha=8)
        assert (tmp_path / "lalpha.csv").read_bytes() == \
            (out / "lalpha.csv").read_bytes()


class TestSteadyFamiliesArtifact:
    @pytest.fixture(scope="class")
    def outputs(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("steady")
        manifest = run_steady_families(out)
        return out, manifest

    def test_files_and_kinds(self, outputs):
        out, manifest = outputs
        for name in ("staz.csv", "lemma.csv", "convergenza.csv"):
            assert (out / name).exists()
            assert name in manifest
        _, rows = read_csv(out / "staz.csv")
        kinds = {r[0] for r in rows}
        assert kinds == {"pos", "neg", "one_minus", "one_plus"}

    def test_lemma_ordering(self, outputs):
        # the positive family decreases pointwise as eps grows
        out, _ = outputs
        _, rows = read_csv(out / "lemma.csv")
        by_eps = {}
        for kind, eps, x, u in rows:
            if kind == "pos":
                by_eps.setdefault(float(eps), []).append(float(u))
        epss = sorted(by_eps)
        for e1, e2 in zip(epss, epss[1:]):
            assert all(a >= b - 1e-8 for a, b in zip(by_eps[e1], by_eps[e2]))


class TestMetastabilityTable:
    @pytest.fixture(scope="class")
    def rows_and_dir(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("test3")
        rows = run_test3(out, epsilons=(0.024,), h_names=("const",))
        return rows, out

    def test_row_contents(self, rows_and_dir):
        rows, _ = rows_and_dir
        assert len(rows) == 1
        r = rows[0]
        assert r.complete and r.reached in ("positive", "negative")
        assert r.T is not None and 5.0 < r.T < 50.0
        assert r.h_name == "const" and r.epsilon == 0.024

    def test_table_csv(self, rows_and_dir):
        _, out = rows_and_dir
        header, rows = read_csv(out / "test3_table.csv")
        assert header == ["h", "eps", "T", "reached", "steady_tol",
                          "n_cells", "complete"]
        assert rows[0][0] == "const" and rows[0][6] == "1"

    def test_snapshot_artifact_schema(self, rows_and_dir):
        _, out = rows_and_dir
        header, rows = read_csv(out / "test3_const_eps0.024_snapshots.csv")
        assert header == ["t", "x", "u"]
        assert float(rows[0][0]) == 0.0
        zh, zr = read_csv(out / "test3_const_eps0.024_zeros.csv")
        assert zh == ["t", "x0"]
        assert float(zr[0][1]) == pytest.approx(0.45, abs=1e-2)


class TestJumpData:
    def test_point_tables(self):
        # first datum jumps at 0.48 from -0.48 up to the decreasing chord;
        # second is continuous with the zero exactly at 1/2
        xs = [p[0] for p in EX51_POINTS]
        assert xs.count(0.48) == 2
        assert EX51_POINTS[1][1] == -0.48
        assert EX52_POINTS[0] == (0.0, 0.0) and EX52_POINTS[-1] == (1.0, 0.0)
        mid = 0.5
        x1, u1 = EX52_POINTS[1]
        x2, u2 = EX52_POINTS[2]
        z = x1 - u1 * (x2 - x1) / (u2 - u1)
        assert z == pytest.approx(mid, abs=1e-12)


class TestManifest:
    def test_manifest_written_and_sorted(self, tmp_path):
        from bsmeta.experiments import run_all

        mpath = run_all(tmp_path, tests=("lalpha",))
        data = json.loads(Path(mpath).read_text())
        assert data["version"] == 1
        assert "lalpha.csv" in data["files"]
        assert list(data["files"]) == sorted(data["files"])
