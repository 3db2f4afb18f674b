import csv
import json

import pytest

from bsmeta.cli import main


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestSteadyCommand:
    def test_positive_branch(self, tmp_path):
        out = tmp_path / "pos.csv"
        rc = main(["steady", "--eps", "0.06", "--kind", "pos",
                   "--n-cells", "400", "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["x", "u", "du"]
        assert len(rows) == 401
        assert float(rows[0][1]) == 0.0
        assert max(float(r[1]) for r in rows) > 0.1

    def test_above_threshold_exit_code(self, tmp_path, capsys):
        rc = main(["steady", "--eps", "0.5", "--kind", "pos",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "existence requires eps below" in err

    def test_unknown_kind(self, tmp_path):
        rc = main(["steady", "--eps", "0.06", "--kind", "bogus",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_unknown_diffusion(self, tmp_path):
        rc = main(["steady", "--eps", "0.06", "--h", "nope", "--kind", "pos",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 1


class TestShootCommand:
    def test_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["shoot", "--eps", "0.06", "--alpha-min", "0.1",
                   "--alpha-max", "0.8", "--alpha-steps", "8",
                   "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "L", "outcome"]
        assert len(rows) == 8
        assert all(r[2] in ("return", "escape") for r in rows)

    def test_invalid_range(self, tmp_path):
        rc = main(["shoot", "--eps", "0.06", "--alpha-min", "0.8",
                   "--alpha-max", "0.1", "--out", str(tmp_path / "x.csv")])
        assert rc == 1


class TestEvolveCommand:
    def test_run_and_summary(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["evolve", "--eps", "0.06", "--u0", "quad-pos",
                   "--t-end", "50", "--n-cells", "400", "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["termination"] == "Converged"
        assert summary["converged_to"] == "positive"
        assert summary["config"]["u0"] == "quad-pos"
        header, _ = read_csv(out / "snapshots.csv")
        assert header == ["t", "x", "u"]

    def test_file_datum(self, tmp_path):
        src = tmp_path / "datum.csv"
        src.write_text("x,u\n0,0\n0.2,-0.1\n0.8,0.1\n1,0\n")
        out = tmp_path / "run"
        rc = main(["evolve", "--eps", "0.06", "--u0", f"file:{src}",
                   "--t-end", "1", "--n-cells", "200", "--out", str(out)])
        assert rc == 0
        _, zrows = read_csv(out / "zeros.csv")
        assert float(zrows[0][1]) == pytest.approx(0.5, abs=1e-2)

    def test_bad_u0(self, tmp_path):
        rc = main(["evolve", "--eps", "0.06", "--u0", "bogus",
                   "--out", str(tmp_path / "run")])
        assert rc == 1


class TestHyperCommand:
    def test_run_writes_limit(self, tmp_path):
        out = tmp_path / "hyp"
        rc = main(["hyper", "--u0", "cubic:0.45", "--t-end", "2",
                   "--n-cells", "200", "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out / "limit.csv")
        assert header == ["x", "u_limit"]
        summary = json.loads((out / "summary.json").read_text())
        assert summary["limit_kind"].startswith("Line(")

    def test_cfl_validated(self, tmp_path):
        rc = main(["hyper", "--u0", "quad-pos", "--cfl", "1.2",
                   "--out", str(tmp_path / "hyp")])
        assert rc == 1


class TestReproCommand:
    def test_lalpha(self, tmp_path):
        rc = main(["repro", "--test", "lalpha", "--out", str(tmp_path)])
        assert rc == 0
        data = json.loads((tmp_path / "manifest.json").read_text())
        assert "lalpha.csv" in data["files"]


class TestConfigFile:
    def test_config_applies_when_flag_absent(self, tmp_path):
        cfg = tmp_path / "conf"
        cfg.write_text("n-cells = 128\n")
        out = tmp_path / "pos.csv"
        rc = main(["--config", str(cfg), "steady", "--eps", "0.06",
                   "--kind", "pos", "--out", str(out)])
        assert rc == 0
        _, rows = read_csv(out)
        assert len(rows) == 129

    def test_command_line_wins(self, tmp_path):
        cfg = tmp_path / "conf"
        cfg.write_text("n-cells = 128\n")
        out = tmp_path / "pos.csv"
        rc = main(["--config", str(cfg), "steady", "--eps", "0.06",
                   "--kind", "pos", "--n-cells", "200", "--out", str(out)])
        assert rc == 0
        _, rows = read_csv(out)
        assert len(rows) == 201
