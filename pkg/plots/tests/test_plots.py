import json

import pytest

from bsplots import FIGURE_IDS, MissingDataError, render
from bsplots.cli import main


@pytest.fixture()
def staz_artifacts(tmp_path):
    rows = ["kind,x,u"]
    for kind in ("pos", "neg", "one_minus", "one_plus"):
        for i in range(5):
            x = i / 4
            rows.append(f"{kind},{x},{x * (1 - x)}")
    (tmp_path / "staz.csv").write_text("\n".join(rows) + "\n")
    (tmp_path / "manifest.json").write_text(json.dumps(
        {"version": 1, "files": {"staz.csv": {"kind": "steady_branches"}}}))
    return tmp_path


class TestRender:
    def test_figure_ids_cover_full_set(self):
        assert set(FIGURE_IDS) == {"staz", "lemma", "convergenza", "lal",
                                   "test1", "test2", "test3", "test4", "spost"}

    def test_staz_renders_and_is_byte_stable(self, staz_artifacts, tmp_path):
        m = staz_artifacts / "manifest.json"
        p1 = render("staz", m, tmp_path / "a.png")
        p2 = render("staz", m, tmp_path / "b.png")
        assert p1.exists()
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_figure_id(self, staz_artifacts, tmp_path):
        with pytest.raises(KeyError):
            render("bogus", staz_artifacts / "manifest.json", tmp_path / "x.png")

    def test_missing_inputs_enumerated(self, staz_artifacts, tmp_path):
        with pytest.raises(MissingDataError) as exc:
            render("test4", staz_artifacts / "manifest.json", tmp_path / "x.png")
        assert sorted(exc.value.missing) == ["test4_ex51_snapshots.csv",
                                             "test4_ex52_snapshots.csv"]

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MissingDataError) as exc:
            render("staz", tmp_path / "manifest.json", tmp_path / "x.png")
        assert "manifest.json" in exc.value.missing

    def test_file_listed_but_absent(self, staz_artifacts, tmp_path):
        (staz_artifacts / "staz.csv").unlink()
        with pytest.raises(MissingDataError) as exc:
            render("staz", staz_artifacts / "manifest.json", tmp_path / "x.png")
        assert exc.value.missing == ["staz.csv"]


class TestCli:
    def test_render_success(self, staz_artifacts, tmp_path, capsys):
        out = tmp_path / "staz.png"
        rc = main(["render", "staz", "--manifest",
                   str(staz_artifacts / "manifest.json"), "--out", str(out)])
        assert rc == 0
        assert out.exists()

    def test_unknown_id_exit_1(self, staz_artifacts, tmp_path, capsys):
        rc = main(["render", "bogus", "--manifest",
                   str(staz_artifacts / "manifest.json"),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 1
        assert "unknown figure id" in capsys.readouterr().err

    def test_missing_data_exit_2(self, staz_artifacts, tmp_path, capsys):
        rc = main(["render", "test1", "--manifest",
                   str(staz_artifacts / "manifest.json"),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 2
        assert "test1_pos_eps0.06_snapshots.csv" in capsys.readouterr().err
