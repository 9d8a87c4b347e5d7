from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from measure_modes import gallery
from measure_modes.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, SCHEMA_VERSION, main

MU = str(gallery.data_dir() / "exm4_mu.json")
NU = str(gallery.data_dir() / "exm4_nu.json")
SHORT_GRID = "2,4,8,16,32,64,128,256"


def run_json(argv, capsys):
    code = main(argv + ["--json", "-", "--no-timestamp"])
    return code, json.loads(capsys.readouterr().out)


class TestTv:
    def test_quantities(self, capsys):
        code, doc = run_json(["tv", MU, NU], capsys)
        r = doc["results"]["report"]
        assert code == EXIT_OK and doc["schema_version"] == SCHEMA_VERSION
        assert (r["jordan_norm"], r["sup_sets"], r["twice_sup_sets"]) == ("4/3", "2/3", "4/3")
        assert r["attainability"]["summary"] == "Borel only"
        assert "timestamp" not in doc

    def test_classes_and_flags_echoed(self, capsys):
        code, doc = run_json(["tv", MU, NU, "--classes", "open_bounded_sets", "--gamma", "1/2", "--seed", "3", "--tol", "1e-8"], capsys)
        inv = doc["invocation"]
        assert (inv["seed"], inv["tol"], inv["gamma"], inv["classes"]) == (3, 1e-8, "1/2", "open_bounded_sets")
        assert [e["class"] for e in doc["results"]["report"]["estimates"]] == ["open_bounded_sets"]

    def test_table(self, capsys):
        assert main(["tv", MU, NU, "--classes", "all"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "sup_sets" in out and "Borel only" in out and "holder_bounded" in out

    def test_json_file_and_report_render(self, tmp_path, capsys):
        path = tmp_path / "tv.json"
        assert main(["tv", MU, NU, "--json", str(path)]) == EXIT_OK
        table = capsys.readouterr().out
        assert main(["report", str(path)]) == EXIT_OK
        assert capsys.readouterr().out == table

    def test_timestamp_present_by_default(self, capsys):
        main(["tv", MU, NU, "--json", "-"])
        assert "timestamp" in json.loads(capsys.readouterr().out)


class TestInputErrors:
    def test_mismatched_spaces(self, tmp_path, capsys):
        other = tmp_path / "nat.json"
        other.write_text(json.dumps({"space": {"kind": "nat"}, "atoms": [{"at": 1, "mass": 1}]}))
        assert main(["tv", MU, str(other)]) == EXIT_INPUT
        assert "error" in capsys.readouterr().err

    def test_invalid_json_cites_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "space": {"kind": "real"},\n  oops\n}')
        assert main(["tv", str(bad), NU]) == EXIT_INPUT
        assert "line 3" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["tv", "/nonexistent.json", NU]) == EXIT_INPUT

    @pytest.mark.parametrize("argv", [
        ["tv", MU, NU, "--classes", "smooth_sets"],
        ["diagnose", "x.json", "--grid", "4,2"],
        ["gallery", "show", "exm9"],
    ])
    def test_bad_values(self, argv, capsys):
        assert main(argv) == EXIT_INPUT

    def test_report_schema_checked(self, tmp_path, capsys):
        path = tmp_path / "old.json"
        path.write_text(json.dumps({"schema_version": 0, "results": {}}))
        assert main(["report", str(path)]) == EXIT_INPUT


class TestDiagnose:
    @pytest.fixture
    def spec(self, tmp_path):
        path = tmp_path / "seq.json"
        path.write_text(json.dumps({"rule": {"gallery": "exm2_escaping_mass"}}))
        return str(path)

    def test_failing_mode_exits_one(self, spec, capsys):
        code, doc = run_json(["diagnose", spec, "--grid", SHORT_GRID, "--modes", "vague,weak"], capsys)
        modes = doc["results"]["report"]["modes"]
        assert code == EXIT_FAIL
        assert (modes["vague"]["status"], modes["weak"]["status"]) == ("pass", "fail")
        assert doc["invocation"]["grid"] == [int(v) for v in SHORT_GRID.split(",")]

    def test_traces_csv(self, spec, tmp_path, capsys):
        traces = tmp_path / "traces.csv"
        main(["diagnose", spec, "--grid", SHORT_GRID, "--modes", "tv", "--traces", str(traces)])
        rows = list(csv.reader(traces.open()))
        assert rows[0] == ["probe_id", "n", "value"]
        assert [int(r[1]) for r in rows[1:]] == [int(v) for v in SHORT_GRID.split(",")]

    def test_short_grid_warns(self, spec, capsys):
        code, doc = run_json(["diagnose", spec, "--grid", "2,4,8", "--modes", "vague"], capsys)
        assert code == EXIT_OK and any("inconclusive" in w for w in doc["warnings"])

    def test_same_seed_same_document(self, spec, capsys):
        argv = ["diagnose", spec, "--grid", SHORT_GRID, "--seed", "11"]
        assert run_json(argv, capsys) == run_json(argv, capsys)


class TestGallery:
    def test_list(self, capsys):
        code, doc = run_json(["gallery", "list"], capsys)
        assert [c["id"] for c in doc["results"]["cases"]] == gallery.ids()

    def test_show(self, capsys):
        code, doc = run_json(["gallery", "show", "exm4_attainability"], capsys)
        assert doc["results"]["case"]["id"] == "exm4_attainability"

    def test_show_needs_id(self):
        with pytest.raises(SystemExit):
            main(["gallery", "show"])


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "measure_modes.cli", "gallery", "list"], capture_output=True, text=True)
    assert out.returncode == 0 and "exm4_attainability" in out.stdout
