from __future__ import annotations

import json
import shutil

import pytest

from measure_modes import gallery
from measure_modes.convergence import FAIL, INCONCLUSIVE, PASS
from measure_modes.errors import ParseError
from measure_modes.gallery import DISCREPANCY, case, case_from_json, ids, run_all, run_case

EXPECTED_IDS = [
    "exm1_counting_tails",
    "exm2_escaping_mass",
    "exm3_oscillating_block",
    "exm4_attainability",
    "pro3_truncation",
    "thm5_cofinite",
]


def statuses(cid: str, **kw) -> dict:
    return {o.expectation.id: o.status for o in run_case(case(cid), **kw)}


class TestLoading:
    def test_ids(self):
        assert ids() == EXPECTED_IDS

    def test_every_case_has_a_runnable_shape(self):
        for cid in ids():
            c = case(cid)
            assert (c.sequence is None) != (c.pair is None)
            assert c.expectations and c.title

    def test_sources_are_labelled(self):
        for cid in ids():
            for e in case(cid).expectations:
                assert e.source in ("published", "derived", "trivial")
                assert not e.disputed or e.source == "published"

    def test_round_trip(self):
        for cid in ids():
            c = case(cid)
            again = case_from_json(json.loads(json.dumps(c.to_json())), gallery.data_dir())
            assert again.expectations == c.expectations
            assert again.pair == c.pair
            if c.sequence is not None:
                assert again.sequence.grid == c.sequence.grid
                assert again.sequence.at(4) == c.sequence.at(4)

    def test_unknown_case(self):
        with pytest.raises(KeyError, match="unknown gallery case"):
            case("exm9")

    def test_bad_operation(self):
        data = dict(case("exm4_attainability").to_json())
        data["expectations"] = [{"id": "x", "op": "frobnicate", "expected": 1, "source": "derived"}]
        with pytest.raises(ParseError, match="frobnicate"):
            case_from_json(data, gallery.data_dir())

    def test_data_directory_override(self, tmp_path, monkeypatch):
        for name in ("exm4_attainability.json", "exm4_mu.json", "exm4_nu.json"):
            shutil.copy(gallery.data_dir() / name, tmp_path / name)
        data = json.loads((tmp_path / "exm4_attainability.json").read_text())
        data["id"] = "copy"
        data["expectations"] = data["expectations"][:1]
        (tmp_path / "copy.json").write_text(json.dumps(data))
        (tmp_path / "exm4_attainability.json").unlink()
        monkeypatch.setenv("MEASURE_MODES_DATA", str(tmp_path))
        assert ids() == ["copy"]
        assert [o.status for o in run_case(case("copy"))] == [PASS]


class TestOutcomes:
    def test_attainability_case(self):
        assert set(statuses("exm4_attainability").values()) == {PASS}

    def test_truncation_case(self):
        assert set(statuses("pro3_truncation").values()) == {PASS}

    def test_cofinite_case_reports_discrepancies(self):
        got = statuses("thm5_cofinite")
        disputed = {"finite_and_cofinite_probes", "open_sets", "closed_sets"}
        assert {k for k, v in got.items() if v == DISCREPANCY} == disputed
        assert all(v == PASS for k, v in got.items() if k not in disputed)

    def test_oscillating_block_reports_discrepancies(self):
        got = statuses("exm3_oscillating_block")
        assert {k for k, v in got.items() if v == DISCREPANCY} == {
            "square_limit_integral_published", "square_integrals_published",
        }
        assert got["square_integrals_oscillate"] == PASS

    def test_short_grid_is_inconclusive_not_fail(self):
        got = statuses("exm2_escaping_mass", grid=[2, 4, 8])
        assert got["vague_mode"] == INCONCLUSIVE and got["total_mass_limit"] == INCONCLUSIVE
        assert FAIL not in got.values()

    def test_summary_counts_and_exit_code(self):
        s = run_all(only=["exm4_attainability", "thm5_cofinite"])
        assert s.counts()[DISCREPANCY] == 3 and s.counts()[FAIL] == 0
        assert s.exit_code == 0
        doc = s.to_json()
        assert doc["seed"] == 0 and len(doc["outcomes"]) == len(s.outcomes)

    def test_contradicted_undisputed_expectation_fails(self, tmp_path, monkeypatch):
        for name in ("exm4_mu.json", "exm4_nu.json"):
            shutil.copy(gallery.data_dir() / name, tmp_path / name)
        data = json.loads((gallery.data_dir() / "exm4_attainability.json").read_text())
        data["expectations"] = [{"id": "wrong", "op": "sup_sets", "expected": "1/2", "source": "derived"}]
        (tmp_path / "exm4_attainability.json").write_text(json.dumps(data))
        monkeypatch.setenv("MEASURE_MODES_DATA", str(tmp_path))
        s = run_all()
        assert [o.status for o in s.outcomes] == [FAIL] and s.exit_code == 1
