"""
Tests for the command-line front end
"""

import io
import json

import pytest

from app.cli import run
from app.config import get_settings


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _json(*argv):
    code, out, err = _run(*argv)
    assert code == 0, err
    return json.loads(out)


@pytest.mark.integration
class TestQueries:
    """Single-module queries"""

    def test_dim(self):
        payload = _json("dim", "--type", "A5", "--weight", "0,0,1,0,0")
        assert payload == {
            "type": "A5",
            "weight": "0,0,1,0,0",
            "p": 0,
            "dim": 20,
            "source": "weyl",
        }

    def test_dim_from_fixture(self):
        payload = _json("dim", "--type", "A3", "--weight", "0,2,0", "--p", "3")
        assert (payload["dim"], payload["source"]) == (19, "fixture")

    def test_dim_tsv(self):
        code, out, _ = _run(
            "dim", "--type", "D4", "--weight", "1,1,1,1", "--format", "tsv"
        )
        assert code == 0
        assert out.splitlines() == [
            "type\tweight\tp\tdim\tsource",
            "D4\t1,1,1,1\t0\t4096\tweyl",
        ]

    def test_json_keys_are_sorted(self):
        code, out, _ = _run("dim", "--type", "A1", "--weight", "1")
        assert code == 0
        assert out.startswith('{"dim": 2')

    def test_mult(self):
        payload = _json("mult", "--type", "A2", "--weight", "1,1", "--mu", "0,0")
        assert payload["mult"] == 2

    def test_orbit(self):
        payload = _json("orbit", "--type", "A2", "--weight", "1,0")
        assert payload["size"] == 3
        assert payload["orbit"] == ["-1,1", "0,-1", "1,0"]

    def test_weights(self):
        payload = _json("weights", "--type", "A3", "--weight", "0,2,0")
        assert payload["dim"] == 20
        assert {"wt": "0,0,0", "mult": 2} in payload["weights"]

    def test_premet_weights(self):
        payload = _json("weights", "--type", "A3", "--weight", "0,2,0", "--premet")
        assert payload["dim"] == 19
        assert all(w["mult"] == 1 for w in payload["weights"])

    def test_form(self):
        payload = _json("form", "--type", "A5", "--weight", "0,0,1,0,0")
        assert payload["form"] == "skew"
        assert payload["ambient"] == "C10"
        assert payload["p2_override"] is None

    def test_form_in_characteristic_two(self):
        payload = _json("form", "--type", "A5", "--weight", "0,0,1,0,0", "--p", "2")
        assert (payload["p2_override"], payload["ambient"]) == ("orthogonal", "D10")

    def test_form_b9(self):
        payload = _json("form", "--type", "A3", "--weight", "0,2,0", "--p", "3")
        assert (payload["dim"], payload["ambient"]) == (19, "B9")


@pytest.mark.integration
class TestLevels:
    """The levels subcommand"""

    def test_tsv_matches_reference(self, read_tsv):
        code, out, _ = _run(
            "levels", "--type", "A3", "--weight", "0,2,0", "--format", "tsv"
        )
        assert code == 0
        lines = out.splitlines()
        got = [line.split("\t")[:2] for line in lines[1:]]
        expected = read_tsv("levels_A3_020_borel.tsv")
        assert got == [[row["level"], row["dim"]] for row in expected]

    def test_json(self):
        payload = _json("levels", "--type", "A3", "--weight", "0,2,0")
        assert payload["ell"] == 8
        assert payload["subset"] == []
        assert [f["tag"] for f in payload["levi"]] == ["A2", "A2", "A1", "A1"]

    def test_subset_and_factors(self):
        payload = _json(
            "levels",
            "--type",
            "A5",
            "--weight",
            "0,0,1,0,0",
            "--subset",
            "2,3,4",
            "--factors",
        )
        assert [lvl["dim"] for lvl in payload["levels"]] == [6, 8, 6]
        assert payload["levels"][1]["reducible"] is True
        assert len(payload["levels"][1]["factors"]) == 2

    def test_non_self_dual_has_no_levi(self):
        payload = _json("levels", "--type", "A2", "--weight", "1,0")
        assert payload["levi"] is None


@pytest.mark.integration
class TestCharacterRing:
    """restrict, decompose and power"""

    def test_restrict(self):
        payload = _json(
            "restrict",
            "--type",
            "A5",
            "--weight",
            "0,0,1,0,0",
            "--lambda",
            "0,1,0,0,0,0,0,0,0,0",
        )
        assert payload["embedding"]["ambient"] == "C10"
        assert payload["dim"] == 189
        assert payload["factors"] == [{"hw": "0,1,0,1,0", "mult": 1}]

    def test_restrict_roots(self):
        code, out, _ = _run(
            "restrict",
            "--type",
            "A3",
            "--weight",
            "0,2,0",
            "--roots",
            "--format",
            "tsv",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "node\trestriction\troots"
        assert lines[1].endswith("\tb2")

    def test_restrict_needs_lambda(self):
        code, _, err = _run("restrict", "--type", "A5", "--weight", "0,0,1,0,0")
        assert code == 2
        assert json.loads(err)["error"] == "parse-error"

    def test_restrict_to_sl(self):
        payload = _json(
            "restrict",
            "--type",
            "C2",
            "--weight",
            "1,0",
            "--ambient",
            "A3",
            "--lambda",
            "0,1,0",
        )
        assert payload["factors"] == [
            {"hw": "0,0", "mult": 1},
            {"hw": "0,1", "mult": 1},
        ]

    def test_decompose_tensor(self):
        payload = _json(
            "decompose", "--type", "A2", "--weight", "1,0", "--tensor", "0,1"
        )
        assert payload["dim"] == 9
        assert payload["factors"] == [
            {"hw": "0,0", "mult": 1},
            {"hw": "1,1", "mult": 1},
        ]

    def test_power(self):
        payload = _json("power", "--type", "A3", "--weight", "1,0,0", "--k", "2")
        assert payload["factors"] == [{"hw": "0,1,0", "mult": 1}]

    def test_symmetric_power(self):
        payload = _json(
            "power", "--type", "A1", "--weight", "2", "--k", "2", "--kind", "symmetric"
        )
        assert payload["dim"] == 6
        assert payload["factors"] == [{"hw": "0", "mult": 1}, {"hw": "4", "mult": 1}]


@pytest.mark.integration
class TestFixturesCommand:
    """Listing and looking up quoted dimensions"""

    def test_list(self):
        assert len(_json("fixtures")) == 27

    def test_lookup(self):
        rows = _json(
            "fixtures", "--type", "C10", "--weight", "0,0,1,0,0,0,0,0,0,0", "--p", "3"
        )
        assert rows[0]["dim"] == 1100

    def test_partial_lookup(self):
        code, _, err = _run("fixtures", "--type", "A3")
        assert code == 2
        assert json.loads(err)["error"] == "contract"

    def test_missing_row(self):
        code, _, err = _run(
            "fixtures", "--type", "A3", "--weight", "0,2,0", "--p", "11"
        )
        assert code == 2
        assert json.loads(err)["error"] == "fixture-not-found"

    def test_custom_fixtures_file(self, tmp_path):
        path = tmp_path / "fx.json"
        row = {"type": "A3", "weight": "0,2,0", "p": 3, "dim": 19, "cite": "q"}
        path.write_text(json.dumps([row]), encoding="utf-8")
        assert len(_json("fixtures", "--fixtures", str(path))) == 1


@pytest.mark.unit
class TestErrors:
    """Error objects on stderr and exit codes"""

    def test_unknown_type(self):
        code, out, err = _run("dim", "--type", "X9", "--weight", "1")
        assert code == 2
        assert out == ""
        assert json.loads(err)["error"] == "parse-error"

    def test_rank_bound(self):
        code, _, err = _run("dim", "--type", "D2", "--weight", "1,0")
        assert code == 2
        assert json.loads(err)["error"] == "invalid-type"

    def test_missing_subcommand(self):
        code, _, err = _run()
        assert code == 2
        assert json.loads(err)["error"] == "parse-error"

    def test_unknown_option(self):
        code, _, _ = _run("dim", "--type", "A1", "--weight", "1", "--colour", "red")
        assert code == 2

    def test_non_positive_cap(self):
        code, _, err = _run("dim", "--type", "A1", "--weight", "1", "--cap", "0")
        assert code == 2
        assert "cap" in json.loads(err)["message"]

    def test_cap_exceeded(self):
        code, _, err = _run(
            "weights", "--type", "A5", "--weight", "0,0,1,0,0", "--cap", "5"
        )
        assert code == 2
        error = json.loads(err)
        assert error["error"] == "cap-exceeded"
        assert error["details"] == {"required": 20, "cap": 5}

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("WEYLAB_CAP", "5")
        get_settings.cache_clear()
        code, _, err = _run("weights", "--type", "A5", "--weight", "0,0,1,0,0")
        assert code == 2
        assert json.loads(err)["error"] == "cap-exceeded"

    def test_flag_beats_environment(self, monkeypatch):
        monkeypatch.setenv("WEYLAB_CAP", "5")
        get_settings.cache_clear()
        payload = _json(
            "weights", "--type", "A5", "--weight", "0,0,1,0,0", "--cap", "100"
        )
        assert payload["dim"] == 20

    def test_unknown_form_at_two(self):
        code, _, err = _run("form", "--type", "A3", "--weight", "0,2,0", "--p", "2")
        assert code == 2
        assert json.loads(err)["error"] == "unknown-form"

    def test_unexpected_failure_is_reported_as_json(self, monkeypatch):
        def overflow(*args, **kwargs):
            raise OverflowError("Python int too large to convert to C long")

        monkeypatch.setattr("app.cli.module_dimension", overflow)
        code, out, err = _run("dim", "--type", "A1", "--weight", "1")
        assert code == 2
        assert out == ""
        error = json.loads(err)
        assert error["error"] == "internal"
        assert error["message"].startswith("OverflowError")
