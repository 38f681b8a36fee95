from __future__ import annotations

import io
import json

import pytest

from test_tableaux import EXAMPLE_TABLEAU, example_chain
from tropchain import cli
from tropchain.abel import RepresentingDivisor, representing_divisor
from tropchain.chain_model import (
    Generic,
    IntegerClass,
    chain_to_json,
    divisor_from_json,
    divisor_to_json,
)
from tropchain.rank import satisfies_tableau


def run_doc(tmp_path, doc, *argv):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(doc))
    return cli.run([argv[0], "--input", str(path), *argv[1:]])


def test_analyze_reports_classification(tmp_path):
    status, report = run_doc(tmp_path, {"torsion_profile": [2, 5, 2]}, "analyze")
    assert status == 0
    result = report["result"]
    assert result["hyperelliptic"] is False
    assert result["martens"]["kind"] == "martens-special"
    assert result["martens"]["r"] == 1
    assert result["gonality_upper"] == 3
    assert len(report["input_sha256"]) == 64


def test_bn_rank_command(tmp_path):
    status, report = run_doc(tmp_path, {"torsion_profile": [2, 5, 2]}, "bn-rank", "--d", "4", "--r", "1")
    assert status == 0
    assert report["result"]["value"] == 2


def test_verify_passes_on_hyperelliptic_profile(tmp_path):
    status, report = run_doc(tmp_path, {"torsion_profile": [2, 2, 2]}, "verify")
    assert status == 0 and report["failures"] == []


def torus_divisor():
    """A divisor of degree 9 on the twelve-cycle example whose class lies in the torus of its tableau."""
    positions = [None] * 12
    for x, y, v in EXAMPLE_TABLEAU.cells():
        positions[v - 1] = IntegerClass(x - y)
    for free in (6, 9):
        positions[free - 1] = Generic.symbol(f"t{free}")
    return RepresentingDivisor(tuple(positions), 9).as_divisor()


def test_rank_of_a_torus_divisor(tmp_path):
    chain = example_chain()
    D = torus_divisor()
    assert satisfies_tableau(representing_divisor(chain, D), EXAMPLE_TABLEAU, chain)
    doc = chain_to_json(chain) | {"divisor": divisor_to_json(D)}
    status, report = run_doc(tmp_path, doc, "rank")
    assert status == 0
    assert report["result"]["rank"] >= 2
    status, report = run_doc(tmp_path, doc | {"tableau": EXAMPLE_TABLEAU.to_json()}, "tableaux")
    assert status == 0
    assert report["result"]["free_cycles"] == [6, 9]
    assert report["result"]["divisor_in_torus"] is True


def test_completion_round_trips_through_rank(tmp_path):
    doc = {"torsion_profile": [2, 5, 2], "divisor": [{"cycle": 3, "position": {"generic": "a"}}]}
    status, report = run_doc(tmp_path, doc, "complete", "--d", "3", "--r", "1")
    assert status == 0
    done = report["result"]["completion"]
    assert done["rank"] >= 1
    again = {"torsion_profile": [2, 5, 2], "divisor": done["divisor"], "tableau": done["tableau"]}
    status, report = run_doc(tmp_path, again, "tableaux")
    assert status == 0 and report["result"]["divisor_in_torus"] is True
    status, report = run_doc(tmp_path, again, "rank")
    assert report["result"]["rank"] >= 1
    assert divisor_from_json(done["divisor"]).degree == 3


def test_invalid_tableau_is_a_failure(tmp_path):
    doc = {"torsion_profile": [2, 3, 2, 2], "tableau": {"cols": 5, "rows": 2, "entries": [[1, 2, 3, 4, 5], [2, 3, 4, 5, 6]]}}
    status, report = run_doc(tmp_path, doc, "tableaux")
    assert status == 1
    assert report["result"]["violation"]["cells"] == [[3, 1], [2, 2]]


@pytest.mark.parametrize("doc,argv,code", [
    ({"torsion_profile": [2, "x"]}, ("analyze",), "malformed-input"),
    ({"cycles": [{"circumference": -1}]}, ("analyze",), "malformed-input"),
    ({"torsion_profile": [2, 5, 2]}, ("bn-rank",), "malformed-input"),
    ({"torsion_profile": [2, 2, 2]}, ("verify", "--seed", "1"), None),
    ({"torsion_profile": [0, 2]}, ("rank",), "malformed-input"),
])
def test_error_reports(tmp_path, doc, argv, code):
    status, report = run_doc(tmp_path, doc, *argv)
    if code is None:
        assert status == 0
    else:
        assert status == 2 and report["error"]["code"] == code


def test_invalid_json_is_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    status, report = cli.run(["analyze", "--input", str(path)])
    assert status == 2 and report["error"]["path"] == "$"


def test_stdin_and_out_file(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"torsion_profile": [2]})))
    out = tmp_path / "report.json"
    assert cli.main(["wrd-dim", "--input", "-", "--d", "2", "--r", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["dimension"] == 0
    assert capsys.readouterr().out == ""


def test_sweep_is_ordered_and_parallel_safe():
    argv = ["sweep", "--max-genus", "5", "--torsions", "0,2,3", "--max-special", "1"]
    status, serial = cli.run(argv)
    status_par, parallel = cli.run(argv + ["--jobs", "2"])
    assert status == status_par == 0
    assert serial["result"] == parallel["result"]
    genera = [rep["genus"] for rep in serial["result"]["reports"]]
    assert genera == sorted(genera)
