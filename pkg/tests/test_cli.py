import json
import os
from pathlib import Path
from typing import Any

import pytest

from src.cli import EXIT_SCHEMA, run
from tests.conftest import FIXTURES
from tests.helpers import tiny_esds


def _fx(name: str) -> str:
    return str(FIXTURES / name)


def _out(capsys) -> Any:
    return json.loads(capsys.readouterr().out)


def test_validate_and_emptiness(capsys):
    assert run(["validate", _fx("t1.json"), "--json"]) == 0
    assert _out(capsys)["ok"] is True
    assert run(["emptiness", _fx("chain.json"), "--json"]) == 0
    assert _out(capsys)["outcome"] == "nonempty"


def test_db_exit_codes(capsys):
    args = [_fx("dbi.json"), _fx("dbs.json"), _fx("cand_db.json"), "--json"]
    assert run(["check-sim", "fwd", *args]) == 0
    assert _out(capsys)["verdict"] == "pass"
    assert run(["check-sim", "ref", *args]) == 1
    capsys.readouterr()
    assert run(["check-live-sim", "fwd", *args]) == 1
    out = _out(capsys)
    assert out["counterexample"]["clause"] == "live-fwd clause 2a"
    assert out["counterexample"]["pair"] == "req:q"


def test_live_trace_inclusion_counterexample(capsys):
    assert run(["trace-inclusion", "live", _fx("dbi.json"), _fx("dbs.json"), "--json"]) == 1
    assert _out(capsys)["outcome"] == "counterexample"


def test_chain_lattice_commands(capsys, tmp_path: Path):
    dot = tmp_path / "chain.dot"
    assert run(["lattice-certify", _fx("chain.json"), _fx("chain_lattice.json"), "--dot", str(dot), "--json"]) == 0
    out = _out(capsys)
    assert out["certified"] is True
    assert out["certificates"][0]["derived"]["id"] == "p01~>p12"
    assert "p01 -> p12" in dot.read_text(encoding="utf-8")
    assert run(["lattice-check", _fx("chain_lattice.json"), "--json"]) == 0


def test_chain_correspondences(capsys):
    code = run(["correspondence", "fwd", _fx("chain.json"), _fx("chain_collapsed.json"), _fx("cand_chain.json"), "--bounds", "3", "--json"])
    assert code == 0
    out = _out(capsys)
    assert out["correspondences"]
    assert all(c["valid"] for c in out["correspondences"])


def test_leadsto_emits_automaton(capsys):
    assert run(["leadsto", _fx("chain.json"), "--p", "s0", "--q", "s2", "--json"]) == 0
    out = _out(capsys)
    assert out["pairs"][0]["id"] == "leads-to"
    assert len(out["states"]) == 3


def test_schema_error_exit_code(capsys, tmp_path: Path):
    bad = tmp_path / "cand.json"
    bad.write_text(json.dumps({"g": "identity", "h": {"q": "absent"}}), encoding="utf-8")
    assert run(["check-live-sim", "fwd", _fx("dbi.json"), _fx("dbs.json"), str(bad), "--json"]) == EXIT_SCHEMA
    out = _out(capsys)
    assert out["error"] == "schema"
    assert out["pointer"] == "/h/q/id"


def test_esds_run_monitor_and_check(capsys, tmp_path: Path, mocker: Any):
    mocker.patch.dict(os.environ, {"LIVREFINE_REPORTS": str(tmp_path / "reports")})
    cfg = tmp_path / "tiny.json"
    cfg.write_text(json.dumps(tiny_esds().to_json()), encoding="utf-8")
    log = tmp_path / "run.jsonl"
    assert run(["esds-run", str(cfg), "--out", str(log), "--json"]) == 0
    assert _out(capsys)["quiescent"] is True
    assert run(["esds-monitor", str(log), "--family", "M-I", "--csv", "--json"]) == 0
    assert _out(capsys)["outstanding"] == []
    assert (tmp_path / "reports" / "monitor_M-I.csv").exists()
    assert run(["esds-check-f", str(log), "--json"]) == 0
    assert _out(capsys)["coverage"] == 1.0
    assert run(["esds-check-f", str(log), "--mutation", "drop-add-constraints", "--json"]) == 1
    assert _out(capsys)["clauses"]["F silent"] == "fail"
    assert run(["esds-check-g", str(log), "--json"]) == 1
    assert _out(capsys)["error"] == "PreconditionError"


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        run(["frobnicate"])
