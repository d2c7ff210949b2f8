import io
import os
from pathlib import Path
from typing import Any

import pandas as pd

from src.relations import CheckReport, Counterexample
from src.reports import clauses_frame, dumps, emit_json, export_csv, write_dot


def _report() -> CheckReport:
    rep = CheckReport("fwd")
    rep.ok("fwd clause 1")
    rep.fail(Counterexample("fwd clause 2", detail="pas manquant"))
    return rep


def test_json_is_sorted_and_stable():
    assert dumps({"b": 1, "a": Path("x")}) == dumps({"a": Path("x"), "b": 1})
    out = io.StringIO()
    emit_json({"verdict": "pass"}, out)
    assert out.getvalue().endswith("}\n")
    assert '"verdict": "pass"' in out.getvalue()


def test_clauses_frame_carries_detail():
    frame = clauses_frame(_report())
    assert list(frame.columns) == ["relation", "clause", "status", "detail"]
    assert frame["clause"].tolist() == ["fwd clause 1", "fwd clause 2"]
    assert frame.loc[frame["clause"] == "fwd clause 2", "detail"].item() == "pas manquant"
    assert frame.loc[frame["clause"] == "fwd clause 1", "detail"].item() == ""


def test_export_csv_into_reports_dir(tmp_path: Path):
    path = export_csv(clauses_frame(_report()), "fwd", tmp_path / "reports")
    assert path == tmp_path / "reports" / "fwd.csv"
    assert pd.read_csv(path)["status"].tolist() == ["pass", "fail"]


def test_export_csv_uses_settings(mocker: Any, tmp_path: Path):
    mocker.patch.dict(os.environ, {"LIVREFINE_REPORTS": str(tmp_path)})
    assert export_csv(pd.DataFrame({"a": [1]}), "table.csv") == tmp_path / "table.csv"


def test_export_csv_failure_is_logged(mocker: Any, tmp_path: Path):
    mocker.patch.object(pd.DataFrame, "to_csv", side_effect=OSError("disque plein"))
    warn = mocker.patch("src.reports.logger.warning")
    assert export_csv(pd.DataFrame({"a": [1]}), "t", tmp_path) is None
    warn.assert_called_once()


def test_write_dot_creates_parents(tmp_path: Path):
    path = write_dot("digraph {}", tmp_path / "dot" / "g.dot")
    assert path.read_text(encoding="utf-8") == "digraph {}"
