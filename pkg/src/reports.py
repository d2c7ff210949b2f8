############################################################
# CHANGELOG:
# - [2026-10-15] agt123 {author=agent} {reason: sortie des rapports (JSON stdout, CSV dans reports/, DOT)}
# - Impact: la CLI et les outils écrivent tous par ici; sortie JSON déterministe (clés triées)
# - Tests: tests/test_reports.py (CSV écrit dans un tmp_path, JSON stable, tableau des clauses)
# - Notes: un échec d'écriture CSV est journalisé en WARN sans interrompre la commande
############################################################
"""Rapports: JSON sur stdout, tableaux pandas exportés en CSV, sources DOT."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

import pandas as pd

from logger_config import logger
from src.config import get_settings
from src.relations import CheckReport


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2, default=str)


def emit_json(payload: Any, out: Optional[TextIO] = None) -> None:
    stream = out if out is not None else sys.stdout
    stream.write(dumps(payload) + "\n")
    stream.flush()


def clauses_frame(rep: CheckReport) -> pd.DataFrame:
    """Une ligne par clause vérifiée (la clause fautive porte le contre-exemple)."""
    rows = []
    cx = rep.counterexample
    for clause, status in sorted(rep.clauses.items()):
        rows.append(
            {
                "relation": rep.relation,
                "clause": clause,
                "status": status,
                "detail": cx.detail if cx is not None and cx.clause == clause else "",
            }
        )
    return pd.DataFrame(rows, columns=["relation", "clause", "status", "detail"])


def export_csv(frame: pd.DataFrame, name: str, reports_dir: Optional[Path] = None) -> Optional[Path]:
    reports_dir = reports_dir or get_settings().reports_dir
    reports_dir.mkdir(parents=True, exist_ok=True)
    path = reports_dir / (name if name.endswith(".csv") else f"{name}.csv")
    try:
        frame.to_csv(path, index=False)
    except OSError as e:
        logger.warning("CSV non écrit (%s): %s", path, e)
        return None
    logger.info("CSV écrit: %s (%d lignes)", path, len(frame))
    return path


def write_dot(source: str, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(source, encoding="utf-8")
    logger.info("DOT écrit: %s", path)
    return path
