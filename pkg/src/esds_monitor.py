############################################################
# CHANGELOG:
# - [2026-10-13] agt120 {author=agent} {reason: moniteurs de paires complémentées sur journaux finis (M-I, M-II, L)}
# - Impact: statut par paire (never-red / discharged / outstanding), export DataFrame/CSV
# - Tests: tests/test_esds_monitor.py (run quiescent, troncature avant convergence, front-end lossy)
# - Notes: substitut fini de □◇R ⇒ □◇G, toujours étiqueté comme tel dans le rapport
############################################################
"""
Moniteur de paires sur un journal fini.

Pour une paire ⟨R, G⟩ et les états s0..sn du journal:
- never-red: aucun état rouge;
- discharged: un état vert à un indice >= dernier rouge;
- outstanding: sinon (obligation ouverte à la fin du run).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from logger_config import logger
from src.automata import ModelError, State
from src.esds_predicates import FAMILIES, PredicateContext, family_pairs
from src.esds_scheduler import ExecutionLog
from src.liveness import ComplementedPair

SURROGATE_LABEL = "finite-run surrogate for □◇R ⇒ □◇G"


class ObligationStatus(str, Enum):
    NEVER_RED = "never-red"
    DISCHARGED = "discharged"
    OUTSTANDING = "outstanding"


@dataclass
class PairObligation:
    pair_id: str
    status: ObligationStatus
    last_red: Optional[int] = None
    green_at: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        return {"pair": self.pair_id, "status": self.status.value, "last_red": self.last_red, "green_at": self.green_at}


@dataclass
class MonitorReport:
    family: str
    steps: int
    quiescent: bool
    obligations: List[PairObligation] = field(default_factory=list)
    label: str = SURROGATE_LABEL

    @property
    def outstanding(self) -> List[PairObligation]:
        return [o for o in self.obligations if o.status == ObligationStatus.OUTSTANDING]

    @property
    def ok(self) -> bool:
        return not self.outstanding

    def status_of(self, pair_id: str) -> ObligationStatus:
        for o in self.obligations:
            if o.pair_id == pair_id:
                return o.status
        raise ModelError(f"paire inconnue {pair_id!r}")

    def counts(self) -> Dict[str, int]:
        out = {s.value: 0 for s in ObligationStatus}
        for o in self.obligations:
            out[o.status.value] += 1
        return out

    def to_json(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "label": self.label,
            "steps": self.steps,
            "quiescent": self.quiescent,
            "counts": self.counts(),
            "outstanding": [o.pair_id for o in self.outstanding],
            "obligations": [o.to_json() for o in self.obligations],
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [{"family": self.family, **o.to_json()} for o in self.obligations]
        return pd.DataFrame(rows, columns=["family", "pair", "status", "last_red", "green_at"])


def monitor_states(states: Sequence[State], pairs: Sequence[ComplementedPair], family: str = "custom", quiescent: bool = False) -> MonitorReport:
    rep = MonitorReport(family, max(0, len(states) - 1), quiescent)
    for p in pairs:
        reds = [i for i, s in enumerate(states) if s in p.red]
        if not reds:
            rep.obligations.append(PairObligation(p.id, ObligationStatus.NEVER_RED))
            continue
        last = reds[-1]
        green = next((i for i in range(last, len(states)) if states[i] in p.green), None)
        status = ObligationStatus.DISCHARGED if green is not None else ObligationStatus.OUTSTANDING
        rep.obligations.append(PairObligation(p.id, status, last, green))
    return rep


def monitor_pairs(log: ExecutionLog, family: str) -> MonitorReport:
    """Statut de chaque paire de la famille sur les états du journal."""
    if family not in FAMILIES:
        raise ModelError(f"famille inconnue {family!r} (attendu: {', '.join(FAMILIES)})")
    if family == "L" and log.config.system != "alg":
        raise ModelError("famille L: journal ESDS-Alg requis")
    ctx = PredicateContext.of(log.config)
    rep = monitor_states(log.states(), family_pairs(ctx, family), family, bool(log.footer.get("quiescent")))
    if rep.outstanding:
        logger.warning("monitor %s: %d obligation(s) ouverte(s) (%s)", family, len(rep.outstanding), SURROGATE_LABEL)
    else:
        logger.info("monitor %s: aucune obligation ouverte sur %d pas", family, rep.steps)
    return rep


def response_indices(log: ExecutionLog) -> Dict[str, int]:
    """Indice (1-based) du premier response(x, v) de chaque x dans le journal."""
    out: Dict[str, int] = {}
    for i, a in enumerate(log.actions, start=1):
        if a.name == "response":
            out.setdefault(a.payload[0], i)
    return out
