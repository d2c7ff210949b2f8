############################################################
# CHANGELOG:
# - [2026-10-10] agt115 {author=agent} {reason: treillis de paires complémentées (structure, succ, certification, échantillonnage)}
# - Impact: dérivation de ⟨⊥.R, ⊤.G⟩ ∈ L̂ par chaînage, vérifiée ensuite par closure_member
# - Tests: tests/test_lattice.py (chaîne CHAIN, diamant, clause 4 cassée, singleton, treillis ESDS échantillonnés)
# - Notes: « treillis » au sens informel (pas de meet/join); sous-treillis attachés aux éléments qu'ils justifient
############################################################
"""
Treillis de paires complémentées.

Un treillis (P, ≺, ⊤, ⊥) vérifie:
- clause 1: P fini (donné par construction);
- clause 2: ≺ ordre strict (irréflexif après clôture transitive);
- clause 3: ⊤ unique maximum, ⊥ unique minimum;
- clause 4: pour tout r ≠ ⊤, r.G ⊆ ⋃_{w ∈ succ(r)} w.R.

Si de plus chaque élément est dans L̂, alors ⟨⊥.R, ⊤.G⟩ ∈ L̂.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import graphviz
import networkx as nx
import pandas as pd

from logger_config import logger
from src.automata import Automaton, InternalInvariantError, Lasso, ModelError, State, reachable_states, sort_key
from src.liveness import ComplementedPair
from src.streett import ClosureVerdict, PairsLike, closure_member, instantiate_pairs

SAMPLED_LABEL = "sampled, not a proof"


@dataclass
class PairLattice:
    pairs: Dict[str, ComplementedPair]
    order: frozenset
    top: str
    bottom: str
    name: str = "lattice"
    sublattices: Dict[str, List["PairLattice"]] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        pairs: Iterable[ComplementedPair],
        order: Iterable[Tuple[str, str]],
        top: str,
        bottom: str,
        name: str = "lattice",
    ) -> "PairLattice":
        by_id = {p.id: p for p in pairs}
        graph = nx.DiGraph()
        graph.add_nodes_from(by_id)
        for a, b in order:
            if a not in by_id or b not in by_id:
                raise ModelError(f"treillis {name}: arête ({a}, {b}) hors de P")
            graph.add_edge(a, b)
        closure = nx.transitive_closure(graph, reflexive=False)
        for node in top, bottom:
            if node not in by_id:
                raise ModelError(f"treillis {name}: {node} ∉ P")
        return cls(by_id, frozenset(closure.edges), top, bottom, name)

    def element(self, pair_id: str) -> ComplementedPair:
        if pair_id not in self.pairs:
            raise ModelError(f"treillis {self.name}: {pair_id} ∉ P")
        return self.pairs[pair_id]

    def below(self, a: str, b: str) -> bool:
        return (a, b) in self.order

    def succ(self, pair_id: str) -> List[ComplementedPair]:
        """Successeurs immédiats de r."""
        self.element(pair_id)
        above = [w for (r, w) in self.order if r == pair_id]
        out = [w for w in above if not any(self.below(pair_id, v) and self.below(v, w) for v in above if v != w)]
        return [self.pairs[w] for w in sorted(out)]

    def derived_pair(self) -> ComplementedPair:
        """⟨⊥.R, ⊤.G⟩ (l'élément lui-même si ⊤ = ⊥)."""
        if self.top == self.bottom:
            return self.pairs[self.top]
        bottom, top = self.pairs[self.bottom], self.pairs[self.top]
        return ComplementedPair(f"{self.bottom}~>{self.top}", bottom.red, top.green)

    def without(self, pair_id: str) -> "PairLattice":
        """Copie sans l'élément `pair_id` (ordre restreint, toujours transitif)."""
        self.element(pair_id)
        pairs = {k: v for k, v in self.pairs.items() if k != pair_id}
        order = frozenset((a, b) for a, b in self.order if pair_id not in (a, b))
        return PairLattice(pairs, order, self.top, self.bottom, f"{self.name}-{pair_id}")

    def to_dot(self) -> str:
        dot = graphviz.Digraph(name=self.name, graph_attr={"rankdir": "BT"})
        for pid in sorted(self.pairs):
            p = self.pairs[pid]
            dot.node(pid, label=f"{pid}\n⟨{p.red.name}, {p.green.name}⟩", shape="box")
        for pid in sorted(self.pairs):
            for w in self.succ(pid):
                dot.edge(pid, w.id)
        return dot.source


# --- structure ---

@dataclass
class StructureReport:
    clauses: Dict[str, bool]
    violations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())

    def to_json(self) -> Dict[str, Any]:
        return {"ok": self.ok, "clauses": self.clauses, "violations": self.violations}


def _universe(lattice: PairLattice) -> List[State]:
    states = set()
    for p in lattice.pairs.values():
        for pred in (p.red, p.green):
            if not pred.is_explicit:
                raise ModelError(f"treillis {lattice.name}: {pred.name} non explicite (utiliser check_lattice_sampled)")
            states |= set(pred.states or ())
    return sorted(states, key=sort_key)


def _coverage_gaps(lattice: PairLattice, states: Iterable[State]) -> List[Tuple[str, State]]:
    gaps = []
    for pid in sorted(lattice.pairs):
        if pid == lattice.top:
            continue
        r = lattice.pairs[pid]
        nxt = lattice.succ(pid)
        for s in states:
            if s in r.green and not any(s in w.red for w in nxt):
                gaps.append((pid, s))
    return gaps


def check_lattice_structure(lattice: PairLattice, universe: Optional[Iterable[State]] = None) -> StructureReport:
    """Clauses 1 à 4 pour des paires à ensembles explicites."""
    rep = StructureReport({"clause 1": True, "clause 2": True, "clause 3": True, "clause 4": True})
    loops = sorted(a for a, b in lattice.order if a == b)
    if loops:
        rep.clauses["clause 2"] = False
        rep.violations.append({"clause": "clause 2", "element": loops[0], "detail": "ordre non irréflexif (cycle)"})
    for pid in sorted(lattice.pairs):
        if pid != lattice.top and not lattice.below(pid, lattice.top):
            rep.clauses["clause 3"] = False
            rep.violations.append({"clause": "clause 3", "element": pid, "detail": f"{pid} ⊀ ⊤"})
        if pid != lattice.bottom and not lattice.below(lattice.bottom, pid):
            rep.clauses["clause 3"] = False
            rep.violations.append({"clause": "clause 3", "element": pid, "detail": f"⊥ ⊀ {pid}"})
    if lattice.top != lattice.bottom and lattice.below(lattice.top, lattice.bottom):
        rep.clauses["clause 3"] = False
    if not rep.clauses["clause 2"]:
        rep.clauses["clause 4"] = False
        return rep
    states = list(universe) if universe is not None else _universe(lattice)
    for pid, s in _coverage_gaps(lattice, states):
        rep.clauses["clause 4"] = False
        rep.violations.append({"clause": "clause 4", "element": pid, "witness": str(s), "detail": f"{s} ∈ {pid}.G hors ⋃ succ.R"})
        break
    logger.debug("check_lattice_structure %s: %s", lattice.name, rep.clauses)
    return rep


# --- certification sémantique ---

@dataclass
class LatticeCertificate:
    structural: StructureReport
    semantic: Dict[str, ClosureVerdict] = field(default_factory=dict)
    derived: Optional[ComplementedPair] = None
    derived_verdict: Optional[ClosureVerdict] = None
    refused: Optional[str] = None

    @property
    def certified(self) -> bool:
        return self.refused is None and self.structural.ok and all(v.member for v in self.semantic.values())

    def to_json(self) -> Dict[str, Any]:
        return {
            "certified": self.certified,
            "refused": self.refused,
            "structural": self.structural.to_json(),
            "semantic": {k: v.to_json() for k, v in sorted(self.semantic.items())},
            "derived": self.derived.to_json() if self.derived else None,
            "derived_verdict": self.derived_verdict.to_json() if self.derived_verdict else None,
        }


def certify_lattice(
    automaton: Automaton, condition: PairsLike, lattice: PairLattice, bound: Optional[int] = None
) -> LatticeCertificate:
    """Chaque élément certifié par closure_member, puis recontrôle de ⟨⊥.R, ⊤.G⟩."""
    reach = reachable_states(automaton, bound=bound)
    structural = check_lattice_structure(lattice, reach.states)
    cert = LatticeCertificate(structural)
    if not structural.ok:
        cert.refused = "structure"
        return cert
    pairs = instantiate_pairs(condition, reach.states)
    for pid in sorted(lattice.pairs):
        verdict = closure_member(automaton, pairs, lattice.pairs[pid], bound=bound)
        cert.semantic[pid] = verdict
        if not verdict.member:
            cert.refused = pid
            logger.info("certify_lattice %s: %s ∉ L̂", lattice.name, pid)
            return cert
    cert.derived = lattice.derived_pair()
    cert.derived_verdict = closure_member(automaton, pairs, cert.derived, bound=bound)
    if not cert.derived_verdict.member:
        raise InternalInvariantError(f"certify_lattice {lattice.name}: paire dérivée {cert.derived.id} ∉ L̂")
    logger.info("certify_lattice %s: certifié, paire dérivée %s", lattice.name, cert.derived.id)
    return cert


def chain_obligation(lasso: Lasso, lattice: PairLattice) -> bool:
    """Si le cycle touche ⊥.R alors il touche ⊤.G."""
    cycle = lasso.cycle_states()
    bottom, top = lattice.pairs[lattice.bottom], lattice.pairs[lattice.top]
    return not any(s in bottom.red for s in cycle) or any(s in top.green for s in cycle)


# --- échantillonnage ---

@dataclass
class SampledReport:
    checked: int
    violations: List[Dict[str, Any]] = field(default_factory=list)
    lattices: List[str] = field(default_factory=list)
    label: str = SAMPLED_LABEL

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "ok": self.ok,
            "checked": self.checked,
            "lattices": self.lattices,
            "violations": self.violations,
        }

    def to_frame(self) -> pd.DataFrame:
        cols = ["lattice", "element", "state_index", "detail"]
        return pd.DataFrame(self.violations, columns=cols)


def _walk(lattice: PairLattice) -> Iterable[PairLattice]:
    yield lattice
    for key in sorted(lattice.sublattices):
        for sub in lattice.sublattices[key]:
            yield from _walk(sub)


def check_lattice_sampled(lattice: PairLattice | Sequence[PairLattice], sample: Any) -> SampledReport:
    """Clause 4 testée point par point sur les états échantillonnés (sous-treillis compris).

    `sample`: itérable d'états ou objet exposant `states()` (journal d'exécution).
    """
    states = list(sample.states()) if callable(getattr(sample, "states", None)) else list(sample)
    if not states:
        raise ModelError("check_lattice_sampled: échantillon vide")
    roots = [lattice] if isinstance(lattice, PairLattice) else list(lattice)
    rep = SampledReport(checked=len(states))
    for lat in (x for root in roots for x in _walk(root)):
        rep.lattices.append(lat.name)
        for pid in sorted(lat.pairs):
            if pid == lat.top:
                continue
            r = lat.pairs[pid]
            nxt = lat.succ(pid)
            for k, s in enumerate(states):
                if s in r.green and not any(s in w.red for w in nxt):
                    rep.violations.append(
                        {
                            "lattice": lat.name,
                            "element": pid,
                            "state_index": k,
                            "detail": f"{r.green.name} sans rouge successeur ({', '.join(w.id for w in nxt) or 'aucun'})",
                        }
                    )
                    break
    if rep.violations:
        logger.warning("check_lattice_sampled: %d violation(s) sur %d treillis (%s)", len(rep.violations), len(rep.lattices), SAMPLED_LABEL)
    return rep
