############################################################
# CHANGELOG:
# - [2026-10-05] agt109 {author=agent} {reason: correspondances d'indices (simples et vivaces) entre lassos}
# - Impact: vérification clause par clause et recherche produit bornée d'une correspondance
# - Tests: tests/test_correspondence.py (identité T1, m(0)=1, traces aω/bω, DBI/DBS, mutation 5b)
# - Notes: présentation ultimement périodique m(i) = m(i - period) + increment au-delà de la table
############################################################
"""
Correspondances d'indices m entre un lasso α de A et un lasso α′ de B.

Une correspondance est présentée par une table finie (positions 0..len-1) et un couple
(période, incrément): pour i >= len(table), m(i) = m(i - période) + incrément.
La période doit être un multiple de |cycle(α)| et l'incrément un multiple de |cycle(α′)|,
ce qui ramène toutes les vérifications à i = 0..len(table).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from logger_config import logger
from src.automata import Lasso, ModelError, sort_key
from src.relations import PairMap, StateRelation
from src.liveness import ComplementedPair
from src.traces import externals, trace_between


@dataclass(frozen=True)
class IndexMapping:
    table: Tuple[int, ...]
    period: int
    increment: int

    def __call__(self, i: int) -> int:
        if i < 0:
            raise ModelError("m(i): i >= 0")
        n = len(self.table)
        if i < n:
            return self.table[i]
        back = ((i - n) // self.period + 1) * self.period
        return self.table[i - back] + (back // self.period) * self.increment

    @classmethod
    def identity(cls, lasso: Lasso) -> "IndexMapping":
        n = len(lasso.stem) + len(lasso.cycle)
        return cls(tuple(range(n)), len(lasso.cycle), len(lasso.cycle))

    def to_json(self) -> Dict[str, Any]:
        return {"table": list(self.table), "period": self.period, "increment": self.increment}


@dataclass
class MappingVerdict:
    ok: bool
    clause: Optional[str] = None
    position: Optional[int] = None
    detail: str = ""
    pair_id: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> Dict[str, Any]:
        return {"ok": self.ok, "clause": self.clause, "position": self.position, "pair": self.pair_id, "detail": self.detail}


def _presentation_error(alpha: Lasso, alpha2: Lasso, m: IndexMapping) -> Optional[str]:
    n = len(m.table)
    if m.period < 1 or n < m.period:
        return "période invalide"
    if m.period % len(alpha.cycle):
        return "période non multiple de |cycle(α)|"
    if n - m.period < len(alpha.stem):
        return "table trop courte pour couvrir le préfixe de α"
    if m.increment % len(alpha2.cycle):
        return "incrément non multiple de |cycle(α′)|"
    if m.increment > 0 and m.table[n - m.period] < len(alpha2.stem):
        return "partie périodique de m dans le préfixe de α′"
    return None


def check_index_mapping(alpha: Lasso, alpha2: Lasso, relation: StateRelation, m: IndexMapping) -> MappingVerdict:
    """Clauses 1 à 4 d'une correspondance d'indices sur la présentation ultimement périodique."""
    bad = _presentation_error(alpha, alpha2, m)
    if bad:
        return MappingVerdict(False, "presentation", None, bad)
    if m(0) != 0:
        return MappingVerdict(False, "clause 1", 0, f"m(0) = {m(0)}")
    last = len(m.table)
    for i in range(1, last + 1):
        if m(i) < m(i - 1):
            return MappingVerdict(False, "monotone", i, f"m({i}) < m({i - 1})")
    for i in range(0, last + 1):
        s, u = alpha.state_at(i), alpha2.state_at(m(i))
        if not relation.related(s, u):
            return MappingVerdict(False, "clause 2", i, f"({s}, {u}) ∉ {relation.name}")
    for i in range(1, last + 1):
        want = externals([alpha.action_at(i)])
        got = trace_between(alpha2, m(i - 1) + 1, m(i))
        if got != want:
            return MappingVerdict(
                False, "clause 3", i, f"trace(α′,{m(i - 1) + 1},{m(i)}) = {[str(a) for a in got]} ≠ {[str(a) for a in want]}"
            )
    if m.increment < 1:
        return MappingVerdict(False, "clause 4", None, "incrément périodique nul: m n'est pas cofinal")
    return MappingVerdict(True)


def check_live_index_mapping(
    alpha: Lasso,
    alpha2: Lasso,
    relation: StateRelation,
    pair_map: PairMap,
    abstract_pairs: Sequence[ComplementedPair],
    m: IndexMapping,
) -> MappingVerdict:
    """Clauses 1 à 4 puis 5a/5b pour chaque q de M avec p = H(q)."""
    plain = check_index_mapping(alpha, alpha2, relation, m)
    if not plain:
        return plain
    for q in sorted(abstract_pairs, key=lambda x: x.id):
        target = pair_map.target(q)
        if target is None:
            return MappingVerdict(False, "h-total", None, f"h({q.id}) indéfini", q.id)
        p = target.pair
        for i in range(1, len(m.table) + 1):
            s_prev, s_cur = alpha.state_at(i - 1), alpha.state_at(i)
            window = [alpha2.state_at(j) for j in range(m(i - 1), m(i) + 1)]
            if any(u in q.red for u in window) and not (s_prev in p.red or s_cur in p.red):
                return MappingVerdict(False, "clause 5a", i, f"α′ touche {q.id}.R sans {p.id}.R aux extrémités", q.id)
            if (s_prev in p.green or s_cur in p.green) and not any(u in q.green for u in window):
                return MappingVerdict(False, "clause 5b", i, f"{p.id}.G aux extrémités sans {q.id}.G dans α′", q.id)
    return MappingVerdict(True)


@dataclass
class MappingSearch:
    status: str
    mapping: Optional[IndexMapping] = None
    explored: int = 0
    notes: List[str] = field(default_factory=list)


def _advances(alpha2: Lasso, j: int, word: Tuple, horizon: int) -> List[int]:
    """Avances k >= 0 de α′ depuis j telles que trace(α′, j+1, j+k) = word."""
    out = []
    for k in range(0, horizon + 1):
        got = trace_between(alpha2, j + 1, j + k)
        if got == word:
            out.append(k)
        elif len(got) > len(word) or got != word[: len(got)]:
            break
    return out


def find_index_mapping(alpha: Lasso, alpha2: Lasso, relation: StateRelation, bound: int) -> MappingSearch:
    """Recherche produit sur (position de α, position de α′) normalisées.

    Un chemin infini du produit dont la somme des avances diverge est une correspondance;
    on cherche une composante fortement connexe contenant une arête d'avance positive.
    """
    start = (0, 0)
    if not relation.related(alpha.state_at(0), alpha2.state_at(0)):
        return MappingSearch("none")
    horizon = len(alpha2.stem) + 2 * len(alpha2.cycle)
    graph = nx.MultiDiGraph()
    graph.add_node(start)
    frontier = [start]
    seen = {start}
    explored = 0
    while frontier:
        if explored >= bound:
            logger.warning("find_index_mapping: borne %d atteinte", bound)
            return MappingSearch("unknown", explored=explored, notes=[f"bound {bound} exhausted"])
        i, j = frontier.pop(0)
        explored += 1
        word = externals([alpha.action_at(i + 1)])
        ni = alpha.normalize(i + 1)
        for k in _advances(alpha2, j, word, horizon):
            nj = alpha2.normalize(j + k)
            if not relation.related(alpha.state_at(ni), alpha2.state_at(nj)):
                continue
            graph.add_edge((i, j), (ni, nj), delta=k)
            if (ni, nj) not in seen:
                seen.add((ni, nj))
                frontier.append((ni, nj))

    for comp in sorted(nx.strongly_connected_components(graph), key=lambda c: sort_key(sorted(c))):
        sub = graph.subgraph(comp)
        positive = sorted(
            ((x, y, d["delta"]) for x, y, d in sub.edges(data=True) if d["delta"] > 0), key=sort_key
        )
        if not positive:
            continue
        x, y, delta = positive[0]
        stem_nodes = nx.shortest_path(graph, start, x)
        back_nodes = nx.shortest_path(sub, y, x)
        mapping = _assemble(graph, sub, stem_nodes, [x] + back_nodes, delta)
        logger.debug("find_index_mapping: correspondance trouvée (%d noeuds explorés)", explored)
        return MappingSearch("found", mapping, explored)
    return MappingSearch("none", explored=explored)


def _min_delta(graph: nx.MultiDiGraph, a: Tuple[int, int], b: Tuple[int, int]) -> int:
    return min(d["delta"] for d in graph.get_edge_data(a, b).values())


def _assemble(
    graph: nx.MultiDiGraph,
    sub: nx.MultiDiGraph,
    stem_nodes: List[Tuple[int, int]],
    cycle_nodes: List[Tuple[int, int]],
    first_delta: int,
) -> IndexMapping:
    table = [0]
    for a, b in zip(stem_nodes, stem_nodes[1:]):
        table.append(table[-1] + _min_delta(graph, a, b))
    base = len(table) - 1
    increments = [first_delta] + [_min_delta(sub, a, b) for a, b in zip(cycle_nodes[1:], cycle_nodes[2:])]
    period = len(cycle_nodes) - 1
    for inc in increments[:-1]:
        table.append(table[-1] + inc)
    total = sum(increments)
    assert len(table) == base + period
    return IndexMapping(tuple(table), period, total)
