############################################################
# CHANGELOG:
# - [2026-10-09] agt114 {author=agent} {reason: construction effective de l'exécution abstraite correspondante (avant et arrière)}
# - Impact: lasso α′ de B + correspondance d'indices vivace, revalidés; digraphe induit avec export DOT
# - Tests: tests/test_correspondence.py (identité DBS, CHAIN→CHAIN_COLLAPSED, BSIM1 arrière, mutation d'un vert)
# - Notes: fermeture du lasso quand (position canonique de α, état de B) se répète avec une avance positive
############################################################
"""
Correspondances d'exécutions pour les simulations vivaces.

- avant: marche gloutonne le long de α, un fragment vérifié par pas (non vide de préférence);
  repli sur la recherche dans le graphe relevé si la marche boucle sans avancer dans B;
- arrière: graphe relevé sur (état de B, position canonique de α), dont on extrait un chemin
  infini (tige + cycle d'avance positive) accessible depuis une racine.

Toute sortie est revalidée par `check_live_index_mapping` et `is_live`; un échec de
revalidation est signalé (`valid=False`), jamais masqué.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import graphviz
import networkx as nx

from logger_config import logger
from src.automata import (
    Automaton,
    ExecutionFragment,
    InternalInvariantError,
    Lasso,
    State,
    is_lasso_of,
    sort_key,
    sorted_states,
)
from src.index_mapping import IndexMapping, MappingVerdict, check_live_index_mapping
from src.liveness import ComplementedPair, is_live
from src.live_simulation import LiveContext, make_live_context
from src.relations import PairMap, SimulationCandidate, StateRelation, step_word
from src.streett import PairsLike

Node = Tuple[State, int]


@dataclass
class Correspondence:
    alpha2: Lasso
    mapping: IndexMapping
    valid: bool
    verdict: MappingVerdict
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "abstract": self.alpha2.to_json(),
            "mapping": self.mapping.to_json(),
            "valid": self.valid,
            "verdict": self.verdict.to_json(),
            "notes": self.notes,
        }


def revalidate(
    alpha: Lasso,
    alpha2: Lasso,
    relation: StateRelation,
    pair_map: PairMap,
    abstract_pairs: List[ComplementedPair],
    mapping: IndexMapping,
) -> MappingVerdict:
    """Correspondance d'indices vivace puis vivacité de α′ pour M."""
    verdict = check_live_index_mapping(alpha, alpha2, relation, pair_map, abstract_pairs, mapping)
    if verdict and not is_live(alpha2, abstract_pairs):
        return MappingVerdict(False, "live", None, "α′ ne satisfait pas M")
    return verdict


# --- pas contraints ---

def _edge_fragment(lctx: LiveContext, alpha: Lasso, i: int, u: State, target: Optional[State]) -> Optional[ExecutionFragment]:
    """Fragment de B pour le pas i -> i+1 de α depuis u, non vide si possible."""
    s, action, t = alpha.state_at(i), alpha.action_at(i + 1), alpha.state_at(i + 1)
    cons = lctx.constraints(s, t)
    if target is None:
        accept = lambda x: lctx.ctx.g.related(t, x) and x in lctx.ctx.cand.inv_b  # noqa: E731
    else:
        accept = lambda x: x == target  # noqa: E731
    word = step_word(action)
    frag = lctx.fragment(u, word, accept, cons, nonempty=True)
    return frag if frag is not None else lctx.fragment(u, word, accept, cons)


def _assemble(frags: List[ExecutionFragment], loop_edge: int) -> Tuple[Lasso, IndexMapping]:
    """frags[k] couvre le pas k -> k+1 de α; le cycle commence à l'arête `loop_edge`."""
    states: List[State] = [frags[0].fstate]
    actions = []
    table = [0]
    for frag in frags:
        states.extend(frag.states[1:])
        actions.extend(frag.actions)
        table.append(len(actions))
    whole = ExecutionFragment(tuple(states), tuple(actions))
    alpha2 = Lasso.from_fragment(whole, table[loop_edge])
    period = len(frags) - loop_edge
    increment = table[-1] - table[loop_edge]
    return alpha2, IndexMapping(tuple(table[:-1]), period, increment)


def _finish(
    lctx: LiveContext, alpha: Lasso, frags: List[ExecutionFragment], loop_edge: int, notes: List[str]
) -> Correspondence:
    alpha2, mapping = _assemble(frags, loop_edge)
    if not is_lasso_of(alpha2, lctx.ctx.b):
        raise InternalInvariantError("correspondance: α′ n'est pas une exécution de B")
    verdict = revalidate(alpha, alpha2, lctx.ctx.g, lctx.h, lctx.m_pairs, mapping)
    if not verdict:
        logger.warning("correspondance non revalidée: %s (%s)", verdict.clause, verdict.detail)
    return Correspondence(alpha2, mapping, bool(verdict), verdict, notes)


# --- graphe relevé ---

def _lifted_graph(lctx: LiveContext, alpha: Lasso, roots: Iterable[State]) -> Tuple[nx.DiGraph, List[Node]]:
    span = len(alpha.stem) + len(alpha.cycle)
    graph = nx.DiGraph()
    root_nodes = [(u, 0) for u in sorted_states(roots)]
    graph.add_nodes_from(root_nodes)
    frontier = list(root_nodes)
    seen = set(root_nodes)
    while frontier:
        node = frontier.pop(0)
        u, i = node
        nxt = alpha.normalize(i + 1)
        for u2 in lctx.ctx.image_b(alpha.state_at(i + 1)):
            frag = _edge_fragment(lctx, alpha, i, u, u2)
            if frag is None:
                continue
            target = (u2, nxt)
            graph.add_edge(node, target, frag=frag, delta=len(frag))
            if target not in seen:
                seen.add(target)
                frontier.append(target)
    logger.debug("graphe relevé: %d noeuds, %d arêtes (α de portée %d)", graph.number_of_nodes(), graph.number_of_edges(), span)
    return graph, root_nodes


def _infinite_path(
    lctx: LiveContext, alpha: Lasso, roots: Iterable[State], notes: List[str]
) -> Correspondence:
    graph, root_nodes = _lifted_graph(lctx, alpha, roots)
    reach = set()
    for r in root_nodes:
        reach |= nx.descendants(graph, r) | {r}
    for comp in sorted(nx.strongly_connected_components(graph.subgraph(reach)), key=lambda c: sort_key(sorted(c, key=sort_key))):
        sub = graph.subgraph(comp)
        positive = sorted(((x, y) for x, y, d in sub.edges(data=True) if d["delta"] > 0), key=sort_key)
        if not positive:
            continue
        x, y = positive[0]
        root = next(r for r in root_nodes if nx.has_path(graph, r, x))
        stem_nodes = nx.shortest_path(graph, root, x)
        cycle_nodes = [x] + nx.shortest_path(sub, y, x)
        path = stem_nodes + cycle_nodes[1:]
        frags = [graph.edges[a, b]["frag"] for a, b in zip(path, path[1:])]
        return _finish(lctx, alpha, frags, len(stem_nodes) - 1, notes)
    raise InternalInvariantError("correspondance: aucun chemin infini progressant dans le graphe relevé")


# --- avant ---

def build_correspondence_forward(
    alpha: Lasso, a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> Correspondence:
    """Marche gloutonne le long de α (simulation avant vivace supposée vérifiée)."""
    lctx = make_live_context(a, concrete, b, abstract, cand)
    s0 = alpha.state_at(0)
    starts = [u for u in lctx.ctx.image_b(s0) if b.is_start(u)]
    if not starts:
        raise InternalInvariantError(f"correspondance avant: {cand.g.name}[{s0}] ∩ start(B) = ∅")
    u = starts[0]
    frags: List[ExecutionFragment] = []
    first_seen: Dict[Node, int] = {}
    cumulative = [0]
    k = 0
    while True:
        key = (u, alpha.normalize(k))
        if key in first_seen and k >= len(alpha.stem):
            k1 = first_seen[key]
            if cumulative[k] - cumulative[k1] > 0:
                logger.debug("correspondance avant: fermeture en %d (boucle depuis %d)", k, k1)
                return _finish(lctx, alpha, frags, k1, [])
            logger.info("correspondance avant: boucle sans avance dans B, repli sur le graphe relevé")
            return _infinite_path(lctx, alpha, starts, ["repli: graphe relevé"])
        first_seen.setdefault(key, k)
        frag = _edge_fragment(lctx, alpha, k, u, None)
        if frag is None:
            raise InternalInvariantError(
                f"correspondance avant: aucun fragment au pas {k + 1} depuis {u} (vérificateur et bornes incohérents)"
            )
        frags.append(frag)
        cumulative.append(cumulative[-1] + len(frag))
        u = frag.lstate
        k += 1


# --- arrière ---

@dataclass
class InducedDigraph:
    graph: nx.DiGraph
    levels: int

    def roots(self) -> List[Node]:
        return sorted((n for n in self.graph.nodes if self.graph.in_degree(n) == 0), key=sort_key)

    def level(self, i: int) -> List[Node]:
        return sorted((n for n in self.graph.nodes if n[1] == i), key=sort_key)

    def to_dot(self, name: str = "induced") -> str:
        dot = graphviz.Digraph(name=name, graph_attr={"rankdir": "LR"})
        for u, i in sorted(self.graph.nodes, key=sort_key):
            dot.node(f"{u}@{i}", label=f"({u}, {i})", shape="doublecircle" if i == 0 else "circle")
        for (u, i), (u2, i2), data in sorted(self.graph.edges(data=True), key=lambda e: sort_key((e[0], e[1]))):
            label = " ".join(str(x) for x in data["frag"].actions) or "λ"
            dot.edge(f"{u}@{i}", f"{u2}@{i2}", label=label)
        return dot.source


def build_induced_digraph(
    alpha: Lasso,
    unroll: int,
    a: Automaton,
    concrete: PairsLike,
    b: Automaton,
    abstract: PairsLike,
    cand: SimulationCandidate,
) -> InducedDigraph:
    """Digraphe induit par unroll(α, unroll) et vérification des cinq propriétés attendues."""
    lctx = make_live_context(a, concrete, b, abstract, cand)
    frag = alpha.unroll(unroll)
    n = len(frag)
    graph = nx.DiGraph()
    for i in range(n + 1):
        for u in lctx.ctx.image_b(frag.states[i]):
            graph.add_node((u, i))
    for i in range(n):
        for u in lctx.ctx.image_b(frag.states[i]):
            for u2 in lctx.ctx.image_b(frag.states[i + 1]):
                edge = _edge_fragment(lctx, alpha, i, u, u2)
                if edge is not None:
                    graph.add_edge((u, i), (u2, i + 1), frag=edge)
    digraph = InducedDigraph(graph, n)
    _assert_lemma(digraph, n)
    return digraph


def _assert_lemma(digraph: InducedDigraph, n: int) -> None:
    graph = digraph.graph
    for i in range(n + 1):
        if not digraph.level(i):
            raise InternalInvariantError(f"digraphe induit: niveau {i} vide")
    roots = digraph.roots()
    if roots != digraph.level(0):
        raise InternalInvariantError("digraphe induit: les racines ne sont pas exactement le niveau 0")
    if not roots:
        raise InternalInvariantError("digraphe induit: aucune racine")
    reach = set(roots)
    for r in roots:
        reach |= nx.descendants(graph, r)
    if reach != set(graph.nodes):
        missing = sorted(set(graph.nodes) - reach, key=sort_key)
        raise InternalInvariantError(f"digraphe induit: noeuds inaccessibles depuis les racines {missing[:3]}")


def build_correspondence_backward(
    alpha: Lasso, a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> Correspondence:
    """Chemin infini du graphe relevé (racines: g[s0] ∩ I_B)."""
    lctx = make_live_context(a, concrete, b, abstract, cand)
    roots = lctx.ctx.image_b(alpha.state_at(0))
    if not roots:
        raise InternalInvariantError(f"correspondance arrière: {cand.g.name}[{alpha.state_at(0)}] ∩ I_B = ∅")
    return _infinite_path(lctx, alpha, roots, [])
