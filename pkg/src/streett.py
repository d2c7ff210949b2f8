############################################################
# CHANGELOG:
# - [2026-10-06] agt110 {author=agent} {reason: vacuité Streett par raffinement de CFC, oracle d'énumération}
# - Impact: fermeture machine, appartenance à la fermeture sémantique, classification des paires dérivées
# - Tests: tests/test_streett.py (CY3, DBS, CHAIN, boucle rouge) + comparaison avec l'oracle sur instances aléatoires
# - Notes: les CFC sont traitées dans l'ordre de sort_key; verts visités dans l'ordre des ids de paires
############################################################
"""
Questions de vivacité sur automates finis explicites.

`streett_emptiness` est la procédure exacte (CFC + suppression des rouges des paires
violées, récursivement). `enumerate_live_lassos` est l'oracle indépendant: énumération
bornée littérale des lassos, filtrés par `is_live`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from logger_config import logger
from src.automata import (
    ActionLabel,
    Automaton,
    ExecutionFragment,
    InternalInvariantError,
    Lasso,
    PreconditionError,
    State,
    StatePredicate,
    Step,
    reachable_states,
    sort_key,
    sorted_states,
)
from src.liveness import ComplementedPair, LivenessCondition, is_live, same_pair_on
from src.traces import trace_of

PairsLike = LivenessCondition | Sequence[ComplementedPair]


def instantiate_pairs(condition: PairsLike, states: Iterable[State]) -> List[ComplementedPair]:
    if isinstance(condition, LivenessCondition):
        return condition.instantiate(states)
    return list(condition)


@dataclass
class EmptinessVerdict:
    nonempty: bool
    witness: Optional[Lasso] = None
    explored: int = 0
    partial: bool = False

    @property
    def empty(self) -> bool:
        return not self.nonempty

    def to_json(self) -> Dict[str, Any]:
        return {
            "outcome": "nonempty" if self.nonempty else "empty",
            "witness": self.witness.to_json() if self.witness else None,
            "explored": self.explored,
            "partial": self.partial,
        }


class _StepGraph:
    """Graphe des pas accessibles; une arête garde la plus petite action (sort_key) entre deux états."""

    def __init__(self, automaton: Automaton, roots: List[State], bound: Optional[int]) -> None:
        reach = reachable_states(automaton, bound=bound, roots=roots)
        self.states = reach.states
        self.partial = reach.partial
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(sorted_states(self.states))
        self.steps: Set[Step] = set()
        for s in sorted_states(self.states):
            for action, t in automaton.transitions(s):
                if t not in self.states:
                    continue
                self.steps.add((s, action, t))
                self._add(self.graph, s, action, t)

    @staticmethod
    def _add(graph: nx.DiGraph, s: State, action: ActionLabel, t: State) -> None:
        if graph.has_edge(s, t):
            if sort_key(action) < sort_key(graph[s][t]["action"]):
                graph[s][t]["action"] = action
        else:
            graph.add_edge(s, t, action=action)

    def restricted(self, steps: Optional[Iterable[Step]], keep: Optional[Callable[[State], bool]]) -> nx.DiGraph:
        sub = nx.DiGraph()
        allowed = [s for s in sorted_states(self.states) if keep is None or keep(s)]
        sub.add_nodes_from(allowed)
        allowed_set = set(allowed)
        chosen = self.steps if steps is None else (set(steps) & self.steps)
        for s, action, t in sorted(chosen, key=sort_key):
            if s in allowed_set and t in allowed_set:
                self._add(sub, s, action, t)
        return sub


def _is_nontrivial(graph: nx.DiGraph, comp: FrozenSet[State]) -> bool:
    if len(comp) > 1:
        return True
    (only,) = tuple(comp)
    return graph.has_edge(only, only)


def accepting_components(graph: nx.DiGraph, pairs: Sequence[ComplementedPair]) -> List[FrozenSet[State]]:
    """CFC non triviales (après raffinement) acceptantes pour toutes les paires."""
    out: List[FrozenSet[State]] = []
    work: List[FrozenSet[State]] = [frozenset(graph.nodes)]
    while work:
        nodes = work.pop(0)
        sub = graph.subgraph(nodes)
        comps = sorted((frozenset(c) for c in nx.strongly_connected_components(sub)), key=lambda c: sort_key(sorted_states(c)))
        for comp in comps:
            if not _is_nontrivial(sub, comp):
                continue
            bad: Set[State] = set()
            for p in pairs:
                reds = {s for s in comp if s in p.red}
                if reds and not any(s in p.green for s in comp):
                    bad |= reds
            if not bad:
                out.append(comp)
            elif comp - bad:
                work.append(comp - bad)
    return out


def _path_fragment(graph: nx.DiGraph, nodes: List[State]) -> ExecutionFragment:
    actions = tuple(graph[a][b]["action"] for a, b in zip(nodes, nodes[1:]))
    return ExecutionFragment(tuple(nodes), actions)


def _cycle_through(sub: nx.DiGraph, anchor: State, greens: List[State]) -> ExecutionFragment:
    nodes = [anchor]
    for g in greens:
        nodes += nx.shortest_path(sub, nodes[-1], g)[1:]
    if nodes[-1] == anchor and len(nodes) > 1:
        return _path_fragment(sub, nodes)
    if len(nodes) == 1:
        succ = sorted_states(sub.successors(anchor))
        if anchor in succ:
            return _path_fragment(sub, [anchor, anchor])
        nodes.append(succ[0])
    nodes += nx.shortest_path(sub, nodes[-1], anchor)[1:]
    return _path_fragment(sub, nodes)


def _synthesize(
    full: nx.DiGraph, cyc: nx.DiGraph, roots: List[State], comp: FrozenSet[State], pairs: Sequence[ComplementedPair]
) -> Lasso:
    sub = cyc.subgraph(comp)
    anchor = sorted_states(comp)[0]
    _dist, path = nx.multi_source_dijkstra(full, set(roots), target=anchor)
    stem = _path_fragment(full, list(path))
    greens: List[State] = []
    for p in sorted(pairs, key=lambda x: x.id):
        if any(s in p.red for s in comp):
            greens.append(sorted_states(s for s in comp if s in p.green)[0])
    return Lasso(stem, _cycle_through(sub, anchor, greens))


def streett_emptiness(
    automaton: Automaton,
    condition: PairsLike,
    from_state: Optional[State] = None,
    cycle_steps: Optional[Iterable[Step]] = None,
    cycle_filter: Optional[Callable[[State], bool]] = None,
    bound: Optional[int] = None,
) -> EmptinessVerdict:
    """Existe-t-il un lasso vivace (depuis `from_state`, ou depuis un état initial)?

    `cycle_steps` restreint les pas autorisés dans le cycle, `cycle_filter` les états.
    Le préfixe utilise tous les pas accessibles.
    """
    if not automaton.is_explicit and bound is None:
        raise PreconditionError("streett_emptiness: automate explicite ou borne requise")
    roots = [from_state] if from_state is not None else list(automaton.start_states())
    steps = _StepGraph(automaton, roots, bound)
    pairs = instantiate_pairs(condition, steps.states)
    cyc = steps.restricted(cycle_steps, cycle_filter)
    comps = accepting_components(cyc, pairs)
    if not comps:
        return EmptinessVerdict(False, None, len(steps.states), steps.partial)
    witness = _synthesize(steps.graph, cyc, roots, comps[0], pairs)
    if not is_live(witness, pairs):
        raise InternalInvariantError("témoin de vacuité non vivace")
    return EmptinessVerdict(True, witness, len(steps.states), steps.partial)


# --- oracle d'énumération ---

def _primitive(states: Tuple[State, ...]) -> Tuple[State, ...]:
    n = len(states)
    for d in range(1, n + 1):
        if n % d == 0 and states[:d] * (n // d) == states:
            return states[:d]
    return states


def lasso_key(lasso: Lasso) -> Tuple:
    """(multiensemble des états du cycle primitif, trace canonique)."""
    root = _primitive(tuple(lasso.cycle.states[:-1]))
    multiset = tuple(sorted(((sort_key(s), c) for s, c in Counter(root).items())))
    return multiset, sort_key(trace_of(lasso))


def enumerate_live_lassos(
    automaton: Automaton,
    condition: PairsLike,
    stem_bound: int,
    cycle_bound: int,
    limit: Optional[int] = None,
) -> List[Lasso]:
    """Énumération exhaustive bornée des lassos vivaces, dédupliqués par `lasso_key`."""
    reach = reachable_states(automaton)
    pairs = instantiate_pairs(condition, reach.states)
    graph = nx.DiGraph()
    graph.add_nodes_from(reach.states)
    for s in reach.states:
        for _a, t in automaton.transitions(s):
            graph.add_edge(s, t)
    dist = dict(nx.all_pairs_shortest_path_length(graph))
    out: List[Lasso] = []
    seen: Set[Tuple] = set()
    if cycle_bound < 1:
        return out

    def cycles(stem: ExecutionFragment) -> bool:
        anchor = stem.lstate
        stack: List[Tuple[List[State], List[ActionLabel]]] = [([anchor], [])]
        while stack:
            states, actions = stack.pop()
            cur = states[-1]
            for action, t in reversed(list(automaton.transitions(cur))):
                remaining = cycle_bound - len(actions) - 1
                if t == anchor:
                    lasso = Lasso(stem, ExecutionFragment(tuple(states + [t]), tuple(actions + [action])))
                    key = lasso_key(lasso)
                    if key not in seen and is_live(lasso, pairs):
                        seen.add(key)
                        out.append(lasso)
                        if limit is not None and len(out) >= limit:
                            return True
                if remaining >= 1 and dist.get(t, {}).get(anchor, cycle_bound + 1) <= remaining:
                    stack.append((states + [t], actions + [action]))
        return False

    stems: List[Tuple[List[State], List[ActionLabel]]] = [([s], []) for s in reversed(automaton.start_states())]
    while stems:
        states, actions = stems.pop()
        stem = ExecutionFragment(tuple(states), tuple(actions))
        if cycles(stem):
            break
        if len(actions) < stem_bound:
            for action, t in reversed(list(automaton.transitions(states[-1]))):
                stems.append((states + [t], actions + [action]))
    logger.debug("enumerate_live_lassos: %d lassos (bornes %d/%d)", len(out), stem_bound, cycle_bound)
    return out


# --- fermeture machine et fermeture sémantique ---

@dataclass
class MachineClosureVerdict:
    holds: bool
    offending: Optional[State] = None
    checked: int = 0

    def to_json(self) -> Dict[str, Any]:
        return {"holds": self.holds, "offending": None if self.offending is None else str(self.offending), "checked": self.checked}


def machine_closure_check(automaton: Automaton, condition: PairsLike) -> MachineClosureVerdict:
    """Tout état accessible peut-il être prolongé en un lasso vivace?"""
    steps = _StepGraph(automaton, list(automaton.start_states()), None)
    pairs = instantiate_pairs(condition, steps.states)
    good: Set[State] = set()
    for comp in accepting_components(steps.graph, pairs):
        good |= comp
    extendable = set(good)
    for g in good:
        extendable |= nx.ancestors(steps.graph, g)
    for s in sorted_states(steps.states):
        if s not in extendable:
            logger.info("fermeture machine: état %s sans extension vivace", s)
            return MachineClosureVerdict(False, s, len(steps.states))
    return MachineClosureVerdict(True, None, len(steps.states))


@dataclass
class ClosureVerdict:
    member: bool
    pair_id: str
    witness: Optional[Lasso] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "pair": self.pair_id,
            "member": self.member,
            "witness": self.witness.to_json() if self.witness else None,
        }


def closure_member(
    automaton: Automaton, condition: PairsLike, pair: ComplementedPair, bound: Optional[int] = None
) -> ClosureVerdict:
    """p ∈ L̂ ssi aucun lasso vivace de (A,L) n'a un cycle qui touche p.R en évitant p.G."""
    pairs = instantiate_pairs(condition, reachable_states(automaton, bound=bound).states)
    hit = ComplementedPair(f"hit:{pair.id}", StatePredicate.everything(), pair.red)
    verdict = streett_emptiness(
        automaton,
        pairs + [hit],
        cycle_filter=lambda s: s not in pair.green,
        bound=bound,
    )
    return ClosureVerdict(not verdict.nonempty, pair.id, verdict.witness)


class PairClass(str, Enum):
    IN_L = "in-L"
    DERIVED = "derived"
    NOT_IN_CLOSURE = "not-in-closure"


def derived_pair_check(automaton: Automaton, condition: PairsLike, pair: ComplementedPair) -> PairClass:
    reach = reachable_states(automaton)
    pairs = instantiate_pairs(condition, reach.states)
    if any(same_pair_on(pair, q, reach.states) for q in pairs):
        return PairClass.IN_L
    if closure_member(automaton, pairs, pair).member:
        return PairClass.DERIVED
    return PairClass.NOT_IN_CLOSURE
