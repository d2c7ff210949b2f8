############################################################
# CHANGELOG:
# - [2026-10-06] agt111 {author=agent} {reason: inclusion de traces sûre (sous-ensembles) et vivace (produit + Streett)}
# - Impact: oracle de vérité pour les vérificateurs de simulation (simples et vivaces)
# - Tests: tests/test_inclusion.py (contre-exemple DBI/DBS request(q)ω, réflexivité, signatures disjointes)
# - Notes: l'inclusion vivace est bornée par l'énumération des lassos de A; « unknown » si l'énumération est vide à tort
# - [2026-10-17] agt129 {author=agent} {reason: to_json levait ValueError sur un contre-exemple ultimement périodique}
# - Impact: InclusionVerdict.to_json teste la trace par `is not None`
# - Tests: tests/test_inclusion.py::test_db_live_counterexample
############################################################
"""
Préordres sûr et vivace.

- `safe_trace_inclusion`: traces finies de A ⊆ traces finies de B, par construction des
  sous-ensembles sur B (fermeture interne).
- `live_trace_inclusion`: pour chaque lasso vivace de (A, L) dans les bornes, B doit avoir un
  lasso vivace pour M de même trace canonique; recherche exacte dans le produit de B avec les
  positions du mot.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Set, Tuple

from logger_config import logger
from src.automata import (
    ActionLabel,
    Automaton,
    ExecutionFragment,
    ExplicitAutomaton,
    Lasso,
    PreconditionError,
    State,
    StatePredicate,
    reachable_states,
    shared_externals,
)
from src.config import get_settings
from src.liveness import ComplementedPair
from src.relations import same_action
from src.streett import PairsLike, enumerate_live_lassos, instantiate_pairs, streett_emptiness
from src.traces import Trace, trace_of


class InclusionOutcome(str, Enum):
    HOLDS = "holds-within-bounds"
    COUNTEREXAMPLE = "counterexample"
    UNKNOWN = "unknown"


@dataclass
class InclusionVerdict:
    outcome: InclusionOutcome
    counterexample: Optional[Lasso] = None
    fragment: Optional[ExecutionFragment] = None
    trace: Optional[Trace] = None
    bounds: Dict[str, int] = field(default_factory=dict)
    checked: int = 0

    @property
    def holds(self) -> bool:
        return self.outcome == InclusionOutcome.HOLDS

    def to_json(self) -> Dict[str, Any]:
        return {
            "outcome": self.outcome.value,
            "counterexample": self.counterexample.to_json() if self.counterexample else None,
            "fragment": self.fragment.to_json() if self.fragment else None,
            "trace": self.trace.to_json() if self.trace is not None else None,
            "bounds": self.bounds,
            "checked": self.checked,
        }


def _require_explicit(*automata: Automaton) -> None:
    for a in automata:
        if not isinstance(a, ExplicitAutomaton):
            raise PreconditionError("inclusion de traces: automates explicites requis")


# --- préordre sûr ---

def _internal_closure(b: Automaton, states: FrozenSet[State]) -> FrozenSet[State]:
    seen = set(states)
    stack = list(states)
    while stack:
        u = stack.pop()
        for action, t in b.transitions(u):
            if action.is_internal and t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def _post(b: Automaton, states: FrozenSet[State], letter: ActionLabel) -> FrozenSet[State]:
    nxt = {t for u in states for action, t in b.transitions(u) if not action.is_internal and same_action(action, letter)}
    return _internal_closure(b, frozenset(nxt))


def safe_trace_inclusion(a: Automaton, b: Automaton, bound: Optional[int] = None) -> InclusionVerdict:
    """traces(A) ⊆ traces(B) sur les traces finies; `bound` limite les couples (état de A, sous-ensemble de B)."""
    _require_explicit(a, b)
    shared_externals(a, b)
    bound = bound or get_settings().default_bound * 1000
    start_b = _internal_closure(b, frozenset(b.start_states()))
    roots = [(s, start_b) for s in a.start_states()]
    parent: Dict[Tuple, Tuple[Optional[Tuple], Optional[ActionLabel]]] = {r: (None, None) for r in roots}
    frontier = deque(roots)
    while frontier:
        if len(parent) > bound:
            logger.warning("safe_trace_inclusion: borne %d atteinte", bound)
            return InclusionVerdict(InclusionOutcome.UNKNOWN, bounds={"pairs": bound}, checked=len(parent))
        node = frontier.popleft()
        s, subset = node
        for action, t in a.transitions(s):
            nxt_subset = subset if action.is_internal else _post(b, subset, action)
            nxt = (t, nxt_subset)
            if nxt in parent:
                continue
            parent[nxt] = (node, action)
            if not nxt_subset:
                frag = _rebuild_a(parent, nxt)
                logger.info("safe_trace_inclusion: trace finie sans correspondant dans B")
                return InclusionVerdict(
                    InclusionOutcome.COUNTEREXAMPLE,
                    fragment=frag,
                    trace=trace_of(frag),
                    bounds={"pairs": bound},
                    checked=len(parent),
                )
            frontier.append(nxt)
    return InclusionVerdict(InclusionOutcome.HOLDS, bounds={"pairs": bound}, checked=len(parent))


def _rebuild_a(parent: Dict[Tuple, Tuple[Optional[Tuple], Optional[ActionLabel]]], node: Tuple) -> ExecutionFragment:
    states: List[State] = []
    actions: List[ActionLabel] = []
    cur: Optional[Tuple] = node
    while cur is not None:
        prev, action = parent[cur]
        states.append(cur[0])
        if action is not None:
            actions.append(action)
        cur = prev
    return ExecutionFragment(tuple(reversed(states)), tuple(reversed(actions)))


# --- préordre vivace ---

def word_product(b: ExplicitAutomaton, trace: Trace) -> ExplicitAutomaton:
    """Produit de B avec les positions du mot: états (u, w, consumed)."""
    if trace.is_finite:
        length = len(trace.prefix)

        def nxt(w: int) -> int:
            return w + 1

        def letter(w: int) -> Optional[ActionLabel]:
            return trace.prefix[w] if w < length else None

    else:
        total = len(trace.prefix) + len(trace.period)

        def nxt(w: int) -> int:
            return w + 1 if w + 1 < total else len(trace.prefix)

        def letter(w: int) -> Optional[ActionLabel]:
            return trace.letter(w)

    roots = [(u, 0, False) for u in b.start_states()]
    seen: Set[Tuple] = set(roots)
    frontier = deque(roots)
    steps = set()
    while frontier:
        node = frontier.popleft()
        u, w, _consumed = node
        want = letter(w)
        for action, t in b.transitions(u):
            if action.is_internal:
                target = (t, w, False)
            elif want is not None and same_action(action, want):
                target = (t, nxt(w), True)
            else:
                continue
            steps.add((node, action, target))
            if target not in seen:
                seen.add(target)
                frontier.append(target)
    return ExplicitAutomaton(
        states=frozenset(seen),
        start=frozenset(roots),
        external=b.external,
        internal=b.internal,
        steps=frozenset(steps),
        name=f"{b.name}×word",
    )


def lift_pairs(pairs: List[ComplementedPair], trace: Trace) -> List[ComplementedPair]:
    lifted = [
        ComplementedPair(
            q.id,
            StatePredicate.where(q.red.name, lambda n, q=q: n[0] in q.red),
            StatePredicate.where(q.green.name, lambda n, q=q: n[0] in q.green),
        )
        for q in pairs
    ]
    if trace.is_finite:
        end = len(trace.prefix)
        acceptance = StatePredicate.where("word-consumed", lambda n: n[1] == end)
    else:
        acceptance = StatePredicate.where("letter-consumed", lambda n: bool(n[2]))
    lifted.append(ComplementedPair("word", StatePredicate.everything(), acceptance))
    return lifted


def matching_live_lasso(b: ExplicitAutomaton, abstract: PairsLike, trace: Trace) -> Optional[Lasso]:
    """Lasso vivace de (B, M) de trace `trace`, projeté sur les états de B."""
    product = word_product(b, trace)
    pairs = instantiate_pairs(abstract, reachable_states(b).states)
    verdict = streett_emptiness(product, lift_pairs(pairs, trace))
    if not verdict.nonempty or verdict.witness is None:
        return None
    w = verdict.witness
    stem = ExecutionFragment(tuple(n[0] for n in w.stem.states), w.stem.actions)
    cycle = ExecutionFragment(tuple(n[0] for n in w.cycle.states), w.cycle.actions)
    return Lasso(stem, cycle)


def live_trace_inclusion(
    a: ExplicitAutomaton,
    concrete: PairsLike,
    b: ExplicitAutomaton,
    abstract: PairsLike,
    stem_bound: Optional[int] = None,
    cycle_bound: Optional[int] = None,
    limit: Optional[int] = None,
) -> InclusionVerdict:
    """traces(lexecs(A,L)) ⊆ traces(lexecs(B,M)) pour les lassos vivaces de A dans les bornes."""
    _require_explicit(a, b)
    shared_externals(a, b)
    n = len(reachable_states(a))
    stem_bound = stem_bound if stem_bound is not None else n
    cycle_bound = cycle_bound if cycle_bound is not None else max(1, n) * 2
    bounds = {"stem": stem_bound, "cycle": cycle_bound}
    lassos = enumerate_live_lassos(a, concrete, stem_bound, cycle_bound, limit)
    if not lassos and streett_emptiness(a, concrete).nonempty:
        logger.warning("live_trace_inclusion: bornes trop petites, aucun lasso vivace énuméré")
        return InclusionVerdict(InclusionOutcome.UNKNOWN, bounds=bounds)
    checked: Dict[Trace, bool] = {}
    for lasso in lassos:
        trace = trace_of(lasso)
        if trace not in checked:
            checked[trace] = matching_live_lasso(b, abstract, trace) is not None
        if not checked[trace]:
            logger.info("live_trace_inclusion: trace %s sans lasso vivace dans %s", trace, b.name)
            return InclusionVerdict(
                InclusionOutcome.COUNTEREXAMPLE, counterexample=lasso, trace=trace, bounds=bounds, checked=len(checked)
            )
    return InclusionVerdict(InclusionOutcome.HOLDS, bounds=bounds, checked=len(checked))
