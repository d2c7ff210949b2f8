############################################################
# CHANGELOG:
# - [2026-10-05] agt108 {author=agent} {reason: transformations d'automates par variables d'historique}
# - Impact: leads-to, drapeau nonalwayssilent, forêt bornée et masquage d'actions
# - Tests: tests/test_transforms.py (T1, CY3, projection sur la première composante)
# - Notes: le drapeau leads-to est évalué sur l'état d'arrivée et aussi sur l'état initial
############################################################
"""
Transformations d'automates.

Toutes ajoutent une composante d'historique aux états sans changer le comportement
externe: la projection des pas sur la première composante redonne les pas de A.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, FrozenSet, Iterable, Iterator, Set, Tuple

from logger_config import logger
from src.automata import (
    ActionKind,
    ActionLabel,
    Automaton,
    ExplicitAutomaton,
    ModelError,
    ProgrammaticAutomaton,
    State,
    StatePredicate,
    Step,
    sorted_states,
)
from src.liveness import ComplementedPair

RESET = ActionLabel("reset", ActionKind.INTERNAL)


def _explore(
    roots: Iterable[State],
    expand: Callable[[State], Iterable[Tuple[ActionLabel, State]]],
) -> Tuple[Set[State], Set[Step]]:
    seen: Set[State] = set(roots)
    frontier = deque(sorted_states(seen))
    steps: Set[Step] = set()
    while frontier:
        state = frontier.popleft()
        for action, target in expand(state):
            steps.add((state, action, target))
            if target not in seen:
                seen.add(target)
                frontier.append(target)
    return seen, steps


def _signature(automaton: Automaton) -> Tuple[FrozenSet[ActionLabel], FrozenSet[ActionLabel]]:
    if isinstance(automaton, ExplicitAutomaton):
        return automaton.external, automaton.internal
    raise ModelError("transformation réservée aux automates explicites")


def leads_to_transform(
    automaton: ExplicitAutomaton, p: StatePredicate, q: StatePredicate, pair_id: str = "leads-to"
) -> Tuple[ExplicitAutomaton, ComplementedPair]:
    """A′ sur (s, flag): flag levé en entrant dans p∧¬q, baissé en entrant dans q."""
    external, internal = _signature(automaton)

    def update(flag: bool, target: State) -> bool:
        if target in q:
            return False
        if target in p:
            return True
        return flag

    roots = [(s, update(False, s)) for s in automaton.start_states()]

    def expand(node: State) -> Iterator[Tuple[ActionLabel, State]]:
        s, flag = node
        for action, t in automaton.transitions(s):
            yield action, (t, update(flag, t))

    states, steps = _explore(roots, expand)
    derived = ExplicitAutomaton(
        states=frozenset(states),
        start=frozenset(roots),
        external=external,
        internal=internal,
        steps=frozenset(steps),
        name=f"{automaton.name}+leadsto",
    )
    pair = ComplementedPair(
        pair_id,
        StatePredicate.where("flag", lambda node: bool(node[1])),
        StatePredicate.where(q.name, lambda node: node[0] in q),
    )
    logger.debug("leads_to_transform: %d états", len(states))
    return derived, pair


def augment_nonalwayssilent(
    automaton: ExplicitAutomaton, silent: Iterable[Step], pair_id: str = "nonalwayssilent"
) -> Tuple[ExplicitAutomaton, ComplementedPair]:
    """Pas non silencieux: flag levé; pas silencieux et `reset`: flag baissé."""
    external, internal = _signature(automaton)
    silent_set = frozenset(silent)
    unknown = silent_set - automaton.steps
    if unknown:
        raise ModelError(f"pas silencieux hors de steps(A): {sorted(map(str, unknown))[:3]}")
    roots = [(s, False) for s in automaton.start_states()]

    def expand(node: State) -> Iterator[Tuple[ActionLabel, State]]:
        s, flag = node
        if flag:
            yield RESET, (s, False)
        for action, t in automaton.transitions(s):
            yield action, (t, (s, action, t) not in silent_set)

    states, steps = _explore(roots, expand)
    derived = ExplicitAutomaton(
        states=frozenset(states),
        start=frozenset(roots),
        external=external,
        internal=internal | {RESET},
        steps=frozenset(steps),
        name=f"{automaton.name}+nas",
    )
    pair = ComplementedPair(
        pair_id, StatePredicate.everything(), StatePredicate.where("nonalwayssilent", lambda node: bool(node[1]))
    )
    return derived, pair


def project_step(step: Step) -> Step | None:
    """Projection d'un pas de A′ sur A (None pour `reset`)."""
    (s, _f), action, (t, _g) = step
    if action == RESET:
        return None
    return s, action, t


def forestify(automaton: Automaton, depth: int) -> ExplicitAutomaton:
    """Forêt bornée: chaque état est l'exécution (s0, a1, s1, ...) qui y mène, |α| <= depth."""
    if depth < 1:
        raise ModelError("forestify: depth >= 1 requis")
    roots = [(s,) for s in automaton.start_states()]

    def expand(history: State) -> Iterator[Tuple[ActionLabel, State]]:
        if (len(history) - 1) // 2 >= depth:
            return
        for action, t in automaton.transitions(history[-1]):
            yield action, history + (action, t)

    states, steps = _explore(roots, expand)
    if isinstance(automaton, ExplicitAutomaton):
        external, internal = automaton.external, automaton.internal
    else:
        acts = {a for _s, a, _t in steps}
        external = frozenset(a for a in acts if not a.is_internal)
        internal = frozenset(a for a in acts if a.is_internal)
    return ExplicitAutomaton(
        states=frozenset(states),
        start=frozenset(roots),
        external=external,
        internal=internal,
        steps=frozenset(steps),
        name=f"forest({getattr(automaton, 'name', 'A')},{depth})",
    )


class HiddenAutomaton(ProgrammaticAutomaton):
    """Vue d'un automate programmatique dont certaines actions externes deviennent internes."""

    def __init__(self, inner: ProgrammaticAutomaton, names: FrozenSet[str]) -> None:
        self.inner = inner
        self.hidden = names
        self.name = f"{getattr(inner, 'name', 'A')}\\hidden"

    def _relabel(self, action: ActionLabel) -> ActionLabel:
        return action.with_kind(ActionKind.INTERNAL) if action.name in self.hidden else action

    def _original(self, action: ActionLabel) -> ActionLabel:
        return action.with_kind(ActionKind.EXTERNAL) if action.name in self.hidden else action

    def initial_states(self) -> Iterable[State]:
        return self.inner.initial_states()

    def candidate_actions(self, state: State) -> Iterable[ActionLabel]:
        return [self._relabel(a) for a in self.inner.candidate_actions(state)]

    def precondition(self, state: State, action: ActionLabel) -> bool:
        return self.inner.precondition(state, self._original(action))

    def effects(self, state: State, action: ActionLabel) -> Iterable[State]:
        return self.inner.effects(state, self._original(action))

    def external_names(self) -> FrozenSet[str]:
        return self.inner.external_names() - self.hidden

    def __getattr__(self, item: str):
        return getattr(self.inner, item)


def hide_actions(automaton: Automaton, names: Iterable[str]) -> Automaton:
    """Reclasse des actions externes (par nom) en actions internes."""
    names = frozenset(names)
    unknown = names - automaton.external_names()
    if unknown:
        raise ModelError(f"masquage d'actions inconnues: {sorted(unknown)}")
    if not names:
        return automaton
    if isinstance(automaton, ExplicitAutomaton):
        relabel = lambda a: a.with_kind(ActionKind.INTERNAL) if a.name in names else a  # noqa: E731
        return ExplicitAutomaton(
            states=automaton.states,
            start=automaton.start,
            external=frozenset(a for a in automaton.external if a.name not in names),
            internal=automaton.internal | frozenset(relabel(a) for a in automaton.external if a.name in names),
            steps=frozenset((s, relabel(a), t) for s, a, t in automaton.steps),
            name=automaton.name,
        )
    if isinstance(automaton, ProgrammaticAutomaton):
        return HiddenAutomaton(automaton, names)
    raise ModelError(f"type d'automate inconnu: {type(automaton).__name__}")
