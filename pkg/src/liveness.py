############################################################
# CHANGELOG:
# - [2026-10-04] agt105 {author=agent} {reason: paires complémentées et conditions de vivacité}
# - Impact: satisfies_pair / is_live sur lassos, familles indexées instanciées paresseusement
# - Tests: tests/test_liveness.py (T1, CY3, DBS/DBI, encodages Büchi et tolérance aux fautes)
# - Notes: α ⊨ ⟨R,G⟩ ssi le cycle ne contient pas de rouge ou contient un vert
############################################################
"""
Paires complémentées ⟨Red, Green⟩ et conditions de vivacité.

Une condition est un ensemble fini de paires explicites, éventuellement complété par
des familles indexées (une paire par opération x, par exemple). Les familles sont
instanciées sur les valeurs d'index présentes dans les états analysés.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from src.automata import Automaton, ExplicitAutomaton, Lasso, ModelError, State, StatePredicate, reachable_states


@dataclass(frozen=True)
class ComplementedPair:
    id: str
    red: StatePredicate
    green: StatePredicate

    @property
    def R(self) -> StatePredicate:
        return self.red

    @property
    def G(self) -> StatePredicate:
        return self.green

    def with_green(self, green: StatePredicate, pair_id: Optional[str] = None) -> "ComplementedPair":
        return ComplementedPair(pair_id or self.id, self.red, green)

    def to_json(self) -> Dict[str, str]:
        return {"id": self.id, "red": self.red.name, "green": self.green.name}


@dataclass(frozen=True)
class PairFamily:
    """Famille indexée: `indices(states)` extrait le domaine d'index, `make(i)` construit la paire."""

    name: str
    make: Callable[[Hashable], ComplementedPair]
    indices: Optional[Callable[[Iterable[State]], Iterable[Hashable]]] = None

    def instantiate(self, states: Iterable[State]) -> List[ComplementedPair]:
        if self.indices is None:
            raise ModelError(f"famille {self.name}: domaine d'index non instanciable")
        return [self.make(i) for i in sorted(set(self.indices(states)), key=str)]


@dataclass(frozen=True)
class LivenessCondition:
    pairs: Tuple[ComplementedPair, ...] = ()
    families: Tuple[PairFamily, ...] = ()

    @classmethod
    def of(cls, pairs: Iterable[ComplementedPair]) -> "LivenessCondition":
        return cls(tuple(pairs), ())

    def instantiate(self, states: Iterable[State] = ()) -> List[ComplementedPair]:
        states = list(states)
        out = list(self.pairs)
        for fam in self.families:
            out.extend(fam.instantiate(states))
        return out

    def by_id(self) -> Dict[str, ComplementedPair]:
        return {p.id: p for p in self.pairs}

    def __len__(self) -> int:
        return len(self.pairs)

    def is_empty(self) -> bool:
        return not self.pairs and not self.families

    def plus(self, *extra: ComplementedPair) -> "LivenessCondition":
        return LivenessCondition(self.pairs + tuple(extra), self.families)


def satisfies_pair(lasso: Lasso, pair: ComplementedPair) -> bool:
    cycle = lasso.cycle.states
    if not any(s in pair.red for s in cycle):
        return True
    return any(s in pair.green for s in cycle)


def is_live(lasso: Lasso, condition: LivenessCondition | Sequence[ComplementedPair]) -> bool:
    if isinstance(condition, LivenessCondition):
        pairs = condition.instantiate(lasso.states())
    else:
        pairs = list(condition)
    return all(satisfies_pair(lasso, p) for p in pairs)


@dataclass
class LiveAutomaton:
    """(A, L): la fermeture machine est vérifiée sur la forme explicite, « asserted » sinon."""

    automaton: Automaton
    condition: LivenessCondition
    machine_closure: str = field(default="unchecked")

    def check(self) -> str:
        if not isinstance(self.automaton, ExplicitAutomaton):
            self.machine_closure = "asserted"
            return self.machine_closure
        from src.streett import machine_closure_check

        verdict = machine_closure_check(self.automaton, self.condition)
        self.machine_closure = "holds" if verdict.holds else f"fails at {verdict.offending}"
        return self.machine_closure

    def pairs(self) -> List[ComplementedPair]:
        if isinstance(self.automaton, ExplicitAutomaton):
            return self.condition.instantiate(reachable_states(self.automaton).states)
        return list(self.condition.pairs)


# --- encodages ---

def buchi_to_pairs(green: Iterable[State] | StatePredicate, pair_id: str = "buchi") -> LivenessCondition:
    g = green if isinstance(green, StatePredicate) else StatePredicate.of(green)
    return LivenessCondition.of([ComplementedPair(pair_id, StatePredicate.everything(), g)])


def gen_buchi_to_pairs(greens: Sequence[Iterable[State] | StatePredicate]) -> LivenessCondition:
    pairs = []
    for i, g in enumerate(greens):
        pred = g if isinstance(g, StatePredicate) else StatePredicate.of(g)
        pairs.append(ComplementedPair(f"buchi{i}", StatePredicate.everything(), pred))
    return LivenessCondition.of(pairs)


def fault_tolerance_pair(good: StatePredicate, fault: StatePredicate, pair_id: str = "fault-tolerance") -> ComplementedPair:
    """⟨true, fault ∪ good⟩: une infinité de fautes dispense de toute obligation de reprise."""
    green = StatePredicate.where(f"{fault.name}|{good.name}", lambda s: s in fault or s in good)
    return ComplementedPair(pair_id, StatePredicate.everything(), green)


def same_pair_on(p: ComplementedPair, q: ComplementedPair, universe: Iterable[State]) -> bool:
    """Égalité extensionnelle de deux paires sur un univers fini."""
    return all((s in p.red) == (s in q.red) and (s in p.green) == (s in q.green) for s in universe)
