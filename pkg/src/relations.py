############################################################
# CHANGELOG:
# - [2026-10-04] agt106 {author=agent} {reason: relations d'états, carte de paires h, candidats et rapports}
# - Impact: objets consommés par tous les vérificateurs de simulation (simples et vivaces)
# - Tests: tests/test_relations.py (images, inverse, recherche de fragments bornée)
# - Notes: la recherche de fragments est un BFS sur (état, lettres consommées, masque des verts visités)
############################################################
"""
Relations d'états, carte de paires, candidats de simulation et rapports de vérification.

`find_fragment` cherche le plus court fragment de B partant de `source`, de trace donnée,
finissant dans un état accepté, qui évite des états interdits et visite des ensembles
obligatoires (conditions RED/GREEN d'une seule et même exécution).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import (
    ActionLabel,
    Automaton,
    BoundExceeded,
    ExecutionFragment,
    Lasso,
    PreconditionError,
    State,
    StatePredicate,
    Step,
    sort_key,
    sorted_states,
)
from src.config import get_settings
from src.liveness import ComplementedPair


class StateRelation:
    """Relation g ⊆ states(A) × states(B): lignes explicites, fonction image ou prédicat sur un univers."""

    def __init__(
        self,
        rows: Optional[Iterable[Tuple[State, State]]] = None,
        image_fn: Optional[Callable[[State], Iterable[State]]] = None,
        predicate: Optional[Callable[[State, State], bool]] = None,
        universe: Optional[Iterable[State]] = None,
        name: str = "g",
    ) -> None:
        if sum(x is not None for x in (rows, image_fn, predicate)) != 1:
            raise PreconditionError("StateRelation: exactement une forme (rows, image_fn, predicate)")
        self.name = name
        self.rows: Optional[FrozenSet[Tuple[State, State]]] = frozenset(rows) if rows is not None else None
        self._image_fn = image_fn
        self._predicate = predicate
        self._universe = frozenset(universe) if universe is not None else None
        self._index: Dict[State, FrozenSet[State]] = {}
        if self.rows is not None:
            tmp: Dict[State, set] = {}
            for s, u in self.rows:
                tmp.setdefault(s, set()).add(u)
            self._index = {s: frozenset(us) for s, us in tmp.items()}

    @property
    def is_explicit(self) -> bool:
        return self.rows is not None

    def image(self, s: State) -> FrozenSet[State]:
        if self.rows is not None:
            return self._index.get(s, frozenset())
        if self._image_fn is not None:
            cap = get_settings().image_cap
            out = frozenset(itertools.islice(self._image_fn(s), cap + 1))
            if len(out) > cap:
                raise BoundExceeded(f"{self.name}[{s}] dépasse {cap} éléments")
            return out
        if self._universe is None:
            raise PreconditionError(f"{self.name}: univers abstrait requis pour une relation prédicat")
        assert self._predicate is not None
        return frozenset(u for u in self._universe if self._predicate(s, u))

    def __getitem__(self, s: State) -> FrozenSet[State]:
        return self.image(s)

    def related(self, s: State, u: State) -> bool:
        if self.rows is not None:
            return (s, u) in self.rows
        if self._predicate is not None:
            return bool(self._predicate(s, u))
        return u in self.image(s)

    def image_is_finite(self, s: State, cap: Optional[int] = None) -> bool:
        """Vrai si g[s] compte au plus `cap` éléments (les formes explicites sont finies)."""
        if self.rows is not None:
            return True
        cap = cap if cap is not None else get_settings().image_cap
        if self._image_fn is not None:
            return sum(1 for _ in itertools.islice(self._image_fn(s), cap + 1)) <= cap
        return self._universe is not None

    def materialize(self, domain: Iterable[State], universe: Optional[Iterable[State]] = None) -> "StateRelation":
        rows = []
        if self._predicate is not None and universe is not None:
            uni = list(universe)
            rows = [(s, u) for s in domain for u in uni if self._predicate(s, u)]
        else:
            rows = [(s, u) for s in domain for u in self.image(s)]
        return StateRelation(rows=rows, name=self.name)

    def inverse(self, domain: Iterable[State], universe: Optional[Iterable[State]] = None) -> "StateRelation":
        mat = self if self.rows is not None else self.materialize(domain, universe)
        assert mat.rows is not None
        return StateRelation(rows=[(u, s) for s, u in mat.rows], name=f"{self.name}^-1")

    def first_non_functional(self, domain: Iterable[State]) -> Optional[State]:
        for s in sorted_states(domain):
            if len(self.image(s)) != 1:
                return s
        return None

    def function_value(self, s: State) -> State:
        img = self.image(s)
        if len(img) != 1:
            raise PreconditionError(f"{self.name} n'est pas une fonction en {s}")
        return next(iter(img))

    @classmethod
    def identity(cls, name: str = "id") -> "StateRelation":
        return cls(image_fn=lambda s: (s,), name=name)

    @classmethod
    def from_function(cls, fn: Callable[[State], State], name: str = "r") -> "StateRelation":
        return cls(image_fn=lambda s: (fn(s),), name=name)


class PairTag(str, Enum):
    IN_L = "in-L"
    CLAIMED_DERIVED = "claimed-derived"


@dataclass(frozen=True)
class PairTarget:
    pair: ComplementedPair
    tag: PairTag = PairTag.IN_L


class PairMap:
    """h: M → L̂, explicite (par id de paire) ou fonctionnelle (familles indexées)."""

    def __init__(
        self,
        entries: Optional[Dict[str, PairTarget]] = None,
        fn: Optional[Callable[[ComplementedPair], Optional[PairTarget]]] = None,
    ) -> None:
        self.entries = dict(entries or {})
        self._fn = fn

    def target(self, q: ComplementedPair) -> Optional[PairTarget]:
        if q.id in self.entries:
            return self.entries[q.id]
        if self._fn is not None:
            return self._fn(q)
        return None

    def missing(self, pairs: Iterable[ComplementedPair]) -> List[str]:
        return [q.id for q in pairs if self.target(q) is None]

    def with_target(self, q_id: str, target: PairTarget) -> "PairMap":
        entries = dict(self.entries)
        entries[q_id] = target
        return PairMap(entries, self._fn)

    @classmethod
    def empty(cls) -> "PairMap":
        return cls({})


@dataclass
class SimulationCandidate:
    g: StateRelation
    h: PairMap = field(default_factory=PairMap.empty)
    inv_a: StatePredicate = field(default_factory=StatePredicate.everything)
    inv_b: StatePredicate = field(default_factory=StatePredicate.everything)
    bound: Optional[int] = None
    certificates: Dict[str, str] = field(default_factory=dict)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    CONDITIONAL = "conditional"
    UNKNOWN = "unknown"


EXIT_CODES = {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.CONDITIONAL: 2, Verdict.UNKNOWN: 3}
_SEVERITY = {Verdict.PASS: 0, Verdict.CONDITIONAL: 1, Verdict.UNKNOWN: 2, Verdict.FAIL: 3}


@dataclass
class Counterexample:
    clause: str
    step: Optional[Step] = None
    abstract_state: Optional[State] = None
    pair_id: Optional[str] = None
    detail: str = ""
    witness: Optional[Lasso] = None

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"clause": self.clause, "detail": self.detail}
        if self.step is not None:
            s, a, t = self.step
            out["step"] = [str(s), str(a), str(t)]
        if self.abstract_state is not None:
            out["abstract_state"] = str(self.abstract_state)
        if self.pair_id is not None:
            out["pair"] = self.pair_id
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


@dataclass
class CheckReport:
    relation: str
    verdict: Verdict = Verdict.PASS
    clauses: Dict[str, str] = field(default_factory=dict)
    counterexample: Optional[Counterexample] = None
    obligations: List[str] = field(default_factory=list)
    bounded: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def ok(self, clause: str, label: str = "pass") -> None:
        self.clauses.setdefault(clause, label)

    def fail(self, cx: Counterexample) -> None:
        self.clauses[cx.clause] = "fail"
        if self.counterexample is None:
            self.counterexample = cx
        self.verdict = Verdict.FAIL

    def failed_clauses(self) -> List[str]:
        return [c for c, v in self.clauses.items() if v == "fail"]

    def degrade(self, verdict: Verdict) -> None:
        if _SEVERITY[verdict] > _SEVERITY[self.verdict]:
            self.verdict = verdict

    def merge(self, other: "CheckReport") -> "CheckReport":
        for c, v in other.clauses.items():
            if v == "fail" or c not in self.clauses:
                self.clauses[c] = v
        if self.counterexample is None:
            self.counterexample = other.counterexample
        self.obligations.extend(other.obligations)
        self.notes.extend(other.notes)
        self.bounded = self.bounded or other.bounded
        self.degrade(other.verdict)
        return self

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self) -> Dict[str, Any]:
        return {
            "relation": self.relation,
            "verdict": self.verdict.value,
            "clauses": dict(sorted(self.clauses.items())),
            "counterexample": self.counterexample.to_json() if self.counterexample else None,
            "obligations": self.obligations,
            "bounded": self.bounded,
            "notes": self.notes,
        }


def same_action(a: ActionLabel, b: ActionLabel) -> bool:
    return a.name == b.name and a.payload == b.payload


def find_fragment(
    automaton: Automaton,
    source: State,
    word: Sequence[ActionLabel],
    accept_end: Callable[[State], bool],
    bound: int,
    avoid: Sequence[StatePredicate] = (),
    must: Sequence[StatePredicate] = (),
    nonempty: bool = False,
    inv: Optional[StatePredicate] = None,
) -> Optional[ExecutionFragment]:
    """Plus court fragment source ⇒ état accepté, de trace `word`, sous contraintes RED/GREEN."""

    def blocked(state: State) -> bool:
        return any(state in x for x in avoid) or (inv is not None and state not in inv)

    def mask_of(state: State, mask: int) -> int:
        for k, pred in enumerate(must):
            if state in pred:
                mask |= 1 << k
        return mask

    if blocked(source):
        return None
    full = (1 << len(must)) - 1
    start = (source, 0, mask_of(source, 0), False)
    parent: Dict[Tuple, Tuple[Optional[Tuple], Optional[ActionLabel]]] = {start: (None, None)}
    frontier: deque = deque([(start, 0)])
    while frontier:
        node, depth = frontier.popleft()
        state, consumed, mask, moved = node
        if consumed == len(word) and mask == full and (moved or not nonempty) and accept_end(state):
            return _rebuild(parent, node)
        if depth >= bound:
            continue
        for action, target in automaton.transitions(state):
            if action.is_internal:
                nxt_consumed = consumed
            elif consumed < len(word) and same_action(action, word[consumed]):
                nxt_consumed = consumed + 1
            else:
                continue
            if blocked(target):
                continue
            nxt = (target, nxt_consumed, mask_of(target, mask), True)
            if nxt in parent:
                continue
            parent[nxt] = (node, action)
            frontier.append((nxt, depth + 1))
    return None


def _rebuild(parent: Dict[Tuple, Tuple[Optional[Tuple], Optional[ActionLabel]]], node: Tuple) -> ExecutionFragment:
    states: List[State] = []
    actions: List[ActionLabel] = []
    cur: Optional[Tuple] = node
    while cur is not None:
        prev, action = parent[cur]
        states.append(cur[0])
        if action is not None:
            actions.append(action)
        cur = prev
    states.reverse()
    actions.reverse()
    return ExecutionFragment(tuple(states), tuple(actions))


def step_word(action: ActionLabel) -> Tuple[ActionLabel, ...]:
    """trace(a): λ pour une action interne, ⟨a⟩ sinon."""
    return () if action.is_internal else (action,)


def iter_steps_sorted(steps: Iterable[Step]) -> Iterator[Step]:
    return iter(sorted(steps, key=sort_key))


def default_bound(b_states: int, m_pairs: int) -> int:
    """k = |states(B)| · (|M instancié| + 1)."""
    bound = max(1, b_states) * (m_pairs + 1)
    logger.debug("borne de fragments par défaut: %d", bound)
    return bound
