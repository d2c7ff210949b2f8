############################################################
# CHANGELOG:
# - [2026-10-03] agt103 {author=agent} {reason: modèle d'automate (forme explicite et programmatique)}
# - Impact: socle commun de tous les vérificateurs (fragments, lassos, validation, accessibilité)
# - Tests: tests/test_automata.py (T1, DBS, état inaccessible, validation structurelle)
# - Notes: les états sont des valeurs opaques hachables; sort_key fournit un ordre total déterministe
############################################################
"""
Automates à signature externe/interne, fragments d'exécution et lassos.

Deux formes d'automate partagent la même interface `Automaton`:
- `ExplicitAutomaton`: ensembles finis d'états et de pas (fichiers JSON du corpus);
- `ProgrammaticAutomaton`: producteurs d'états initiaux et de transitions activées
  (composants ESDS, style précondition/effet).

Un lasso (préfixe + cycle) représente une exécution infinie ultimement périodique.
"""

from __future__ import annotations

import dataclasses
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from logger_config import logger

State = Hashable


class LivrefineError(Exception):
    """Erreur de base du dépôt."""


class ModelError(LivrefineError):
    """Usage structurel invalide (état inconnu, type de composant inconnu, ...)."""


class PreconditionError(LivrefineError):
    """Précondition d'un vérificateur non satisfaite (signatures, invariant non inductif)."""


class BoundExceeded(LivrefineError):
    """Borne d'énumération dépassée (jamais de troncature silencieuse)."""


class SchemaError(LivrefineError):
    """Fichier d'entrée non conforme; `pointer` désigne le champ fautif (JSON pointer)."""

    def __init__(self, message: str, pointer: str = "") -> None:
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer or "/"


class InternalInvariantError(LivrefineError):
    """Incohérence interne: un résultat vérifié n'a pas pu être reconstruit."""


class ActionKind(str, Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"


def sort_key(value: Any) -> Tuple:
    """Clé de tri totale et stable entre processus (indépendante du hash des chaînes)."""
    if value is None:
        return ("0",)
    if isinstance(value, bool):
        return ("b", int(value))
    if isinstance(value, (int, float)):
        return ("i", value)
    if isinstance(value, str):
        return ("s", value)
    if isinstance(value, Enum):
        return ("e", str(value.value))
    if isinstance(value, (frozenset, set)):
        return ("f", tuple(sorted(sort_key(v) for v in value)))
    if isinstance(value, (tuple, list)):
        return ("t", tuple(sort_key(v) for v in value))
    if dataclasses.is_dataclass(value):
        return (
            "d",
            type(value).__name__,
            tuple(sort_key(getattr(value, f.name)) for f in dataclasses.fields(value) if f.compare),
        )
    return ("r", repr(value))


def sorted_states(states: Iterable[State]) -> List[State]:
    return sorted(states, key=sort_key)


@dataclass(frozen=True)
class ActionLabel:
    name: str
    kind: ActionKind = ActionKind.EXTERNAL
    payload: Tuple = ()

    @property
    def is_internal(self) -> bool:
        return self.kind == ActionKind.INTERNAL

    def __str__(self) -> str:
        if not self.payload:
            return self.name
        return f"{self.name}({','.join(str(p) for p in self.payload)})"

    def with_kind(self, kind: ActionKind) -> "ActionLabel":
        return ActionLabel(self.name, kind, self.payload)


def parse_action(text: str, kind: ActionKind = ActionKind.EXTERNAL) -> ActionLabel:
    """`request(q)` -> ActionLabel("request", kind, ("q",))."""
    text = text.strip()
    if text.endswith(")") and "(" in text:
        name, _, rest = text.partition("(")
        args = tuple(a.strip() for a in rest[:-1].split(",") if a.strip())
        return ActionLabel(name.strip(), kind, args)
    return ActionLabel(text, kind, ())


class StatePredicate:
    """Interface d'appartenance unique: ensemble explicite ou prédicat nommé."""

    def __init__(
        self,
        states: Optional[Iterable[State]] = None,
        fn: Optional[Callable[[State], bool]] = None,
        name: str = "",
    ) -> None:
        if (states is None) == (fn is None):
            raise ModelError("StatePredicate attend soit un ensemble, soit une fonction")
        self.states: Optional[FrozenSet[State]] = frozenset(states) if states is not None else None
        self._fn = fn
        self.name = name or ("{" + ",".join(str(s) for s in sorted_states(self.states or ())) + "}")

    def __contains__(self, state: State) -> bool:
        if self.states is not None:
            return state in self.states
        assert self._fn is not None
        return bool(self._fn(state))

    def __call__(self, state: State) -> bool:
        return state in self

    @property
    def is_explicit(self) -> bool:
        return self.states is not None

    def restrict(self, universe: Iterable[State]) -> FrozenSet[State]:
        return frozenset(s for s in universe if s in self)

    def __repr__(self) -> str:
        return f"StatePredicate({self.name})"

    @classmethod
    def everything(cls) -> "StatePredicate":
        return cls(fn=lambda _s: True, name="true")

    @classmethod
    def nothing(cls) -> "StatePredicate":
        return cls(states=(), name="false")

    @classmethod
    def of(cls, states: Iterable[State]) -> "StatePredicate":
        return cls(states=states)

    @classmethod
    def where(cls, name: str, fn: Callable[[State], bool]) -> "StatePredicate":
        return cls(fn=fn, name=name)


Step = Tuple[State, ActionLabel, State]


class Automaton(ABC):
    """Interface commune aux deux formes d'automate."""

    name: str = "A"

    @property
    def is_explicit(self) -> bool:
        return False

    @abstractmethod
    def start_states(self) -> Iterable[State]: ...

    @abstractmethod
    def transitions(self, state: State) -> Iterable[Tuple[ActionLabel, State]]: ...

    @abstractmethod
    def is_step(self, state: State, action: ActionLabel, target: State) -> bool: ...

    @abstractmethod
    def external_names(self) -> FrozenSet[str]: ...

    def is_start(self, state: State) -> bool:
        return state in set(self.start_states())


@dataclass(frozen=True)
class ExplicitAutomaton(Automaton):
    states: FrozenSet[State]
    start: FrozenSet[State]
    external: FrozenSet[ActionLabel]
    internal: FrozenSet[ActionLabel]
    steps: FrozenSet[Step]
    name: str = "A"
    _succ: Dict[State, List[Tuple[ActionLabel, State]]] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        succ: Dict[State, List[Tuple[ActionLabel, State]]] = {}
        for s, a, t in self.steps:
            succ.setdefault(s, []).append((a, t))
        for key in succ:
            succ[key].sort(key=sort_key)
        object.__setattr__(self, "_succ", succ)

    @property
    def is_explicit(self) -> bool:
        return True

    def start_states(self) -> List[State]:
        return sorted_states(self.start)

    def transitions(self, state: State) -> List[Tuple[ActionLabel, State]]:
        return self._succ.get(state, [])

    def is_step(self, state: State, action: ActionLabel, target: State) -> bool:
        return (state, action, target) in self.steps

    def is_start(self, state: State) -> bool:
        return state in self.start

    def external_names(self) -> FrozenSet[str]:
        return frozenset(a.name for a in self.external)

    def sorted_steps(self) -> List[Step]:
        return sorted(self.steps, key=sort_key)

    def actions(self) -> FrozenSet[ActionLabel]:
        return self.external | self.internal

    def kind_of(self, action: ActionLabel) -> Optional[ActionKind]:
        if action in self.external:
            return ActionKind.EXTERNAL
        if action in self.internal:
            return ActionKind.INTERNAL
        return None

    def restricted_to(self, keep: Iterable[State]) -> "ExplicitAutomaton":
        keep = frozenset(keep)
        return ExplicitAutomaton(
            states=keep,
            start=self.start & keep,
            external=self.external,
            internal=self.internal,
            steps=frozenset(st for st in self.steps if st[0] in keep and st[2] in keep),
            name=self.name,
        )


class ProgrammaticAutomaton(Automaton):
    """Automate défini par précondition/effet (style I/O automata).

    Les sous-classes fournissent `initial_states`, `candidate_actions` (énumération finie
    des actions à essayer dans un état), `precondition` et `effects`.
    """

    @abstractmethod
    def initial_states(self) -> Iterable[State]: ...

    @abstractmethod
    def candidate_actions(self, state: State) -> Iterable[ActionLabel]: ...

    @abstractmethod
    def precondition(self, state: State, action: ActionLabel) -> bool: ...

    @abstractmethod
    def effects(self, state: State, action: ActionLabel) -> Iterable[State]: ...

    def start_states(self) -> List[State]:
        return list(self.initial_states())

    def transitions(self, state: State) -> Iterator[Tuple[ActionLabel, State]]:
        for action in self.candidate_actions(state):
            if self.precondition(state, action):
                for target in self.effects(state, action):
                    yield action, target

    def is_step(self, state: State, action: ActionLabel, target: State) -> bool:
        return self.precondition(state, action) and target in list(self.effects(state, action))


@dataclass(frozen=True)
class ExecutionFragment:
    """Suite alternée s0 a1 s1 ... (finie)."""

    states: Tuple[State, ...]
    actions: Tuple[ActionLabel, ...] = ()

    def __post_init__(self) -> None:
        if len(self.states) != len(self.actions) + 1:
            raise ModelError("fragment mal formé: |states| doit valoir |actions| + 1")

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def fstate(self) -> State:
        return self.states[0]

    @property
    def lstate(self) -> State:
        return self.states[-1]

    def steps(self) -> Iterator[Step]:
        for i, a in enumerate(self.actions):
            yield self.states[i], a, self.states[i + 1]

    def concat(self, other: "ExecutionFragment") -> "ExecutionFragment":
        if self.lstate != other.fstate:
            raise ModelError("concaténation: lstate(α1) != fstate(α2)")
        return ExecutionFragment(self.states + other.states[1:], self.actions + other.actions)

    def prefix(self, n: int) -> "ExecutionFragment":
        return ExecutionFragment(self.states[: n + 1], self.actions[:n])

    def is_prefix_of(self, other: "ExecutionFragment") -> bool:
        return len(self) <= len(other) and other.prefix(len(self)) == self

    def touches(self, pred: Any) -> bool:
        """« α ∈ X »: un état de α (extrémités comprises) appartient à X."""
        return any(s in pred for s in self.states)

    @classmethod
    def single(cls, state: State) -> "ExecutionFragment":
        return cls((state,), ())

    @classmethod
    def from_steps(cls, first: State, steps: Sequence[Tuple[ActionLabel, State]]) -> "ExecutionFragment":
        return cls((first,) + tuple(t for _a, t in steps), tuple(a for a, _t in steps))

    def to_json(self) -> Dict[str, Any]:
        return {"states": [str(s) for s in self.states], "actions": [str(a) for a in self.actions]}


@dataclass(frozen=True)
class Lasso:
    """Exécution infinie stem ⌢ cycle ⌢ cycle ⌢ ..."""

    stem: ExecutionFragment
    cycle: ExecutionFragment

    def __post_init__(self) -> None:
        if len(self.cycle) < 1:
            raise ModelError("lasso: |cycle| >= 1 requis")
        if not (self.cycle.fstate == self.cycle.lstate == self.stem.lstate):
            raise ModelError("lasso: fstate(cycle) = lstate(cycle) = lstate(stem) requis")

    @property
    def period_start(self) -> int:
        return len(self.stem)

    @property
    def period(self) -> int:
        return len(self.cycle)

    def normalize(self, i: int) -> int:
        """Position canonique (dans [0, |stem|+|cycle|)) équivalente à la position i."""
        if i < len(self.stem):
            return i
        return len(self.stem) + (i - len(self.stem)) % len(self.cycle)

    def state_at(self, i: int) -> State:
        i = self.normalize(i)
        if i < len(self.stem):
            return self.stem.states[i]
        return self.cycle.states[i - len(self.stem)]

    def action_at(self, i: int) -> ActionLabel:
        """Action a_i menant de la position i-1 à la position i (i >= 1)."""
        if i < 1:
            raise ModelError("action_at: i >= 1")
        j = i - 1
        if j < len(self.stem):
            return self.stem.actions[j]
        return self.cycle.actions[(j - len(self.stem)) % len(self.cycle)]

    @classmethod
    def from_fragment(cls, frag: ExecutionFragment, loop_at: int) -> "Lasso":
        """Referme `frag` sur la position `loop_at` (lstate(frag) doit valoir frag.states[loop_at])."""
        return cls(frag.prefix(loop_at), ExecutionFragment(frag.states[loop_at:], frag.actions[loop_at:]))

    def unroll(self, n: int) -> ExecutionFragment:
        frag = self.stem
        for _ in range(n):
            frag = frag.concat(self.cycle)
        return frag

    def cycle_states(self) -> FrozenSet[State]:
        return frozenset(self.cycle.states)

    def states(self) -> FrozenSet[State]:
        return frozenset(self.stem.states) | frozenset(self.cycle.states)

    def to_json(self) -> Dict[str, Any]:
        return {"stem": self.stem.to_json(), "cycle": self.cycle.to_json()}


@dataclass
class ValidationReport:
    ok: bool
    violations: List[str]

    def to_json(self) -> Dict[str, Any]:
        return {"ok": self.ok, "violations": self.violations}


def validate(automaton: ExplicitAutomaton) -> ValidationReport:
    """Invariants structurels d'un automate explicite."""
    violations: List[str] = []
    if not automaton.start:
        violations.append("empty start")
    if automaton.start - automaton.states:
        violations.append("start state not in states")
    overlap = {a.name for a in automaton.external} & {a.name for a in automaton.internal}
    if overlap:
        violations.append("signature overlap: " + ",".join(sorted(overlap)))
    if not automaton.steps:
        violations.append("no steps")
    for s, a, t in automaton.sorted_steps():
        if s not in automaton.states or t not in automaton.states:
            violations.append(f"dangling step endpoint: ({s}, {a}, {t})")
        if automaton.kind_of(a) is None:
            violations.append(f"action not in signature: {a}")
    if violations:
        logger.info("validate %s: %d violation(s)", automaton.name, len(violations))
    return ValidationReport(ok=not violations, violations=violations)


@dataclass(frozen=True)
class Reachability:
    states: FrozenSet[State]
    partial: bool = False

    def __contains__(self, state: State) -> bool:
        return state in self.states

    def __iter__(self) -> Iterator[State]:
        return iter(sorted_states(self.states))

    def __len__(self) -> int:
        return len(self.states)


def reachable_states(automaton: Automaton, bound: Optional[int] = None, roots: Optional[Iterable[State]] = None) -> Reachability:
    """Parcours en largeur; `partial` signale une borne atteinte sur un automate programmatique."""
    if not automaton.is_explicit and bound is None:
        raise PreconditionError("reachable_states: borne requise pour un automate programmatique")
    frontier = deque(sorted_states(roots) if roots is not None else automaton.start_states())
    seen = set(frontier)
    expansions = 0
    partial = False
    while frontier:
        if bound is not None and expansions >= bound:
            partial = True
            logger.warning("reachable_states: borne %s atteinte, résultat partiel (%d états)", bound, len(seen))
            break
        state = frontier.popleft()
        expansions += 1
        for _action, target in automaton.transitions(state):
            if target not in seen:
                seen.add(target)
                frontier.append(target)
    return Reachability(frozenset(seen), partial)


def is_execution(fragment: ExecutionFragment, automaton: Automaton) -> bool:
    if not automaton.is_start(fragment.fstate):
        return False
    return all(automaton.is_step(s, a, t) for s, a, t in fragment.steps())


def is_fragment_of(fragment: ExecutionFragment, automaton: Automaton) -> bool:
    return all(automaton.is_step(s, a, t) for s, a, t in fragment.steps())


def is_lasso_of(lasso: Lasso, automaton: Automaton) -> bool:
    return is_execution(lasso.stem, automaton) and is_fragment_of(lasso.cycle, automaton)


def shared_externals(a: Automaton, b: Automaton) -> None:
    """Précondition commune: mêmes actions externes (par nom)."""
    if a.external_names() != b.external_names():
        raise PreconditionError(
            f"actions externes différentes: {sorted(a.external_names())} vs {sorted(b.external_names())}"
        )
