############################################################
# CHANGELOG:
# - [2026-10-03] agt104 {author=agent} {reason: traces finies et ultimement périodiques canoniques}
# - Impact: l'égalité de traces devient une comparaison syntaxique (inclusion, correspondances)
# - Tests: tests/test_traces.py (T1, rotations, absorption du préfixe)
# - Notes: forme canonique = période minimale, préfixe minimal, rotation lexicographiquement minimale
# - [2026-10-17] agt129 {author=agent} {reason: le test de vérité d.une trace infinie passait par __len__ et levait ValueError}
# - Impact: Trace.__bool__ toujours vrai (λ compris); len() reste réservé aux traces finies
# - Tests: tests/test_traces.py::test_traces_are_always_truthy
############################################################
"""Traces: projection externe des fragments et des lassos."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple, Union

from src.automata import ActionLabel, ExecutionFragment, Lasso, sort_key


def _shortest_period(word: Tuple[ActionLabel, ...]) -> Tuple[ActionLabel, ...]:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True)
class Trace:
    """Mot fini (`period` vide) ou mot ω = prefix · period^ω en forme canonique."""

    prefix: Tuple[ActionLabel, ...]
    period: Tuple[ActionLabel, ...] = ()

    @property
    def is_finite(self) -> bool:
        return not self.period

    @classmethod
    def finite(cls, word: Sequence[ActionLabel]) -> "Trace":
        return cls(tuple(word), ())

    @classmethod
    def ultimately_periodic(cls, prefix: Sequence[ActionLabel], period: Sequence[ActionLabel]) -> "Trace":
        prefix, period = tuple(prefix), tuple(period)
        if not period:
            return cls.finite(prefix)
        period = _shortest_period(period)
        # absorber le préfixe dans la période tant que possible
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1:] + period[:-1]
        # rotation minimale: u (x y)^ω = u x (y x)^ω
        n = len(period)
        rotations = [period[k:] + period[:k] for k in range(n)]
        best = min(range(n), key=lambda k: (tuple(sort_key(a) for a in rotations[k]), k))
        return cls(prefix + period[:best], rotations[best])

    def letter(self, i: int) -> ActionLabel:
        if i < len(self.prefix):
            return self.prefix[i]
        if self.is_finite:
            raise IndexError(i)
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def truncate(self, n: int) -> Tuple[ActionLabel, ...]:
        """Les n premières lettres (ou tout le mot fini)."""
        if self.is_finite:
            return self.prefix[:n]
        return tuple(self.letter(i) for i in range(n))

    def __bool__(self) -> bool:
        # λ compris: une trace présente est toujours vraie
        return True

    def __len__(self) -> int:
        if not self.is_finite:
            raise ValueError("trace infinie")
        return len(self.prefix)

    def __str__(self) -> str:
        pre = " ".join(str(a) for a in self.prefix)
        if self.is_finite:
            return f"⟨{pre}⟩"
        per = " ".join(str(a) for a in self.period)
        return f"⟨{pre} ({per})ω⟩"

    def to_json(self) -> Dict[str, Any]:
        return {"prefix": [str(a) for a in self.prefix], "period": [str(a) for a in self.period]}


def externals(actions: Sequence[ActionLabel]) -> Tuple[ActionLabel, ...]:
    return tuple(a for a in actions if not a.is_internal)


def trace_of(x: Union[ExecutionFragment, Lasso]) -> Trace:
    if isinstance(x, Lasso):
        period = externals(x.cycle.actions)
        if not period:
            return Trace.finite(externals(x.stem.actions))
        return Trace.ultimately_periodic(externals(x.stem.actions), period)
    return Trace.finite(externals(x.actions))


def trace_between(lasso: Lasso, j: int, k: int) -> Tuple[ActionLabel, ...]:
    """trace(α, j, k): externes des actions a_j..a_k; λ si j > k."""
    if j > k:
        return ()
    return externals([lasso.action_at(i) for i in range(j, k + 1)])


def all_rotations(word: Sequence[ActionLabel]) -> List[Tuple[ActionLabel, ...]]:
    word = tuple(word)
    return [word[k:] + word[:k] for k in range(len(word))]
