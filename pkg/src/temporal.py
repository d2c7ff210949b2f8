############################################################
# CHANGELOG:
# - [2026-10-04] agt107 {author=agent} {reason: fragment temporel (□, ◇, U) évalué sur les lassos}
# - Impact: validation croisée de satisfies_pair (□◇R ⇒ □◇G)
# - Tests: tests/test_temporal.py (CY3, T1, équivalence avec satisfies_pair sur lassos aléatoires)
# - Notes: évaluation par classes de positions (préfixe + une période), U calculé par point fixe
############################################################
"""
Formules temporelles sur ensembles d'états, évaluées sur un lasso.

Les positions d'un lasso sont ramenées à |stem| + |cycle| classes; le successeur de la
dernière position du cycle est le début du cycle. □ et ◇ sont dérivés de U.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from src.automata import Lasso, ModelError, StatePredicate


@dataclass(frozen=True)
class TemporalFormula:
    op: str
    args: Tuple["TemporalFormula", ...] = ()
    atom: StatePredicate | None = None

    def __str__(self) -> str:
        if self.op == "atom":
            assert self.atom is not None
            return self.atom.name
        if self.op == "not":
            return f"¬{self.args[0]}"
        if self.op in ("always", "eventually"):
            sym = "□" if self.op == "always" else "◇"
            return f"{sym}{self.args[0]}"
        sym = {"and": "∧", "or": "∨", "implies": "⇒", "until": "U"}[self.op]
        return f"({self.args[0]} {sym} {self.args[1]})"


def atom(states: Iterable | StatePredicate) -> TemporalFormula:
    pred = states if isinstance(states, StatePredicate) else StatePredicate.of(states)
    return TemporalFormula("atom", (), pred)


def true() -> TemporalFormula:
    return atom(StatePredicate.everything())


def neg(f: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("not", (f,))


def and_(f: TemporalFormula, g: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("and", (f, g))


def or_(f: TemporalFormula, g: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("or", (f, g))


def implies(f: TemporalFormula, g: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("implies", (f, g))


def until(f: TemporalFormula, g: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("until", (f, g))


def eventually(f: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("eventually", (f,))


def always(f: TemporalFormula) -> TemporalFormula:
    return TemporalFormula("always", (f,))


def infinitely_often(f: TemporalFormula) -> TemporalFormula:
    return always(eventually(f))


def eventually_always(f: TemporalFormula) -> TemporalFormula:
    return eventually(always(f))


def pair_formula(red: StatePredicate, green: StatePredicate) -> TemporalFormula:
    """□◇Red ⇒ □◇Green."""
    return implies(infinitely_often(atom(red)), infinitely_often(atom(green)))


class _Positions:
    def __init__(self, lasso: Lasso) -> None:
        self.lasso = lasso
        self.n = len(lasso.stem) + len(lasso.cycle)
        self.loop = len(lasso.stem)

    def succ(self, i: int) -> int:
        return i + 1 if i + 1 < self.n else self.loop


def _until(pos: _Positions, f: List[bool], g: List[bool]) -> List[bool]:
    holds = [False] * pos.n
    changed = True
    while changed:
        changed = False
        for i in reversed(range(pos.n)):
            val = g[i] or (f[i] and holds[pos.succ(i)])
            if val and not holds[i]:
                holds[i] = True
                changed = True
    return holds


def _eval(pos: _Positions, f: TemporalFormula, memo: Dict[int, List[bool]]) -> List[bool]:
    key = id(f)
    if key in memo:
        return memo[key]
    if f.op == "atom":
        assert f.atom is not None
        out = [pos.lasso.state_at(i) in f.atom for i in range(pos.n)]
    elif f.op == "not":
        out = [not v for v in _eval(pos, f.args[0], memo)]
    elif f.op in ("and", "or", "implies"):
        a = _eval(pos, f.args[0], memo)
        b = _eval(pos, f.args[1], memo)
        if f.op == "and":
            out = [x and y for x, y in zip(a, b)]
        elif f.op == "or":
            out = [x or y for x, y in zip(a, b)]
        else:
            out = [(not x) or y for x, y in zip(a, b)]
    elif f.op == "until":
        out = _until(pos, _eval(pos, f.args[0], memo), _eval(pos, f.args[1], memo))
    elif f.op == "eventually":
        out = _until(pos, [True] * pos.n, _eval(pos, f.args[0], memo))
    elif f.op == "always":
        inner = _eval(pos, f.args[0], memo)
        out = [not v for v in _until(pos, [True] * pos.n, [not v for v in inner])]
    else:
        raise ModelError(f"opérateur temporel inconnu: {f.op}")
    memo[key] = out
    return out


def eval_formula(lasso: Lasso, f: TemporalFormula, position: int = 0) -> bool:
    pos = _Positions(lasso)
    return _eval(pos, f, {})[lasso.normalize(position)]
