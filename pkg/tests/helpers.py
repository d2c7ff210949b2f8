"""Constructeurs partagés par les tests (automates explicites courts)."""

from src.automata import ActionKind, ActionLabel, ExplicitAutomaton, StatePredicate
from src.esds_types import EsdsConfig, Op
from src.liveness import ComplementedPair


def ext(name: str) -> ActionLabel:
    return ActionLabel(name, ActionKind.EXTERNAL)


def internal(name: str) -> ActionLabel:
    return ActionLabel(name, ActionKind.INTERNAL)


def explicit(steps, start=("s0",), name: str = "A") -> ExplicitAutomaton:
    """Triplets (s, action, t); une action dont le nom commence par `t` est interne."""
    labelled = [(s, internal(a) if a.startswith("t") else ext(a), t) for s, a, t in steps]
    states = {s for s, _a, _t in labelled} | {t for _s, _a, t in labelled} | set(start)
    return ExplicitAutomaton(
        states=frozenset(states),
        start=frozenset(start),
        external=frozenset(a for _s, a, _t in labelled if not a.is_internal),
        internal=frozenset(a for _s, a, _t in labelled if a.is_internal),
        steps=frozenset(labelled),
        name=name,
    )


def pair(pid: str, red, green) -> ComplementedPair:
    return ComplementedPair(pid, StatePredicate.of(red), StatePredicate.of(green))


def tiny_esds(system: str = "alg", **overrides) -> EsdsConfig:
    """Un client, deux répliques: x1 ajoute a, x2 est une lecture stricte après x1."""
    ops = (Op("x1", "c1", kind="add", element="a"), Op("x2", "c1", frozenset(["x1"]), strict=True))
    cfg = EsdsConfig(clients=("c1",), replicas=("r1", "r2"), ops=ops, seed=3, steps=1500, system=system)
    return cfg.with_overrides(**overrides)


def chained_esds(n: int, system: str = "esds2", seed: int = 5) -> EsdsConfig:
    """n opérations chaînées par prev (ordre total): ajouts et lectures alternés, une lecture stricte sur dix."""
    ops = []
    for k in range(1, n + 1):
        prev = frozenset([f"x{k - 1}"]) if k > 1 else frozenset()
        client = "c1" if k % 2 else "c2"
        if k % 2:
            ops.append(Op(f"x{k}", client, prev, kind="add", element=f"e{k}"))
        else:
            ops.append(Op(f"x{k}", client, prev, strict=k % 10 == 0))
    return EsdsConfig(clients=("c1", "c2"), replicas=("r1", "r2"), ops=tuple(ops), seed=seed, steps=5 * n + 100, system=system)
