############################################################
# CHANGELOG:
# - [2026-10-15] agt124 {author=agent} {reason: générateurs d'instances aléatoires pour les balayages d'acceptation}
# - Impact: automates, conditions, candidats et treillis reproductibles (random.Random local, jamais le module global)
# - Tests: tests/test_random_instances.py (déterminisme par graine, bornes de taille, validité structurelle)
# - Notes: les candidats dérivés (copie affaiblie, quotient) passent souvent; le filtrage se fait côté balayage
############################################################
"""
Instances aléatoires.

- `random_automaton`: au plus `max_states` états, `max_actions` actions, chaque état a un successeur;
- `random_condition`: paires ⟨R, G⟩ tirées sur les états;
- `weakened_copy`: B ⊇ A (pas ajoutés) et M affaiblie (rouges réduits, verts élargis), g = identité;
- `quotient_instance`: B = f(A) pour une fusion aléatoire d'états, g = graphe de f;
- `random_chain_lattice`: chaîne ⟨X0, X1⟩ ≺ ⟨X1, X2⟩ ≺ ... (clause 4 vraie par construction).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from src.automata import ActionKind, ActionLabel, ExplicitAutomaton, State, StatePredicate, sorted_states
from src.lattice import PairLattice
from src.liveness import ComplementedPair, LivenessCondition
from src.relations import PairMap, PairTarget, SimulationCandidate, StateRelation


@dataclass
class LiveInstance:
    a: ExplicitAutomaton
    concrete: LivenessCondition
    b: ExplicitAutomaton
    abstract: LivenessCondition
    candidate: SimulationCandidate
    origin: str


def _subset(rng: random.Random, states: Sequence[State], p: float) -> List[State]:
    return [s for s in states if rng.random() < p]


def random_automaton(
    rng: random.Random,
    max_states: int = 8,
    max_actions: int = 4,
    max_out: int = 2,
    p_internal: float = 0.25,
    name: str = "A",
) -> ExplicitAutomaton:
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_actions)
    states = [f"s{i}" for i in range(n)]
    labels: List[ActionLabel] = []
    for j in range(k):
        internal = rng.random() < p_internal and j > 0
        labels.append(ActionLabel(f"t{j}" if internal else f"a{j}", ActionKind.INTERNAL if internal else ActionKind.EXTERNAL))
    steps = set()
    for s in states:
        for _ in range(rng.randint(1, max_out)):
            steps.add((s, rng.choice(labels), rng.choice(states)))
    used = {a for _s, a, _t in steps}
    return ExplicitAutomaton(
        states=frozenset(states),
        start=frozenset(["s0"]),
        external=frozenset(a for a in labels if not a.is_internal and a in used) or frozenset([labels[0]]),
        internal=frozenset(a for a in labels if a.is_internal and a in used),
        steps=frozenset(steps),
        name=name,
    )


def random_condition(rng: random.Random, states: Sequence[State], max_pairs: int = 3, prefix: str = "p") -> LivenessCondition:
    states = sorted_states(states)
    pairs = []
    for i in range(rng.randint(0, max_pairs)):
        red = _subset(rng, states, 0.4)
        green = _subset(rng, states, 0.3)
        pairs.append(ComplementedPair(f"{prefix}{i}", StatePredicate.of(red), StatePredicate.of(green)))
    return LivenessCondition.of(pairs)


def random_live_automaton(
    rng: random.Random, max_states: int = 8, max_actions: int = 4, max_pairs: int = 3, name: str = "A"
) -> Tuple[ExplicitAutomaton, LivenessCondition]:
    a = random_automaton(rng, max_states, max_actions, name=name)
    return a, random_condition(rng, sorted_states(a.states), max_pairs)


def _identity_map(pairs: Sequence[ComplementedPair], targets: Dict[str, ComplementedPair]) -> PairMap:
    return PairMap({q.id: PairTarget(targets[q.id]) for q in pairs})


def weakened_copy(rng: random.Random, a: ExplicitAutomaton, concrete: LivenessCondition) -> LiveInstance:
    """B = A plus quelques pas, M = L avec rouges réduits et verts élargis; h(q) = paire de même id."""
    states = sorted_states(a.states)
    extra = set()
    actions = sorted(a.actions(), key=str)
    for _ in range(rng.randint(0, 2)):
        extra.add((rng.choice(states), rng.choice(actions), rng.choice(states)))
    b = ExplicitAutomaton(a.states, a.start, a.external, a.internal, a.steps | frozenset(extra), name="B")
    abstract = []
    for p in concrete.pairs:
        red = [s for s in p.red.restrict(states) if rng.random() < 0.8]
        green = list(p.green.restrict(states)) + _subset(rng, states, 0.15)
        abstract.append(ComplementedPair(p.id, StatePredicate.of(red), StatePredicate.of(green)))
    cand = SimulationCandidate(
        g=StateRelation(rows=[(s, s) for s in states], name="id"),
        h=_identity_map(abstract, concrete.by_id()),
    )
    return LiveInstance(a, concrete, b, LivenessCondition.of(abstract), cand, "weakened-copy")


def quotient_instance(rng: random.Random, a: ExplicitAutomaton, concrete: LivenessCondition) -> LiveInstance:
    """Fusion aléatoire f: A → B; M(q) = ⟨u: f⁻¹(u) ∩ R ≠ ∅, u: f⁻¹(u) ⊆ G⟩ hérite des paires de L."""
    states = sorted_states(a.states)
    k = rng.randint(1, len(states))
    f: Dict[State, State] = {s: f"u{i}" if i < k else f"u{rng.randrange(k)}" for i, s in enumerate(states)}
    steps = frozenset((f[s], act, f[t]) for s, act, t in a.steps)
    b = ExplicitAutomaton(frozenset(f.values()), frozenset([f[s] for s in a.start]), a.external, a.internal, steps, name="B")
    b_states = sorted_states(b.states)
    abstract = []
    for p in concrete.pairs:
        red = [u for u in b_states if any(f[s] == u and s in p.red for s in states)]
        green = [u for u in b_states if all(s in p.green for s in states if f[s] == u)]
        abstract.append(ComplementedPair(p.id, StatePredicate.of(red), StatePredicate.of(green)))
    cand = SimulationCandidate(
        g=StateRelation(rows=[(s, f[s]) for s in states], name="f"),
        h=_identity_map(abstract, concrete.by_id()),
    )
    return LiveInstance(a, concrete, b, LivenessCondition.of(abstract), cand, "quotient")


def random_candidate(
    rng: random.Random, a: ExplicitAutomaton, concrete: LivenessCondition, b: ExplicitAutomaton, abstract: LivenessCondition
) -> SimulationCandidate:
    """Relation et carte h entièrement aléatoires (rarement valides)."""
    b_states = sorted_states(b.states)
    rows = [(s, u) for s in sorted_states(a.states) for u in b_states if rng.random() < 0.4]
    l_pairs = list(concrete.pairs)
    entries = {}
    for q in abstract.pairs:
        if l_pairs:
            entries[q.id] = PairTarget(rng.choice(l_pairs))
    return SimulationCandidate(g=StateRelation(rows=rows, name="g"), h=PairMap(entries))


def random_live_instance(
    rng: random.Random, max_states: int = 8, max_actions: int = 4, max_pairs: int = 3
) -> LiveInstance:
    a, concrete = random_live_automaton(rng, max_states, max_actions, max_pairs)
    roll = rng.random()
    if roll < 0.45:
        return weakened_copy(rng, a, concrete)
    if roll < 0.9:
        return quotient_instance(rng, a, concrete)
    b, abstract = random_live_automaton(rng, max_states, max_actions, max_pairs, name="B")
    b = ExplicitAutomaton(b.states, b.start, a.external, b.internal, _relabel(rng, b.steps, a.external), name="B")
    return LiveInstance(a, concrete, b, abstract, random_candidate(rng, a, concrete, b, abstract), "random")


def _relabel(rng: random.Random, steps: frozenset, external: frozenset) -> frozenset:
    """Réétiquette les pas externes de B sur la signature externe de A."""
    ext = sorted(external, key=str)
    out = set()
    for s, act, t in steps:
        out.add((s, act if act.is_internal else rng.choice(ext), t))
    return frozenset(out)


def random_chain_lattice(rng: random.Random, a: ExplicitAutomaton, length: int = 3) -> PairLattice:
    states = sorted_states(a.states)
    sets = [_subset(rng, states, 0.5) for _ in range(length + 1)]
    pairs = [ComplementedPair(f"c{i}", StatePredicate.of(sets[i]), StatePredicate.of(sets[i + 1])) for i in range(length)]
    order = [(f"c{i}", f"c{i + 1}") for i in range(length - 1)]
    return PairLattice.build(pairs, order, top=f"c{length - 1}", bottom="c0", name="random-chain")