import random

import pytest

from src.automata import validate
from src.lattice import check_lattice_structure
from src.random_instances import (
    quotient_instance,
    random_automaton,
    random_chain_lattice,
    random_live_automaton,
    random_live_instance,
    weakened_copy,
)


def test_same_seed_same_automaton():
    a = random_automaton(random.Random(5))
    b = random_automaton(random.Random(5))
    assert a.steps == b.steps and a.states == b.states


@pytest.mark.parametrize("seed", range(8))
def test_size_bounds_and_successors(seed):
    a = random_automaton(random.Random(seed), max_states=5, max_actions=3)
    assert 1 <= len(a.states) <= 5
    assert a.start == {"s0"}
    assert all(list(a.transitions(s)) for s in a.states)
    assert validate(a).ok


def test_weakened_copy_keeps_pairs_and_steps():
    rng = random.Random(2)
    a, cond = random_live_automaton(rng, max_states=5, max_pairs=3)
    inst = weakened_copy(rng, a, cond)
    assert inst.origin == "weakened-copy"
    assert a.steps <= inst.b.steps
    assert [p.id for p in inst.abstract.pairs] == [p.id for p in cond.pairs]
    for p, q in zip(cond.pairs, inst.abstract.pairs):
        assert q.red.restrict(a.states) <= p.red.restrict(a.states)
        assert p.green.restrict(a.states) <= q.green.restrict(a.states)


def test_quotient_maps_every_state():
    rng = random.Random(4)
    a, cond = random_live_automaton(rng, max_states=6)
    inst = quotient_instance(rng, a, cond)
    assert inst.origin == "quotient"
    assert len(inst.b.states) <= len(a.states)
    for s in a.states:
        assert len(inst.candidate.g.image(s)) == 1


def test_instance_origins_are_known():
    rng = random.Random(13)
    origins = {random_live_instance(rng, max_states=4).origin for _ in range(40)}
    assert origins <= {"weakened-copy", "quotient", "random"}
    assert len(origins) >= 2


@pytest.mark.parametrize("seed", range(5))
def test_chain_lattice_is_well_formed(seed):
    rng = random.Random(seed)
    a = random_automaton(rng, max_states=5)
    lattice = random_chain_lattice(rng, a, length=3)
    assert (lattice.bottom, lattice.top) == ("c0", "c2")
    assert check_lattice_structure(lattice, a.states).ok
