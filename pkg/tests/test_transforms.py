import pytest

from src.automata import ExecutionFragment, ModelError, StatePredicate, validate
from src.liveness import is_live
from src.streett import enumerate_live_lassos, streett_emptiness
from src.transforms import RESET, augment_nonalwayssilent, forestify, leads_to_transform, project_step
from tests.helpers import explicit, internal


def test_leads_to_on_t1(live_fixture):
    a, _ = live_fixture("t1.json")
    derived, p = leads_to_transform(a, StatePredicate.of(["s0"]), StatePredicate.of(["s1"]))
    assert derived.start == frozenset([("s0", True)])
    assert ("s1", False) in derived.states
    lassos = enumerate_live_lassos(derived, [p], 2, 2)
    assert lassos
    assert all(is_live(lasso, [p]) for lasso in lassos)


def test_leads_to_detects_unanswered_request():
    a = explicit([("s0", "go", "s1"), ("s1", "go", "s1"), ("s0", "stay", "s0")])
    derived, p = leads_to_transform(a, StatePredicate.of(["s1"]), StatePredicate.of(["s0"]), "s1~>s0")
    # s1 boucle sans jamais revoir s0
    bad = [lasso for lasso in enumerate_live_lassos(derived, [], 2, 2) if any(s[0] == "s1" for s in lasso.cycle.states)]
    assert bad and not any(is_live(lasso, [p]) for lasso in bad)
    assert p.id == "s1~>s0"


def test_augment_nonalwayssilent_t1(live_fixture):
    a, _ = live_fixture("t1.json")
    loop = ("s1", internal("t"), "s1")
    derived, p = augment_nonalwayssilent(a, [loop])
    assert RESET in derived.internal
    assert streett_emptiness(derived, [p]).empty
    derived, p = augment_nonalwayssilent(a, [])
    assert streett_emptiness(derived, [p]).nonempty
    assert len(enumerate_live_lassos(derived, [p], 2, 3)) == len(enumerate_live_lassos(derived, [], 2, 3))


def test_augment_rejects_unknown_step(live_fixture):
    a, _ = live_fixture("t1.json")
    with pytest.raises(ModelError):
        augment_nonalwayssilent(a, [("s0", internal("t"), "s0")])


def test_project_step():
    step = (("s0", False), internal("t"), ("s1", True))
    assert project_step(step) == ("s0", internal("t"), "s1")
    assert project_step((("s1", True), RESET, ("s1", False))) is None


def test_forestify_sizes(live_fixture):
    t1, _ = live_fixture("t1.json")
    cy3, _ = live_fixture("cy3.json")
    assert len(forestify(t1, 2).states) == 3
    assert len(forestify(t1, 1).states) == 2
    forest = forestify(cy3, 4)
    assert len(forest.states) == 5
    assert len(forest.steps) == 4
    assert validate(forest).ok
    with pytest.raises(ModelError):
        forestify(t1, 0)


def test_forest_state_is_history(live_fixture):
    t1, _ = live_fixture("t1.json")
    forest = forestify(t1, 2)
    deepest = max(forest.states, key=len)
    frag = ExecutionFragment(deepest[0::2], deepest[1::2])
    assert frag.states == ("s0", "s1", "s1")
