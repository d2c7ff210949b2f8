import pytest

from src.automata import (
    ActionKind,
    ExecutionFragment,
    ExplicitAutomaton,
    Lasso,
    ModelError,
    PreconditionError,
    StatePredicate,
    is_execution,
    is_lasso_of,
    parse_action,
    reachable_states,
    shared_externals,
    sort_key,
    validate,
)
from tests.helpers import explicit, ext, internal


def test_parse_action():
    a = parse_action("response(q, v)")
    assert a.name == "response"
    assert a.payload == ("q", "v")
    assert str(a) == "response(q,v)"
    assert parse_action("t", ActionKind.INTERNAL).is_internal


def test_validate_t1(live_fixture):
    a, cond = live_fixture("t1.json")
    rep = validate(a)
    assert rep.ok
    assert rep.violations == []
    assert cond.is_empty()


def test_validate_reports_each_violation():
    a = ExplicitAutomaton(
        states=frozenset(["s0"]),
        start=frozenset(["s9"]),
        external=frozenset([ext("a")]),
        internal=frozenset([internal("a")]),
        steps=frozenset([("s0", ext("b"), "s1")]),
    )
    rep = validate(a)
    assert not rep.ok
    assert "start state not in states" in rep.violations
    assert any(v.startswith("signature overlap") for v in rep.violations)
    assert any(v.startswith("dangling step endpoint") for v in rep.violations)
    assert any(v.startswith("action not in signature") for v in rep.violations)


def test_validate_empty_start_and_steps():
    a = ExplicitAutomaton(frozenset(["s0"]), frozenset(), frozenset(), frozenset(), frozenset())
    rep = validate(a)
    assert "empty start" in rep.violations
    assert "no steps" in rep.violations


def test_reachable_states_t1(live_fixture):
    a, _ = live_fixture("t1.json")
    reach = reachable_states(a)
    assert set(reach) == {"s0", "s1"}
    assert not reach.partial


def test_reachable_ignores_unreachable_states():
    a = explicit([("s0", "a", "s1"), ("s2", "a", "s0")])
    assert set(reachable_states(a)) == {"s0", "s1"}


def test_reachable_programmatic_requires_bound(mocker):
    a = mocker.Mock()
    a.is_explicit = False
    with pytest.raises(PreconditionError):
        reachable_states(a)


def test_fragment_shape_and_touches():
    frag = ExecutionFragment(("s0", "s1"), (ext("a"),))
    assert len(frag) == 1
    assert frag.fstate == "s0" and frag.lstate == "s1"
    assert frag.touches(StatePredicate.of(["s1"]))
    assert not frag.touches(StatePredicate.nothing())
    with pytest.raises(ModelError):
        ExecutionFragment(("s0",), (ext("a"),))


def test_fragment_concat_requires_matching_ends():
    f1 = ExecutionFragment(("s0", "s1"), (ext("a"),))
    f2 = ExecutionFragment(("s1", "s1"), (internal("t"),))
    assert f1.concat(f2).states == ("s0", "s1", "s1")
    with pytest.raises(ModelError):
        f2.concat(ExecutionFragment(("s0",)))


def test_lasso_positions(live_fixture):
    a, _ = live_fixture("t1.json")
    stem = ExecutionFragment(("s0", "s1"), (ext("a"),))
    cycle = ExecutionFragment(("s1", "s1"), (internal("t"),))
    lasso = Lasso(stem, cycle)
    assert is_lasso_of(lasso, a)
    assert is_execution(lasso.unroll(3), a)
    assert lasso.state_at(7) == "s1"
    assert lasso.action_at(1) == ext("a")
    assert lasso.action_at(5) == internal("t")
    assert lasso.normalize(10) == 1


def test_lasso_rejects_open_cycle():
    with pytest.raises(ModelError):
        Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0", "s1"), (ext("a"),)))
    with pytest.raises(ModelError):
        Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0",)))


def test_state_predicate_forms():
    with pytest.raises(ModelError):
        StatePredicate()
    even = StatePredicate.where("even", lambda n: n % 2 == 0)
    assert 4 in even and 3 not in even
    assert even.restrict(range(5)) == frozenset({0, 2, 4})
    assert not even.is_explicit
    assert StatePredicate.of([1]).name == "{1}"


def test_sort_key_orders_mixed_states():
    states = ["s1", 2, ("a", 1), "s0", 1]
    ordered = sorted(states, key=sort_key)
    assert ordered == sorted(ordered, key=sort_key)
    assert ordered.index(1) < ordered.index(2)
    assert ordered.index("s0") < ordered.index("s1")


def test_shared_externals_mismatch():
    a = explicit([("s0", "a", "s0")])
    b = explicit([("s0", "b", "s0")])
    shared_externals(a, a)
    with pytest.raises(PreconditionError):
        shared_externals(a, b)
