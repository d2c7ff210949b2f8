import pytest

from src.automata import ExecutionFragment, Lasso, ModelError, StatePredicate
from src.liveness import satisfies_pair
from src.temporal import (
    TemporalFormula,
    always,
    and_,
    atom,
    eval_formula,
    eventually,
    eventually_always,
    infinitely_often,
    neg,
    pair_formula,
    true,
    until,
)
from src.traces import Trace, all_rotations, trace_between, trace_of
from tests.helpers import ext, internal, pair
from tests.test_liveness import cy3_lasso, t1_lasso


def test_cy3_recurrence():
    assert eval_formula(cy3_lasso(), infinitely_often(atom(["s2"])))
    assert not eval_formula(cy3_lasso(), eventually_always(atom(["s2"])))


def test_eventually_always_on_stuttering_cycle():
    assert eval_formula(t1_lasso(), eventually_always(atom(["s1"])))
    assert not eval_formula(t1_lasso(), always(atom(["s1"])))
    assert eval_formula(t1_lasso(), always(atom(["s1"])), position=1)


def test_pair_formula_agrees_with_satisfies_pair():
    for lasso in (t1_lasso(), cy3_lasso()):
        for red, green in ((["s1"], ["s0"]), (["s1"], ["s1"]), (["s0"], ["s2"]), ([], ["s0"])):
            f = pair_formula(StatePredicate.of(red), StatePredicate.of(green))
            assert eval_formula(lasso, f) == satisfies_pair(lasso, pair("p", red, green))


def test_until_and_negation():
    lasso = cy3_lasso()
    assert eval_formula(lasso, until(atom(["s0", "s1"]), atom(["s2"])))
    assert not eval_formula(lasso, until(atom(["s0"]), atom(["s2"])))
    assert eval_formula(lasso, neg(atom(["s1"])))
    assert eval_formula(lasso, and_(true(), eventually(atom(["s1"]))))


def test_formula_text():
    assert str(pair_formula(StatePredicate.of(["s1"]), StatePredicate.of(["s0"]))) == "(□◇{s1} ⇒ □◇{s0})"


def test_unknown_operator():
    with pytest.raises(ModelError):
        eval_formula(cy3_lasso(), TemporalFormula("next", (true(),)))


def test_trace_of_fragment_and_finite_lasso():
    frag = ExecutionFragment(("s0", "s1", "s1"), (ext("a"), internal("t")))
    assert trace_of(frag) == Trace.finite([ext("a")])
    trace = trace_of(t1_lasso())
    assert trace.is_finite
    assert trace.prefix == (ext("a"),)


def test_periodic_trace_canonical_rotation():
    b, c = ext("b"), ext("c")
    direct = Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0", "s1", "s0"), (b, c)))
    shifted = Lasso(ExecutionFragment(("s0", "s1"), (b,)), ExecutionFragment(("s1", "s0", "s1"), (c, b)))
    assert trace_of(direct) == trace_of(shifted)
    assert trace_of(direct).period == (b, c)
    assert trace_of(direct).prefix == ()
    assert trace_of(shifted) == Trace.ultimately_periodic([b], [c, b, c, b])
    assert len(all_rotations((b, c))) == 2


def test_trace_letters_and_bounds():
    b, c = ext("b"), ext("c")
    trace = Trace.ultimately_periodic([c], [b])
    assert trace.truncate(4) == (c, b, b, b)
    assert trace.letter(10) == b
    assert str(trace) == "⟨c (b)ω⟩"
    with pytest.raises(ValueError):
        len(trace)


def test_trace_between():
    lasso = t1_lasso()
    assert trace_between(lasso, 1, 3) == (ext("a"),)
    assert trace_between(lasso, 2, 5) == ()
    assert trace_between(lasso, 3, 2) == ()
