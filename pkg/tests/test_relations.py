import os
from typing import Any

import pytest

from src.automata import BoundExceeded, PreconditionError, StatePredicate
from src.relations import (
    CheckReport,
    Counterexample,
    PairMap,
    PairTarget,
    StateRelation,
    Verdict,
    default_bound,
    find_fragment,
    step_word,
)
from tests.helpers import ext, explicit, internal, pair

CHAIN = [("s0", "a", "s1"), ("s1", "t", "s2"), ("s2", "c", "s0")]


def test_explicit_relation_images_and_inverse():
    rel = StateRelation(rows=[("s0", "u0"), ("s1", "u0"), ("s1", "u1")])
    assert rel["s1"] == {"u0", "u1"}
    assert rel.image("s9") == frozenset()
    assert rel.related("s0", "u0") and not rel.related("s0", "u1")
    assert rel.inverse(["s0", "s1"]).image("u0") == {"s0", "s1"}
    assert rel.first_non_functional(["s0", "s1"]) == "s1"
    assert rel.function_value("s0") == "u0"
    with pytest.raises(PreconditionError):
        rel.function_value("s1")


def test_relation_needs_exactly_one_form():
    with pytest.raises(PreconditionError):
        StateRelation()
    with pytest.raises(PreconditionError):
        StateRelation(rows=[], image_fn=lambda s: ())


def test_predicate_relation_needs_universe():
    rel = StateRelation(predicate=lambda s, u: u.endswith(s[-1]))
    assert rel.related("s1", "u1")
    with pytest.raises(PreconditionError):
        rel.image("s1")
    bounded = StateRelation(predicate=lambda s, u: u.endswith(s[-1]), universe=["u0", "u1"])
    assert bounded.image("s1") == {"u1"}
    assert bounded.materialize(["s0", "s1"]).rows == {("s0", "u0"), ("s1", "u1")}


def test_image_cap_from_environment(mocker: Any):
    mocker.patch.dict(os.environ, {"LIVREFINE_IMAGE_CAP": "3"})
    naturals = StateRelation(image_fn=lambda s: iter(range(10**6)), name="nat")
    assert not naturals.image_is_finite(0)
    with pytest.raises(BoundExceeded):
        naturals.image(0)
    assert StateRelation.identity().image_is_finite("s0")


def test_pair_map_explicit_then_function():
    p, q = pair("p", ["s0"], ["s1"]), pair("q", ["u0"], ["u1"])
    h = PairMap({"q": PairTarget(p)})
    assert h.target(q).pair == p
    assert h.missing([q, pair("r", [], [])]) == ["r"]
    fallback = PairMap(fn=lambda m: PairTarget(p) if m.id.startswith("fam") else None)
    assert fallback.target(pair("fam[1]", [], [])).pair == p
    assert fallback.with_target("q", PairTarget(q)).target(q).pair == q


def test_find_fragment_shortest_with_constraints():
    chain = explicit(CHAIN)
    frag = find_fragment(chain, "s0", [ext("a")], lambda s: True, bound=3)
    assert frag.states == ("s0", "s1")
    through = find_fragment(chain, "s0", [ext("a")], lambda s: True, bound=3, must=[StatePredicate.of(["s2"])])
    assert through.states == ("s0", "s1", "s2")
    assert through.actions == (ext("a"), internal("t"))
    assert find_fragment(chain, "s0", [ext("a")], lambda s: True, bound=3, avoid=[StatePredicate.of(["s1"])]) is None
    assert find_fragment(chain, "s0", [ext("a")], lambda s: True, bound=0) is None


def test_find_fragment_nonempty_silent():
    chain = explicit(CHAIN)
    assert find_fragment(chain, "s0", [], lambda s: True, bound=3).states == ("s0",)
    assert find_fragment(chain, "s0", [], lambda s: True, bound=3, nonempty=True) is None
    assert find_fragment(chain, "s1", [], lambda s: True, bound=3, nonempty=True).states == ("s1", "s2")


def test_check_report_keeps_first_counterexample():
    rep = CheckReport("fwd")
    rep.ok("clause 1")
    rep.fail(Counterexample("clause 2", pair_id="p"))
    rep.fail(Counterexample("clause 3"))
    assert rep.counterexample.clause == "clause 2"
    assert rep.failed_clauses() == ["clause 2", "clause 3"]
    assert rep.exit_code == 1
    rep.degrade(Verdict.CONDITIONAL)
    assert rep.verdict == Verdict.FAIL


def test_check_report_merge_and_degrade():
    rep = CheckReport("live")
    rep.ok("clause 1")
    other = CheckReport("other", bounded=True, obligations=["p"])
    other.degrade(Verdict.CONDITIONAL)
    rep.merge(other)
    assert rep.verdict == Verdict.CONDITIONAL
    assert rep.exit_code == 2
    assert rep.bounded and rep.obligations == ["p"]
    assert rep.to_json()["clauses"] == {"clause 1": "pass"}


def test_step_word_and_default_bound():
    assert step_word(internal("t")) == ()
    assert step_word(ext("a")) == (ext("a"),)
    assert default_bound(3, 2) == 9
    assert default_bound(0, 0) == 1
