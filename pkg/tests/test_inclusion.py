import pytest

from src.automata import PreconditionError, parse_action
from src.inclusion import InclusionOutcome, live_trace_inclusion, matching_live_lasso, safe_trace_inclusion
from src.traces import Trace
from tests.helpers import explicit


def test_db_live_counterexample(live_fixture):
    dbi, cond_i = live_fixture("dbi.json")
    dbs, cond_s = live_fixture("dbs.json")
    verdict = live_trace_inclusion(dbi, cond_i, dbs, cond_s)
    assert verdict.outcome == InclusionOutcome.COUNTEREXAMPLE
    assert verdict.trace == Trace.ultimately_periodic([], [parse_action("request(q)")])
    assert verdict.counterexample.cycle_states() == frozenset(["e_e"])
    assert verdict.to_json()["outcome"] == "counterexample"
    assert verdict.to_json()["trace"] == {"prefix": [], "period": ["request(q)"]}


def test_db_safe_inclusion_both_ways(live_fixture):
    dbi, _ = live_fixture("dbi.json")
    dbs, _ = live_fixture("dbs.json")
    assert safe_trace_inclusion(dbi, dbs).holds
    assert safe_trace_inclusion(dbs, dbi).holds


def test_dbs_into_dbi_live(live_fixture):
    dbi, cond_i = live_fixture("dbi.json")
    dbs, cond_s = live_fixture("dbs.json")
    assert live_trace_inclusion(dbs, cond_s, dbi, cond_i).holds


def test_disjoint_externals_rejected(live_fixture):
    t1, _ = live_fixture("t1.json")
    cy3, _ = live_fixture("cy3.json")
    with pytest.raises(PreconditionError):
        live_trace_inclusion(t1, [], cy3, [])
    with pytest.raises(PreconditionError):
        safe_trace_inclusion(t1, cy3)


def test_safe_counterexample_fragment():
    a = explicit([("s0", "a", "s1"), ("s1", "b", "s1")])
    b = explicit([("s0", "a", "s1"), ("s1", "a", "s1"), ("s0", "b", "s0")])
    verdict = safe_trace_inclusion(a, b)
    assert verdict.outcome == InclusionOutcome.COUNTEREXAMPLE
    assert [str(x) for x in verdict.trace.prefix] == ["a", "b"]


def test_safe_inclusion_unknown_when_bound_hit(live_fixture):
    dbi, _ = live_fixture("dbi.json")
    dbs, _ = live_fixture("dbs.json")
    assert safe_trace_inclusion(dbi, dbs, bound=1).outcome == InclusionOutcome.UNKNOWN


def test_matching_live_lasso_internal_stutter(live_fixture):
    t1, _ = live_fixture("t1.json")
    match = matching_live_lasso(t1, [], Trace.finite([parse_action("a")]))
    assert match is not None
    assert match.cycle_states() == frozenset(["s1"])


def test_live_inclusion_unknown_when_bounds_too_small(live_fixture):
    cy3, _ = live_fixture("cy3.json")
    assert live_trace_inclusion(cy3, [], cy3, [], stem_bound=0, cycle_bound=2).outcome == InclusionOutcome.UNKNOWN
