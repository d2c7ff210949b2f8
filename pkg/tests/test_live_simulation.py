import random

import pytest

from src.automata import parse_action
from src.formats import load_candidate
from src.inclusion import live_trace_inclusion
from src.live_simulation import (
    LIVE_CHECKERS,
    always_silent_transitions,
    check_live_backward_sim,
    check_live_forward_sim,
    check_live_history,
    check_live_prophecy,
    check_live_refinement,
    replay_live_step,
    sometimes_silent_transitions,
)
from src.random_instances import random_live_instance
from src.relations import PairMap, PairTag, PairTarget, SimulationCandidate, StateRelation, Verdict
from src.simulation import check_forward_sim
from tests.helpers import pair


def test_db_live_forward_fails_on_lost_query(live_fixture, fixture_file):
    dbi, cond_i = live_fixture("dbi.json")
    dbs, cond_s = live_fixture("dbs.json")
    cand = load_candidate(fixture_file("cand_db.json"), cond_i)
    rep = check_live_forward_sim(dbi, cond_i, dbs, cond_s, cand)
    assert rep.verdict == Verdict.FAIL
    cx = rep.counterexample
    assert cx.clause == "live-fwd clause 2a"
    assert cx.step == ("e_e", parse_action("request(q)"), "e_e")
    assert cx.abstract_state == "e_e"
    assert cx.pair_id == "req:q"
    assert not replay_live_step(dbi, cond_i, dbs, cond_s, cand, cx)
    assert rep.to_json()["counterexample"]["pair"] == "req:q"


def test_db_inclusion_agrees_with_failure(live_fixture):
    dbi, cond_i = live_fixture("dbi.json")
    dbs, cond_s = live_fixture("dbs.json")
    assert not live_trace_inclusion(dbi, cond_i, dbs, cond_s).holds


def test_bsim1_live_backward_and_prophecy(live_fixture, fixture_file):
    a, cond_a = live_fixture("bsim1_a.json")
    b, cond_b = live_fixture("bsim1_b.json")
    cand = load_candidate(fixture_file("cand_bsim1.json"), cond_a)
    assert check_live_backward_sim(a, cond_a, b, cond_b, cand).passed
    assert check_live_prophecy(a, cond_a, b, cond_b, cand).passed
    rep = check_live_forward_sim(a, cond_a, b, cond_b, cand)
    assert rep.counterexample.clause == "live-fwd clause 2"
    assert check_live_history(a, cond_a, b, cond_b, cand).verdict == Verdict.FAIL


def test_chain_collapse_forward(live_fixture, fixture_file):
    chain, cond = live_fixture("chain.json")
    collapsed, cond_c = live_fixture("chain_collapsed.json")
    cand = load_candidate(fixture_file("cand_chain.json"), cond)
    rep = check_live_forward_sim(chain, cond, collapsed, cond_c, cand)
    assert rep.passed, rep.to_json()
    assert rep.clauses["live-fwd clause 3"] == "pass (bounded)"
    assert rep.bounded
    assert check_live_refinement(chain, cond, collapsed, cond_c, cand).passed


def test_chain_derived_target_certified(live_fixture, fixture_file):
    chain, cond = live_fixture("chain.json")
    collapsed, cond_c = live_fixture("chain_collapsed.json")
    cand = load_candidate(fixture_file("cand_chain_derived.json"), cond)
    assert cand.h.entries["q0"].tag == PairTag.CLAIMED_DERIVED
    rep = check_live_forward_sim(chain, cond, collapsed, cond_c, cand)
    assert rep.passed
    assert any("closure_member" in n for n in rep.notes)


def test_uncertified_derived_target_rejected(live_fixture, fixture_file):
    chain, cond = live_fixture("chain.json")
    collapsed, cond_c = live_fixture("chain_collapsed.json")
    cand = load_candidate(fixture_file("cand_chain.json"), cond)
    bogus = PairTarget(pair("never-s1", ["s1"], []), PairTag.CLAIMED_DERIVED)
    cand.h = cand.h.with_target("q0", bogus)
    rep = check_live_forward_sim(chain, cond, collapsed, cond_c, cand)
    assert rep.counterexample.clause == "h-certificate"
    assert rep.counterexample.witness is not None


def test_certificate_skips_closure_check(live_fixture, fixture_file):
    chain, cond = live_fixture("chain.json")
    collapsed, cond_c = live_fixture("chain_collapsed.json")
    cand = load_candidate(fixture_file("cand_chain.json"), cond)
    cand.h = cand.h.with_target("q0", PairTarget(pair("never-s1", ["s1"], []), PairTag.CLAIMED_DERIVED))
    cand.certificates = {"never-s1": "preuve manuelle"}
    rep = check_live_forward_sim(chain, cond, collapsed, cond_c, cand)
    assert rep.clauses["h-certificate"] == "pass"


def test_missing_h_entry(live_fixture, fixture_file):
    dbi, cond_i = live_fixture("dbi.json")
    dbs, cond_s = live_fixture("dbs.json")
    cand = load_candidate(fixture_file("cand_db.json"), cond_i)
    cand.h = PairMap.empty()
    rep = check_live_forward_sim(dbi, cond_i, dbs, cond_s, cand)
    assert rep.counterexample.clause == "h-total"
    assert rep.counterexample.pair_id == "req:q"


def test_target_not_in_l(live_fixture, fixture_file):
    dbi, cond_i = live_fixture("dbi.json")
    dbs, cond_s = live_fixture("dbs.json")
    cand = load_candidate(fixture_file("cand_db.json"), cond_i)
    cand.h = PairMap({"req:q": PairTarget(pair("other", ["q_q"], ["e_e"]))})
    assert check_live_forward_sim(dbi, cond_i, dbs, cond_s, cand).counterexample.clause == "h-target"


@pytest.mark.parametrize("kind", sorted(LIVE_CHECKERS))
def test_identity_on_dbs(kind, live_fixture):
    dbs, cond = live_fixture("dbs.json")
    h = PairMap({p.id: PairTarget(p) for p in cond.pairs})
    rep = LIVE_CHECKERS[kind](dbs, cond, dbs, cond, SimulationCandidate(g=StateRelation.identity(), h=h))
    assert rep.passed, rep.to_json()


def test_identity_on_t1_sometimes_silent_loop(live_fixture):
    t1, _ = live_fixture("t1.json")
    cand = SimulationCandidate(g=StateRelation.identity())
    assert check_live_forward_sim(t1, [], t1, [], cand).passed
    rep = check_live_backward_sim(t1, [], t1, [], cand)
    assert rep.counterexample.clause == "live-bwd clause 4"
    assert rep.counterexample.witness.cycle_states() == frozenset(["s1"])


def test_empty_abstract_condition_matches_plain_forward(live_fixture, fixture_file):
    for a_name, b_name, cand_name in (("dbi.json", "dbs.json", "cand_db.json"), ("bsim1_a.json", "bsim1_b.json", "cand_bsim1.json")):
        a, cond_a = live_fixture(a_name)
        b, _ = live_fixture(b_name)
        cand = load_candidate(fixture_file(cand_name), cond_a)
        plain = check_forward_sim(a, b, cand)
        live = check_live_forward_sim(a, cond_a, b, [], cand)
        assert live.verdict == plain.verdict
        for clause, status in plain.clauses.items():
            assert live.clauses[clause.replace("fwd", "live-fwd")] == status


def test_silent_sets(live_fixture, fixture_file):
    chain, cond = live_fixture("chain.json")
    collapsed, _ = live_fixture("chain_collapsed.json")
    cand = load_candidate(fixture_file("cand_chain.json"), cond)
    always = always_silent_transitions(chain, collapsed, cand)
    sometimes = sometimes_silent_transitions(chain, collapsed, cand)
    assert {(s, a.name, t) for s, a, t in always.steps} == {("s1", "t", "s2")}
    assert always.steps <= sometimes.steps
    assert always.tag == "bounded"
    assert sometimes.tag == "exact"


def test_passing_forward_instances_have_live_inclusion():
    rng = random.Random(11)
    checked = 0
    for _ in range(30):
        inst = random_live_instance(rng, max_states=4, max_actions=3, max_pairs=2)
        rep = check_live_forward_sim(inst.a, inst.concrete, inst.b, inst.abstract, inst.candidate)
        if not rep.passed:
            continue
        checked += 1
        verdict = live_trace_inclusion(inst.a, inst.concrete, inst.b, inst.abstract)
        assert verdict.counterexample is None, (inst.origin, rep.to_json())
    assert checked > 0
