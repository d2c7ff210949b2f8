from src.automata import ExecutionFragment, Lasso, StatePredicate, parse_action
from src.liveness import (
    ComplementedPair,
    LiveAutomaton,
    LivenessCondition,
    PairFamily,
    buchi_to_pairs,
    fault_tolerance_pair,
    gen_buchi_to_pairs,
    is_live,
    same_pair_on,
    satisfies_pair,
)
from src.streett import enumerate_live_lassos
from tests.helpers import ext, internal, pair


def t1_lasso() -> Lasso:
    return Lasso(ExecutionFragment(("s0", "s1"), (ext("a"),)), ExecutionFragment(("s1", "s1"), (internal("t"),)))


def cy3_lasso() -> Lasso:
    return Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0", "s1", "s2", "s0"), (internal("t"),) * 3))


def test_satisfies_pair_t1():
    assert satisfies_pair(t1_lasso(), pair("p", ["s1"], ["s1"]))
    assert not satisfies_pair(t1_lasso(), pair("p", ["s1"], ["s0"]))


def test_red_outside_cycle_is_vacuous():
    assert satisfies_pair(t1_lasso(), pair("p", ["s0"], []))


def test_is_live_empty_condition():
    assert is_live(t1_lasso(), LivenessCondition())
    assert is_live(t1_lasso(), [])


def test_is_live_cy3_two_pairs():
    cond = LivenessCondition.of([pair("p01", ["s0"], ["s1"]), pair("p12", ["s1"], ["s2"])])
    assert is_live(cy3_lasso(), cond)
    assert not is_live(cy3_lasso(), cond.plus(pair("bad", ["s2"], [])))


def test_lost_query_lasso_is_live(live_fixture):
    _, cond = live_fixture("dbi.json")
    request = parse_action("request(q)")
    lost = Lasso(ExecutionFragment(("e_e",)), ExecutionFragment(("e_e", "e_e"), (request,)))
    assert is_live(lost, cond)


def test_pair_family_instantiation():
    fam = PairFamily("visit", lambda s: pair(f"visit:{s}", [s], [s]), indices=lambda states: states)
    cond = LivenessCondition((), (fam,))
    pairs = cond.instantiate(["s1", "s0"])
    assert [p.id for p in pairs] == ["visit:s0", "visit:s1"]
    assert not cond.is_empty()


def test_buchi_accepts_cycles_through_green(live_fixture):
    a, _ = live_fixture("cy3.json")
    cond = buchi_to_pairs(["s2"])
    assert len(cond) == 1
    assert is_live(cy3_lasso(), cond)
    assert not is_live(t1_lasso(), buchi_to_pairs(["s0"]))
    lassos = enumerate_live_lassos(a, cond, 3, 3)
    assert lassos and all("s2" in lasso.cycle_states() for lasso in lassos)


def test_gen_buchi_matches_direct_cycle_check(live_fixture):
    for name in ("t1.json", "cy3.json", "dbs.json", "dbi.json"):
        a, _ = live_fixture(name)
        states = sorted(map(str, a.states))
        greens = [[states[0]], [states[-1]]]
        every = enumerate_live_lassos(a, [], 3, 3)
        for lasso in every:
            direct = all(any(s in g for s in lasso.cycle.states) for g in greens)
            assert is_live(lasso, gen_buchi_to_pairs(greens)) == direct


def test_gen_buchi_degenerate_cases():
    assert gen_buchi_to_pairs([]).is_empty()
    assert is_live(cy3_lasso(), gen_buchi_to_pairs([]))
    assert not is_live(cy3_lasso(), gen_buchi_to_pairs([["s9"]]))
    assert len(gen_buchi_to_pairs([["s1"], ["s2"]])) == 2


def test_fault_tolerance_pair():
    p = fault_tolerance_pair(StatePredicate.of(["s2"]), StatePredicate.of(["s1"]))
    faulty = Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0", "s1", "s0"), (ext("fail"), ext("fail"))))
    stuck = Lasso(ExecutionFragment(("s0", "s2"), (ext("work"),)), ExecutionFragment(("s2", "s2"), (ext("work"),)))
    assert satisfies_pair(faulty, p)
    assert satisfies_pair(stuck, p)
    assert p.red.name == "true"


def test_same_pair_on_universe():
    p = ComplementedPair("p", StatePredicate.of(["s0"]), StatePredicate.where("is-s1", lambda s: s == "s1"))
    q = pair("q", ["s0"], ["s1"])
    assert same_pair_on(p, q, ["s0", "s1", "s2"])
    assert not same_pair_on(p, pair("r", ["s0"], ["s2"]), ["s0", "s1", "s2"])


def test_live_automaton_machine_closure(live_fixture):
    a, cond = live_fixture("dbs.json")
    live = LiveAutomaton(a, cond)
    assert live.check() == "holds"
    assert [p.id for p in live.pairs()] == ["req:q"]
