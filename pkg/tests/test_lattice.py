import pytest

from src.automata import ExecutionFragment, Lasso, ModelError
from src.formats import load_lattice
from src.lattice import (
    SAMPLED_LABEL,
    PairLattice,
    certify_lattice,
    chain_obligation,
    check_lattice_sampled,
    check_lattice_structure,
)
from tests.helpers import ext, pair


def _diamond() -> PairLattice:
    pairs = [pair("b", ["s0"], ["s1", "s2"]), pair("l", ["s1"], ["s3"]), pair("r", ["s2"], ["s3"]), pair("t", ["s3"], ["s3"])]
    return PairLattice.build(pairs, [("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")], top="t", bottom="b", name="diamond")


def test_chain_lattice_structure(fixture_file):
    lattice = load_lattice(fixture_file("chain_lattice.json"))
    rep = check_lattice_structure(lattice)
    assert rep.ok
    assert [p.id for p in lattice.succ("p01")] == ["p12"]
    assert lattice.succ("p12") == []


def test_chain_lattice_certified(live_fixture, fixture_file):
    chain, cond = live_fixture("chain.json")
    cert = certify_lattice(chain, cond, load_lattice(fixture_file("chain_lattice.json")))
    assert cert.certified
    assert cert.derived.id == "p01~>p12"
    assert cert.derived_verdict.member
    assert set(cert.semantic) == {"p01", "p12"}
    assert cert.to_json()["certified"] is True


def test_clause4_violation_reported_with_witness():
    lattice = PairLattice.build([pair("p01", ["s0"], ["s1"]), pair("p2", ["s2"], ["s0"])], [("p01", "p2")], top="p2", bottom="p01")
    rep = check_lattice_structure(lattice)
    assert rep.clauses["clause 4"] is False
    assert rep.violations[0]["element"] == "p01"
    assert rep.violations[0]["witness"] == "s1"


def test_clause4_break_refuses_certification(live_fixture):
    chain, cond = live_fixture("chain.json")
    lattice = PairLattice.build([pair("p01", ["s0"], ["s1"]), pair("p2", ["s2"], ["s0"])], [("p01", "p2")], top="p2", bottom="p01")
    cert = certify_lattice(chain, cond, lattice)
    assert not cert.certified
    assert cert.refused == "structure"
    assert cert.derived is None


def test_cyclic_order_breaks_clause2():
    lattice = PairLattice.build([pair("a", ["s0"], ["s1"]), pair("b", ["s1"], ["s0"])], [("a", "b"), ("b", "a")], top="b", bottom="a")
    rep = check_lattice_structure(lattice)
    assert rep.clauses["clause 2"] is False
    assert not rep.ok


def test_singleton_lattice():
    p = pair("only", ["s0"], ["s1"])
    lattice = PairLattice.build([p], [], top="only", bottom="only")
    assert check_lattice_structure(lattice).ok
    assert lattice.derived_pair() == p


def test_diamond_succ_skips_transitive_edges():
    lattice = _diamond()
    assert lattice.below("b", "t")
    assert [p.id for p in lattice.succ("b")] == ["l", "r"]
    assert [p.id for p in lattice.succ("l")] == ["t"]
    assert check_lattice_structure(lattice).ok
    assert lattice.derived_pair().id == "b~>t"


def test_unknown_element_rejected():
    with pytest.raises(ModelError):
        PairLattice.build([pair("a", ["s0"], [])], [("a", "z")], top="a", bottom="a")
    with pytest.raises(ModelError):
        _diamond().succ("z")


def test_element_outside_closure_refused(live_fixture):
    chain, cond = live_fixture("chain.json")
    lattice = PairLattice.build([pair("never-s1", ["s1"], [])], [], top="never-s1", bottom="never-s1")
    cert = certify_lattice(chain, cond, lattice)
    assert cert.refused == "never-s1"
    assert cert.semantic["never-s1"].witness is not None


def test_chain_obligation(fixture_file):
    lattice = load_lattice(fixture_file("chain_lattice.json"))
    full = Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0", "s1", "s2", "s0"), (ext("a"), ext("b"), ext("c"))))
    stuck = Lasso(ExecutionFragment(("s0",)), ExecutionFragment(("s0", "s0"), (ext("x"),)))
    quiet = Lasso(ExecutionFragment(("s1",)), ExecutionFragment(("s1", "s1"), (ext("x"),)))
    assert chain_obligation(full, lattice)
    assert not chain_obligation(stuck, lattice)
    assert chain_obligation(quiet, lattice)


def test_sampled_check_and_removal(fixture_file):
    lattice = load_lattice(fixture_file("chain_lattice.json"))
    rep = check_lattice_sampled(lattice, ["s0", "s1", "s2"])
    assert rep.ok
    assert rep.label == SAMPLED_LABEL
    broken = check_lattice_sampled(lattice.without("p12"), ["s0", "s1", "s2"])
    assert not broken.ok
    assert broken.violations[0]["element"] == "p01"
    assert broken.violations[0]["state_index"] == 1
    assert list(broken.to_frame().columns) == ["lattice", "element", "state_index", "detail"]


def test_sampled_check_rejects_empty_sample(fixture_file):
    with pytest.raises(ModelError):
        check_lattice_sampled(load_lattice(fixture_file("chain_lattice.json")), [])


def test_lattice_dot_has_succ_edges():
    dot = _diamond().to_dot()
    assert "b -> l" in dot and "l -> t" in dot
    assert "b -> t" not in dot
