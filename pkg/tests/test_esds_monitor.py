import pytest

from src.automata import ModelError
from src.esds_components import request
from src.esds_monitor import SURROGATE_LABEL, ObligationStatus, monitor_pairs, monitor_states
from src.esds_predicates import PredicateContext, alg_fairness_pairs, family_condition, spec_pairs
from src.esds_scheduler import ExecutionLog, run_fair_scheduler
from tests.helpers import pair, tiny_esds


def test_monitor_states_statuses():
    pairs = [pair("back", ["s1"], ["s0"]), pair("stuck", ["s0"], ["s9"]), pair("quiet", ["s9"], [])]
    rep = monitor_states(["s0", "s1", "s0"], pairs)
    assert rep.status_of("back") == ObligationStatus.DISCHARGED
    assert (rep.obligations[0].last_red, rep.obligations[0].green_at) == (1, 2)
    assert rep.status_of("stuck") == ObligationStatus.OUTSTANDING
    assert rep.status_of("quiet") == ObligationStatus.NEVER_RED
    assert rep.counts() == {"never-red": 1, "discharged": 1, "outstanding": 1}
    assert not rep.ok
    assert list(rep.to_frame().columns) == ["family", "pair", "status", "last_red", "green_at"]
    with pytest.raises(ModelError):
        rep.status_of("ghost")


def test_green_on_last_red_state_discharges():
    rep = monitor_states(["s0", "s1"], [pair("same", ["s1"], ["s1"])])
    assert rep.obligations[0].green_at == 1
    assert rep.ok


@pytest.mark.parametrize("family", ["M-I", "M-II", "L"])
def test_quiescent_run_discharges_everything(alg_log, family):
    rep = monitor_pairs(alg_log, family)
    assert rep.ok, rep.to_json()
    assert rep.quiescent
    assert rep.to_json()["label"] == SURROGATE_LABEL


def test_truncated_log_leaves_obligations():
    log = ExecutionLog.from_actions(tiny_esds(), [request("x1")])
    rep = monitor_pairs(log, "M-I")
    assert not rep.quiescent
    assert rep.status_of("req:x1") == ObligationStatus.OUTSTANDING
    assert rep.status_of("stab:x1") == ObligationStatus.OUTSTANDING
    assert rep.to_json()["outstanding"][0] == "req:x1"


def test_lossy_frontend_request_outstanding():
    log = run_fair_scheduler(tiny_esds(lossy_frontend=frozenset(["x1"]), steps=300))
    rep = monitor_pairs(log, "M-I")
    assert rep.status_of("req:x1") == ObligationStatus.OUTSTANDING
    assert rep.status_of("req:x2") == ObligationStatus.OUTSTANDING
    fairness = monitor_pairs(log, "L")
    assert fairness.status_of("respond:x1") == ObligationStatus.NEVER_RED


def test_family_errors(esds2_log, alg_log):
    with pytest.raises(ModelError):
        monitor_pairs(alg_log, "M-III")
    with pytest.raises(ModelError):
        monitor_pairs(esds2_log, "L")
    assert monitor_pairs(esds2_log, "M-II").family == "M-II"


def test_pair_families():
    ctx = PredicateContext.of(tiny_esds())
    assert [p.id for p in spec_pairs(ctx)] == ["req:x1", "stab:x1", "req:x2", "stab:x2"]
    ids = {p.id for p in alg_fairness_pairs(ctx)}
    assert {"deliver-req:x1@r1", "deliver-resp:x2@r2", "do_it:x1@r2", "respond:x2"} <= ids
    assert len(ids) == 2 * (3 * 2 + 1)
    assert len(family_condition(ctx, "M-I").pairs) == 4
    with pytest.raises(ModelError):
        ctx.op("x9")
