import pytest

from src.automata import ModelError
from src.esds_components import (
    Channel,
    EsdsSpec,
    Frontend,
    Replica,
    Users,
    add_constraints,
    build_component,
    build_system,
    calculate,
    compose_parallel,
    do_it,
    enter,
    receive,
    req_msg,
    request,
    resp_msg,
    response,
    send,
    stabilize,
)
from src.esds_types import INF, EsdsConfig, Label, Op

TABLE = {
    "x1": Op("x1", "c1", kind="add", element="a"),
    "x2": Op("x2", "c1", frozenset(["x1"]), kind="add", element="b"),
    "x3": Op("x3", "c2", strict=True),
    "x4": Op("x4", "c2", kind="add", element="c"),
}


def _entered(spec: EsdsSpec, *ids: str):
    state = spec.initial()
    for x in ids:
        state = spec.apply(state, request(x))
        action = enter(x, spec.entry_order(state, x))
        assert spec.precondition(state, action)
        state = spec.apply(state, action)
    return state


def test_users_request_respects_prev():
    users = Users(TABLE)
    state = users.initial()
    assert not users.precondition(state, request("x2"))
    state = users.apply(state, request("x1"))
    assert users.precondition(state, request("x2"))
    assert not users.precondition(state, request("x1"))
    assert users.precondition(state, response("x1", frozenset(["a"])))


def test_users_scripted_workload():
    users = Users(TABLE, workload=("x4", "x1"))
    state = users.initial()
    assert list(users.local_actions(state)) == [request("x4")]
    assert not users.precondition(state, request("x1"))


def test_stabilize_needs_total_order():
    spec = EsdsSpec(TABLE, "I")
    state = _entered(spec, "x1", "x4")
    assert not spec.precondition(state, stabilize("x1"))
    state = spec.apply(state, add_constraints(frozenset([("x1", "x4")])))
    assert spec.precondition(state, stabilize("x1"))
    assert not spec.precondition(state, stabilize("x4"))


def test_stabilize_variants_differ():
    one, two = EsdsSpec(TABLE, "I"), EsdsSpec(TABLE, "II")
    po = frozenset([("x1", "x4")])
    s1 = one.apply(_entered(one, "x1", "x4"), add_constraints(po))
    s2 = two.apply(_entered(two, "x1", "x4"), add_constraints(po))
    assert two.precondition(s2, stabilize("x4"))
    assert not one.precondition(s1, stabilize("x4"))
    s1 = one.apply(s1, stabilize("x1"))
    s2 = two.apply(s2, stabilize("x1"))
    assert not one.precondition(s1, stabilize("x1"))
    assert two.precondition(s2, stabilize("x1"))


def test_enter_again_only_in_second_variant():
    one, two = EsdsSpec(TABLE, "I"), EsdsSpec(TABLE, "II")
    s1, s2 = _entered(one, "x1"), _entered(two, "x1")
    assert not one.precondition(s1, enter("x1", s1.po))
    assert two.precondition(s2, enter("x1", s2.po))


def test_enter_keeps_prev_constraints():
    spec = EsdsSpec(TABLE, "I")
    state = _entered(spec, "x1")
    state = spec.apply(state, request("x2"))
    assert spec.entry_order(state, "x2") == {("x1", "x2")}
    assert not spec.precondition(state, enter("x2", frozenset()))


def test_calculate_uses_valset_and_strictness():
    spec = EsdsSpec(TABLE, "I")
    state = _entered(spec, "x1", "x3")
    assert spec.precondition(state, calculate("x1", frozenset(["a"])))
    assert not spec.precondition(state, calculate("x1", frozenset(["b"])))
    assert not any(a.name == "calculate" and a.payload[0] == "x3" for a in spec.local_actions(state))
    state = spec.apply(state, calculate("x1", frozenset(["a"])))
    assert spec.precondition(state, response("x1", frozenset(["a"])))
    state = spec.apply(state, response("x1", frozenset(["a"])))
    assert "x1" not in state.wait and not state.rept


def test_replica_do_it_labels_increase():
    rep = Replica("r1", TABLE, ["c1", "c2"], ["r1", "r2"])
    state = rep.apply(rep.initial(), receive("c1", "r1", req_msg("x1")))
    first = do_it("r1", "x1", Label.of(1, "r1"))
    assert first in list(rep.local_actions(state))
    assert not rep.precondition(state, do_it("r1", "x1", INF))
    state = rep.apply(state, first)
    answer = send("r1", "c1", resp_msg("x1", frozenset(["a"])))
    assert rep.precondition(state, answer)
    assert not rep.precondition(state, send("r1", "c2", resp_msg("x1", frozenset(["a"]))))
    state = rep.apply(state, receive("c1", "r1", req_msg("x4")))
    assert rep.next_label(state) == Label.of(2, "r1")


def test_replica_gossip_merge_stabilizes():
    r1 = Replica("r1", TABLE, ["c1"], ["r1", "r2"])
    r2 = Replica("r2", TABLE, ["c1"], ["r1", "r2"])
    s1 = r1.apply(r1.apply(r1.initial(), receive("c1", "r1", req_msg("x1"))), do_it("r1", "x1", Label.of(1, "r1")))
    s2 = r2.apply(r2.initial(), receive("r1", "r2", r1.gossip(s1)))
    assert "x1" in s2.done_at("r2")
    s1 = r1.apply(s1, receive("r2", "r1", r2.gossip(s2)))
    assert "x1" in r1.stable_everywhere(s1)


def test_channel_fifo_offer_multiset_enable():
    ch = Channel("c1", "r1")
    state = ch.apply(ch.apply(ch.initial(), send("c1", "r1", req_msg("x1"))), send("c1", "r1", req_msg("x4")))
    assert list(ch.local_actions(state)) == [receive("c1", "r1", req_msg("x1"))]
    assert ch.precondition(state, receive("c1", "r1", req_msg("x4")))
    state = ch.apply(state, receive("c1", "r1", req_msg("x4")))
    assert state.queue == (req_msg("x1"),)


def test_lossy_frontend_never_relays():
    lossy = Frontend("c1", TABLE, ["r1"], lossy=["x1"])
    plain = Frontend("c1", TABLE, ["r1"])
    s_lossy = lossy.apply(lossy.initial(), request("x1"))
    s_plain = plain.apply(plain.initial(), request("x1"))
    assert list(lossy.local_actions(s_lossy)) == []
    assert list(plain.local_actions(s_plain)) == [send("c1", "r1", req_msg("x1"))]


def test_composition_conflicts():
    with pytest.raises(ModelError):
        compose_parallel([EsdsSpec(TABLE, "I"), EsdsSpec(TABLE, "II")])
    with pytest.raises(ModelError):
        compose_parallel([Users(TABLE), Users(TABLE)])
    with pytest.raises(ModelError):
        build_component("oracle", {})
    combined = compose_parallel([Users(TABLE), EsdsSpec(TABLE, "II")])
    assert combined.external_names() == {"request", "response"}


def test_alg_system_hides_messages():
    cfg = EsdsConfig(clients=("c1",), replicas=("r1",), ops=(Op("x1", "c1", kind="add", element="a"),))
    system = build_system(cfg)
    assert system.external_names() == {"request", "response"}
    start = system.start_states()[0]
    (action, state), = [(a, t) for a, t in system.transitions(start)]
    assert action == request("x1")
    sends = [a for a, _ in system.transitions(state) if a.name == "send"]
    assert sends and all(a.is_internal for a in sends)
