import pytest

from src.automata import ActionKind, ActionLabel, BoundExceeded, ModelError, SchemaError
from src.esds_types import (
    INF,
    Label,
    Op,
    config_from_json,
    csc,
    digest,
    first_unordered,
    from_jsonable,
    is_strict_order,
    label_min,
    label_of,
    label_order,
    label_set,
    linear_extension,
    load_config,
    order_closure,
    to_jsonable,
    totally_orders,
    valset,
)

TABLE = {
    "x1": Op("x1", "c1", kind="add", element="a"),
    "x2": Op("x2", "c1", frozenset(["x1"]), kind="add", element="b"),
    "x3": Op("x3", "c2", strict=True),
    "x4": Op("x4", "c2", kind="add", element="c"),
}


def _set(*items: str) -> frozenset:
    return frozenset(items)


def test_valset_forced_prefix():
    assert valset("x2", ["x1", "x2"], [("x1", "x2")], TABLE) == {_set("a", "b")}


def test_valset_unordered_predecessors():
    values = valset("x3", ["x1", "x3", "x4"], [], TABLE)
    assert values == {_set(), _set("a"), _set("c"), _set("a", "c")}


def test_valset_excludes_successors():
    assert valset("x3", ["x1", "x3"], [("x3", "x1")], TABLE) == {_set()}


def test_valset_only_down_closed_sets():
    values = valset("x4", ["x1", "x2", "x4"], [("x1", "x2")], TABLE)
    assert values == {_set("c"), _set("a", "c"), _set("a", "b", "c")}
    assert _set("b", "c") not in values


def test_valset_cap_raises():
    with pytest.raises(BoundExceeded):
        valset("x3", ["x1", "x3", "x4"], [], TABLE, cap=2)


def test_valset_requires_member():
    with pytest.raises(ModelError):
        valset("x3", ["x1"], [], TABLE)


def test_add_without_element_rejected():
    with pytest.raises(ModelError):
        Op("bad", "c1", kind="add")


def test_labels_order_and_infinity():
    a, b, c = Label.of(1, "r1"), Label.of(1, "r2"), Label.of(2, "r1")
    assert a < b < c < INF
    assert str(a) == "1.r1" and str(INF) == "∞"
    labels = label_set(label_set((), "x2", c), "x1", a)
    assert label_of(labels, "x1") == a
    assert label_of(labels, "x9") == INF
    assert label_order(labels) == {("x1", "x2")}


def test_label_min_pointwise():
    left = (("x1", Label.of(3, "r1")), ("x2", Label.of(1, "r1")))
    right = (("x1", Label.of(2, "r2")), ("x3", Label.of(5, "r2")))
    merged = dict(label_min(left, right))
    assert merged == {"x1": Label.of(2, "r2"), "x2": Label.of(1, "r1"), "x3": Label.of(5, "r2")}


def test_order_helpers():
    closed = order_closure([("x1", "x2"), ("x2", "x6")])
    assert ("x1", "x6") in closed
    assert is_strict_order(closed)
    assert not is_strict_order([("x1", "x2"), ("x2", "x1")])
    assert csc(TABLE.values()) == {("x1", "x2")}
    assert linear_extension(closed | {("x4", "x1")}, ["x6", "x2", "x1", "x4"]) == ["x4", "x1", "x2", "x6"]
    assert totally_orders(closed, ["x1", "x2", "x6"])
    assert first_unordered(closed, ["x1", "x2", "x4"]) == ("x1", "x4")


def test_codec_restores_nested_values():
    obj = {
        "labels": ((("x1", Label.of(1, "r1")),)),
        "ops": frozenset(["x2", "x1"]),
        "op": TABLE["x2"],
        "action": ActionLabel("do_it", ActionKind.INTERNAL, ("r1", "x1", Label.of(1, "r1"))),
        "inf": INF,
    }
    assert from_jsonable(to_jsonable(obj)) == obj


def test_digest_ignores_set_order():
    assert digest(frozenset(["b", "a"])) == digest(frozenset(["a", "b"]))
    assert digest(("a", "b")) != digest(("b", "a"))


def test_codec_unknown_type_pointer():
    with pytest.raises(SchemaError) as err:
        from_jsonable({"state": {"$type": "Ghost", "fields": {}}})
    assert err.value.pointer == "/state/$type"


def test_load_small_config(fixture_file):
    cfg = load_config(fixture_file("esds_small.json"))
    assert cfg.clients == ("c1", "c2")
    assert len(cfg.ops) == 6
    assert cfg.table["x3"].strict
    assert cfg.longest_prev_chain() == 2
    assert cfg.with_overrides(seed=9, steps=None).seed == 9
    assert cfg.with_overrides(steps=None).steps == 4000


@pytest.mark.parametrize(
    "raw, pointer",
    [
        ({"replicas": ["r1"], "ops": []}, "/clients"),
        ({"clients": ["c1"], "replicas": [], "ops": []}, "/replicas"),
        ({"clients": ["c1"], "replicas": ["r1"], "ops": [{"id": "x1", "client": "c9"}]}, "/ops/0/client"),
        ({"clients": ["c1"], "replicas": ["r1"], "ops": [{"id": "x1", "client": "c1", "prev": ["x7"]}]}, "/ops/0/prev"),
        ({"clients": ["c1"], "replicas": ["r1"], "ops": [{"id": "x1", "client": "c1", "kind": "add"}]}, "/ops/0"),
        ({"clients": ["c1"], "replicas": ["r1"], "ops": [], "system": "esds9"}, "/system"),
    ],
)
def test_config_schema_pointers(raw, pointer):
    with pytest.raises(SchemaError) as err:
        config_from_json(raw)
    assert err.value.pointer == pointer


def test_cyclic_prev_rejected():
    raw = {
        "clients": ["c1"],
        "replicas": ["r1"],
        "ops": [{"id": "x1", "client": "c1", "prev": ["x2"]}, {"id": "x2", "client": "c1", "prev": ["x1"]}],
    }
    with pytest.raises(SchemaError):
        config_from_json(raw)
