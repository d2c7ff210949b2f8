############################################################
# CHANGELOG:
# - [2026-10-11] agt116 {author=agent} {reason: types du cas d'étude ESDS (opérations, étiquettes, ordres, valset, codec)}
# - Impact: socle partagé par les composants, l'ordonnanceur, les moniteurs et les vérificateurs F/G
# - Tests: tests/test_esds_types.py (valset préfixe forcé / non ordonné / strict stabilisé, cap, étiquettes, codec)
# - Notes: objet de données = ensemble croissant (add/read); valset énumère les ensembles clos vers le bas
############################################################
"""
Types ESDS.

- `Op`: descripteur d'opération (id, client, prev, strict, add/read);
- `Label`: étiquette (compteur, réplique) avec ∞, ordre lexicographique;
- ordres stricts sur les identifiants (clôture, acyclicité, CSC) via networkx;
- `valset(x, ops, ≺)`: valeurs compatibles, énumération bornée (BoundExceeded au-delà du cap);
- codec JSON étiqueté (`$set`, `$tuple`, `$label`, `$type`) et empreintes sha1.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Type

import networkx as nx

from logger_config import logger
from src.automata import ActionKind, ActionLabel, BoundExceeded, ModelError, SchemaError, sort_key
from src.config import get_settings

OpId = str
Value = FrozenSet[str]
Order = FrozenSet[Tuple[OpId, OpId]]


@dataclass(frozen=True)
class Op:
    id: OpId
    client: str
    prev: FrozenSet[OpId] = frozenset()
    strict: bool = False
    kind: str = "read"
    element: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("add", "read"):
            raise ModelError(f"opération {self.id}: type inconnu {self.kind!r}")
        if self.kind == "add" and not self.element:
            raise ModelError(f"opération {self.id}: add sans élément")

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "client": self.client,
            "prev": sorted(self.prev),
            "strict": self.strict,
            "kind": self.kind,
            "element": self.element,
        }


OpTable = Mapping[OpId, Op]


@dataclass(frozen=True, order=True)
class Label:
    """(compteur, réplique); `inf` en tête pour que ∞ domine toute étiquette finie."""

    inf: bool
    counter: int = 0
    replica: str = ""

    @classmethod
    def of(cls, counter: int, replica: str) -> "Label":
        return cls(False, counter, replica)

    def __str__(self) -> str:
        return "∞" if self.inf else f"{self.counter}.{self.replica}"


INF = Label(True)

LabelMap = Tuple[Tuple[OpId, Label], ...]


def label_of(labels: LabelMap, op_id: OpId) -> Label:
    for k, v in labels:
        if k == op_id:
            return v
    return INF


def label_set(labels: LabelMap, op_id: OpId, value: Label) -> LabelMap:
    out = dict(labels)
    out[op_id] = value
    return tuple(sorted(out.items()))


def label_min(a: LabelMap, b: LabelMap) -> LabelMap:
    """Minimum point par point (∞ absent des tables)."""
    out = dict(a)
    for k, v in b:
        if v < out.get(k, INF):
            out[k] = v
    return tuple(sorted(out.items()))


def label_order(labels: LabelMap) -> Order:
    """lc = {(id, id′) : label(id) < label(id′)} restreint aux identifiants étiquetés."""
    items = [(k, v) for k, v in labels if not v.inf]
    return frozenset((a, b) for a, la in items for b, lb in items if la < lb)


# --- ordres stricts ---

def order_closure(pairs: Iterable[Tuple[OpId, OpId]]) -> Order:
    graph = nx.DiGraph()
    graph.add_edges_from(pairs)
    return frozenset(nx.transitive_closure(graph, reflexive=False).edges)


def is_strict_order(pairs: Iterable[Tuple[OpId, OpId]]) -> bool:
    graph = nx.DiGraph()
    graph.add_edges_from(pairs)
    return nx.is_directed_acyclic_graph(graph)


def csc(ops: Iterable[Op]) -> Order:
    """Contraintes client: {(y, x) : y ∈ x.prev}."""
    return frozenset((p, x.id) for x in ops for p in x.prev)


def predecessors(order: Order, x: OpId) -> FrozenSet[OpId]:
    return frozenset(a for a, b in order if b == x)


def successors(order: Order, x: OpId) -> FrozenSet[OpId]:
    return frozenset(b for a, b in order if a == x)


def comparable(order: Order, a: OpId, b: OpId) -> bool:
    return a == b or (a, b) in order or (b, a) in order


def totally_orders(order: Order, items: Iterable[OpId]) -> bool:
    items = sorted(items)
    return all(comparable(order, a, b) for i, a in enumerate(items) for b in items[i + 1 :])


def linear_extension(order: Order, items: Iterable[OpId]) -> List[OpId]:
    graph = nx.DiGraph()
    items = list(items)
    graph.add_nodes_from(items)
    graph.add_edges_from((a, b) for a, b in order if a in graph and b in graph)
    return list(nx.lexicographical_topological_sort(graph))


def first_unordered(order: Order, items: Iterable[OpId]) -> Optional[Tuple[OpId, OpId]]:
    items = sorted(items)
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if not comparable(order, a, b):
                return a, b
    return None


# --- valset ---

def apply_ops(ops: Iterable[OpId], table: OpTable) -> Value:
    """Ensemble croissant: l'état est l'union des éléments ajoutés."""
    return frozenset(table[o].element for o in ops if table[o].kind == "add")


def valset(x: OpId, ops: Iterable[OpId], order: Iterable[Tuple[OpId, OpId]], table: OpTable, cap: Optional[int] = None) -> FrozenSet[Value]:
    """{apply(S ∪ {x}) : S clos vers le bas, {y ≺ x} ⊆ S ⊆ ops ∖ ({x} ∪ {y : x ≺ y})}."""
    ops = frozenset(ops)
    if x not in ops:
        raise ModelError(f"valset: {x} ∉ ops")
    cap = cap if cap is not None else get_settings().valset_cap
    closed = order_closure((a, b) for a, b in order if a in ops and b in ops)
    below = predecessors(closed, x)
    above = successors(closed, x)
    free = linear_extension(closed, ops - below - above - {x})
    values: Set[Value] = set()
    count = 0

    def walk(i: int, chosen: FrozenSet[OpId]) -> None:
        nonlocal count
        if i == len(free):
            count += 1
            if count > cap:
                raise BoundExceeded(f"valset({x}): plus de {cap} ensembles candidats")
            values.add(apply_ops(below | chosen | {x}, table))
            return
        y = free[i]
        walk(i + 1, chosen)
        if predecessors(closed, y) <= below | chosen:
            walk(i + 1, chosen | {y})

    walk(0, frozenset())
    logger.debug("valset(%s): %d ensembles, %d valeurs", x, count, len(values))
    return frozenset(values)


# --- codec JSON étiqueté ---

_TYPES: Dict[str, Type] = {}


def codec_type(cls: Type) -> Type:
    """Enregistre une dataclass gelée pour le codec (`$type`)."""
    _TYPES[cls.__name__] = cls
    return cls


codec_type(Op)


def to_jsonable(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Label):
        return {"$label": [obj.inf, obj.counter, obj.replica]}
    if isinstance(obj, ActionLabel):
        return {"$action": [obj.name, obj.kind.value, to_jsonable(obj.payload)]}
    if isinstance(obj, (frozenset, set)):
        return {"$set": [to_jsonable(v) for v in sorted(obj, key=sort_key)]}
    if isinstance(obj, tuple):
        return {"$tuple": [to_jsonable(v) for v in obj]}
    if isinstance(obj, list):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj) and type(obj).__name__ in _TYPES:
        return {"$type": type(obj).__name__, "fields": {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    raise ModelError(f"codec: type non sérialisable {type(obj).__name__}")


def from_jsonable(obj: Any, pointer: str = "") -> Any:
    if isinstance(obj, list):
        return [from_jsonable(v, f"{pointer}/{i}") for i, v in enumerate(obj)]
    if not isinstance(obj, dict):
        return obj
    if "$label" in obj:
        inf, counter, replica = obj["$label"]
        return Label(bool(inf), int(counter), str(replica))
    if "$action" in obj:
        name, kind, payload = obj["$action"]
        return ActionLabel(name, ActionKind(kind), from_jsonable(payload, f"{pointer}/$action/2"))
    if "$set" in obj:
        return frozenset(from_jsonable(v, f"{pointer}/$set/{i}") for i, v in enumerate(obj["$set"]))
    if "$tuple" in obj:
        return tuple(from_jsonable(v, f"{pointer}/$tuple/{i}") for i, v in enumerate(obj["$tuple"]))
    if "$type" in obj:
        cls = _TYPES.get(obj["$type"])
        if cls is None:
            raise SchemaError(f"type inconnu {obj['$type']!r}", f"{pointer}/$type")
        fields = {k: from_jsonable(v, f"{pointer}/fields/{k}") for k, v in obj.get("fields", {}).items()}
        return cls(**fields)
    return {k: from_jsonable(v, f"{pointer}/{k}") for k, v in obj.items()}


def canonical_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha1_hex(s: str) -> str:
    """Empreinte stable (hex)."""
    return hashlib.sha1(s.encode("utf-8")).hexdigest()


def digest(obj: Any) -> str:
    return sha1_hex(canonical_json(obj))


# --- configuration d'un run ---

SYSTEMS = ("alg", "esds2", "esds1")


@dataclass(frozen=True)
class EsdsConfig:
    clients: Tuple[str, ...]
    replicas: Tuple[str, ...]
    ops: Tuple[Op, ...]
    seed: int = 0
    steps: int = 2000
    age_max: int = 25
    epoch: int = 12
    snapshot_interval: int = 50
    system: str = "alg"
    lossy_frontend: FrozenSet[OpId] = frozenset()
    workload: Tuple[OpId, ...] = ()

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise SchemaError(f"système inconnu {self.system!r}", "/system")
        ids = [o.id for o in self.ops]
        if len(set(ids)) != len(ids):
            raise SchemaError("identifiants d'opérations dupliqués", "/ops")
        known = set(ids)
        for i, o in enumerate(self.ops):
            if o.client not in self.clients:
                raise SchemaError(f"client inconnu {o.client!r}", f"/ops/{i}/client")
            if not o.prev <= known:
                raise SchemaError(f"prev inconnu {sorted(o.prev - known)}", f"/ops/{i}/prev")
        if not is_strict_order(csc(self.ops)):
            raise SchemaError("prev cyclique", "/ops")

    @property
    def table(self) -> Dict[OpId, Op]:
        return {o.id: o for o in self.ops}

    def with_overrides(self, **kwargs: Any) -> "EsdsConfig":
        return dataclasses.replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def longest_prev_chain(self) -> int:
        graph = nx.DiGraph()
        graph.add_nodes_from(o.id for o in self.ops)
        graph.add_edges_from(csc(self.ops))
        return nx.dag_longest_path_length(graph) if graph.number_of_nodes() else 0

    def to_json(self) -> Dict[str, Any]:
        return {
            "clients": list(self.clients),
            "replicas": list(self.replicas),
            "ops": [o.to_json() for o in self.ops],
            "seed": self.seed,
            "steps": self.steps,
            "age_max": self.age_max,
            "epoch": self.epoch,
            "snapshot_interval": self.snapshot_interval,
            "system": self.system,
            "lossy_frontend": sorted(self.lossy_frontend),
            "workload": list(self.workload),
        }


def _require(raw: Mapping[str, Any], key: str, kind: type, pointer: str) -> Any:
    if key not in raw:
        raise SchemaError(f"champ manquant {key!r}", f"{pointer}/{key}")
    if not isinstance(raw[key], kind):
        raise SchemaError(f"type invalide pour {key!r}", f"{pointer}/{key}")
    return raw[key]


def op_from_json(raw: Mapping[str, Any], pointer: str) -> Op:
    if not isinstance(raw, Mapping):
        raise SchemaError("opération attendue (objet)", pointer)
    try:
        return Op(
            id=str(_require(raw, "id", str, pointer)),
            client=str(_require(raw, "client", str, pointer)),
            prev=frozenset(raw.get("prev", [])),
            strict=bool(raw.get("strict", False)),
            kind=str(raw.get("kind", "add" if raw.get("element") else "read")),
            element=raw.get("element"),
        )
    except ModelError as e:
        raise SchemaError(str(e), pointer) from e


def config_from_json(raw: Mapping[str, Any]) -> EsdsConfig:
    settings = get_settings()
    clients = _require(raw, "clients", list, "")
    replicas = _require(raw, "replicas", list, "")
    ops = _require(raw, "ops", list, "")
    if len(replicas) < 1:
        raise SchemaError("au moins une réplique", "/replicas")
    return EsdsConfig(
        clients=tuple(str(c) for c in clients),
        replicas=tuple(str(r) for r in replicas),
        ops=tuple(op_from_json(o, f"/ops/{i}") for i, o in enumerate(ops)),
        seed=int(raw.get("seed", 0)),
        steps=int(raw.get("steps", 2000)),
        age_max=int(raw.get("age_max", settings.age_max)),
        epoch=int(raw.get("epoch", settings.epoch)),
        snapshot_interval=int(raw.get("snapshot_interval", 50)),
        system=str(raw.get("system", "alg")),
        lossy_frontend=frozenset(raw.get("lossy_frontend", [])),
        workload=tuple(raw.get("workload", [])),
    )


def load_config(path: Path | str) -> EsdsConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"JSON invalide ({e.msg})", "/") from e
    cfg = config_from_json(raw)
    logger.info("config ESDS %s: %d clients, %d répliques, %d ops", path.name, len(cfg.clients), len(cfg.replicas), len(cfg.ops))
    return cfg
