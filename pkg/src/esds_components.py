############################################################
# CHANGELOG:
# - [2026-10-12] agt117 {author=agent} {reason: composants ESDS (Users, ESDS-I/II, Frontend, Replica, Channel), composition et masquage}
# - Impact: automates programmatiques précondition/effet; ESDS-Alg = composition à plat, send/receive masqués
# - Tests: tests/test_esds_components.py (request, do_it, stabilize I/II, composition, conflit de signature, masquage)
# - Notes: effets calculables sans précondition (rejeu de journaux forcés); rôles indépendants du kind de l'action
############################################################
"""
Composants du service de données ESDS.

Chaque composant est un `ProgrammaticAutomaton` avec une fonction `role(action)`
(INPUT / OUTPUT / INTERNAL / None) qui délimite sa signature par nom et par charge
utile (client, réplique, canal). Les entrées sont toujours activées.

Messages:
- requête: ("req", x)
- réponse: ("resp", x, v)
- gossip: ("gossip", R, D, L, S)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import ActionKind, ActionLabel, Automaton, ModelError, ProgrammaticAutomaton, State, sort_key
from src.esds_types import (
    INF,
    EsdsConfig,
    Label,
    LabelMap,
    Op,
    OpId,
    OpTable,
    Order,
    Value,
    codec_type,
    comparable,
    csc,
    first_unordered,
    is_strict_order,
    label_min,
    label_of,
    label_order,
    label_set,
    order_closure,
    predecessors,
    totally_orders,
    valset,
)
from src.transforms import hide_actions


class Role(str, Enum):
    INPUT = "input"
    OUTPUT = "output"
    INTERNAL = "internal"


# --- actions ---

def request(x: OpId) -> ActionLabel:
    return ActionLabel("request", ActionKind.EXTERNAL, (x,))


def response(x: OpId, v: Value) -> ActionLabel:
    return ActionLabel("response", ActionKind.EXTERNAL, (x, v))


def send(i: str, j: str, m: Tuple) -> ActionLabel:
    return ActionLabel("send", ActionKind.EXTERNAL, (i, j, m))


def receive(i: str, j: str, m: Tuple) -> ActionLabel:
    return ActionLabel("receive", ActionKind.EXTERNAL, (i, j, m))


def do_it(r: str, x: OpId, label: Label) -> ActionLabel:
    return ActionLabel("do_it", ActionKind.INTERNAL, (r, x, label))


def enter(x: OpId, new_po: Order) -> ActionLabel:
    return ActionLabel("enter", ActionKind.INTERNAL, (x, new_po))


def add_constraints(new_po: Order) -> ActionLabel:
    return ActionLabel("add_constraints", ActionKind.INTERNAL, (new_po,))


def stabilize(x: OpId) -> ActionLabel:
    return ActionLabel("stabilize", ActionKind.INTERNAL, (x,))


def calculate(x: OpId, v: Value) -> ActionLabel:
    return ActionLabel("calculate", ActionKind.INTERNAL, (x, v))


def req_msg(x: OpId) -> Tuple:
    return ("req", x)


def resp_msg(x: OpId, v: Value) -> Tuple:
    return ("resp", x, v)


def gossip_msg(rcvd: FrozenSet[OpId], done: FrozenSet[OpId], labels: LabelMap, stable: FrozenSet[OpId]) -> Tuple:
    return ("gossip", rcvd, done, labels, stable)


def msg_kind(action: ActionLabel) -> str:
    if action.name in ("send", "receive") and len(action.payload) == 3:
        return str(action.payload[2][0])
    return ""


def span(order: Order) -> FrozenSet[OpId]:
    return frozenset(a for a, _ in order) | frozenset(b for _, b in order)


# --- base ---

class Component(ProgrammaticAutomaton):
    """Composant à état unique initial; `apply` est l'effet (sans précondition)."""

    name: str = "component"
    families: FrozenSet[str] = frozenset()

    def role(self, action: ActionLabel) -> Optional[Role]:
        raise NotImplementedError

    def initial(self) -> Any:
        raise NotImplementedError

    def local_actions(self, state: Any) -> Iterable[ActionLabel]:
        raise NotImplementedError

    def enabled(self, state: Any, action: ActionLabel) -> bool:
        raise NotImplementedError

    def apply(self, state: Any, action: ActionLabel) -> Any:
        raise NotImplementedError

    def output_scopes(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset()

    def task_class(self, action: ActionLabel) -> Tuple[str, ...]:
        return (self.name, action.name)

    # ProgrammaticAutomaton
    def initial_states(self) -> Iterable[State]:
        return [self.initial()]

    def candidate_actions(self, state: State) -> Iterable[ActionLabel]:
        return self.local_actions(state)

    def precondition(self, state: State, action: ActionLabel) -> bool:
        role = self.role(action)
        if role is None:
            return False
        return role == Role.INPUT or self.enabled(state, action)

    def effects(self, state: State, action: ActionLabel) -> Iterable[State]:
        return [self.apply(state, action)]

    def external_names(self) -> FrozenSet[str]:
        return self.families


# --- Users ---

@codec_type
@dataclass(frozen=True)
class UsersState:
    requested: FrozenSet[OpId] = frozenset()
    responded: FrozenSet[OpId] = frozenset()


class Users(Component):
    name = "Users"
    families = frozenset({"request", "response"})

    def __init__(self, table: OpTable, workload: Sequence[OpId] = ()) -> None:
        self.table = dict(table)
        self.workload = tuple(workload)

    def role(self, action: ActionLabel) -> Optional[Role]:
        if action.name == "request" and action.payload[:1] and action.payload[0] in self.table:
            return Role.OUTPUT
        if action.name == "response" and action.payload[:1] and action.payload[0] in self.table:
            return Role.INPUT
        return None

    def initial(self) -> UsersState:
        return UsersState()

    def _next_scripted(self, state: UsersState) -> Optional[OpId]:
        for x in self.workload:
            if x not in state.requested:
                return x
        return None

    def local_actions(self, state: UsersState) -> Iterable[ActionLabel]:
        if self.workload:
            x = self._next_scripted(state)
            return [request(x)] if x is not None else []
        return [request(x) for x in sorted(self.table) if x not in state.requested]

    def enabled(self, state: UsersState, action: ActionLabel) -> bool:
        x = action.payload[0]
        if x in state.requested or not self.table[x].prev <= state.requested:
            return False
        return not self.workload or x == self._next_scripted(state)

    def apply(self, state: UsersState, action: ActionLabel) -> UsersState:
        x = action.payload[0]
        if action.name == "request":
            return replace(state, requested=state.requested | {x})
        if action.name == "response":
            return replace(state, responded=state.responded | {x})
        return state

    def output_scopes(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset({("request", "*")})


# --- spécifications ESDS-I / ESDS-II ---

@codec_type
@dataclass(frozen=True)
class SpecState:
    wait: FrozenSet[OpId] = frozenset()
    rept: FrozenSet[Tuple[OpId, Value]] = frozenset()
    ops: FrozenSet[OpId] = frozenset()
    po: Order = frozenset()
    stabilized: FrozenSet[OpId] = frozenset()


SPEC_INTERNALS = ("enter", "add_constraints", "stabilize", "calculate")


class EsdsSpec(Component):
    """ESDS-I (variant="I") et ESDS-II (variant="II"): même espace d'états, enter/stabilize diffèrent."""

    families = frozenset({"request", "response"})

    def __init__(self, table: OpTable, variant: str = "I", cap: Optional[int] = None) -> None:
        if variant not in ("I", "II"):
            raise ModelError(f"variante ESDS inconnue {variant!r}")
        self.table = dict(table)
        self.variant = variant
        self.cap = cap
        self.name = f"ESDS-{variant}"

    def role(self, action: ActionLabel) -> Optional[Role]:
        if action.name == "request":
            return Role.INPUT
        if action.name == "response":
            return Role.OUTPUT
        if action.name in SPEC_INTERNALS:
            return Role.INTERNAL
        return None

    def initial(self) -> SpecState:
        return SpecState()

    def entry_order(self, state: SpecState, x: OpId) -> Order:
        """Plus petit new-po admissible pour enter(x)."""
        return order_closure(state.po | csc([self.table[x]]) | {(y, x) for y in state.stabilized})

    def valset(self, state: SpecState, x: OpId) -> FrozenSet[Value]:
        return valset(x, state.ops, state.po, self.table, self.cap)

    def local_actions(self, state: SpecState) -> Iterable[ActionLabel]:
        out: List[ActionLabel] = []
        for x in sorted(state.wait - state.ops):
            if self.table[x].prev <= state.ops:
                out.append(enter(x, self.entry_order(state, x)))
        pair = first_unordered(state.po, state.ops)
        if pair is not None:
            out.append(add_constraints(order_closure(state.po | {pair})))
        out.extend(stabilize(x) for x in sorted(state.ops - state.stabilized))
        answered = {x for x, _ in state.rept}
        for x in sorted((state.ops & state.wait) - answered):
            if self.table[x].strict and x not in state.stabilized:
                continue
            out.extend(calculate(x, v) for v in sorted(self.valset(state, x), key=sort_key))
        out.extend(response(x, v) for x, v in sorted(state.rept, key=sort_key) if x in state.wait)
        return out

    def _stabilize_ok(self, state: SpecState, x: OpId) -> bool:
        if x not in state.ops:
            return False
        if not all(comparable(state.po, y, x) for y in state.ops):
            return False
        below = predecessors(state.po, x) & state.ops
        if self.variant == "I":
            return x not in state.stabilized and below <= state.stabilized
        return totally_orders(state.po, below)

    def enabled(self, state: SpecState, action: ActionLabel) -> bool:
        name, p = action.name, action.payload
        if name == "enter":
            x, new_po = p
            return (
                x in state.wait
                and (self.variant == "II" or x not in state.ops)
                and self.table[x].prev <= state.ops
                and span(new_po) <= state.ops | {x}
                and state.po <= new_po
                and csc([self.table[x]]) <= new_po
                and all((y, x) in new_po for y in state.stabilized)
                and is_strict_order(new_po)
            )
        if name == "add_constraints":
            (new_po,) = p
            return span(new_po) <= state.ops and state.po <= new_po and is_strict_order(new_po)
        if name == "stabilize":
            return self._stabilize_ok(state, p[0])
        if name == "calculate":
            x, v = p
            if x not in state.ops:
                return False
            if self.table[x].strict and x not in state.stabilized:
                return False
            return v in self.valset(state, x)
        if name == "response":
            x, v = p
            return (x, v) in state.rept and x in state.wait
        return False

    def apply(self, state: SpecState, action: ActionLabel) -> SpecState:
        name, p = action.name, action.payload
        if name == "request":
            return replace(state, wait=state.wait | {p[0]})
        if name == "enter":
            x, new_po = p
            return replace(state, ops=state.ops | {x}, po=new_po)
        if name == "add_constraints":
            return replace(state, po=p[0])
        if name == "stabilize":
            return replace(state, stabilized=state.stabilized | {p[0]})
        if name == "calculate":
            x, v = p
            return replace(state, rept=state.rept | {(x, v)}) if x in state.wait else state
        if name == "response":
            x = p[0]
            return replace(state, wait=state.wait - {x}, rept=frozenset(e for e in state.rept if e[0] != x))
        return state

    def output_scopes(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset({("response", "*")})


# --- Frontend(c) ---

@codec_type
@dataclass(frozen=True)
class FrontendState:
    wait: FrozenSet[OpId] = frozenset()
    rept: FrozenSet[Tuple[OpId, Value]] = frozenset()
    lost: FrozenSet[OpId] = frozenset()


class Frontend(Component):
    """Front-end du client c; `lossy` liste les requêtes perdues (jamais relayées)."""

    families = frozenset({"request", "response", "send", "receive"})

    def __init__(self, client: str, table: OpTable, replicas: Sequence[str], lossy: Iterable[OpId] = ()) -> None:
        self.client = client
        self.table = dict(table)
        self.replicas = tuple(replicas)
        self.lossy = frozenset(lossy)
        self.name = f"Frontend({client})"

    def _mine(self, x: Any) -> bool:
        return x in self.table and self.table[x].client == self.client

    def role(self, action: ActionLabel) -> Optional[Role]:
        p = action.payload
        if action.name == "request" and p and self._mine(p[0]):
            return Role.INPUT
        if action.name == "response" and p and self._mine(p[0]):
            return Role.OUTPUT
        if action.name == "send" and len(p) == 3 and p[0] == self.client and p[1] in self.replicas:
            return Role.OUTPUT
        if action.name == "receive" and len(p) == 3 and p[1] == self.client and p[0] in self.replicas:
            return Role.INPUT
        return None

    def initial(self) -> FrontendState:
        return FrontendState()

    def local_actions(self, state: FrontendState) -> Iterable[ActionLabel]:
        out = [send(self.client, r, req_msg(x)) for x in sorted(state.wait - state.lost) for r in self.replicas]
        out.extend(response(x, v) for x, v in sorted(state.rept, key=sort_key) if x in state.wait)
        return out

    def enabled(self, state: FrontendState, action: ActionLabel) -> bool:
        if action.name == "send":
            m = action.payload[2]
            return m[0] == "req" and m[1] in state.wait and m[1] not in state.lost
        if action.name == "response":
            x, v = action.payload
            return (x, v) in state.rept and x in state.wait
        return False

    def apply(self, state: FrontendState, action: ActionLabel) -> FrontendState:
        p = action.payload
        if action.name == "request":
            x = p[0]
            lost = state.lost | {x} if x in self.lossy else state.lost
            return replace(state, wait=state.wait | {x}, lost=lost)
        if action.name == "receive" and p[2][0] == "resp":
            _, x, v = p[2]
            return replace(state, rept=state.rept | {(x, v)}) if x in state.wait else state
        if action.name == "response":
            x = p[0]
            return replace(state, wait=state.wait - {x}, rept=frozenset(e for e in state.rept if e[0] != x))
        return state

    def output_scopes(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset({("response", f"client:{self.client}"), ("send", self.client)})

    def task_class(self, action: ActionLabel) -> Tuple[str, ...]:
        if action.name == "send":
            return (self.name, "send", str(action.payload[1]))
        return (self.name, action.name)


# --- Replica(r) ---

@codec_type
@dataclass(frozen=True)
class ReplicaState:
    pending: FrozenSet[OpId] = frozenset()
    rcvd: FrozenSet[OpId] = frozenset()
    done: Tuple[Tuple[str, FrozenSet[OpId]], ...] = ()
    stable: Tuple[Tuple[str, FrozenSet[OpId]], ...] = ()
    label: LabelMap = ()

    def done_at(self, i: str) -> FrozenSet[OpId]:
        return dict(self.done).get(i, frozenset())

    def stable_at(self, i: str) -> FrozenSet[OpId]:
        return dict(self.stable).get(i, frozenset())


def _update(table: Tuple[Tuple[str, FrozenSet[OpId]], ...], key: str, extra: Iterable[OpId]) -> Tuple[Tuple[str, FrozenSet[OpId]], ...]:
    out = dict(table)
    out[key] = out.get(key, frozenset()) | frozenset(extra)
    return tuple(sorted(out.items()))


class Replica(Component):
    families = frozenset({"send", "receive"})

    def __init__(self, replica: str, table: OpTable, clients: Sequence[str], replicas: Sequence[str], cap: Optional[int] = None) -> None:
        self.replica = replica
        self.table = dict(table)
        self.clients = tuple(clients)
        self.replicas = tuple(replicas)
        self.cap = cap
        self.name = f"Replica({replica})"

    def role(self, action: ActionLabel) -> Optional[Role]:
        p = action.payload
        r = self.replica
        if action.name == "do_it" and p[:1] == (r,):
            return Role.INTERNAL
        if action.name == "send" and len(p) == 3 and p[0] == r:
            if p[2][0] == "resp" and p[1] in self.clients:
                return Role.OUTPUT
            if p[2][0] == "gossip" and p[1] in self.replicas and p[1] != r:
                return Role.OUTPUT
        if action.name == "receive" and len(p) == 3 and p[1] == r:
            if p[2][0] == "req" and p[0] in self.clients:
                return Role.INPUT
            if p[2][0] == "gossip" and p[0] in self.replicas and p[0] != r:
                return Role.INPUT
        return None

    def initial(self) -> ReplicaState:
        empty = tuple((i, frozenset()) for i in sorted(self.replicas))
        return ReplicaState(done=empty, stable=empty)

    def next_label(self, state: ReplicaState) -> Label:
        top = max((label_of(state.label, y).counter for y in state.done_at(self.replica)), default=0)
        return Label.of(top + 1, self.replica)

    def local_order(self, state: ReplicaState) -> Order:
        """lc_r restreint aux opérations faites en r."""
        mine = state.done_at(self.replica)
        return frozenset((a, b) for a, b in label_order(state.label) if a in mine and b in mine)

    def stable_everywhere(self, state: ReplicaState) -> FrozenSet[OpId]:
        sets = [state.stable_at(i) for i in self.replicas]
        return frozenset.intersection(*sets) if sets else frozenset()

    def values(self, state: ReplicaState, x: OpId) -> FrozenSet[Value]:
        return valset(x, state.done_at(self.replica), self.local_order(state), self.table, self.cap)

    def gossip(self, state: ReplicaState) -> Tuple:
        r = self.replica
        return gossip_msg(state.rcvd, state.done_at(r), state.label, state.stable_at(r))

    def local_actions(self, state: ReplicaState) -> Iterable[ActionLabel]:
        r = self.replica
        mine = state.done_at(r)
        out: List[ActionLabel] = []
        for x in sorted(state.rcvd - mine):
            if self.table[x].prev <= mine:
                out.append(do_it(r, x, self.next_label(state)))
        stable = self.stable_everywhere(state)
        for x in sorted(state.pending & mine):
            if self.table[x].strict and x not in stable:
                continue
            c = self.table[x].client
            out.extend(send(r, c, resp_msg(x, v)) for v in sorted(self.values(state, x), key=sort_key))
        msg = self.gossip(state)
        out.extend(send(r, other, msg) for other in self.replicas if other != r)
        return out

    def enabled(self, state: ReplicaState, action: ActionLabel) -> bool:
        r = self.replica
        mine = state.done_at(r)
        p = action.payload
        if action.name == "do_it":
            _, x, l = p
            if x not in state.rcvd - mine or not self.table[x].prev <= mine:
                return False
            return not l.inf and all(l > label_of(state.label, y) for y in mine)
        if action.name == "send":
            m = p[2]
            if m[0] == "resp":
                _, x, v = m
                if p[1] != self.table[x].client or x not in state.pending & mine:
                    return False
                if self.table[x].strict and x not in self.stable_everywhere(state):
                    return False
                return v in self.values(state, x)
            if m[0] == "gossip":
                return m == self.gossip(state)
        return False

    def apply(self, state: ReplicaState, action: ActionLabel) -> ReplicaState:
        r = self.replica
        p = action.payload
        if action.name == "do_it":
            _, x, l = p
            return replace(state, done=_update(state.done, r, {x}), label=label_set(state.label, x, l))
        if action.name == "send" and p[2][0] == "resp":
            return replace(state, pending=state.pending - {p[2][1]})
        if action.name == "receive" and p[2][0] == "req":
            x = p[2][1]
            return replace(state, pending=state.pending | {x}, rcvd=state.rcvd | {x})
        if action.name == "receive" and p[2][0] == "gossip":
            return self._merge(state, p[0], p[2])
        return state

    def _merge(self, state: ReplicaState, sender: str, msg: Tuple) -> ReplicaState:
        _, R, D, L, S = msg
        r = self.replica
        done = state.done
        done = _update(done, sender, D | S)
        done = _update(done, r, D | S)
        for i in self.replicas:
            if i not in (r, sender):
                done = _update(done, i, S)
        everywhere = frozenset.intersection(*[dict(done).get(i, frozenset()) for i in self.replicas])
        stable = _update(state.stable, sender, S)
        stable = _update(stable, r, S | everywhere)
        return ReplicaState(
            pending=state.pending,
            rcvd=state.rcvd | R,
            done=done,
            stable=stable,
            label=label_min(state.label, L),
        )

    def output_scopes(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset({("send", self.replica)})

    def task_class(self, action: ActionLabel) -> Tuple[str, ...]:
        if action.name == "send":
            m = action.payload[2]
            return (self.name, "send", m[0], str(action.payload[1])) if m[0] == "gossip" else (self.name, "send", m[0])
        return (self.name, action.name)


# --- Channel(i, j) ---

@codec_type
@dataclass(frozen=True)
class ChannelState:
    queue: Tuple[Tuple, ...] = ()


class Channel(Component):
    """Canal fiable i -> j: multiensemble (précondition), livraison proposée en tête (FIFO)."""

    families = frozenset({"send", "receive"})

    def __init__(self, i: str, j: str) -> None:
        self.i, self.j = i, j
        self.name = f"Channel({i},{j})"

    def role(self, action: ActionLabel) -> Optional[Role]:
        p = action.payload
        if action.name in ("send", "receive") and len(p) == 3 and p[0] == self.i and p[1] == self.j:
            return Role.INPUT if action.name == "send" else Role.OUTPUT
        return None

    def initial(self) -> ChannelState:
        return ChannelState()

    def local_actions(self, state: ChannelState) -> Iterable[ActionLabel]:
        return [receive(self.i, self.j, state.queue[0])] if state.queue else []

    def enabled(self, state: ChannelState, action: ActionLabel) -> bool:
        return action.name == "receive" and action.payload[2] in state.queue

    def apply(self, state: ChannelState, action: ActionLabel) -> ChannelState:
        m = action.payload[2]
        if action.name == "send":
            return ChannelState(state.queue + (m,))
        if action.name == "receive" and m in state.queue:
            k = state.queue.index(m)
            return ChannelState(state.queue[:k] + state.queue[k + 1 :])
        return state

    def output_scopes(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset({("receive", f"{self.i}->{self.j}")})


# --- composition ---

@codec_type
@dataclass(frozen=True)
class CompositeState:
    parts: Tuple[Tuple[str, Any], ...]

    def part(self, name: str) -> Any:
        for k, v in self.parts:
            if k == name:
                return v
        raise ModelError(f"composant inconnu {name!r}")

    def names(self) -> List[str]:
        return [k for k, _ in self.parts]

    def with_part(self, name: str, value: Any) -> "CompositeState":
        return CompositeState(tuple((k, value if k == name else v) for k, v in self.parts))


class Composite(ProgrammaticAutomaton):
    """Produit synchronisé: une action s'exécute dans tous les composants qui l'ont dans leur signature."""

    def __init__(self, components: Sequence[Component], name: str = "composite") -> None:
        self.components = list(components)
        self.name = name
        self._by_name = {c.name: c for c in self.components}

    def component(self, name: str) -> Component:
        if name not in self._by_name:
            raise ModelError(f"composant inconnu {name!r}")
        return self._by_name[name]

    def participants(self, action: ActionLabel) -> List[Tuple[Component, Role]]:
        out = []
        for c in self.components:
            role = c.role(action)
            if role is not None:
                out.append((c, role))
        return out

    def owner(self, action: ActionLabel) -> Optional[Component]:
        for c, role in self.participants(action):
            if role != Role.INPUT:
                return c
        return None

    def role(self, action: ActionLabel) -> Optional[Role]:
        roles = [r for _, r in self.participants(action)]
        if not roles:
            return None
        for r in (Role.OUTPUT, Role.INTERNAL):
            if r in roles:
                return r
        return Role.INPUT

    def task_class(self, action: ActionLabel) -> Tuple[str, ...]:
        owner = self.owner(action)
        return owner.task_class(action) if owner is not None else ("env", action.name)

    def initial_states(self) -> Iterable[State]:
        return [CompositeState(tuple((c.name, c.initial()) for c in self.components))]

    def candidate_actions(self, state: CompositeState) -> Iterable[ActionLabel]:
        seen = set()
        for c in self.components:
            for a in c.local_actions(state.part(c.name)):
                if a not in seen:
                    seen.add(a)
                    yield a

    def precondition(self, state: CompositeState, action: ActionLabel) -> bool:
        owner = self.owner(action)
        if owner is None:
            return bool(self.participants(action))
        return owner.enabled(state.part(owner.name), action)

    def apply(self, state: CompositeState, action: ActionLabel) -> CompositeState:
        """Effet conjoint (forcé: la précondition n'est pas testée)."""
        touched = {c.name: c for c, _ in self.participants(action)}
        if not touched:
            raise ModelError(f"action hors signature: {action}")
        return CompositeState(
            tuple((k, touched[k].apply(v, action) if k in touched else v) for k, v in state.parts)
        )

    def effects(self, state: CompositeState, action: ActionLabel) -> Iterable[State]:
        return [self.apply(state, action)]

    def external_names(self) -> FrozenSet[str]:
        out: FrozenSet[str] = frozenset()
        for c in self.components:
            out |= c.external_names()
        return out


def compose_parallel(components: Sequence[Component | Composite], name: str = "composite") -> Composite:
    """Composition parallèle à plat; deux sorties sur une même portée sont un conflit de signature."""
    flat: List[Component] = []
    for c in components:
        flat.extend(c.components if isinstance(c, Composite) else [c])
    names = [c.name for c in flat]
    if len(set(names)) != len(names):
        raise ModelError(f"composants dupliqués: {sorted(names)}")
    for i, a in enumerate(flat):
        for b in flat[i + 1 :]:
            for fam, scope in a.output_scopes():
                for fam2, scope2 in b.output_scopes():
                    if fam == fam2 and (scope == scope2 or "*" in (scope, scope2)):
                        raise ModelError(f"conflit de signature: {fam} en sortie de {a.name} et {b.name}")
    return Composite(flat, name)


# --- fabrique ---

KINDS = ("users", "esds1", "esds2", "frontend", "replica", "channel")


def build_component(kind: str, params: Mapping[str, Any]) -> Component:
    table = params.get("table", {})
    cap = params.get("cap")
    if kind == "users":
        return Users(table, params.get("workload", ()))
    if kind == "esds1":
        return EsdsSpec(table, "I", cap)
    if kind == "esds2":
        return EsdsSpec(table, "II", cap)
    if kind == "frontend":
        return Frontend(params["client"], table, params["replicas"], params.get("lossy", ()))
    if kind == "replica":
        return Replica(params["replica"], table, params["clients"], params["replicas"], cap)
    if kind == "channel":
        return Channel(params["i"], params["j"])
    raise ModelError(f"type de composant inconnu {kind!r} (attendu: {', '.join(KINDS)})")


def alg_components(cfg: EsdsConfig, lossy: Optional[Iterable[OpId]] = None) -> List[Component]:
    table = cfg.table
    lossy = cfg.lossy_frontend if lossy is None else frozenset(lossy)
    comps: List[Component] = [build_component("users", {"table": table, "workload": cfg.workload})]
    for c in cfg.clients:
        comps.append(build_component("frontend", {"client": c, "table": table, "replicas": cfg.replicas, "lossy": lossy}))
    for r in cfg.replicas:
        comps.append(build_component("replica", {"replica": r, "table": table, "clients": cfg.clients, "replicas": cfg.replicas}))
    for c in cfg.clients:
        for r in cfg.replicas:
            comps.append(build_component("channel", {"i": c, "j": r}))
            comps.append(build_component("channel", {"i": r, "j": c}))
    for r in cfg.replicas:
        for r2 in cfg.replicas:
            if r != r2:
                comps.append(build_component("channel", {"i": r, "j": r2}))
    return comps


def build_system(cfg: EsdsConfig) -> Automaton:
    """ESDS-Alg ∥ Users (send/receive masqués), ou ESDS-II ∥ Users, ou ESDS-I ∥ Users."""
    table = cfg.table
    if cfg.system == "alg":
        composite = compose_parallel(alg_components(cfg), name="ESDS-Alg||Users")
        system = hide_actions(composite, {"send", "receive"})
    else:
        kind = "esds2" if cfg.system == "esds2" else "esds1"
        users = build_component("users", {"table": table, "workload": cfg.workload})
        system = compose_parallel([users, build_component(kind, {"table": table})], name=f"{kind.upper()}||Users")
    logger.debug("système %s construit", getattr(system, "name", cfg.system))
    return system


def spec_system(cfg: EsdsConfig, variant: str) -> Composite:
    users = build_component("users", {"table": cfg.table, "workload": cfg.workload})
    spec = build_component("esds1" if variant == "I" else "esds2", {"table": cfg.table})
    return compose_parallel([users, spec], name=f"ESDS-{variant}||Users")
