############################################################
# CHANGELOG:
# - [2026-10-12] agt118 {author=agent} {reason: vues d'état ESDS et registre de prédicats nommés}
# - Impact: prédicats partagés par les moniteurs, les treillis (fichiers JSON) et les vérificateurs F/G
# - Tests: tests/test_esds_predicates.py (vues spec/alg, po dérivé des étiquettes, familles M-I/L)
# - Notes: les vues acceptent indifféremment un état ESDS-I/II ∥ Users ou ESDS-Alg ∥ Users
############################################################
"""
Vues et prédicats sur les états composés ESDS.

Vues (même sens sur la spécification et sur l'algorithme):
- wait, rept (alg: ⋃ rept_c ∪ réponses en route), ops (alg: ⋃_r done_r[r]),
  stabilized (alg: ⋂_r stable_r[r]), po (alg: reconstruit depuis les étiquettes).

Le po de l'algorithme: CSC(ops) plus l'ordre des étiquettes minimales sur toute paire
(a, b) où a est étiqueté au plus haut comme une opération stable partout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import ModelError, State, StatePredicate
from src.esds_components import ChannelState, CompositeState, FrontendState, ReplicaState, SpecState, UsersState
from src.esds_types import EsdsConfig, LabelMap, Op, OpId, OpTable, Order, Value, csc, label_min, label_of, order_closure
from src.liveness import ComplementedPair, LivenessCondition


# --- vues ---

def _indexed(state: CompositeState, prefix: str) -> Dict[str, Any]:
    out = {}
    for name, part in state.parts:
        if name.startswith(prefix + "(") and name.endswith(")"):
            out[name[len(prefix) + 1 : -1]] = part
    return out


def is_alg(state: CompositeState) -> bool:
    return any(name.startswith("Replica(") for name in state.names())


def users_of(state: CompositeState) -> UsersState:
    return state.part("Users")


def spec_of(state: CompositeState) -> SpecState:
    for name, part in state.parts:
        if isinstance(part, SpecState):
            return part
    raise ModelError("état sans composant ESDS-I/ESDS-II")


def replicas_of(state: CompositeState) -> Dict[str, ReplicaState]:
    return _indexed(state, "Replica")


def frontends_of(state: CompositeState) -> Dict[str, FrontendState]:
    return _indexed(state, "Frontend")


def channels_of(state: CompositeState) -> Dict[Tuple[str, str], ChannelState]:
    return {tuple(k.split(",", 1)): v for k, v in _indexed(state, "Channel").items()}


def _require_alg(state: CompositeState, what: str) -> None:
    if not is_alg(state):
        raise ModelError(f"{what}: réservé aux états ESDS-Alg")


def view_wait(state: CompositeState) -> FrozenSet[OpId]:
    if not is_alg(state):
        return spec_of(state).wait
    return frozenset().union(*(f.wait for f in frontends_of(state).values()))


def potential_rept(state: CompositeState) -> FrozenSet[Tuple[OpId, Value]]:
    """Réponses en route vers Frontend(c) pour un x encore attendu par c."""
    fronts = frontends_of(state)
    out = set()
    for (i, j), ch in channels_of(state).items():
        if j not in fronts:
            continue
        for m in ch.queue:
            if m[0] == "resp" and m[1] in fronts[j].wait:
                out.add((m[1], m[2]))
    return frozenset(out)


def view_rept(state: CompositeState) -> FrozenSet[Tuple[OpId, Value]]:
    if not is_alg(state):
        return spec_of(state).rept
    local = frozenset().union(*(f.rept for f in frontends_of(state).values()))
    return local | potential_rept(state)


def view_ops(state: CompositeState) -> FrozenSet[OpId]:
    if not is_alg(state):
        return spec_of(state).ops
    return frozenset().union(*(rs.done_at(r) for r, rs in replicas_of(state).items()))


def view_stabilized(state: CompositeState) -> FrozenSet[OpId]:
    if not is_alg(state):
        return spec_of(state).stabilized
    sets = [rs.stable_at(r) for r, rs in replicas_of(state).items()]
    return frozenset.intersection(*sets) if sets else frozenset()


def global_labels(state: CompositeState) -> LabelMap:
    out: LabelMap = ()
    for rs in replicas_of(state).values():
        out = label_min(out, rs.label)
    return out


def alg_po(state: CompositeState, table: OpTable) -> Order:
    ops = view_ops(state)
    labels = global_labels(state)
    stable = view_stabilized(state)
    pairs = set(csc(table[x] for x in ops))
    if stable:
        top = max(label_of(labels, x) for x in stable)
        fixed = [a for a in ops if label_of(labels, a) <= top]
        for a in fixed:
            la = label_of(labels, a)
            pairs.update((a, b) for b in ops if la < label_of(labels, b))
    return order_closure(pairs)


def view_po(state: CompositeState, table: OpTable) -> Order:
    return alg_po(state, table) if is_alg(state) else spec_of(state).po


# --- registre ---

@dataclass(frozen=True)
class PredicateContext:
    table: Mapping[OpId, Op]
    clients: Tuple[str, ...]
    replicas: Tuple[str, ...]

    @classmethod
    def of(cls, cfg: EsdsConfig) -> "PredicateContext":
        return cls(cfg.table, cfg.clients, cfg.replicas)

    def op(self, x: OpId) -> Op:
        if x not in self.table:
            raise ModelError(f"opération inconnue {x!r}")
        return self.table[x]

    def replica(self, r: str) -> str:
        if r not in self.replicas:
            raise ModelError(f"réplique inconnue {r!r}")
        return r


Maker = Callable[[PredicateContext, Sequence[str]], Callable[[State], bool]]
_REGISTRY: Dict[str, Tuple[int, Maker]] = {}


def predicate(name: str, arity: int) -> Callable[[Maker], Maker]:
    def deco(fn: Maker) -> Maker:
        _REGISTRY[name] = (arity, fn)
        return fn

    return deco


def predicate_names() -> List[str]:
    return sorted(_REGISTRY)


def make_predicate(ctx: PredicateContext, name: str, args: Sequence[str]) -> StatePredicate:
    """Instancie `name(args)`; ModelError si le nom ou l'arité est inconnu."""
    if name not in _REGISTRY:
        raise ModelError(f"prédicat inconnu {name!r}")
    arity, maker = _REGISTRY[name]
    if len(args) != arity:
        raise ModelError(f"prédicat {name}: {arity} argument(s) attendu(s), {len(args)} reçu(s)")
    fn = maker(ctx, list(args))
    return StatePredicate.where(f"{name}({','.join(args)})", fn)


def _rs(state: CompositeState, r: str) -> ReplicaState:
    _require_alg(state, "prédicat de réplique")
    return replicas_of(state)[r]


def _queue(state: CompositeState, i: str, j: str) -> Tuple:
    _require_alg(state, "prédicat de canal")
    return channels_of(state)[(i, j)].queue


@predicate("wait", 1)
def _wait(ctx: PredicateContext, args: Sequence[str]):
    x = ctx.op(args[0]).id
    return lambda s: x in view_wait(s)


@predicate("not_wait", 1)
def _not_wait(ctx: PredicateContext, args: Sequence[str]):
    x = ctx.op(args[0]).id
    return lambda s: x not in view_wait(s)


@predicate("rept", 1)
def _rept(ctx: PredicateContext, args: Sequence[str]):
    """(x, v) ∈ rept_client(x) pour un v (spec: rept)."""
    x = ctx.op(args[0])

    def fn(s: CompositeState) -> bool:
        if is_alg(s):
            return any(y == x.id for y, _ in frontends_of(s)[x.client].rept)
        return any(y == x.id for y, _ in spec_of(s).rept)

    return fn


@predicate("stabilized", 1)
def _stabilized(ctx: PredicateContext, args: Sequence[str]):
    x = ctx.op(args[0]).id
    return lambda s: x in view_stabilized(s)


@predicate("stable_all", 1)
def _stable_all(ctx: PredicateContext, args: Sequence[str]):
    return _stabilized(ctx, args)


@predicate("responded", 1)
def _responded(ctx: PredicateContext, args: Sequence[str]):
    x = ctx.op(args[0]).id
    return lambda s: x in users_of(s).responded


@predicate("req_in_channel", 2)
def _req_in_channel(ctx: PredicateContext, args: Sequence[str]):
    x, r = ctx.op(args[0]), ctx.replica(args[1])
    return lambda s: ("req", x.id) in _queue(s, x.client, r)


@predicate("req_in_channel_any", 1)
def _req_in_channel_any(ctx: PredicateContext, args: Sequence[str]):
    x = ctx.op(args[0])
    return lambda s: any(("req", x.id) in _queue(s, x.client, r) for r in ctx.replicas)


@predicate("resp_in_channel", 2)
def _resp_in_channel(ctx: PredicateContext, args: Sequence[str]):
    x, r = ctx.op(args[0]), ctx.replica(args[1])
    return lambda s: any(m[0] == "resp" and m[1] == x.id for m in _queue(s, r, x.client))


@predicate("pending_rcvd", 2)
def _pending_rcvd(ctx: PredicateContext, args: Sequence[str]):
    x, r = ctx.op(args[0]).id, ctx.replica(args[1])

    def fn(s: CompositeState) -> bool:
        rs = _rs(s, r)
        return x in rs.pending and x in rs.rcvd

    return fn


@predicate("pending_done", 2)
def _pending_done(ctx: PredicateContext, args: Sequence[str]):
    x, r = ctx.op(args[0]).id, ctx.replica(args[1])

    def fn(s: CompositeState) -> bool:
        rs = _rs(s, r)
        return x in rs.pending and x in rs.done_at(r)

    return fn


@predicate("pending_done_strict", 2)
def _pending_done_strict(ctx: PredicateContext, args: Sequence[str]):
    base = _pending_done(ctx, args)
    strict = ctx.op(args[0]).strict
    return lambda s: strict and base(s)


@predicate("pending_done_nonstrict", 2)
def _pending_done_nonstrict(ctx: PredicateContext, args: Sequence[str]):
    base = _pending_done(ctx, args)
    strict = ctx.op(args[0]).strict
    return lambda s: not strict and base(s)


@predicate("done", 2)
def _done(ctx: PredicateContext, args: Sequence[str]):
    """x ∈ done_r[r]."""
    x, r = ctx.op(args[0]).id, ctx.replica(args[1])
    return lambda s: x in _rs(s, r).done_at(r)


@predicate("done_all", 1)
def _done_all(ctx: PredicateContext, args: Sequence[str]):
    """x ∈ ⋂_i done_i[i]."""
    x = ctx.op(args[0]).id
    return lambda s: all(x in _rs(s, i).done_at(i) for i in ctx.replicas)


@predicate("stable_at", 2)
def _stable_at(ctx: PredicateContext, args: Sequence[str]):
    """x ∈ stable_r[r]."""
    x, r = ctx.op(args[0]).id, ctx.replica(args[1])
    return lambda s: x in _rs(s, r).stable_at(r)


@predicate("no_req_in_channel", 2)
def _no_req_in_channel(ctx: PredicateContext, args: Sequence[str]):
    base = _req_in_channel(ctx, args)
    return lambda s: not base(s)


@predicate("no_resp_in_channel", 2)
def _no_resp_in_channel(ctx: PredicateContext, args: Sequence[str]):
    base = _resp_in_channel(ctx, args)
    return lambda s: not base(s)


@predicate("do_it_ready", 2)
def _do_it_ready(ctx: PredicateContext, args: Sequence[str]):
    """do_it_r(x, ·) activé: x reçu, pas encore fait, prev fait en r."""
    x, r = ctx.op(args[0]), ctx.replica(args[1])

    def fn(s: CompositeState) -> bool:
        rs = _rs(s, r)
        mine = rs.done_at(r)
        return x.id in rs.rcvd and x.id not in mine and x.prev <= mine

    return fn


# --- familles de paires ---

FAMILIES = ("M-I", "M-II", "L")


def _pair(ctx: PredicateContext, pid: str, red: Tuple[str, List[str]], green: Tuple[str, List[str]]) -> ComplementedPair:
    return ComplementedPair(pid, make_predicate(ctx, red[0], red[1]), make_predicate(ctx, green[0], green[1]))


def spec_pairs(ctx: PredicateContext) -> List[ComplementedPair]:
    """SpReq(x) = ⟨x ∈ wait, x ∉ wait⟩ et SpStab(x) = ⟨x ∈ wait, x ∈ stabilized⟩ pour chaque x."""
    out = []
    for x in sorted(ctx.table):
        out.append(_pair(ctx, f"req:{x}", ("wait", [x]), ("not_wait", [x])))
        out.append(_pair(ctx, f"stab:{x}", ("wait", [x]), ("stabilized", [x])))
    return out


def alg_fairness_pairs(ctx: PredicateContext) -> List[ComplementedPair]:
    """Livraison des messages requête/réponse et équité de do_it."""
    out = []
    for x in sorted(ctx.table):
        for r in ctx.replicas:
            out.append(_pair(ctx, f"deliver-req:{x}@{r}", ("req_in_channel", [x, r]), ("no_req_in_channel", [x, r])))
            out.append(_pair(ctx, f"deliver-resp:{x}@{r}", ("resp_in_channel", [x, r]), ("no_resp_in_channel", [x, r])))
            out.append(_pair(ctx, f"do_it:{x}@{r}", ("do_it_ready", [x, r]), ("done", [x, r])))
        out.append(_pair(ctx, f"respond:{x}", ("rept", [x]), ("not_wait", [x])))
    return out


def family_pairs(ctx: PredicateContext, family: str) -> List[ComplementedPair]:
    if family in ("M-I", "M-II"):
        return spec_pairs(ctx)
    if family == "L":
        return alg_fairness_pairs(ctx)
    raise ModelError(f"famille inconnue {family!r} (attendu: {', '.join(FAMILIES)})")


def family_condition(ctx: PredicateContext, family: str) -> LivenessCondition:
    pairs = family_pairs(ctx, family)
    logger.debug("famille %s: %d paires", family, len(pairs))
    return LivenessCondition.of(pairs)
