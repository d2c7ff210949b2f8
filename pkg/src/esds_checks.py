############################################################
# CHANGELOG:
# - [2026-10-14] agt121 {author=agent} {reason: vérificateurs F (ESDS-Alg → ESDS-II) et G (ESDS-II → ESDS-I) par rejeu de journal}
# - Impact: chaque pas du journal reçoit un fragment abstrait construit par recette, rejoué et contrôlé (relation, paires, trace)
# - Tests: tests/test_esds_checks.py (run complet F et G, mutation add_constraints, stabilize non ordonné, journal vide)
# - Notes: le fragment abstrait est rejoué par précondition; l'exécution abstraite complète est renvoyée
############################################################
"""
Vérification des simulations ESDS sur journaux.

Recette F (pas concret s -a-> t, état abstrait u):
- request / response: même action;
- do_it(r, x, l): enter(x, po(t)) si x est nouveau, add_constraints(po(t)) si le po change, sinon vide;
- send_rc(« response », x, v): calculate(x, v);
- receive_r′r(gossip): add_constraints(po(t)) puis stabilize des nouvelles opérations stables
  (ordre des étiquettes);
- autres send/receive: fragment vide.

Recette G: même action, sauf stabilize(x) ↦ stabilize de ({z ≺ x} ∪ {x}) ∖ u.stabilized
dans l'ordre de po.

Clauses: « F start », « F step », « F silent », « F trace », « F relation », « F clause 2a »
(RED), « F clause 2b » (GREEN), « F log step » (pas concret), idem avec G.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from logger_config import logger
from src.automata import ActionLabel, Automaton, ExecutionFragment, ModelError, PreconditionError, State
from src.esds_components import add_constraints, calculate, enter, msg_kind, response, request, spec_system, stabilize
from src.esds_predicates import (
    PredicateContext,
    alg_po,
    global_labels,
    spec_of,
    spec_pairs,
    users_of,
    view_ops,
    view_rept,
    view_stabilized,
    view_wait,
)
from src.esds_scheduler import ExecutionLog
from src.esds_types import EsdsConfig, label_of, linear_extension, predecessors
from src.live_simulation import PairConstraint
from src.liveness import ComplementedPair
from src.relations import CheckReport, Counterexample, same_action
from src.traces import externals

Recipe = Callable[[State, ActionLabel, State, State], List[ActionLabel]]
Relation = Callable[[State, State], Optional[str]]

MUTATIONS = ("drop-add-constraints",)


@dataclass
class LogCheck:
    report: CheckReport
    abstract: ExecutionFragment
    checked: int = 0
    total: int = 0

    @property
    def coverage(self) -> float:
        return 1.0 if self.total == 0 else self.checked / self.total

    def to_json(self) -> Dict[str, Any]:
        return {
            **self.report.to_json(),
            "checked": self.checked,
            "total": self.total,
            "coverage": self.coverage,
            "abstract_steps": len(self.abstract),
        }


def _constraints(pairs: Sequence[ComplementedPair], s: State, t: State) -> List[PairConstraint]:
    """h = identité: mêmes identifiants de paires des deux côtés."""
    return [PairConstraint(p, p, avoid=not (s in p.red or t in p.red), must=(s in p.green or t in p.green)) for p in pairs]


def _check_log(
    log: ExecutionLog,
    tag: str,
    abstract: Automaton,
    recipe: Recipe,
    relation: Relation,
    must_move: Callable[[ActionLabel], bool],
) -> LogCheck:
    concrete = log.system
    states = log.states()
    pairs = spec_pairs(PredicateContext.of(log.config))
    rep = CheckReport(f"{tag}-log")
    u = abstract.start_states()[0]
    out_states: List[State] = [u]
    out_actions: List[ActionLabel] = []
    result = LogCheck(rep, ExecutionFragment((u,)), 0, len(log.actions))
    bad = relation(states[0], u)
    if bad:
        rep.fail(Counterexample(f"{tag} start", abstract_state=u, detail=bad))
        return result
    rep.ok(f"{tag} start")
    for i, a in enumerate(log.actions):
        s, t = states[i], states[i + 1]
        step = (s, a, t)
        frag_states, frag_actions = [u], recipe(s, a, t, u)
        for b in frag_actions:
            if not abstract.precondition(frag_states[-1], b):
                rep.fail(Counterexample(f"{tag} step", step, frag_states[-1], detail=f"pas {i + 1}: {b} non activé"))
                return result
            frag_states.append(abstract.apply(frag_states[-1], b))
        frag = ExecutionFragment(tuple(frag_states), tuple(frag_actions))
        if must_move(a) and not frag_actions:
            rep.fail(Counterexample(f"{tag} silent", step, u, detail=f"pas {i + 1}: {a.name} apparié au fragment vide"))
            return result
        word_c, word_a = externals([a]), externals(frag_actions)
        if len(word_c) != len(word_a) or not all(same_action(x, y) for x, y in zip(word_c, word_a)):
            rep.fail(Counterexample(f"{tag} trace", step, u, detail=f"pas {i + 1}: traces différentes"))
            return result
        bad = relation(t, frag.lstate)
        if bad:
            rep.fail(Counterexample(f"{tag} relation", step, frag.lstate, detail=f"pas {i + 1}: {bad}"))
            return result
        for c in _constraints(pairs, s, t):
            if c.avoid and frag.touches(c.q.red):
                rep.fail(Counterexample(f"{tag} clause 2a", step, u, c.q.id, f"pas {i + 1}: {c.q.red.name} touché"))
                return result
            if c.must and not frag.touches(c.q.green):
                rep.fail(Counterexample(f"{tag} clause 2b", step, u, c.q.id, f"pas {i + 1}: {c.q.green.name} manqué"))
                return result
        if not concrete.precondition(s, a):
            rep.fail(Counterexample(f"{tag} log step", step, u, detail=f"pas {i + 1}: {a} non activé dans le journal"))
            return result
        out_states.extend(frag_states[1:])
        out_actions.extend(frag_actions)
        u = frag.lstate
        result.checked += 1
    for clause in (f"{tag} step", f"{tag} silent", f"{tag} trace", f"{tag} relation", f"{tag} clause 2a", f"{tag} clause 2b", f"{tag} log step"):
        rep.ok(clause)
    result.abstract = ExecutionFragment(tuple(out_states), tuple(out_actions))
    logger.info("%s-log: %d/%d pas validés, %d pas abstraits", tag, result.checked, result.total, len(out_actions))
    return result


# --- F: ESDS-Alg ∥ Users → ESDS-II ∥ Users ---

def f_relation(cfg: EsdsConfig) -> Relation:
    table = cfg.table

    def rel(s: State, u: State) -> Optional[str]:
        spec = spec_of(u)
        if users_of(s) != users_of(u):
            return "Users"
        if spec.wait != view_wait(s):
            return "wait = ⋃ wait_c"
        if spec.rept != view_rept(s):
            return "rept = ⋃ rept_c ∪ potential_rept"
        if spec.ops != view_ops(s):
            return "ops = ⋃ done_r[r]"
        if not spec.po <= alg_po(s, table):
            return "po ⊆ po(labels)"
        if spec.stabilized != view_stabilized(s):
            return "stabilized = ⋂ stable_r[r]"
        return None

    return rel


def f_recipe(cfg: EsdsConfig, mutation: Optional[str] = None) -> Recipe:
    table = cfg.table

    def recipe(s: State, a: ActionLabel, t: State, u: State) -> List[ActionLabel]:
        if a.name == "request":
            return [request(a.payload[0])]
        if a.name == "response":
            return [response(*a.payload)]
        if a.name == "do_it":
            x = a.payload[1]
            po = alg_po(t, table)
            if x not in view_ops(s):
                return [enter(x, po)]
            return [add_constraints(po)] if po != spec_of(u).po else []
        if a.name == "send" and msg_kind(a) == "resp":
            _, x, v = a.payload[2]
            return [calculate(x, v)]
        if a.name == "receive" and msg_kind(a) == "gossip":
            fresh = view_stabilized(t) - spec_of(u).stabilized
            labels = global_labels(t)
            out = [] if mutation == "drop-add-constraints" else [add_constraints(alg_po(t, table))]
            out.extend(stabilize(x) for x in sorted(fresh, key=lambda y: (label_of(labels, y), y)))
            return out
        return []

    return recipe


def check_sim_F_on_log(log: ExecutionLog, mutation: Optional[str] = None) -> LogCheck:
    """Rejoue F sur un journal ESDS-Alg ∥ Users; renvoie le rapport et l'exécution ESDS-II construite."""
    if log.config.system != "alg":
        raise PreconditionError(f"check_sim_F_on_log: journal ESDS-Alg requis (reçu {log.config.system})")
    if mutation is not None and mutation not in MUTATIONS:
        raise ModelError(f"mutation inconnue {mutation!r}")
    cfg = log.config
    silent_forbidden = lambda a: a.name == "receive" and msg_kind(a) == "gossip"  # noqa: E731
    return _check_log(log, "F", spec_system(cfg, "II"), f_recipe(cfg, mutation), f_relation(cfg), silent_forbidden)


# --- G: ESDS-II ∥ Users → ESDS-I ∥ Users ---

def g_relation(s: State, u: State) -> Optional[str]:
    a, b = spec_of(s), spec_of(u)
    if users_of(s) != users_of(u):
        return "Users"
    for name in ("wait", "rept", "ops", "po"):
        if getattr(a, name) != getattr(b, name):
            return f"{name} égaux"
    if not a.stabilized <= b.stabilized:
        return "u.stabilized ⊇ s.stabilized"
    return None


def g_recipe(s: State, a: ActionLabel, t: State, u: State) -> List[ActionLabel]:
    if a.name != "stabilize":
        return [a]
    x = a.payload[0]
    spec = spec_of(u)
    todo = (predecessors(spec.po, x) | {x}) - spec.stabilized
    return [stabilize(z) for z in linear_extension(spec.po, todo)]


def check_sim_G_on_log(log: ExecutionLog) -> LogCheck:
    """Rejoue G sur un journal ESDS-II ∥ Users; renvoie le rapport et l'exécution ESDS-I construite."""
    if log.config.system != "esds2":
        raise PreconditionError(f"check_sim_G_on_log: journal ESDS-II requis (reçu {log.config.system})")
    return _check_log(log, "G", spec_system(log.config, "I"), g_recipe, g_relation, lambda a: a.name != "stabilize")
