############################################################
# CHANGELOG:
# - [2026-10-07] agt112 {author=agent} {reason: relations de simulation simples (avant, raffinement, arrière, histoire, prophétie)}
# - Impact: vérification clause par clause avec invariants; contre-exemples localisés et rejouables
# - Tests: tests/test_simulation.py (DBI→DBS avec F, identité, BSIM1 arrière vs avant, iB non fini)
# - Notes: les pas sont parcourus dans l'ordre de sort_key; premier contre-exemple retenu
############################################################
"""
Relations de simulation w.r.t. invariants.

Chaque vérificateur renvoie un `CheckReport`; seule une précondition non satisfaite
(externes différentes, invariant non inductif) lève une exception.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import FrozenSet, Iterator, List, Optional

from logger_config import logger
from src.automata import (
    Automaton,
    ExplicitAutomaton,
    PreconditionError,
    State,
    StatePredicate,
    Step,
    reachable_states,
    shared_externals,
    sorted_states,
)
from src.config import get_settings
from src.relations import (
    CheckReport,
    Counterexample,
    SimulationCandidate,
    StateRelation,
    default_bound,
    find_fragment,
    step_word,
)


@dataclass
class Domain:
    """États de A (resp. B) considérés: l'invariant explicite, sinon l'ensemble accessible."""

    states: FrozenSet[State]
    partial: bool = False


def verify_invariant(automaton: Automaton, inv: StatePredicate, bound: Optional[int] = None) -> Domain:
    """Vérifie I ⊇ reachable(A) (début et pas sortants); renvoie le domaine à parcourir."""
    reach = reachable_states(automaton, bound=bound)
    for s in automaton.start_states():
        if s not in inv:
            raise PreconditionError(f"invariant {inv.name}: état initial {s} hors invariant")
    for s in sorted_states(reach.states):
        for action, t in automaton.transitions(s):
            if t in reach and t not in inv:
                raise PreconditionError(f"invariant {inv.name} non inductif: pas ({s}, {action}, {t})")
    if inv.is_explicit and isinstance(automaton, ExplicitAutomaton):
        return Domain(frozenset(inv.restrict(automaton.states)) | reach.states, reach.partial)
    return Domain(reach.states, reach.partial)


@dataclass
class SimContext:
    a: Automaton
    b: Automaton
    cand: SimulationCandidate
    dom_a: Domain
    dom_b: Domain
    bound: int

    @property
    def g(self) -> StateRelation:
        return self.cand.g

    def steps_a(self) -> Iterator[Step]:
        for s in sorted_states(self.dom_a.states):
            for action, t in self.a.transitions(s):
                yield s, action, t

    def image_b(self, s: State) -> List[State]:
        return sorted_states(u for u in self.g.image(s) if u in self.cand.inv_b)

    def report(self, relation: str) -> CheckReport:
        rep = CheckReport(relation)
        if self.dom_a.partial or self.dom_b.partial:
            rep.bounded = True
            rep.notes.append("espace d'états exploré partiellement")
        return rep


def make_context(a: Automaton, b: Automaton, cand: SimulationCandidate, m_pairs: int = 0) -> SimContext:
    shared_externals(a, b)
    explore = None if (a.is_explicit and b.is_explicit) else get_settings().default_bound * 100
    dom_a = verify_invariant(a, cand.inv_a, None if a.is_explicit else explore)
    dom_b = verify_invariant(b, cand.inv_b, None if b.is_explicit else explore)
    bound = cand.bound or default_bound(len(dom_b.states), m_pairs)
    return SimContext(a, b, cand, dom_a, dom_b, bound)


def _is_start(automaton: Automaton, u: State) -> bool:
    return automaton.is_start(u)


# --- avant ---

def forward_clauses(ctx: SimContext, rep: CheckReport, prefix: str = "fwd") -> None:
    for s in sorted_states(ctx.a.start_states()):
        if not any(_is_start(ctx.b, u) for u in ctx.image_b(s)):
            rep.fail(Counterexample(f"{prefix} clause 1", abstract_state=None, detail=f"{ctx.g.name}[{s}] ∩ start(B) = ∅"))
            return
    rep.ok(f"{prefix} clause 1")
    for s, action, t in ctx.steps_a():
        for u in ctx.image_b(s):
            frag = find_fragment(ctx.b, u, step_word(action), lambda x, t=t: ctx.g.related(t, x), ctx.bound)
            if frag is None:
                rep.fail(
                    Counterexample(
                        f"{prefix} clause 2",
                        step=(s, action, t),
                        abstract_state=u,
                        detail=f"aucun fragment de {u} vers {ctx.g.name}[{t}] de trace {action}",
                    )
                )
                return
    rep.ok(f"{prefix} clause 2")


def check_forward_sim(a: Automaton, b: Automaton, cand: SimulationCandidate) -> CheckReport:
    ctx = make_context(a, b, cand)
    rep = ctx.report("forward")
    forward_clauses(ctx, rep)
    logger.info("check_forward_sim %s: %s", ctx.g.name, rep.verdict.value)
    return rep


# --- raffinement ---

def refinement_clauses(ctx: SimContext, rep: CheckReport, prefix: str = "ref") -> None:
    bad = ctx.g.first_non_functional(ctx.dom_a.states)
    if bad is not None:
        rep.fail(Counterexample(f"{prefix} function", detail=f"{ctx.g.name}[{bad}] n'est pas un singleton"))
        return
    rep.ok(f"{prefix} function")
    for s in sorted_states(ctx.a.start_states()):
        if not _is_start(ctx.b, ctx.g.function_value(s)):
            rep.fail(Counterexample(f"{prefix} clause 1", abstract_state=ctx.g.function_value(s), detail=f"r({s}) ∉ start(B)"))
            return
    rep.ok(f"{prefix} clause 1")
    for s, action, t in ctx.steps_a():
        u, target = ctx.g.function_value(s), ctx.g.function_value(t)
        frag = find_fragment(ctx.b, u, step_word(action), lambda x, target=target: x == target, ctx.bound)
        if frag is None:
            rep.fail(
                Counterexample(
                    f"{prefix} clause 2", step=(s, action, t), abstract_state=u, detail=f"aucun fragment {u} ⇒ {target}"
                )
            )
            return
    rep.ok(f"{prefix} clause 2")


def check_refinement(a: Automaton, b: Automaton, cand: SimulationCandidate) -> CheckReport:
    ctx = make_context(a, b, cand)
    rep = ctx.report("refinement")
    refinement_clauses(ctx, rep)
    return rep


# --- arrière ---

def image_finite_clause(ctx: SimContext, rep: CheckReport, prefix: str) -> bool:
    for s in sorted_states(ctx.dom_a.states):
        if not ctx.g.image_is_finite(s):
            rep.fail(Counterexample(f"{prefix} image-finite", detail=f"{ctx.g.name}[{s}] infini (état {s})"))
            return False
    rep.ok(f"{prefix} image-finite")
    return True


def backward_clauses(ctx: SimContext, rep: CheckReport, prefix: str = "bwd", image_finite: bool = True) -> None:
    if image_finite and not image_finite_clause(ctx, rep, prefix):
        return
    for s in sorted_states(ctx.dom_a.states):
        if not ctx.image_b(s):
            rep.fail(Counterexample(f"{prefix} clause 1", detail=f"{ctx.g.name}[{s}] ∩ I_B = ∅"))
            return
    rep.ok(f"{prefix} clause 1")
    for s in sorted_states(ctx.a.start_states()):
        for u in ctx.image_b(s):
            if not _is_start(ctx.b, u):
                rep.fail(Counterexample(f"{prefix} clause 2", abstract_state=u, detail=f"{u} ∈ {ctx.g.name}[{s}] hors start(B)"))
                return
    rep.ok(f"{prefix} clause 2")
    for s, action, t in ctx.steps_a():
        for u2 in ctx.image_b(t):
            found = any(
                find_fragment(ctx.b, u, step_word(action), lambda x, u2=u2: x == u2, ctx.bound) is not None
                for u in ctx.image_b(s)
            )
            if not found:
                rep.fail(
                    Counterexample(
                        f"{prefix} clause 3",
                        step=(s, action, t),
                        abstract_state=u2,
                        detail=f"aucun u ∈ {ctx.g.name}[{s}] avec fragment vers {u2}",
                    )
                )
                return
    rep.ok(f"{prefix} clause 3")


def check_backward_sim(a: Automaton, b: Automaton, cand: SimulationCandidate, image_finite: bool = True) -> CheckReport:
    """Simulation arrière; `image_finite` exige en plus la finitude des images (variante iB)."""
    ctx = make_context(a, b, cand)
    rep = ctx.report("backward")
    backward_clauses(ctx, rep, image_finite=image_finite)
    logger.info("check_backward_sim %s: %s", ctx.g.name, rep.verdict.value)
    return rep


# --- histoire et prophétie ---

def inverse_candidate(ctx: SimContext, prefix: str, rep: CheckReport) -> Optional[SimulationCandidate]:
    """g⁻¹ comme fonction de B vers A sur le domaine de B, ou None (échec nommé)."""
    inverse = ctx.g.inverse(ctx.dom_a.states)
    for u in sorted_states(ctx.dom_b.states):
        if u not in ctx.cand.inv_b:
            continue
        if len(inverse.image(u)) != 1:
            rep.fail(Counterexample(f"{prefix} inverse-function", abstract_state=u, detail=f"{ctx.g.name}⁻¹[{u}] n'est pas un singleton"))
            return None
    return replace(ctx.cand, g=inverse, inv_a=ctx.cand.inv_b, inv_b=ctx.cand.inv_a)


def _inverse_refinement(ctx: SimContext, rep: CheckReport, prefix: str) -> None:
    cand_inv = inverse_candidate(ctx, prefix, rep)
    if cand_inv is None:
        return
    inv_ctx = SimContext(ctx.b, ctx.a, cand_inv, ctx.dom_b, ctx.dom_a, cand_inv.bound or default_bound(len(ctx.dom_a.states), 0))
    refinement_clauses(inv_ctx, rep, prefix=prefix)


def check_history(a: Automaton, b: Automaton, cand: SimulationCandidate) -> CheckReport:
    ctx = make_context(a, b, cand)
    rep = ctx.report("history")
    forward_clauses(ctx, rep, prefix="hist fwd")
    if rep.passed:
        _inverse_refinement(ctx, rep, "hist inv-ref")
    return rep


def check_prophecy(a: Automaton, b: Automaton, cand: SimulationCandidate) -> CheckReport:
    ctx = make_context(a, b, cand)
    rep = ctx.report("prophecy")
    backward_clauses(ctx, rep, prefix="proph bwd")
    if rep.passed:
        _inverse_refinement(ctx, rep, "proph inv-ref")
    return rep


PLAIN_CHECKERS = {
    "fwd": check_forward_sim,
    "ref": check_refinement,
    "bwd": check_backward_sim,
    "hist": check_history,
    "proph": check_prophecy,
}


def replay_step(ctx: SimContext, step: Step, u: State) -> bool:
    """Rejoue le test d'un pas sur un état abstrait (avant): vrai si un fragment existe."""
    s, action, t = step
    return find_fragment(ctx.b, u, step_word(action), lambda x: ctx.g.related(t, x), ctx.bound) is not None
