############################################################
# CHANGELOG:
# - [2026-10-08] agt113 {author=agent} {reason: simulations préservant la vivacité (avant, raffinement, arrière, histoire, prophétie)}
# - Impact: clauses RED/GREEN par paire, transitions silencieuses, certification des paires dérivées de h
# - Tests: tests/test_live_simulation.py (échec 2a DBI→DBS, BSIM1 arrière vivace, M=∅, conditionnel)
# - Notes: un seul fragment doit satisfaire toutes les paires; localisation par paire après échec conjoint
############################################################
"""
Simulations préservant la vivacité.

Pour un pas s -a-> s′ et une paire q de M (p = h(q)), le fragment abstrait choisi doit:
- éviter q.R si ni s ni s′ ne sont dans p.R (clause RED);
- toucher q.G si s ou s′ est dans p.G (clause GREEN).
La clause globale (transitions toujours/parfois silencieuses) est décidée par vacuité Streett
sur le sous-graphe des pas silencieux; pour un automate programmatique elle devient une
obligation de preuve.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import Automaton, ExecutionFragment, State, Step, sorted_states
from src.liveness import ComplementedPair, same_pair_on
from src.relations import (
    CheckReport,
    Counterexample,
    PairMap,
    PairTag,
    SimulationCandidate,
    Verdict,
    default_bound,
    find_fragment,
    step_word,
)
from src.simulation import (
    SimContext,
    backward_clauses,
    image_finite_clause,
    inverse_candidate,
    make_context,
    refinement_clauses,
)
from src.streett import PairsLike, closure_member, instantiate_pairs, streett_emptiness


@dataclass(frozen=True)
class PairConstraint:
    q: ComplementedPair
    p: ComplementedPair
    avoid: bool
    must: bool


@dataclass
class SilentSet:
    steps: FrozenSet[Step]
    tag: str

    def __contains__(self, step: Step) -> bool:
        return step in self.steps

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class LiveContext:
    ctx: SimContext
    l_pairs: List[ComplementedPair]
    m_pairs: List[ComplementedPair]
    h: PairMap
    obligations: List[str] = field(default_factory=list)

    def constraints(self, s: State, t: State) -> List[PairConstraint]:
        out = []
        for q in self.m_pairs:
            target = self.h.target(q)
            assert target is not None
            p = target.pair
            out.append(
                PairConstraint(
                    q, p, avoid=not (s in p.red or t in p.red), must=(s in p.green or t in p.green)
                )
            )
        return out

    def fragment(
        self,
        source: State,
        word: Tuple,
        accept: Callable[[State], bool],
        cons: Sequence[PairConstraint],
        nonempty: bool = False,
    ) -> Optional[ExecutionFragment]:
        return find_fragment(
            self.ctx.b,
            source,
            word,
            accept,
            self.ctx.bound,
            avoid=[c.q.red for c in cons if c.avoid],
            must=[c.q.green for c in cons if c.must],
            nonempty=nonempty,
            inv=None,
        )


def make_live_context(
    a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> LiveContext:
    ctx = make_context(a, b, cand)
    l_pairs = instantiate_pairs(concrete, ctx.dom_a.states)
    m_pairs = sorted(instantiate_pairs(abstract, ctx.dom_b.states), key=lambda q: q.id)
    if cand.bound is None:
        ctx.bound = default_bound(len(ctx.dom_b.states), len(m_pairs))
    return LiveContext(ctx, l_pairs, m_pairs, cand.h)


# --- transitions silencieuses ---

def _always_silent(ctx: SimContext) -> SilentSet:
    out = set()
    for s, action, t in ctx.steps_a():
        if not action.is_internal:
            continue
        sources = ctx.image_b(s)
        if not any(ctx.g.related(t, u) for u in sources):
            continue
        nonempty = any(
            find_fragment(ctx.b, u, (), lambda x: ctx.g.related(t, x), ctx.bound, nonempty=True) is not None
            for u in sources
        )
        if not nonempty:
            out.add((s, action, t))
    return SilentSet(frozenset(out), "bounded")


def _sometimes_silent(ctx: SimContext) -> SilentSet:
    out = set()
    for s, action, t in ctx.steps_a():
        if action.is_internal and any(ctx.g.related(t, u) for u in ctx.image_b(s)):
            out.add((s, action, t))
    return SilentSet(frozenset(out), "exact")


def always_silent_transitions(a: Automaton, b: Automaton, cand: SimulationCandidate) -> SilentSet:
    """Pas internes dont le seul fragment correspondant (borné) est vide."""
    return _always_silent(make_context(a, b, cand))


def sometimes_silent_transitions(a: Automaton, b: Automaton, cand: SimulationCandidate) -> SilentSet:
    """Pas internes pouvant être mis en correspondance avec le fragment vide."""
    return _sometimes_silent(make_context(a, b, cand))


# --- h: totalité et certificats ---

def _check_pair_map(lctx: LiveContext, rep: CheckReport) -> bool:
    missing = lctx.h.missing(lctx.m_pairs)
    if missing:
        rep.fail(Counterexample("h-total", pair_id=missing[0], detail=f"h indéfini sur {missing}"))
        return False
    rep.ok("h-total")
    a = lctx.ctx.a
    for q in lctx.m_pairs:
        target = lctx.h.target(q)
        assert target is not None
        p = target.pair
        if target.tag == PairTag.IN_L:
            in_l = any(x.id == p.id for x in lctx.l_pairs) or (
                a.is_explicit and any(same_pair_on(p, x, lctx.ctx.dom_a.states) for x in lctx.l_pairs)
            )
            if not in_l:
                rep.fail(Counterexample("h-target", pair_id=q.id, detail=f"h({q.id}) = {p.id} ∉ L (non marquée dérivée)"))
                return False
            continue
        cert = lctx.ctx.cand.certificates.get(p.id)
        if cert:
            rep.notes.append(f"h({q.id}) = {p.id} certifiée par {cert}")
            continue
        if a.is_explicit:
            verdict = closure_member(a, lctx.l_pairs, p)
            if not verdict.member:
                rep.fail(
                    Counterexample(
                        "h-certificate", pair_id=q.id, witness=verdict.witness, detail=f"{p.id} ∉ L̂ (lasso vivace témoin)"
                    )
                )
                return False
            rep.notes.append(f"h({q.id}) = {p.id} certifiée par closure_member")
        else:
            lctx.obligations.append(f"certifier {p.id} ∈ L̂ (cible de h({q.id}))")
    rep.ok("h-certificate")
    return True


def _global_clause(lctx: LiveContext, rep: CheckReport, clause: str, silent: SilentSet, what: str) -> None:
    a = lctx.ctx.a
    if not a.is_explicit:
        lctx.obligations.append(f"{clause}: toute exécution vivace contient une infinité de transitions non {what}")
        rep.ok(clause, "obligation")
        return
    verdict = streett_emptiness(a, lctx.l_pairs, cycle_steps=silent.steps)
    if verdict.nonempty:
        rep.fail(Counterexample(clause, witness=verdict.witness, detail=f"lasso vivace dont le cycle est {what}"))
        return
    if silent.tag == "bounded":
        rep.bounded = True
        rep.ok(clause, "pass (bounded)")
    else:
        rep.ok(clause)


def _finish(lctx: LiveContext, rep: CheckReport) -> CheckReport:
    if rep.verdict != Verdict.FAIL and lctx.obligations:
        rep.obligations.extend(lctx.obligations)
        rep.degrade(Verdict.CONDITIONAL)
    return rep


# --- localisation des échecs ---

def _localize(
    lctx: LiveContext,
    sources: List[State],
    word: Tuple,
    accept: Callable[[State], bool],
    cons: List[PairConstraint],
    prefix: str,
    number: int,
) -> Tuple[str, Optional[str]]:
    def exists(sub: List[PairConstraint]) -> bool:
        return any(lctx.fragment(u, word, accept, sub) is not None for u in sources)

    if not exists([]):
        return f"{prefix} clause {number}", None
    for c in cons:
        if c.avoid and not exists([replace(c, must=False)]):
            return f"{prefix} clause {number}a", c.q.id
        if c.must and not exists([replace(c, avoid=False)]):
            return f"{prefix} clause {number}b", c.q.id
    return f"{prefix} clause {number} (joint)", None


# --- avant ---

def _live_forward_clauses(lctx: LiveContext, rep: CheckReport, prefix: str) -> None:
    ctx = lctx.ctx
    for s in sorted_states(ctx.a.start_states()):
        if not any(ctx.b.is_start(u) for u in ctx.image_b(s)):
            rep.fail(Counterexample(f"{prefix} clause 1", detail=f"{ctx.g.name}[{s}] ∩ start(B) = ∅"))
            return
    rep.ok(f"{prefix} clause 1")
    for s, action, t in ctx.steps_a():
        cons = lctx.constraints(s, t)
        word = step_word(action)
        accept = lambda x, t=t: ctx.g.related(t, x)  # noqa: E731
        for u in ctx.image_b(s):
            if lctx.fragment(u, word, accept, cons) is None:
                clause, pair_id = _localize(lctx, [u], word, accept, cons, prefix, 2)
                rep.fail(Counterexample(clause, step=(s, action, t), abstract_state=u, pair_id=pair_id))
                logger.info("%s: échec %s au pas (%s, %s, %s) depuis %s", prefix, clause, s, action, t, u)
                return
    rep.ok(f"{prefix} clause 2")
    _global_clause(lctx, rep, f"{prefix} clause 3", _always_silent(ctx), "toujours silencieux")


def check_live_forward_sim(
    a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> CheckReport:
    lctx = make_live_context(a, concrete, b, abstract, cand)
    rep = lctx.ctx.report("live-forward")
    if _check_pair_map(lctx, rep):
        _live_forward_clauses(lctx, rep, "live-fwd")
    logger.info("check_live_forward_sim %s: %s", cand.g.name, rep.verdict.value)
    return _finish(lctx, rep)


# --- raffinement ---

def check_live_refinement(
    a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> CheckReport:
    lctx = make_live_context(a, concrete, b, abstract, cand)
    ctx = lctx.ctx
    rep = ctx.report("live-refinement")
    prefix = "live-ref"
    if not _check_pair_map(lctx, rep):
        return _finish(lctx, rep)
    bad = ctx.g.first_non_functional(ctx.dom_a.states)
    if bad is not None:
        rep.fail(Counterexample(f"{prefix} function", detail=f"{ctx.g.name}[{bad}] n'est pas un singleton"))
        return _finish(lctx, rep)
    rep.ok(f"{prefix} function")
    for s in sorted_states(ctx.a.start_states()):
        if not ctx.b.is_start(ctx.g.function_value(s)):
            rep.fail(Counterexample(f"{prefix} clause 1", abstract_state=ctx.g.function_value(s)))
            return _finish(lctx, rep)
    rep.ok(f"{prefix} clause 1")
    for s, action, t in ctx.steps_a():
        u, target = ctx.g.function_value(s), ctx.g.function_value(t)
        cons = lctx.constraints(s, t)
        word = step_word(action)
        accept = lambda x, target=target: x == target  # noqa: E731
        if lctx.fragment(u, word, accept, cons) is None:
            clause, pair_id = _localize(lctx, [u], word, accept, cons, prefix, 2)
            rep.fail(Counterexample(clause, step=(s, action, t), abstract_state=u, pair_id=pair_id))
            return _finish(lctx, rep)
    rep.ok(f"{prefix} clause 2")
    _global_clause(lctx, rep, f"{prefix} clause 3", _always_silent(ctx), "toujours silencieux")
    return _finish(lctx, rep)


# --- arrière ---

def _live_backward_clauses(lctx: LiveContext, rep: CheckReport, prefix: str, image_finite: bool) -> None:
    ctx = lctx.ctx
    if image_finite and not image_finite_clause(ctx, rep, prefix):
        return
    for s in sorted_states(ctx.dom_a.states):
        if not ctx.image_b(s):
            rep.fail(Counterexample(f"{prefix} clause 1", detail=f"{ctx.g.name}[{s}] ∩ I_B = ∅"))
            return
    rep.ok(f"{prefix} clause 1")
    for s in sorted_states(ctx.a.start_states()):
        for u in ctx.image_b(s):
            if not ctx.b.is_start(u):
                rep.fail(Counterexample(f"{prefix} clause 2", abstract_state=u))
                return
    rep.ok(f"{prefix} clause 2")
    for s, action, t in ctx.steps_a():
        cons = lctx.constraints(s, t)
        word = step_word(action)
        sources = ctx.image_b(s)
        for u2 in ctx.image_b(t):
            accept = lambda x, u2=u2: x == u2  # noqa: E731
            if not any(lctx.fragment(u, word, accept, cons) is not None for u in sources):
                clause, pair_id = _localize(lctx, sources, word, accept, cons, prefix, 3)
                rep.fail(Counterexample(clause, step=(s, action, t), abstract_state=u2, pair_id=pair_id))
                return
    rep.ok(f"{prefix} clause 3")
    _global_clause(lctx, rep, f"{prefix} clause 4", _sometimes_silent(ctx), "parfois silencieux")


def check_live_backward_sim(
    a: Automaton,
    concrete: PairsLike,
    b: Automaton,
    abstract: PairsLike,
    cand: SimulationCandidate,
    image_finite: bool = True,
) -> CheckReport:
    lctx = make_live_context(a, concrete, b, abstract, cand)
    rep = lctx.ctx.report("live-backward")
    if _check_pair_map(lctx, rep):
        _live_backward_clauses(lctx, rep, "live-bwd", image_finite)
    logger.info("check_live_backward_sim %s: %s", cand.g.name, rep.verdict.value)
    return _finish(lctx, rep)


# --- histoire et prophétie ---

def _inverse_refinement(lctx: LiveContext, rep: CheckReport, prefix: str) -> None:
    ctx = lctx.ctx
    cand_inv = inverse_candidate(ctx, prefix, rep)
    if cand_inv is None:
        return
    bound = cand_inv.bound or default_bound(len(ctx.dom_a.states), 0)
    refinement_clauses(SimContext(ctx.b, ctx.a, cand_inv, ctx.dom_b, ctx.dom_a, bound), rep, prefix=prefix)


def check_live_history(
    a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> CheckReport:
    lctx = make_live_context(a, concrete, b, abstract, cand)
    rep = lctx.ctx.report("live-history")
    if _check_pair_map(lctx, rep):
        _live_forward_clauses(lctx, rep, "live-hist")
    if rep.verdict != Verdict.FAIL:
        _inverse_refinement(lctx, rep, "live-hist inv-ref")
    return _finish(lctx, rep)


def check_live_prophecy(
    a: Automaton, concrete: PairsLike, b: Automaton, abstract: PairsLike, cand: SimulationCandidate
) -> CheckReport:
    lctx = make_live_context(a, concrete, b, abstract, cand)
    rep = lctx.ctx.report("live-prophecy")
    if _check_pair_map(lctx, rep):
        _live_backward_clauses(lctx, rep, "live-proph", True)
    if rep.verdict != Verdict.FAIL:
        _inverse_refinement(lctx, rep, "live-proph inv-ref")
    return _finish(lctx, rep)


LIVE_CHECKERS = {
    "fwd": check_live_forward_sim,
    "ref": check_live_refinement,
    "bwd": check_live_backward_sim,
    "hist": check_live_history,
    "proph": check_live_prophecy,
}


def replay_live_step(
    a: Automaton,
    concrete: PairsLike,
    b: Automaton,
    abstract: PairsLike,
    cand: SimulationCandidate,
    cx: Counterexample,
) -> bool:
    """Rejoue le test d'un pas (sens avant) sur l'état abstrait du contre-exemple: vrai si le pas passe."""
    if cx.step is None or cx.abstract_state is None:
        raise ValueError("contre-exemple sans pas ni état abstrait")
    lctx = make_live_context(a, concrete, b, abstract, cand)
    s, action, t = cx.step
    cons = lctx.constraints(s, t)
    return lctx.fragment(cx.abstract_state, step_word(action), lambda x: lctx.ctx.g.related(t, x), cons) is not None
