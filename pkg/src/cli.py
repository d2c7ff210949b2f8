############################################################
# CHANGELOG:
# - [2026-10-16] agt125 {author=agent} {reason: point d'entrée unique `python -m src.cli <commande>`}
# - Impact: chaque commande appelle exactement une opération de module; JSON sur stdout, prose sur stderr
# - Tests: tests/test_cli.py (codes de sortie DB, treillis CHAIN, run ESDS + moniteur, erreurs de schéma → 64)
# - Notes: codes 0 pass / 1 fail / 2 conditional / 3 unknown, 64 pour un fichier non conforme
############################################################
"""
CLI livrefine.

Exemples:
    python -m src.cli check-live-sim fwd fixtures/dbi.json fixtures/dbs.json fixtures/cand_db.json
    python -m src.cli lattice-certify fixtures/chain.json fixtures/chain_lattice.json
    python -m src.cli esds-run fixtures/esds_small.json --seed 7 | python -m src.cli esds-monitor --family M-I
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import (
    BoundExceeded,
    LivrefineError,
    ModelError,
    PreconditionError,
    SchemaError,
    StatePredicate,
    is_lasso_of,
    reachable_states,
    validate,
)
from src.config import get_settings
from src.correspondence import build_correspondence_backward, build_correspondence_forward
from src.esds_checks import MUTATIONS, check_sim_F_on_log, check_sim_G_on_log
from src.esds_monitor import monitor_pairs
from src.esds_predicates import FAMILIES
from src.esds_scheduler import ExecutionLog, run_fair_scheduler
from src.esds_types import load_config
from src.formats import (
    automaton_to_json,
    load_candidate,
    load_lasso,
    load_lattices,
    load_live_automaton,
    load_pairs,
    pair_to_json,
    state_text,
)
from src.inclusion import live_trace_inclusion, safe_trace_inclusion
from src.lattice import certify_lattice, check_lattice_sampled, check_lattice_structure
from src.live_simulation import (
    check_live_backward_sim,
    check_live_forward_sim,
    check_live_history,
    check_live_prophecy,
    check_live_refinement,
)
from src.liveness import LivenessCondition, is_live
from src.relations import CheckReport, Verdict
from src.reports import clauses_frame, emit_json, export_csv, write_dot
from src.simulation import check_backward_sim, check_forward_sim, check_history, check_prophecy, check_refinement
from src.streett import derived_pair_check, closure_member, enumerate_live_lassos, machine_closure_check, streett_emptiness
from src.transforms import forestify, leads_to_transform

EXIT_SCHEMA = 64
Outcome = Tuple[Dict[str, Any], int]

SIM_VARIANTS: Dict[str, Callable[..., CheckReport]] = {
    "fwd": check_forward_sim,
    "ref": check_refinement,
    "bwd": check_backward_sim,
    "history": check_history,
    "prophecy": check_prophecy,
}
LIVE_SIM_VARIANTS: Dict[str, Callable[..., CheckReport]] = {
    "fwd": check_live_forward_sim,
    "ref": check_live_refinement,
    "bwd": check_live_backward_sim,
    "history": check_live_history,
    "prophecy": check_live_prophecy,
}


def _say(args: argparse.Namespace, msg: str, *params: Any) -> None:
    if not args.json:
        logger.info(msg, *params)


def _condition(args: argparse.Namespace, embedded: LivenessCondition) -> LivenessCondition:
    if getattr(args, "pairs", None):
        return load_pairs(args.pairs)
    return embedded


def _stem_cycle(args: argparse.Namespace, n: int) -> Tuple[int, int]:
    if args.bounds is not None:
        return args.bounds, args.bounds
    bound = max(get_settings().default_bound, n)
    return bound, 2 * bound


# --- automates et conditions ---

def cmd_validate(args: argparse.Namespace) -> Outcome:
    a, _ = load_live_automaton(args.automaton)
    rep = validate(a)
    _say(args, "validate %s: %s", a.name, "ok" if rep.ok else f"{len(rep.violations)} violation(s)")
    return rep.to_json(), 0 if rep.ok else 1


def cmd_reachable(args: argparse.Namespace) -> Outcome:
    a, _ = load_live_automaton(args.automaton)
    reach = reachable_states(a, bound=args.bounds)
    payload = {"states": [state_text(s) for s in reach], "count": len(reach), "partial": reach.partial}
    return payload, 3 if reach.partial else 0


def cmd_emptiness(args: argparse.Namespace) -> Outcome:
    a, embedded = load_live_automaton(args.automaton)
    verdict = streett_emptiness(a, _condition(args, embedded), from_state=args.from_state, bound=args.bounds)
    _say(args, "emptiness %s: %s", a.name, "nonempty" if verdict.nonempty else "empty")
    return verdict.to_json(), 3 if verdict.partial else 0


def cmd_lassos(args: argparse.Namespace) -> Outcome:
    a, embedded = load_live_automaton(args.automaton)
    condition = _condition(args, embedded)
    if args.check:
        lasso = load_lasso(args.check, a)
        ok = is_lasso_of(lasso, a) and is_live(lasso, condition)
        return {"lasso": lasso.to_json(), "execution": is_lasso_of(lasso, a), "live": ok}, 0 if ok else 1
    stem, cycle = _stem_cycle(args, len(a.states))
    lassos = enumerate_live_lassos(a, condition, stem, cycle, args.limit)
    return {"bounds": {"stem": stem, "cycle": cycle}, "count": len(lassos), "lassos": [x.to_json() for x in lassos]}, 0


def cmd_machine_closure(args: argparse.Namespace) -> Outcome:
    a, embedded = load_live_automaton(args.automaton)
    verdict = machine_closure_check(a, _condition(args, embedded))
    return verdict.to_json(), 0 if verdict.holds else 1


def cmd_closure_member(args: argparse.Namespace) -> Outcome:
    a, embedded = load_live_automaton(args.automaton)
    condition = _condition(args, embedded)
    candidates = load_pairs(args.candidates)
    results = []
    for p in candidates.pairs:
        verdict = closure_member(a, condition, p, bound=args.bounds)
        results.append({**verdict.to_json(), "class": derived_pair_check(a, condition, p).value})
    ok = all(r["member"] for r in results)
    return {"pairs": results}, 0 if ok else 1


# --- treillis ---

def cmd_lattice_check(args: argparse.Namespace) -> Outcome:
    log = ExecutionLog.read(args.sample_log) if args.sample_log else None
    cfg = load_config(args.config) if args.config else (log.config if log is not None else None)
    lattices = load_lattices(args.lattice, cfg)
    if args.drop:
        lattices = [lat.without(args.drop) if args.drop in lat.pairs else lat for lat in lattices]
    if args.dot:
        write_dot(lattices[0].to_dot(), args.dot)
    if log is not None:
        rep = check_lattice_sampled(lattices, log)
        if args.csv:
            export_csv(rep.to_frame(), f"lattice_sampled_{Path(args.lattice).stem}")
        _say(args, "lattice-check %s: %d treillis, %d violation(s) (%s)", args.lattice, len(rep.lattices), len(rep.violations), rep.label)
        return rep.to_json(), 0 if rep.ok else 1
    reports = {lat.name: check_lattice_structure(lat).to_json() for lat in lattices}
    ok = all(r["ok"] for r in reports.values())
    return {"lattices": reports, "ok": ok}, 0 if ok else 1


def cmd_lattice_certify(args: argparse.Namespace) -> Outcome:
    a, embedded = load_live_automaton(args.automaton)
    condition = _condition(args, embedded)
    lattices = load_lattices(args.lattice)
    if args.dot:
        write_dot(lattices[0].to_dot(), args.dot)
    certs = [certify_lattice(a, condition, lat, bound=args.bounds) for lat in lattices]
    ok = all(c.certified for c in certs)
    for c in certs:
        if c.derived is not None:
            _say(args, "lattice-certify: paire dérivée %s", c.derived.id)
    return {"certificates": [c.to_json() for c in certs], "certified": ok}, 0 if ok else 1


# --- simulations ---

def _sim_inputs(args: argparse.Namespace):
    a, l_pairs = load_live_automaton(args.concrete)
    b, m_pairs = load_live_automaton(args.abstract)
    cand = load_candidate(args.candidate, l_pairs)
    if args.bounds is not None:
        cand.bound = args.bounds
    return a, l_pairs, b, m_pairs, cand


def _report_outcome(args: argparse.Namespace, rep: CheckReport) -> Outcome:
    if args.csv:
        export_csv(clauses_frame(rep), rep.relation)
    failed = rep.failed_clauses()
    _say(args, "%s: %s%s", rep.relation, rep.verdict.value, f" ({failed[0]})" if failed else "")
    return rep.to_json(), rep.exit_code


def cmd_check_sim(args: argparse.Namespace) -> Outcome:
    a, _l, b, _m, cand = _sim_inputs(args)
    fn = SIM_VARIANTS[args.variant]
    rep = fn(a, b, cand, image_finite=not args.not_image_finite) if args.variant == "bwd" else fn(a, b, cand)
    return _report_outcome(args, rep)


def cmd_check_live_sim(args: argparse.Namespace) -> Outcome:
    a, l_pairs, b, m_pairs, cand = _sim_inputs(args)
    fn = LIVE_SIM_VARIANTS[args.variant]
    if args.variant == "bwd":
        rep = fn(a, l_pairs, b, m_pairs, cand, image_finite=not args.not_image_finite)
    else:
        rep = fn(a, l_pairs, b, m_pairs, cand)
    return _report_outcome(args, rep)


def cmd_correspondence(args: argparse.Namespace) -> Outcome:
    a, l_pairs, b, m_pairs, cand = _sim_inputs(args)
    check = check_live_forward_sim if args.direction == "fwd" else check_live_backward_sim
    rep = check(a, l_pairs, b, m_pairs, cand)
    if rep.verdict != Verdict.PASS:
        return {"check": rep.to_json(), "correspondences": []}, rep.exit_code
    if args.lasso:
        lassos = [load_lasso(args.lasso, a)]
    else:
        stem, cycle = _stem_cycle(args, len(a.states))
        lassos = enumerate_live_lassos(a, l_pairs, stem, cycle, args.limit)
    build = build_correspondence_forward if args.direction == "fwd" else build_correspondence_backward
    out = [build(alpha, a, l_pairs, b, m_pairs, cand) for alpha in lassos]
    ok = all(c.valid for c in out)
    _say(args, "correspondence %s: %d lasso(s), %s", args.direction, len(out), "valides" if ok else "invalides")
    return {"check": rep.to_json(), "correspondences": [c.to_json() for c in out]}, 0 if ok else 1


def cmd_trace_inclusion(args: argparse.Namespace) -> Outcome:
    a, l_pairs = load_live_automaton(args.concrete)
    b, m_pairs = load_live_automaton(args.abstract)
    if args.mode == "safe":
        verdict = safe_trace_inclusion(a, b, bound=args.bounds)
    else:
        verdict = live_trace_inclusion(a, l_pairs, b, m_pairs, stem_bound=args.bounds, cycle_bound=args.bounds, limit=args.limit)
    codes = {"holds-within-bounds": 0, "counterexample": 1, "unknown": 3}
    _say(args, "trace-inclusion %s: %s", args.mode, verdict.outcome.value)
    return verdict.to_json(), codes[verdict.outcome.value]


# --- transformations ---

def _state_set(text: str) -> StatePredicate:
    return StatePredicate.of(s.strip() for s in text.split(",") if s.strip())


def cmd_leadsto(args: argparse.Namespace) -> Outcome:
    a, _ = load_live_automaton(args.automaton)
    derived, pair = leads_to_transform(a, _state_set(args.p), _state_set(args.q))
    payload = automaton_to_json(derived)
    payload["pairs"] = [pair_to_json(pair, derived.states)]
    return payload, 0


def cmd_forestify(args: argparse.Namespace) -> Outcome:
    a, _ = load_live_automaton(args.automaton)
    return automaton_to_json(forestify(a, args.depth)), 0


# --- ESDS ---

def _read_log(path: str) -> ExecutionLog:
    if path == "-":
        return ExecutionLog.from_lines(sys.stdin)
    return ExecutionLog.read(path)


def cmd_esds_run(args: argparse.Namespace) -> Outcome:
    cfg = load_config(args.config).with_overrides(seed=args.seed, steps=args.steps)
    log = run_fair_scheduler(cfg)
    violations = log.footer.get("violations", [])
    code = 1 if violations else 0
    if args.out:
        log.write(args.out)
        return {"log": str(args.out), **log.footer}, code
    sys.stdout.write("\n".join(log.to_lines()) + "\n")
    return {}, code


def cmd_esds_monitor(args: argparse.Namespace) -> Outcome:
    log = _read_log(args.log)
    rep = monitor_pairs(log, args.family)
    if args.csv:
        export_csv(rep.to_frame(), f"monitor_{args.family}")
    if rep.ok:
        return rep.to_json(), 0
    return rep.to_json(), 1 if rep.quiescent else 2


def cmd_esds_check_f(args: argparse.Namespace) -> Outcome:
    result = check_sim_F_on_log(_read_log(args.log), mutation=args.mutation)
    return result.to_json(), result.report.exit_code


def cmd_esds_check_g(args: argparse.Namespace) -> Outcome:
    result = check_sim_G_on_log(_read_log(args.log))
    return result.to_json(), result.report.exit_code


# --- parseur ---

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bounds", type=int, default=None, help="Borne k (remplace les bornes par défaut)")
    common.add_argument("--seed", type=int, default=None, help="Graine (toute l'aléa est dérivée de cette graine)")
    common.add_argument("--json", action="store_true", help="JSON seul, sans résumé sur stderr")
    common.add_argument("--csv", action="store_true", help="Exporte aussi le tableau du rapport dans LIVREFINE_REPORTS")

    p = argparse.ArgumentParser(prog="livrefine", description="Vérification de raffinements vivaces")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name: str, fn: Callable[[argparse.Namespace], Outcome], help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(handler=fn)
        return sp

    def with_pairs(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("automaton")
        sp.add_argument("--pairs", default=None, help="Fichier de paires (sinon: paires embarquées)")

    sp = cmd("validate", cmd_validate, "Invariants structurels d'un automate")
    sp.add_argument("automaton")
    sp = cmd("reachable", cmd_reachable, "États accessibles")
    sp.add_argument("automaton")
    sp = cmd("emptiness", cmd_emptiness, "Vacuité Streett (lasso vivace témoin)")
    with_pairs(sp)
    sp.add_argument("--from", dest="from_state", default=None)
    sp = cmd("lassos", cmd_lassos, "Énumère les lassos vivaces (ou revalide --check)")
    with_pairs(sp)
    sp.add_argument("--limit", type=int, default=None)
    sp.add_argument("--check", default=None, help="Lasso JSON à revalider")
    sp = cmd("machine-closure", cmd_machine_closure, "Fermeture machine de (A, L)")
    with_pairs(sp)
    sp = cmd("closure-member", cmd_closure_member, "Appartenance à la fermeture sémantique L̂")
    with_pairs(sp)
    sp.add_argument("candidates", help="Fichier de paires à tester")

    sp = cmd("lattice-check", cmd_lattice_check, "Clauses du treillis (structure ou échantillon de journal)")
    sp.add_argument("lattice")
    sp.add_argument("--config", default=None, help="Configuration ESDS (prédicats nommés)")
    sp.add_argument("--sample-log", default=None, help="Journal ESDS servant d'échantillon")
    sp.add_argument("--drop", default=None, help="Retire un élément avant contrôle")
    sp.add_argument("--dot", default=None, help="Écrit la source DOT du premier treillis")
    sp = cmd("lattice-certify", cmd_lattice_certify, "Certifie un treillis et émet la paire dérivée")
    with_pairs(sp)
    sp.add_argument("lattice")
    sp.add_argument("--dot", default=None)

    for name, fn, variants in (
        ("check-sim", cmd_check_sim, SIM_VARIANTS),
        ("check-live-sim", cmd_check_live_sim, LIVE_SIM_VARIANTS),
    ):
        sp = cmd(name, fn, "Vérifie un candidat de simulation")
        sp.add_argument("variant", choices=sorted(variants))
        sp.add_argument("concrete")
        sp.add_argument("abstract")
        sp.add_argument("candidate")
        sp.add_argument("--not-image-finite", action="store_true", help="Déclare g non image-finie (bwd)")

    sp = cmd("correspondence", cmd_correspondence, "Construit les exécutions abstraites correspondantes")
    sp.add_argument("direction", choices=["fwd", "bwd"])
    sp.add_argument("concrete")
    sp.add_argument("abstract")
    sp.add_argument("candidate")
    sp.add_argument("--lasso", default=None)
    sp.add_argument("--limit", type=int, default=50)
    sp = cmd("trace-inclusion", cmd_trace_inclusion, "Inclusion de traces (sûre ou vivace)")
    sp.add_argument("mode", choices=["safe", "live"])
    sp.add_argument("concrete")
    sp.add_argument("abstract")
    sp.add_argument("--limit", type=int, default=None)

    sp = cmd("leadsto", cmd_leadsto, "Transformation leads-to (variable d'historique)")
    sp.add_argument("automaton")
    sp.add_argument("--p", required=True, help="États de P, séparés par des virgules")
    sp.add_argument("--q", required=True, help="États de Q, séparés par des virgules")
    sp = cmd("forestify", cmd_forestify, "Forêt d'exécutions bornée")
    sp.add_argument("automaton")
    sp.add_argument("--depth", type=int, default=3)

    sp = cmd("esds-run", cmd_esds_run, "Run équitable ESDS (journal JSONL)")
    sp.add_argument("config")
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp = cmd("esds-monitor", cmd_esds_monitor, "Moniteur de paires sur un journal")
    sp.add_argument("log", nargs="?", default="-")
    sp.add_argument("--family", choices=FAMILIES, default="M-I")
    sp = cmd("esds-check-f", cmd_esds_check_f, "Simulation F (ESDS-Alg → ESDS-II) sur journal")
    sp.add_argument("log", nargs="?", default="-")
    sp.add_argument("--mutation", choices=MUTATIONS, default=None)
    sp = cmd("esds-check-g", cmd_esds_check_g, "Simulation G (ESDS-II → ESDS-I) sur journal")
    sp.add_argument("log", nargs="?", default="-")
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(list(argv) if argv is not None else None)
    try:
        payload, code = args.handler(args)
    except SchemaError as e:
        logger.error("fichier non conforme: %s", e)
        emit_json({"error": "schema", "message": str(e), "pointer": e.pointer})
        return EXIT_SCHEMA
    except BoundExceeded as e:
        logger.warning("borne dépassée: %s", e)
        emit_json({"verdict": Verdict.UNKNOWN.value, "error": "bound", "message": str(e)})
        return 3
    except (PreconditionError, ModelError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        emit_json({"verdict": Verdict.FAIL.value, "error": type(e).__name__, "message": str(e)})
        return 1
    except LivrefineError as e:
        logger.error("erreur interne: %s", e)
        raise
    if payload:
        emit_json(payload)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
