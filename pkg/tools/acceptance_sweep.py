############################################################
# CHANGELOG:
# - [2026-10-16] agt127 {author=agent} {reason: balayages aléatoires d'acceptation aux effectifs complets}
# - Impact: soundness des simulations vivaces, oracle Streett/énumération, treillis certifiés, correspondances
# - Tests: versions réduites dans tests/test_live_simulation.py, tests/test_streett.py, tests/test_correspondence.py
# - Notes: un tableau par balayage exporté en CSV dans reports/; code de sortie 1 dès la première violation
############################################################

"""
Balayages d'acceptation

Description
- `live`: instances aléatoires (≤ 8 états, ≤ 4 actions, ≤ 3 paires); les candidats qui passent
  check_live_forward_sim ou check_live_backward_sim ne doivent jamais produire de contre-exemple
  par live_trace_inclusion; les correspondances construites sur ≤ 50 lassos vivaces doivent se revalider.
- `oracle`: streett_emptiness et enumerate_live_lassos doivent s'accorder sur la non-vacuité.
- `lattice`: tout treillis certifié (corpus + chaînes aléatoires) garde ⟨⊥.R, ⊤.G⟩ dans la clôture.

Utilisation rapide
- `python tools/acceptance_sweep.py --mode live --count 500 --seed 1`
- `python tools/acceptance_sweep.py --mode all`
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List

import pandas as pd

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))
from logger_config import logger
from src.automata import LivrefineError
from src.correspondence import build_correspondence_backward, build_correspondence_forward, revalidate
from src.formats import load_lattices, load_live_automaton
from src.inclusion import InclusionOutcome, live_trace_inclusion
from src.lattice import certify_lattice
from src.live_simulation import check_live_backward_sim, check_live_forward_sim
from src.random_instances import LiveInstance, random_chain_lattice, random_live_automaton, random_live_instance
from src.reports import export_csv
from src.streett import closure_member, enumerate_live_lassos, instantiate_pairs, streett_emptiness

DEFAULT_COUNTS = {"live": 500, "oracle": 1000, "lattice": 100}
LASSO_LIMIT = 50


def _correspondences(inst: LiveInstance, direction: str) -> Dict[str, int]:
    n = len(inst.a.states)
    lassos = enumerate_live_lassos(inst.a, inst.concrete, stem_bound=n, cycle_bound=n, limit=LASSO_LIMIT)
    m_pairs = instantiate_pairs(inst.abstract, inst.b.states)
    build = build_correspondence_forward if direction == "fwd" else build_correspondence_backward
    built = failed = 0
    for alpha in lassos:
        try:
            corr = build(alpha, inst.a, inst.concrete, inst.b, inst.abstract, inst.candidate)
        except LivrefineError as e:
            logger.error("correspondance %s impossible sur %s: %s", direction, alpha.to_json(), e)
            failed += 1
            continue
        built += 1
        if not revalidate(alpha, corr.alpha2, inst.candidate.g, inst.candidate.h, m_pairs, corr.mapping):
            logger.error("correspondance %s non revalidée: %s", direction, corr.to_json())
            failed += 1
    return {"lassos": len(lassos), "built": built, "corr_failures": failed}


def sweep_live(rng: random.Random, count: int) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    for i in range(count):
        inst = random_live_instance(rng)
        fwd = check_live_forward_sim(inst.a, inst.concrete, inst.b, inst.abstract, inst.candidate)
        bwd = check_live_backward_sim(inst.a, inst.concrete, inst.b, inst.abstract, inst.candidate)
        row: Dict[str, Any] = {
            "instance": i,
            "origin": inst.origin,
            "states": len(inst.a.states),
            "fwd": fwd.verdict.value,
            "bwd": bwd.verdict.value,
            "inclusion": "",
            "lassos": 0,
            "built": 0,
            "corr_failures": 0,
            "violation": False,
        }
        if fwd.passed or bwd.passed:
            verdict = live_trace_inclusion(inst.a, inst.concrete, inst.b, inst.abstract)
            row["inclusion"] = verdict.outcome.value
            if verdict.outcome == InclusionOutcome.COUNTEREXAMPLE:
                logger.error("instance %d: simulation vivace acceptée mais contre-exemple %s", i, verdict.to_json())
                row["violation"] = True
            for direction, rep in (("fwd", fwd), ("bwd", bwd)):
                if rep.passed:
                    stats = _correspondences(inst, direction)
                    for key, value in stats.items():
                        row[key] += value
            row["violation"] = row["violation"] or row["corr_failures"] > 0
        rows.append(row)
    return pd.DataFrame(rows)


def sweep_oracle(rng: random.Random, count: int) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    for i in range(count):
        a, cond = random_live_automaton(rng, max_states=8, max_actions=4, max_pairs=3)
        n = len(a.states)
        scc = streett_emptiness(a, cond).nonempty
        # un cycle acceptant visite au plus un vert par paire, chaque segment étant simple
        lassos = enumerate_live_lassos(a, cond, stem_bound=n, cycle_bound=n * (len(cond) + 1), limit=1)
        enum = bool(lassos)
        if scc != enum:
            logger.error("instance %d: désaccord scc=%s énumération=%s", i, scc, enum)
        rows.append({"instance": i, "states": n, "pairs": len(cond), "scc": scc, "enumeration": enum, "violation": scc != enum})
    return pd.DataFrame(rows)


def _lattice_row(name: str, a: Any, cond: Any, lattice: Any) -> Dict[str, Any]:
    try:
        cert = certify_lattice(a, cond, lattice)
    except LivrefineError as e:
        logger.error("treillis %s: %s", name, e)
        return {"lattice": name, "certified": False, "closure": False, "violation": True}
    if not cert.certified:
        return {"lattice": name, "certified": False, "closure": None, "violation": False}
    member = closure_member(a, cond, lattice.derived_pair()).member
    if not member:
        logger.error("treillis %s certifié mais ⟨⊥.R, ⊤.G⟩ hors clôture", name)
    return {"lattice": name, "certified": True, "closure": member, "violation": not member}


def sweep_lattice(rng: random.Random, count: int) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    chain, cond = load_live_automaton(ROOT_DIR / "fixtures" / "chain.json")
    for lat in load_lattices(ROOT_DIR / "fixtures" / "chain_lattice.json"):
        rows.append(_lattice_row(f"corpus:{lat.name}", chain, cond, lat))
    certified = attempts = 0
    # seuls les treillis certifiés comptent; on tire jusqu'à en avoir `count`
    while certified < count and attempts < 50 * count:
        attempts += 1
        a, cond = random_live_automaton(rng, max_states=8, max_actions=4, max_pairs=3)
        row = _lattice_row(f"random:{attempts}", a, cond, random_chain_lattice(rng, a))
        certified += bool(row["certified"])
        rows.append(row)
    if certified < count:
        logger.warning("seulement %d treillis certifiés sur %d tirages", certified, attempts)
    return pd.DataFrame(rows)


SWEEPS: Dict[str, Callable[[random.Random, int], pd.DataFrame]] = {
    "live": sweep_live,
    "oracle": sweep_oracle,
    "lattice": sweep_lattice,
}


def _parse_args() -> argparse.Namespace:
    p = argparse.ArgumentParser(description="Balayages aléatoires d'acceptation (simulations vivaces, oracle, treillis).")
    p.add_argument("--mode", choices=[*SWEEPS, "all"], default="all", help="Balayage à exécuter")
    p.add_argument("--count", type=int, default=None, help="Nombre d'instances (défaut: effectif d'acceptation du mode)")
    p.add_argument("--seed", type=int, default=1, help="Graine du générateur")
    p.add_argument("--no-csv", action="store_true", help="Ne pas exporter les tableaux dans reports/")
    return p.parse_args()


def main() -> int:
    args = _parse_args()
    modes = list(SWEEPS) if args.mode == "all" else [args.mode]
    violations = 0
    for mode in modes:
        count = args.count if args.count is not None else DEFAULT_COUNTS[mode]
        t0 = time.perf_counter()
        frame = SWEEPS[mode](random.Random(args.seed), count)
        elapsed = time.perf_counter() - t0
        bad = int(frame["violation"].sum()) if not frame.empty else 0
        violations += bad
        logger.info("balayage %s: %d lignes, %d violations, %.1f s", mode, len(frame), bad, elapsed)
        if mode == "live" and not frame.empty:
            passing = frame[(frame["fwd"] == "pass") | (frame["bwd"] == "pass")]
            logger.info("live: %d candidats acceptés, %d lassos rejoués", len(passing), int(frame["lassos"].sum()))
        if not args.no_csv:
            export_csv(frame, f"acceptance_{mode}")
    return 1 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
