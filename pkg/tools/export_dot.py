############################################################
# CHANGELOG:
# - [2026-10-16] agt128 {author=agent} {reason: export DOT des automates, treillis et digraphes induits}
# - Impact: un fichier .dot par objet dans le répertoire de sortie (rendu laissé à `dot -Tsvg`)
# - Tests: exécution locale sur fixtures/chain.json, fixtures/chain_lattice.json et fixtures/bsim1_*.json
# - Notes: les treillis paramétrés (ESDS) demandent --esds-config pour être développés
############################################################

"""
Export DOT

- `automaton`: états et pas, états de départ en double cercle; `--pair ID` colore R (rouge) et G (vert).
- `lattice`: tous les treillis d'un fichier, un .dot par treillis développé.
- `induced`: digraphe induit par unroll(α, k) pour un candidat de simulation arrière.

Utilisation rapide
- `python tools/export_dot.py automaton fixtures/chain.json --pair p01 --outdir reports/dot`
- `python tools/export_dot.py lattice fixtures/esds_req_lattice.json --esds-config fixtures/esds_small.json`
- `python tools/export_dot.py induced A.json B.json cand.json lasso.json --unroll 3`
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import graphviz

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))
from logger_config import logger
from src.automata import ExplicitAutomaton, LivrefineError, ModelError, sort_key, sorted_states
from src.correspondence import build_induced_digraph
from src.esds_types import load_config
from src.formats import load_candidate, load_lasso, load_lattices, load_live_automaton
from src.liveness import ComplementedPair, LivenessCondition
from src.reports import write_dot


def automaton_dot(automaton: ExplicitAutomaton, pair: Optional[ComplementedPair] = None) -> str:
    dot = graphviz.Digraph(name=automaton.name, graph_attr={"rankdir": "LR"})
    for s in sorted_states(automaton.states):
        attrs = {"shape": "doublecircle" if automaton.is_start(s) else "circle"}
        if pair is not None and s in pair.green:
            attrs.update(style="filled", fillcolor="palegreen")
        elif pair is not None and s in pair.red:
            attrs.update(style="filled", fillcolor="salmon")
        dot.node(str(s), **attrs)
    for s, act, t in sorted(automaton.steps, key=sort_key):
        dot.edge(str(s), str(t), label=str(act), style="dashed" if act.is_internal else "solid")
    return dot.source


def _pick_pair(cond: LivenessCondition, pair_id: Optional[str]) -> Optional[ComplementedPair]:
    if pair_id is None:
        return None
    pairs = cond.by_id()
    if pair_id not in pairs:
        raise ModelError(f"paire inconnue: {pair_id} (connues: {sorted(pairs)})")
    return pairs[pair_id]


def export_automaton(args: argparse.Namespace) -> List[Path]:
    a, cond = load_live_automaton(args.automaton)
    pair = _pick_pair(cond, args.pair)
    suffix = f"_{pair.id}" if pair is not None else ""
    return [write_dot(automaton_dot(a, pair), args.outdir / f"{Path(args.automaton).stem}{suffix}.dot")]


def export_lattices(args: argparse.Namespace) -> List[Path]:
    cfg = load_config(args.esds_config) if args.esds_config else None
    out = []
    for lat in load_lattices(args.lattice, cfg):
        out.append(write_dot(lat.to_dot(), args.outdir / f"{lat.name}.dot"))
    return out


def export_induced(args: argparse.Namespace) -> List[Path]:
    a, concrete = load_live_automaton(args.a)
    b, abstract = load_live_automaton(args.b)
    cand = load_candidate(args.candidate, concrete)
    alpha = load_lasso(args.lasso, a)
    digraph = build_induced_digraph(alpha, args.unroll, a, concrete, b, abstract, cand)
    logger.info("digraphe induit: %d noeuds, %d arcs", digraph.graph.number_of_nodes(), digraph.graph.number_of_edges())
    return [write_dot(digraph.to_dot(), args.outdir / f"induced_{Path(args.lasso).stem}.dot")]


def _parse_args() -> argparse.Namespace:
    p = argparse.ArgumentParser(description="Exporte automates, treillis et digraphes induits au format DOT.")
    p.add_argument("--outdir", type=Path, default=ROOT_DIR / "reports" / "dot", help="Répertoire de sortie")
    sub = p.add_subparsers(dest="kind", required=True)
    sp = sub.add_parser("automaton")
    sp.add_argument("automaton")
    sp.add_argument("--pair", default=None, help="Identifiant de paire à colorer")
    sp.set_defaults(func=export_automaton)
    sp = sub.add_parser("lattice")
    sp.add_argument("lattice")
    sp.add_argument("--esds-config", default=None, help="Configuration ESDS pour les treillis paramétrés")
    sp.set_defaults(func=export_lattices)
    sp = sub.add_parser("induced")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("candidate")
    sp.add_argument("lasso")
    sp.add_argument("--unroll", type=int, default=2)
    sp.set_defaults(func=export_induced)
    return p.parse_args()


def main() -> int:
    args = _parse_args()
    try:
        paths = args.func(args)
    except LivrefineError as e:
        logger.error("export DOT impossible: %s", e)
        return 1
    logger.info("%d fichier(s) DOT écrit(s) dans %s", len(paths), args.outdir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
