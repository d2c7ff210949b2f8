############################################################
# CHANGELOG:
# - [2026-10-15] agt122 {author=agent} {reason: chargeurs JSON (automates, paires, candidats, lassos, treillis gabarits)}
# - Impact: toutes les entrées fichier passent par ici; SchemaError porte un JSON pointer vers le champ fautif
# - Tests: tests/test_formats.py (fixtures du corpus, pointeurs d'erreur, gabarits ESDS, profondeur des inclusions)
# - Notes: les prédicats nommés ESDS exigent un PredicateContext (config chargée)
############################################################
"""
Formats de fichiers.

Automate: {"states", "start", "external", "internal", "steps": [[s, "a(x)", t], ...]}, avec en option
les clés de condition ("pairs", "buchi", "gen_buchi", "fault").

Prédicat d'état: liste d'états | "true" | "false" | {"states": [...]} | {"pred": nom, "args": [...]}.

Candidat: {"g": [[s, u], ...] | "identity" | {"pred": "identity" | "project"},
           "h": {id_M: id_L | {"id", "tag"} | {"id", "red", "green", "tag"}},
           "inv_a", "inv_b", "bound", "certificates"}.

Treillis: {"name", "params", "foreach", "pairs", "order", "top", "bottom", "includes"}; les chaînes
"$v" sont substituées, chaque élément est déplié sur le produit des variables foreach qu'il contient.
"""

from __future__ import annotations

import itertools
import json
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import (
    ActionKind,
    ExecutionFragment,
    ExplicitAutomaton,
    Lasso,
    ModelError,
    SchemaError,
    State,
    StatePredicate,
    parse_action,
    sorted_states,
)
from src.esds_predicates import PredicateContext, make_predicate
from src.esds_types import EsdsConfig
from src.lattice import PairLattice
from src.liveness import ComplementedPair, LivenessCondition, buchi_to_pairs, fault_tolerance_pair, gen_buchi_to_pairs
from src.relations import PairMap, PairTag, PairTarget, SimulationCandidate, StateRelation

CONDITION_KEYS = ("pairs", "buchi", "gen_buchi", "fault")
_VAR = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")


def read_json(path: Path | str) -> Any:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"fichier introuvable {path}", "/")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"JSON invalide dans {path.name} ({e.msg}, ligne {e.lineno})", "/") from e


def _expect(raw: Any, kind: type | Tuple[type, ...], pointer: str, what: str) -> Any:
    if not isinstance(raw, kind):
        raise SchemaError(f"{what} attendu", pointer)
    return raw


def _state(raw: Any, pointer: str) -> State:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise SchemaError("état attendu (chaîne ou entier)", pointer)
    return raw


def state_text(state: State) -> str | int:
    return state if isinstance(state, (str, int)) and not isinstance(state, bool) else str(state)


# --- automates ---

def automaton_from_json(raw: Any, name: str = "A") -> ExplicitAutomaton:
    _expect(raw, dict, "", "objet automate")
    for key in ("states", "start", "external", "internal", "steps"):
        if key not in raw:
            raise SchemaError(f"champ manquant {key!r}", f"/{key}")
        _expect(raw[key], list, f"/{key}", "liste")
    states = [_state(s, f"/states/{i}") for i, s in enumerate(raw["states"])]
    start = [_state(s, f"/start/{i}") for i, s in enumerate(raw["start"])]
    external = {parse_action(_expect(a, str, f"/external/{i}", "action"), ActionKind.EXTERNAL) for i, a in enumerate(raw["external"])}
    internal = {parse_action(_expect(a, str, f"/internal/{i}", "action"), ActionKind.INTERNAL) for i, a in enumerate(raw["internal"])}
    internal_names = {str(a) for a in internal}
    steps = set()
    for i, step in enumerate(raw["steps"]):
        if not isinstance(step, list) or len(step) != 3:
            raise SchemaError("pas attendu [s, a, t]", f"/steps/{i}")
        text = _expect(step[1], str, f"/steps/{i}/1", "action")
        kind = ActionKind.INTERNAL if str(parse_action(text)) in internal_names else ActionKind.EXTERNAL
        steps.add((_state(step[0], f"/steps/{i}/0"), parse_action(text, kind), _state(step[2], f"/steps/{i}/2")))
    return ExplicitAutomaton(
        states=frozenset(states),
        start=frozenset(start),
        external=frozenset(external),
        internal=frozenset(internal),
        steps=frozenset(steps),
        name=str(raw.get("name", name)),
    )


def automaton_to_json(automaton: ExplicitAutomaton) -> Dict[str, Any]:
    return {
        "name": automaton.name,
        "states": [state_text(s) for s in sorted_states(automaton.states)],
        "start": [state_text(s) for s in sorted_states(automaton.start)],
        "external": sorted(str(a) for a in automaton.external),
        "internal": sorted(str(a) for a in automaton.internal),
        "steps": [[state_text(s), str(a), state_text(t)] for s, a, t in automaton.sorted_steps()],
    }


def load_automaton(path: Path | str) -> ExplicitAutomaton:
    path = Path(path)
    automaton = automaton_from_json(read_json(path), name=path.stem)
    logger.debug("automate %s: %d états, %d pas", automaton.name, len(automaton.states), len(automaton.steps))
    return automaton


def load_live_automaton(path: Path | str, ctx: Optional[PredicateContext] = None) -> Tuple[ExplicitAutomaton, LivenessCondition]:
    """Automate et condition embarquée (condition vide si aucune clé de condition)."""
    raw = read_json(path)
    automaton = automaton_from_json(raw, name=Path(path).stem)
    condition = condition_from_json(raw, ctx) if any(k in raw for k in CONDITION_KEYS) else LivenessCondition()
    return automaton, condition


# --- prédicats et paires ---

def predicate_from_json(raw: Any, pointer: str, ctx: Optional[PredicateContext] = None) -> StatePredicate:
    if raw == "true":
        return StatePredicate.everything()
    if raw == "false":
        return StatePredicate.nothing()
    if isinstance(raw, list):
        return StatePredicate.of(_state(s, f"{pointer}/{i}") for i, s in enumerate(raw))
    if isinstance(raw, dict) and "states" in raw:
        states = _expect(raw["states"], list, f"{pointer}/states", "liste d'états")
        return StatePredicate.of(_state(s, f"{pointer}/states/{i}") for i, s in enumerate(states))
    if isinstance(raw, dict) and "pred" in raw:
        name = _expect(raw["pred"], str, f"{pointer}/pred", "nom de prédicat")
        args = [str(a) for a in _expect(raw.get("args", []), list, f"{pointer}/args", "liste d'arguments")]
        if ctx is None:
            raise SchemaError(f"prédicat nommé {name!r}: configuration ESDS requise (--config)", f"{pointer}/pred")
        try:
            return make_predicate(ctx, name, args)
        except ModelError as e:
            raise SchemaError(str(e), f"{pointer}/pred") from e
    raise SchemaError("prédicat attendu (liste, true/false, states ou pred)", pointer)


def pair_from_json(raw: Any, pointer: str, ctx: Optional[PredicateContext] = None) -> ComplementedPair:
    _expect(raw, dict, pointer, "objet paire")
    for key in ("id", "red", "green"):
        if key not in raw:
            raise SchemaError(f"champ manquant {key!r}", f"{pointer}/{key}")
    return ComplementedPair(
        str(raw["id"]),
        predicate_from_json(raw["red"], f"{pointer}/red", ctx),
        predicate_from_json(raw["green"], f"{pointer}/green", ctx),
    )


def condition_from_json(raw: Any, ctx: Optional[PredicateContext] = None) -> LivenessCondition:
    _expect(raw, dict, "", "objet condition")
    if not any(k in raw for k in CONDITION_KEYS):
        raise SchemaError(f"condition vide (clés attendues: {', '.join(CONDITION_KEYS)})", "/")
    pairs: List[ComplementedPair] = []
    for i, p in enumerate(_expect(raw.get("pairs", []), list, "/pairs", "liste de paires")):
        pairs.append(pair_from_json(p, f"/pairs/{i}", ctx))
    if "buchi" in raw:
        pairs.extend(buchi_to_pairs(predicate_from_json(raw["buchi"], "/buchi", ctx)).pairs)
    if "gen_buchi" in raw:
        greens = _expect(raw["gen_buchi"], list, "/gen_buchi", "liste d'ensembles")
        pairs.extend(gen_buchi_to_pairs([predicate_from_json(g, f"/gen_buchi/{i}", ctx) for i, g in enumerate(greens)]).pairs)
    if "fault" in raw:
        spec = _expect(raw["fault"], dict, "/fault", "objet {fault, good}")
        for key in ("fault", "good"):
            if key not in spec:
                raise SchemaError(f"champ manquant {key!r}", f"/fault/{key}")
        pairs.append(
            fault_tolerance_pair(
                predicate_from_json(spec["good"], "/fault/good", ctx),
                predicate_from_json(spec["fault"], "/fault/fault", ctx),
                str(spec.get("id", "fault-tolerance")),
            )
        )
    ids = [p.id for p in pairs]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise SchemaError(f"identifiants de paires dupliqués {dup}", "/pairs")
    return LivenessCondition.of(pairs)


def load_pairs(path: Path | str, ctx: Optional[PredicateContext] = None) -> LivenessCondition:
    condition = condition_from_json(read_json(path), ctx)
    logger.debug("paires %s: %d", Path(path).name, len(condition))
    return condition


# --- candidats ---

def _project(state: State) -> Iterable[State]:
    if not isinstance(state, tuple) or not state:
        raise ModelError(f"projection: état composite attendu, reçu {state!r}")
    return (state[0],)


RELATIONS = {
    "identity": lambda: StateRelation.identity(),
    "project": lambda: StateRelation(image_fn=_project, name="project"),
}


def relation_from_json(raw: Any, pointer: str = "/g") -> StateRelation:
    if isinstance(raw, str):
        raw = {"pred": raw}
    if isinstance(raw, dict):
        name = raw.get("pred")
        if name not in RELATIONS:
            raise SchemaError(f"relation nommée inconnue {name!r} (attendu: {', '.join(sorted(RELATIONS))})", f"{pointer}/pred")
        return RELATIONS[name]()
    rows = []
    for i, row in enumerate(_expect(raw, list, pointer, "liste de couples [s, u]")):
        if not isinstance(row, list) or len(row) != 2:
            raise SchemaError("couple [s, u] attendu", f"{pointer}/{i}")
        rows.append((_state(row[0], f"{pointer}/{i}/0"), _state(row[1], f"{pointer}/{i}/1")))
    return StateRelation(rows=rows, name="g")


def _pair_target(raw: Any, pointer: str, concrete: Mapping[str, ComplementedPair], ctx: Optional[PredicateContext]) -> PairTarget:
    if isinstance(raw, str):
        raw = {"id": raw}
    _expect(raw, dict, pointer, "identifiant ou objet paire")
    if "id" not in raw:
        raise SchemaError("champ manquant 'id'", f"{pointer}/id")
    inline = "red" in raw or "green" in raw
    try:
        tag = PairTag(raw.get("tag", PairTag.CLAIMED_DERIVED.value if inline else PairTag.IN_L.value))
    except ValueError as e:
        raise SchemaError(f"étiquette inconnue {raw.get('tag')!r}", f"{pointer}/tag") from e
    if inline:
        return PairTarget(pair_from_json(raw, pointer, ctx), tag)
    pid = str(raw["id"])
    if pid not in concrete:
        raise SchemaError(f"paire concrète inconnue {pid!r}", f"{pointer}/id")
    return PairTarget(concrete[pid], tag)


def candidate_from_json(
    raw: Any, concrete: LivenessCondition | Sequence[ComplementedPair] = (), ctx: Optional[PredicateContext] = None
) -> SimulationCandidate:
    _expect(raw, dict, "", "objet candidat")
    if "g" not in raw:
        raise SchemaError("champ manquant 'g'", "/g")
    by_id = concrete.by_id() if isinstance(concrete, LivenessCondition) else {p.id: p for p in concrete}
    entries = {
        str(q): _pair_target(target, f"/h/{q}", by_id, ctx)
        for q, target in _expect(raw.get("h", {}), dict, "/h", "objet h").items()
    }
    bound = raw.get("bound")
    if bound is not None and (isinstance(bound, bool) or not isinstance(bound, int) or bound < 1):
        raise SchemaError("borne entière >= 1 attendue", "/bound")
    certificates = _expect(raw.get("certificates", {}), dict, "/certificates", "objet certificats")
    return SimulationCandidate(
        g=relation_from_json(raw["g"]),
        h=PairMap(entries),
        inv_a=predicate_from_json(raw.get("inv_a", "true"), "/inv_a", ctx),
        inv_b=predicate_from_json(raw.get("inv_b", "true"), "/inv_b", ctx),
        bound=bound,
        certificates={str(k): str(v) for k, v in certificates.items()},
    )


def load_candidate(
    path: Path | str, concrete: LivenessCondition | Sequence[ComplementedPair] = (), ctx: Optional[PredicateContext] = None
) -> SimulationCandidate:
    return candidate_from_json(read_json(path), concrete, ctx)


# --- lassos ---

def _fragment(raw: Any, pointer: str, kinds: Mapping[str, ActionKind]) -> ExecutionFragment:
    _expect(raw, dict, pointer, "objet fragment")
    states = [_state(s, f"{pointer}/states/{i}") for i, s in enumerate(_expect(raw.get("states"), list, f"{pointer}/states", "liste"))]
    texts = _expect(raw.get("actions", []), list, f"{pointer}/actions", "liste")
    actions = tuple(parse_action(t, kinds.get(str(t), ActionKind.EXTERNAL)) for t in texts)
    try:
        return ExecutionFragment(tuple(states), actions)
    except ModelError as e:
        raise SchemaError(str(e), pointer) from e


def lasso_from_json(raw: Any, automaton: ExplicitAutomaton) -> Lasso:
    """Relit un lasso émis par to_json(); les types d'action viennent de la signature."""
    _expect(raw, dict, "", "objet lasso")
    if "witness" in raw and isinstance(raw["witness"], dict):
        raw = raw["witness"]
    kinds = {str(a): a.kind for a in automaton.actions()}
    try:
        return Lasso(_fragment(raw.get("stem"), "/stem", kinds), _fragment(raw.get("cycle"), "/cycle", kinds))
    except ModelError as e:
        raise SchemaError(str(e), "/cycle") from e


def load_lasso(path: Path | str, automaton: ExplicitAutomaton) -> Lasso:
    return lasso_from_json(read_json(path), automaton)


# --- treillis ---

def _domain(name: str, binding: Mapping[str, str], ctx: Optional[PredicateContext], pointer: str) -> List[str]:
    if ctx is None:
        raise SchemaError(f"domaine {name!r}: configuration ESDS requise", pointer)
    if name == "replicas":
        return list(ctx.replicas)
    if name == "clients":
        return list(ctx.clients)
    if name == "ops":
        return sorted(ctx.table)
    if name == "prev":
        if "x" not in binding or binding["x"] not in ctx.table:
            raise SchemaError("domaine 'prev': variable x liée à une opération requise", pointer)
        return sorted(ctx.table[binding["x"]].prev)
    raise SchemaError(f"domaine inconnu {name!r} (replicas, clients, ops, prev)", pointer)


def _subst(raw: Any, binding: Mapping[str, str], pointer: str) -> Any:
    if isinstance(raw, str):
        def repl(m: re.Match) -> str:
            if m.group(1) not in binding:
                raise SchemaError(f"variable non liée ${m.group(1)}", pointer)
            return binding[m.group(1)]

        return _VAR.sub(repl, raw)
    if isinstance(raw, list):
        return [_subst(v, binding, pointer) for v in raw]
    if isinstance(raw, dict):
        return {k: _subst(v, binding, pointer) for k, v in raw.items()}
    return raw


def _vars_in(raw: Any) -> set:
    return set(_VAR.findall(json.dumps(raw)))


def _expand(raw: Any, binding: Mapping[str, str], domains: Mapping[str, List[str]], pointer: str) -> List[Any]:
    """Déplie un élément sur le produit des variables foreach qu'il mentionne."""
    free = sorted(v for v in _vars_in(raw) if v in domains and v not in binding)
    out = []
    for combo in itertools.product(*(domains[v] for v in free)):
        local = {**binding, **dict(zip(free, combo))}
        out.append((_subst(raw, local, pointer), local))
    return out


class LatticeLoader:
    """Charge un gabarit de treillis et ses inclusions (profondeur bornée)."""

    def __init__(self, base_dir: Path, ctx: Optional[PredicateContext] = None, max_depth: int = 4) -> None:
        self.base_dir = base_dir
        self.ctx = ctx
        self.max_depth = max_depth

    def load(self, raw: Any, binding: Mapping[str, str], depth: int = 0, source: str = "lattice") -> PairLattice:
        if depth > self.max_depth:
            raise ModelError(f"{source}: profondeur d'inclusion {depth} > {self.max_depth}")
        _expect(raw, dict, "", "objet treillis")
        for key in ("pairs", "top", "bottom"):
            if key not in raw:
                raise SchemaError(f"champ manquant {key!r}", f"/{key}")
        foreach = _expect(raw.get("foreach", {}), dict, "/foreach", "objet foreach")
        domains = {v: _domain(d, binding, self.ctx, f"/foreach/{v}") for v, d in foreach.items()}
        pairs: List[ComplementedPair] = []
        for i, item in enumerate(_expect(raw["pairs"], list, "/pairs", "liste de paires")):
            for concrete, _ in _expand(item, binding, domains, f"/pairs/{i}"):
                pairs.append(pair_from_json(concrete, f"/pairs/{i}", self.ctx))
        order = []
        for i, edge in enumerate(_expect(raw.get("order", []), list, "/order", "liste d'arêtes")):
            if not isinstance(edge, list) or len(edge) != 2:
                raise SchemaError("arête [a, b] attendue", f"/order/{i}")
            order.extend(tuple(e) for e, _ in _expand(edge, binding, domains, f"/order/{i}"))
        label = ",".join(f"{k}={binding[k]}" for k in sorted(binding))
        name = str(raw.get("name", source)) + (f"[{label}]" if label else "")
        try:
            lattice = PairLattice.build(
                pairs, order, _subst(raw["top"], binding, "/top"), _subst(raw["bottom"], binding, "/bottom"), name
            )
        except ModelError as e:
            raise SchemaError(str(e), "/order") from e
        for i, inc in enumerate(_expect(raw.get("includes", []), list, "/includes", "liste d'inclusions")):
            self._include(lattice, inc, binding, domains, depth, f"/includes/{i}")
        return lattice

    def _include(
        self,
        lattice: PairLattice,
        inc: Any,
        binding: Mapping[str, str],
        domains: Mapping[str, List[str]],
        depth: int,
        pointer: str,
    ) -> None:
        _expect(inc, dict, pointer, "objet inclusion")
        for key in ("file", "attach"):
            if key not in inc:
                raise SchemaError(f"champ manquant {key!r}", f"{pointer}/{key}")
        child_raw = read_json(self.base_dir / str(inc["file"]))
        for attach_inc, local in _expand({"attach": inc["attach"], "bind": inc.get("bind", {})}, binding, domains, pointer):
            attach = attach_inc["attach"]
            if attach not in lattice.pairs:
                raise SchemaError(f"élément d'attache inconnu {attach!r}", f"{pointer}/attach")
            base = {str(k): str(v) for k, v in attach_inc["bind"].items()}
            over = _expect(inc.get("over", {}), dict, f"{pointer}/over", "objet over")
            names = sorted(over)
            for combo in itertools.product(*(_domain(over[v], base, self.ctx, f"{pointer}/over/{v}") for v in names)):
                child_binding = {**base, **dict(zip(names, combo))}
                sub = self.load(child_raw, child_binding, depth + 1, Path(str(inc["file"])).stem)
                lattice.sublattices.setdefault(attach, []).append(sub)


def lattices_from_json(
    raw: Any, base_dir: Path | str = ".", ctx: Optional[PredicateContext] = None, cfg: Optional[EsdsConfig] = None
) -> List[PairLattice]:
    """Un treillis par valeur des paramètres (« params »: liste de variables sur les opérations)."""
    _expect(raw, dict, "", "objet treillis")
    max_depth = cfg.longest_prev_chain() + 1 if cfg is not None else 4
    loader = LatticeLoader(Path(base_dir), ctx, max_depth)
    params = _expect(raw.get("params", []), list, "/params", "liste de paramètres")
    if not params:
        return [loader.load(raw, {})]
    if ctx is None:
        raise SchemaError("treillis paramétré: configuration ESDS requise", "/params")
    out = []
    for combo in itertools.product(*(sorted(ctx.table) for _ in params)):
        out.append(loader.load(raw, dict(zip((str(p) for p in params), combo))))
    logger.info("treillis %s: %d instance(s)", raw.get("name", "lattice"), len(out))
    return out


def load_lattices(path: Path | str, cfg: Optional[EsdsConfig] = None) -> List[PairLattice]:
    path = Path(path)
    ctx = PredicateContext.of(cfg) if cfg is not None else None
    return lattices_from_json(read_json(path), path.parent, ctx, cfg)


def load_lattice(path: Path | str) -> PairLattice:
    lattices = load_lattices(path)
    return lattices[0]


def pair_to_json(pair: ComplementedPair, universe: Iterable[State]) -> Dict[str, Any]:
    """Paire explicitée sur un univers fini (réinjectable dans un fichier automate)."""
    universe = sorted_states(universe)
    return {
        "id": pair.id,
        "red": [state_text(s) for s in universe if s in pair.red],
        "green": [state_text(s) for s in universe if s in pair.green],
    }
