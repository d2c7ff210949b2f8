############################################################
# CHANGELOG:
# - [2026-10-13] agt119 {author=agent} {reason: ordonnanceur équitable déterministe + journal d'exécution JSONL}
# - Impact: runs ESDS rejouables (graine), invariants de sûreté vérifiés à chaque pas, audit d'équité en en-tête
# - Tests: tests/test_esds_scheduler.py (quiescence, strict après stabilité, rejeu octet par octet, variante lossy)
# - Notes: gossip et renvois front-end limités à une fois par époque tant qu'un autre travail est possible
############################################################
"""
Ordonnanceur équitable ESDS.

- une classe de tâche par (composant, famille d'action, type de message / pair);
- une classe continûment activée depuis `age_max` tours passe en tête (la plus ancienne d'abord);
- sinon choix uniforme (random.Random(seed)) parmi les classes proposées;
- fin au budget de pas ou à la quiescence (alg: canaux vides et seuls des gossip sans effet).

Le journal est une suite de lignes JSON: en-tête, événements (action + empreintes pré/post),
instantanés complets tous les `snapshot_interval` pas, pied de journal.
"""

from __future__ import annotations

import argparse
import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from logger_config import logger
from src.automata import (
    ActionLabel,
    Automaton,
    ExecutionFragment,
    InternalInvariantError,
    SchemaError,
    State,
    sort_key,
)
from src.esds_components import CompositeState, Replica, build_system, msg_kind, receive
from src.esds_predicates import channels_of, is_alg, replicas_of, users_of, view_ops, view_po, view_stabilized
from src.esds_types import EsdsConfig, canonical_json, config_from_json, digest, from_jsonable, is_strict_order, load_config, valset

TaskClass = Tuple[str, ...]


# --- journal ---

@dataclass
class ExecutionLog:
    config: EsdsConfig
    initial: State
    actions: List[ActionLabel] = field(default_factory=list)
    digests: List[str] = field(default_factory=list)
    snapshots: Dict[int, State] = field(default_factory=dict)
    audit: Dict[str, Any] = field(default_factory=dict)
    footer: Dict[str, Any] = field(default_factory=dict)
    _states: Optional[List[State]] = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def system(self) -> Automaton:
        return build_system(self.config)

    def states(self) -> List[State]:
        """États s0..sn reconstruits par rejeu forcé depuis l'état initial."""
        if self._states is None:
            system = self.system
            states = [self.initial]
            for a in self.actions:
                states.append(system.apply(states[-1], a))
            for k, snap in self.snapshots.items():
                if k < len(states) and states[k] != snap:
                    raise InternalInvariantError(f"journal: instantané {k} différent de l'état rejoué")
            self._states = states
        return self._states

    def fragment(self) -> ExecutionFragment:
        return ExecutionFragment(tuple(self.states()), tuple(self.actions))

    def replay_ok(self) -> bool:
        """Les empreintes recalculées coïncident avec celles du journal."""
        if not self.digests:
            return True
        return [digest(s) for s in self.states()] == self.digests

    @classmethod
    def from_actions(cls, config: EsdsConfig, actions: Sequence[ActionLabel], system: Optional[Automaton] = None) -> "ExecutionLog":
        """Journal construit par application forcée (sans précondition), pour les mutations."""
        system = system or build_system(config)
        initial = system.start_states()[0]
        log = cls(config, initial, list(actions))
        log.digests = [digest(s) for s in log.states()]
        log.snapshots = {0: initial}
        return log

    # sérialisation

    def to_lines(self) -> List[str]:
        header = {
            "type": "header",
            "seed": self.config.seed,
            "config": self.config.to_json(),
            "audit": self.audit,
        }
        lines = [json.dumps(header, sort_keys=True, ensure_ascii=False)]
        interval = max(1, self.config.snapshot_interval)
        for i in range(len(self.actions) + 1):
            if i in self.snapshots or i % interval == 0:
                snap = self.snapshots.get(i)
                if snap is None:
                    snap = self.states()[i]
                lines.append(canonical_json({"type": "snapshot", "index": i, "state": snap}))
            if i < len(self.actions):
                event = {
                    "type": "event",
                    "index": i + 1,
                    "action": self.actions[i],
                    "pre": self.digests[i] if self.digests else "",
                    "post": self.digests[i + 1] if self.digests else "",
                }
                lines.append(canonical_json(event))
        lines.append(json.dumps({"type": "footer", **self.footer}, sort_keys=True, ensure_ascii=False))
        return lines

    def write(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.to_lines()) + "\n", encoding="utf-8")
        logger.info("journal écrit: %s (%d pas)", path, len(self.actions))
        return path

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "ExecutionLog":
        header: Optional[Dict[str, Any]] = None
        actions: List[ActionLabel] = []
        digests: List[str] = []
        snapshots: Dict[int, State] = {}
        footer: Dict[str, Any] = {}
        for n, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"ligne JSON invalide ({e.msg})", f"/{n}") from e
            kind = raw.get("type")
            if kind == "header":
                header = raw
            elif kind == "snapshot":
                snapshots[int(raw["index"])] = from_jsonable(raw["state"], f"/{n}/state")
            elif kind == "event":
                if int(raw["index"]) != len(actions) + 1:
                    raise SchemaError("événements non consécutifs", f"/{n}/index")
                actions.append(from_jsonable(raw["action"], f"/{n}/action"))
                if not digests:
                    digests.append(raw.get("pre", ""))
                digests.append(raw.get("post", ""))
            elif kind == "footer":
                footer = {k: v for k, v in raw.items() if k != "type"}
            else:
                raise SchemaError(f"type de ligne inconnu {kind!r}", f"/{n}/type")
        if header is None:
            raise SchemaError("en-tête manquant", "/0")
        if 0 not in snapshots:
            raise SchemaError("instantané initial manquant", "/1")
        config = config_from_json(header["config"])
        if not all(digests):
            digests = []
        return cls(config, snapshots[0], actions, digests, snapshots, header.get("audit", {}), footer)

    @classmethod
    def read(cls, path: Path | str) -> "ExecutionLog":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)


# --- ordonnanceur ---

def enabled_actions(system: Automaton, state: State) -> List[ActionLabel]:
    return [a for a in system.candidate_actions(state) if system.precondition(state, a)]


def _gossip_noop(system: Automaton, state: CompositeState, action: ActionLabel) -> bool:
    sender, target, msg = action.payload
    receiver: Replica = system.component(f"Replica({target})")
    current = state.part(receiver.name)
    return receiver.apply(current, receive(sender, target, msg)) == current


def is_quiescent(system: Automaton, state: State, enabled: Sequence[ActionLabel]) -> bool:
    if not enabled:
        return True
    if not is_alg(state):
        return False
    if any(ch.queue for ch in channels_of(state).values()):
        return False
    return all(a.name == "send" and msg_kind(a) == "gossip" and _gossip_noop(system, state, a) for a in enabled)


def _throttle_key(action: ActionLabel) -> Optional[Tuple]:
    if action.name != "send":
        return None
    kind = msg_kind(action)
    if kind == "gossip":
        return ("gossip", action.payload[0], action.payload[1])
    if kind == "req":
        return ("req", action.payload[0], action.payload[1], action.payload[2][1])
    return None


def _throttled(action: ActionLabel, step: int, last_sent: Dict[Tuple, int], epoch: int) -> bool:
    key = _throttle_key(action)
    return key is not None and key in last_sent and step - last_sent[key] < epoch


def safety_violations(cfg: EsdsConfig, pre: State, action: ActionLabel, post: State, index: int) -> List[Dict[str, Any]]:
    """Invariants de sûreté après le pas `index`."""
    out: List[Dict[str, Any]] = []
    table = cfg.table

    def add(name: str, detail: str) -> None:
        out.append({"index": index, "invariant": name, "detail": detail})

    users = users_of(post)
    if not users.responded <= users.requested:
        add("responded ⊆ requested", str(sorted(users.responded - users.requested)))
    if is_alg(post):
        for r, rs in replicas_of(post).items():
            for i in cfg.replicas:
                if not rs.stable_at(i) <= rs.done_at(i):
                    add("stable ⊆ done", f"{r}[{i}]")
    elif not view_stabilized(post) <= view_ops(post):
        add("stabilized ⊆ ops", str(sorted(view_stabilized(post) - view_ops(post))))
    if not is_strict_order(view_po(post, table)):
        add("po acyclique", "cycle")
    produced = None
    if action.name == "calculate":
        produced = action.payload
    elif action.name == "send" and msg_kind(action) == "resp":
        produced = action.payload[2][1:]
    if produced is not None:
        x, v = produced
        if v not in valset(x, view_ops(pre), view_po(pre, table), table):
            add("valeur ∈ valset", f"{x}: {sorted(v)}")
    return out


@dataclass
class _Ages:
    age: Dict[TaskClass, int] = field(default_factory=dict)
    max_age: int = 0
    overdue_max: int = 0

    def tick(self, offered: Iterable[TaskClass]) -> None:
        offered = set(offered)
        self.age = {c: self.age.get(c, 0) + 1 for c in offered}
        if self.age:
            self.max_age = max(self.max_age, max(self.age.values()))

    def overdue(self, age_max: int) -> List[TaskClass]:
        late = [c for c, a in self.age.items() if a >= age_max]
        self.overdue_max = max(self.overdue_max, len(late))
        return sorted(late, key=lambda c: (-self.age[c], c))

    def fired(self, c: TaskClass) -> None:
        self.age[c] = 0


def run_fair_scheduler(cfg: EsdsConfig, system: Optional[Automaton] = None) -> ExecutionLog:
    """Run déterministe (graine cfg.seed) jusqu'à quiescence ou cfg.steps pas."""
    started = time.perf_counter()
    system = system or build_system(cfg)
    rng = random.Random(cfg.seed)
    state = system.start_states()[0]
    log = ExecutionLog(cfg, state, snapshots={0: state})
    log.digests.append(digest(state))
    ages = _Ages()
    last_sent: Dict[Tuple, int] = {}
    violations: List[Dict[str, Any]] = []
    quiescent = False
    for step in range(cfg.steps):
        enabled = enabled_actions(system, state)
        if is_quiescent(system, state, enabled):
            quiescent = True
            break
        fresh = [a for a in enabled if not _throttled(a, step, last_sent, cfg.epoch)]
        offered = fresh or enabled
        classes: Dict[TaskClass, List[ActionLabel]] = {}
        for a in offered:
            classes.setdefault(system.task_class(a), []).append(a)
        ages.tick(classes)
        late = ages.overdue(cfg.age_max)
        chosen_class = late[0] if late else rng.choice(sorted(classes))
        candidates = sorted(classes[chosen_class], key=sort_key)
        action = candidates[0] if len(candidates) == 1 else rng.choice(candidates)
        ages.fired(chosen_class)
        key = _throttle_key(action)
        if key is not None:
            last_sent[key] = step
        nxt = system.apply(state, action)
        found = safety_violations(cfg, state, action, nxt, step + 1)
        if found:
            logger.warning("pas %d: invariant(s) violé(s): %s", step + 1, [v["invariant"] for v in found])
            violations.extend(found)
        log.actions.append(action)
        log.digests.append(digest(nxt))
        if (step + 1) % max(1, cfg.snapshot_interval) == 0:
            log.snapshots[step + 1] = nxt
        state = nxt
    else:
        quiescent = is_quiescent(system, state, enabled_actions(system, state))
    log._states = None
    log.audit = {
        "age_max": cfg.age_max,
        "max_age_observed": ages.max_age,
        "overdue_max": ages.overdue_max,
        "fair": ages.max_age <= cfg.age_max + ages.overdue_max,
    }
    log.footer = {
        "steps": len(log.actions),
        "quiescent": quiescent,
        "violations": violations,
        "max_age": ages.max_age,
    }
    logger.info(
        "run %s seed=%s: %d pas, quiescent=%s, %d violation(s) (%.2fs)",
        cfg.system,
        cfg.seed,
        len(log.actions),
        quiescent,
        len(violations),
        time.perf_counter() - started,
    )
    return log


def _parse_args() -> argparse.Namespace:
    p = argparse.ArgumentParser(description="Run ESDS équitable (journal JSONL sur stdout ou --out)")
    p.add_argument("config", help="Fichier de configuration JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", default=None, help="Chemin du journal (défaut: stdout)")
    return p.parse_args()


def main() -> None:
    args = _parse_args()
    cfg = load_config(args.config).with_overrides(seed=args.seed, steps=args.steps)
    log = run_fair_scheduler(cfg)
    if args.out:
        log.write(args.out)
    else:
        print("\n".join(log.to_lines()))


if __name__ == "__main__":
    main()
