############################################################
# CHANGELOG:
# - [2026-10-02] agt102 {author=agent} {reason: configuration par variables d'environnement (.env)}
# - Impact: bornes par défaut, répertoires fixtures/rapports et paramètres du simulateur ESDS centralisés
# - Tests: tests/test_config.py (valeurs par défaut, surcharge via mocker.patch.dict)
# - Notes: load_dotenv n'écrase jamais une variable déjà exportée par run.sh
# - [2026-10-17] agt129 {author=agent} {reason: branche "variable manquante" inatteignable, tous les appels ont un défaut}
# - Impact: _get_env exige un défaut; une variable vide retombe aussi sur le défaut
# - Tests: tests/test_config.py::test_missing_or_empty_variable_uses_default
############################################################
"""
Configuration livrefine.

Variables d'environnement reconnues (chargées depuis .env si présent):
- LIVREFINE_FIXTURES (répertoire du corpus JSON, défaut: fixtures)
- LIVREFINE_REPORTS (répertoire des exports CSV, défaut: reports)
- LIVREFINE_DEFAULT_BOUND (borne des recherches de lassos, défaut: 6)
- LIVREFINE_VALSET_CAP (nombre max d'ensembles candidats pour valset, défaut: 4096)
- LIVREFINE_IMAGE_CAP (taille max matérialisée d'une image g[s], défaut: 10000)
- LIVREFINE_AGE_MAX, LIVREFINE_EPOCH (ordonnanceur équitable ESDS)
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from logger_config import logger

ROOT_DIR = Path(__file__).resolve().parents[1]

load_dotenv(ROOT_DIR / ".env", override=False)


def _get_env(name: str, default: str) -> str:
    # variable absente ou vide: défaut silencieux
    return os.getenv(name) or default


def _get_int(name: str, default: int) -> int:
    raw = _get_env(name, str(default))
    try:
        return int(raw)
    except ValueError:
        logger.warning("Valeur entière invalide pour %s: %r (défaut %s)", name, raw, default)
        return default


@dataclass(frozen=True)
class Settings:
    fixtures_dir: Path
    reports_dir: Path
    default_bound: int
    valset_cap: int
    image_cap: int
    age_max: int
    epoch: int


def get_settings() -> Settings:
    """Relit l'environnement à chaque appel (les tests patchent os.environ)."""
    fixtures = Path(_get_env("LIVREFINE_FIXTURES", str(ROOT_DIR / "fixtures")))
    reports = Path(_get_env("LIVREFINE_REPORTS", str(ROOT_DIR / "reports")))
    return Settings(
        fixtures_dir=fixtures,
        reports_dir=reports,
        default_bound=_get_int("LIVREFINE_DEFAULT_BOUND", 6),
        valset_cap=_get_int("LIVREFINE_VALSET_CAP", 4096),
        image_cap=_get_int("LIVREFINE_IMAGE_CAP", 10000),
        age_max=_get_int("LIVREFINE_AGE_MAX", 25),
        epoch=_get_int("LIVREFINE_EPOCH", 12),
    )


def fixture_path(name: str) -> Path:
    """Chemin d'un fichier du corpus (ajoute .json si absent)."""
    if not name.endswith(".json"):
        name = f"{name}.json"
    return get_settings().fixtures_dir / name
