from pathlib import Path

import pytest

from src.esds_scheduler import run_fair_scheduler
from src.formats import load_live_automaton
from tests.helpers import chained_esds, tiny_esds

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture
def fixture_file():
    return lambda name: FIXTURES / name


@pytest.fixture
def live_fixture():
    return lambda name: load_live_automaton(FIXTURES / name)


@pytest.fixture(scope="session")
def alg_log():
    """Run ESDS-Alg court partagé (jusqu'à quiescence)."""
    return run_fair_scheduler(tiny_esds())


@pytest.fixture(scope="session")
def esds2_log():
    """ESDS-II court: quiescent après la charge (cinq pas par opération)."""
    return run_fair_scheduler(tiny_esds("esds2", steps=200))


@pytest.fixture(scope="session")
def esds2_long_log():
    """ESDS-II sur 100 opérations chaînées: 500 pas avant quiescence."""
    return run_fair_scheduler(chained_esds(100))
