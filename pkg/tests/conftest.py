import sys
from pathlib import Path

import numpy as np
import pytest

from musielak.nfunction import DoublePhase, Orlicz, PowerVariable
from musielak.spaces import DomainGrid
from musielak.verify import builtin_families

sys.path.insert(0, str(Path(__file__).parent))

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(scope="session")
def configs():
    return CONFIGS


@pytest.fixture(scope="session")
def families():
    return builtin_families()


@pytest.fixture(params=["power_variable", "orlicz", "double_phase"])
def family(request, families):
    return families[request.param]


@pytest.fixture(scope="session")
def p2():
    return PowerVariable(2.0)


@pytest.fixture(scope="session")
def dp():
    return DoublePhase(2.0, 3.0, 1.0)


@pytest.fixture(scope="session")
def tlog():
    return Orlicz()


@pytest.fixture(scope="session")
def small_grid():
    return DomainGrid(2, 2.0, 9, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
