import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hamsurf.dynamics import Bump, Collar, ScalarField
from hamsurf.geometry import build_group
from hamsurf.words import Word

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def dom2():
    return build_group(2)


@pytest.fixture(scope="session")
def dom3():
    return build_group(3)


@pytest.fixture(scope="session")
def collar(dom2):
    return ScalarField(dom2, [Collar(Word.parse("a1"), 0.5, 1.0)])


@pytest.fixture(scope="session")
def collar_b(dom2):
    return ScalarField(dom2, [Collar(Word.parse("b1"), 0.5, 1.0)])


@pytest.fixture(scope="session")
def bump(dom2):
    return ScalarField(dom2, [Bump(0.2 + 0.1j, 0.6, 1.0)])


@pytest.fixture(scope="session")
def origin_bump(dom2):
    return ScalarField(dom2, [Bump(0j, 0.8, 1.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one acceptance line: ``record(criterion, ok, detail)``."""

    def _record(criterion: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[criterion] = (bool(ok), detail)
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
