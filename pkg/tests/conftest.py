import numpy as np
import pytest

from kronsvd.problems import random_psf

# filled in by tests/test_acceptance.py, reported once at the end of the run
ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE[criterion] = (bool(passed), detail)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_psfs():
    g = np.random.default_rng(7)
    return [random_psf(n, g) for n in (2, 3, 4, 5, 6, 8)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE[key]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {key}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
