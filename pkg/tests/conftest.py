import numpy as np
import pytest

from qcorr.states import random_state

_CRITERIA = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_states():
    def make(n, seed=7):
        g = np.random.default_rng(seed)
        return [random_state(g) for _ in range(n)]

    return make


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the summary block."""

    def record(number, text, passed, detail=""):
        _CRITERIA[number] = (text, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        text, ok, detail = _CRITERIA[num]
        line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {text}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
