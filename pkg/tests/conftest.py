import numpy as np
import pytest

from zerodist import ZeroSequence


def seq(values) -> ZeroSequence:
    return ZeroSequence(np.asarray(list(values), dtype=complex))


@pytest.fixture(scope="session")
def integers_1e4():
    return seq(range(1, 10_001))


@pytest.fixture(scope="session")
def symmetric_integers_1e4():
    k = np.arange(1, 10_001, dtype=float)
    return seq(np.concatenate([k, -k]))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda t: int(t.split()[2].rstrip(':'))):
            terminalreporter.write_line(line)
