import numpy as np
import pytest

from qwdefect import Coin

#: (criterion, description, passed, detail) rows filled by the acceptance suite
ACCEPTANCE: list[tuple[str, str, bool, str]] = []


@pytest.fixture
def record():
    def _record(criterion, description, passed, detail=""):
        ACCEPTANCE.append((criterion, description, bool(passed), detail))
        return passed

    return _record


@pytest.fixture
def hadamard():
    return Coin.hadamard()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, description, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {criterion:>3} {description}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
