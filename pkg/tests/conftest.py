import pytest

from arident.noise import NoiseSpec
from arident.system import SystemParams

LAM = 1.0 / 3.0

# criterion number -> (description, passed)
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def white_params():
    return SystemParams.white(LAM, 4.0, 9.0)


@pytest.fixture
def nonzero_params():
    return SystemParams.white(LAM, 4.0, 9.0, qbar=1.0, vbar=4.0)


@pytest.fixture
def colored_params():
    return SystemParams(LAM, NoiseSpec.colored(-0.5, 1.0), NoiseSpec.white(0.0, 9.0))


@pytest.fixture
def record_criterion():
    """Record a pass/fail line for an acceptance criterion; printed at session end."""

    def record(number, description, passed):
        prev = ACCEPTANCE_RESULTS.get(number)
        ok = bool(passed) and (prev is None or prev[1])
        ACCEPTANCE_RESULTS[number] = (description, ok)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        description, passed = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {description}")
