import warnings

import pytest

from momfix import spectrum
from momfix.errors import AccuracyWarning


@pytest.fixture(scope="session")
def bis10():
    return spectrum.ledger_by_bisection(10)


@pytest.fixture(scope="session")
def lim4():
    return spectrum.ledger_by_limit(4, 10**6)


@pytest.fixture(scope="session")
def iter8():
    """(ledger, history) of 12 steps at p_max = 8."""
    return spectrum.ledger_by_iteration(8, 12, return_history=True)


@pytest.fixture(scope="session")
def merged12():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        return spectrum.merged_ledger(12)


# one PASS/FAIL line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
