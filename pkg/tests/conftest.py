import os

os.environ["PSEUDOMIX_CHECK_WEIGHT_BOUND"] = "1"

import numpy as np
import pytest

from pseudomix import simplex

# Audit the weight bound on every projection made anywhere in the suite.
simplex.CHECK_WEIGHT_BOUND = True

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _audit_line():
    audit = simplex.WEIGHT_BOUND_AUDIT
    ok = audit["checked"] > 0 and audit["violations"] == 0
    return (
        f"[{'PASS' if ok else 'FAIL'}] criterion 4: weight bound, suite-wide audit "
        f"({audit['checked']} projections checked, {audit['violations']} violations)"
    )


def pytest_sessionfinish(session, exitstatus):
    if simplex.WEIGHT_BOUND_AUDIT["violations"]:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    terminalreporter.write_line(_audit_line())
