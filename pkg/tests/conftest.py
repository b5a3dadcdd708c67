"""Shared fixtures and the acceptance-criterion summary printed after the run."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from structensor import bundled

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def sec54():
    return bundled.sec54_tensor()


@pytest.fixture(scope="session")
def sec55():
    return bundled.sec55_tensor()


def full_index_sum(A, B) -> float:
    """Brute-force sum over all n^m index tuples (oracle for the inner products)."""
    TA, TB = A.to_full(), B.to_full()
    return float(np.sum(TA * TB))


def brute_eval(A, x) -> float:
    T = A.to_full()
    total = 0.0
    for idx in itertools.product(range(A.dim), repeat=A.order):
        total += T[idx] * np.prod([x[i] for i in idx])
    return float(total)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
