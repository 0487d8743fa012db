"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

# registry filled by tests/test_acceptance.py; printed after the run so
# there is one pass/fail line per criterion even when asserts fire
_CRITERIA = {}


def _record(num, title, ok, detail=""):
    _CRITERIA[num] = (title, bool(ok), detail)


@pytest.fixture
def criterion():
    """Callable (number, title, ok, detail) registering a criterion outcome."""
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[num]
        status = "pass" if ok else "FAIL"
        line = f"criterion {num:2d} - {title}: {status}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_density():
    """Factory for random full-rank density matrices."""

    def make(rng, n_qubits):
        dim = 2**n_qubits
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = a @ a.conj().T
        return rho / np.trace(rho)

    return make
