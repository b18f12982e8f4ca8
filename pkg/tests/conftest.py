import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_state_norm_sq(x, rho):
    """phi(x* x) = sum_{i,j,k} rho_ij conj(x_kj) x_ki, by explicit loops."""
    n = x.shape[0]
    total = 0j
    for i in range(n):
        for j in range(n):
            for k in range(n):
                total += rho[i, j] * np.conj(x[k, j]) * x[k, i]
    return total.real


def brute_trace_product(e, f):
    """Normalized trace of e @ f by explicit loops."""
    n = e.shape[0]
    total = 0j
    for i in range(n):
        for j in range(n):
            total += e[i, j] * f[j, i]
    return total / n


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
