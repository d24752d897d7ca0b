import numpy as np
import pytest

from cpdnn import choi_from_blocks, sym_from_entries

ACCEPTANCE_LINES = []


def brute_choi(n, m, channel):
    """J = sum_ij E_ij (x) channel(E_ij), straight from the definition."""
    J = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            J += np.kron(E, channel(E))
    return J


def unit(n, i, j):
    E = np.zeros((n, n))
    E[i, j] = 1.0
    return E


@pytest.fixture
def J_id2():
    blocks = [[unit(2, i, j) for j in range(2)] for i in range(2)]
    return choi_from_blocks(2, 2, blocks)


@pytest.fixture
def A4():
    return sym_from_entries([[1, 0, .5, .5], [0, 1, .5, .5], [.5, .5, 1, 0], [.5, .5, 0, 1]])


@pytest.fixture
def A4_vectors():
    h = 1 / np.sqrt(2)
    return np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]]) * h


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
