import itertools

import numpy as np
import pytest


def brute_force_ball(basis, radius, center_real, box):
    """All integer coefficient vectors in [-box, box]^n whose point lies within radius of the centre."""
    n = basis.shape[0]
    grid = np.array(list(itertools.product(range(-box, box + 1), repeat=n)), dtype=float)
    pts = grid @ basis
    d2 = np.sum((pts - center_real) ** 2, axis=1)
    return {tuple(int(v) for v in c) for c in grid[d2 <= radius**2 * (1 + 1e-12)]}


@pytest.fixture
def gaussian_integers():
    from latfade import make_lattice
    return make_lattice([[1], [1j]])


@pytest.fixture
def hexagonal():
    from latfade import make_lattice
    return make_lattice([[1], [0.5 + np.sqrt(3) / 2 * 1j]])


ACCEPTANCE_LINES = []


def record_criterion(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
