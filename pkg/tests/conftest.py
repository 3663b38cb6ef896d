import sys
from pathlib import Path

import numpy as np
import pytest

from twostage_ldpc.code_model import TannerGraph, make_regular_code

sys.path.insert(0, str(Path(__file__).parent))

H_SMALL = [[1, 1, 0], [0, 1, 1]]

# cycle-free: 9 variables, 4 checks, 12 edges, connected
H_TREE = np.array([
    [1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 1, 1],
], dtype=np.uint8)


@pytest.fixture
def small_graph():
    return TannerGraph.from_matrix(H_SMALL)


@pytest.fixture
def tree_graph():
    return TannerGraph.from_matrix(H_TREE)


@pytest.fixture(scope="session")
def code504():
    return make_regular_code(504, 3, 6, seed=0)


# criterion number -> (passed, description, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, desc, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n} {'PASS' if ok else 'FAIL'}: {desc}")
        for line in detail:
            terminalreporter.write_line(f"    {line}")
