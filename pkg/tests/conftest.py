import math

import numpy as np
import pytest

from excess_entropy.markov import markov_block_distribution, symmetric_flip

LN2 = math.log(2.0)
# binary entropy of 0.1 in nats, -(0.1 ln 0.1 + 0.9 ln 0.9)
HB_01 = 0.3250829733914482
E_FLIP_01 = LN2 - HB_01  # 0.368064...


@pytest.fixture
def flip01():
    return symmetric_flip(0.1)


def exact_source(model):
    """Exact block-distribution generator for ``entropy_curve``."""
    return lambda n: markov_block_distribution(model, n)


def iid_source(p):
    p = np.asarray(p, dtype=float)

    def dist(n):
        out = p
        for _ in range(n - 1):
            out = np.multiply.outer(out, p)
        return out

    return dist


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[num])
