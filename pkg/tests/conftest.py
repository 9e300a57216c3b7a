import functools
import itertools

import numpy as np
import pytest

from treepsdo.boundary import build_partition
from treepsdo.io import generator, random_decomposition, random_functions
from treepsdo.spectral import build_grid
from treepsdo.tree import build_ball


@functools.lru_cache(maxsize=None)
def geometry(q, R, M=256):
    ball = build_ball(q, R)
    return ball, build_partition(ball, R), build_grid(q, M)


def words(q, R):
    """Vertices of the radius-R ball as reduced words, in (length, lexicographic) order.

    The root is the empty word, the first letter ranges over q + 1 values and
    later letters over q values.  Distances are ``|a| + |b| - 2 lcp(a, b)``.
    """
    out = [()]
    level = [()]
    for j in range(1, R + 1):
        nxt = []
        for w in level:
            for a in range(q + 1 if j == 1 else q):
                nxt.append(w + (a,))
        out.extend(nxt)
        level = nxt
    return out


def lcp(a, b):
    return sum(1 for _ in itertools.takewhile(lambda t: t[0] == t[1], zip(a, b)))


@pytest.fixture
def small():
    return geometry(2, 3, 128)


@pytest.fixture
def rng():
    return generator(7, "tests")


def rand_f(rng, n, N):
    return random_functions(rng, n, N)


def rand_dec(rng, k, N):
    return random_decomposition(rng, k, N)


def delta(n, i):
    e = np.zeros(n, dtype=complex)
    e[i] = 1
    return e


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
