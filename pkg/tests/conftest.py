"""Shared strategies and brute-force oracles for the test suite."""

import sys
from itertools import permutations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qtschemes import fixtures
from qtschemes.wl import coherent_closure

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def seed_matrices(draw, max_degree=8, max_colors=3):
    n = draw(st.integers(1, max_degree))
    k = draw(st.integers(1, max_colors))
    m = draw(arrays(np.int64, (n, n), elements=st.integers(0, k - 1)))
    if draw(st.booleans()):
        m = np.maximum(m, m.T)
    return m


@st.composite
def closures(draw, max_degree=8):
    return coherent_closure(draw(seed_matrices(max_degree)))


def brute_tensor(matrix: np.ndarray) -> np.ndarray:
    """Intersection numbers straight from adjacency matrix products."""
    r = int(matrix.max()) + 1
    adj = [(matrix == u).astype(np.int64) for u in range(r)]
    c = np.zeros((r, r, r), dtype=np.int64)
    for w in range(r):
        a, b = np.argwhere(adj[w])[0]
        for u in range(r):
            for v in range(r):
                c[u, v, w] = adj[u][a] @ adj[v][:, b]
    return c


def brute_automorphisms(matrix: np.ndarray) -> list:
    n = matrix.shape[0]
    return [p for p in permutations(range(n)) if np.array_equal(matrix[np.ix_(p, p)], matrix)]


def brute_isomorphic(a: np.ndarray, b: np.ndarray) -> bool:
    """Whether some point bijection maps the partition of ``a`` onto that of ``b``."""
    n = a.shape[0]
    if b.shape[0] != n:
        return False
    for p in permutations(range(n)):
        sub = b[np.ix_(p, p)]
        pairs = set(zip(a.ravel().tolist(), sub.ravel().tolist()))
        if len(pairs) == len({x for x, _ in pairs}) == len({y for _, y in pairs}):
            return True
    return False


@pytest.fixture(scope="session")
def hm():
    return {name: fixtures.load(name) for name in fixtures.HM_INDEX}


@pytest.fixture(scope="session")
def scheme_fixtures():
    return [(n, fixtures.load(n)) for n in fixtures.scheme_names()]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance checks")
        for line in lines:
            terminalreporter.write_line(line)
