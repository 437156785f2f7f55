from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from saturnet import Network, strongly_connected_components

# 3-node strongly connected stochastic demo network used throughout.
TRIANGLE_P = np.array([[0.0, 0.75, 0.25], [0.0, 0.0, 1.0], [0.3, 0.7, 0.0]])
TRIANGLE_W = np.array([5.0, 3.0, 2.0])

# Critical flow on the demo network (zero sum, segment of equilibria).
C_STAR = np.array([4.37, -3.31, -1.06])

# Frozen from the per-coordinate line-box intersection: the solution line is
# (4.37 + 0.3 t, -0.0325 + 0.925 t, t) and the box clips t to [0.0325/0.925, 2].
X_MIN_STAR = np.array([4.38054054054054, 0.0, 0.03513513513513514])
X_MAX_STAR = np.array([4.97, 1.8175, 2.0])
CONDITION_STAR = 4.371824324324324  # (2 - 0.0325/0.925) * 2.225

# Stationary direction of the demo network: (0.3, 0.925, 1) / 2.225.
PI_TRIANGLE = np.array([0.3, 0.925, 1.0]) / 2.225

# Shock-ray demo: baseline flow and sensitivity direction, crossing at eps = 9.
C_BASE = np.array([5.0, 2.0, 2.0])
Q_DIR = np.array([0.07, 0.59, 0.34])


@pytest.fixture
def triangle() -> Network:
    return Network(TRIANGLE_P, TRIANGLE_W)


@pytest.fixture
def two_cycle() -> Network:
    return Network(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([1.0, 1.0]))


def random_network(rng, n_max=8) -> Network:
    """Random mixed stochastic/sub-stochastic network with zero diagonal."""
    n = int(rng.integers(1, n_max + 1))
    mask = rng.random((n, n)) < rng.uniform(0.3, 0.9)
    P = rng.random((n, n)) * mask
    np.fill_diagonal(P, 0.0)
    for i in range(n):
        s = P[i].sum()
        if s > 0:
            P[i] /= s
            if rng.random() < 0.5:
                P[i] *= rng.uniform(0.2, 0.95)
    w = rng.uniform(0.0, 5.0, n)
    return Network(P, w)


def random_irreducible_stochastic(rng, n_max=4) -> np.ndarray:
    """Random strongly connected row-stochastic matrix with zero diagonal."""
    n = int(rng.integers(2, n_max + 1))
    P = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
    np.fill_diagonal(P, 0.0)
    order = rng.permutation(n)
    for i in range(n):  # a covering cycle guarantees strong connectivity
        P[order[i], order[(i + 1) % n]] += rng.uniform(0.3, 1.0)
    P /= P.sum(axis=1)[:, None]
    assert len(strongly_connected_components(P > 0)) == 1
    return P


def zero_sum_flow(rng, n) -> np.ndarray:
    r = rng.uniform(-2.0, 2.0, n)
    return r - r.mean()
