"""Shared generators and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest

import routegame as rg


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


def random_simplex(rng, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n))


def random_left_stochastic(rng, n: int) -> np.ndarray:
    # Columns drawn independently from a Dirichlet, so each sums to one.
    return rng.dirichlet(np.ones(n), size=n).T


def potential_value(f, slopes, offsets) -> float:
    """Rosenthal potential written out directly, independent of the package."""
    f = np.asarray(f, dtype=float)
    a = np.asarray(slopes, dtype=float)
    b = np.asarray(offsets, dtype=float)
    return float(np.sum(a * f * f / 2.0 + b * f))


def nash_oracle(slopes, offsets, n_restarts: int = 6) -> np.ndarray:
    """Minimize the potential over the simplex with SLSQP from several starts."""
    from scipy.optimize import minimize

    a = np.asarray(slopes, dtype=float)
    b = np.asarray(offsets, dtype=float)
    n = a.size
    gen = np.random.default_rng(7)
    best_x, best_v = None, np.inf
    for k in range(n_restarts):
        x0 = np.ones(n) / n if k == 0 else gen.dirichlet(np.ones(n))
        res = minimize(
            lambda f: potential_value(f, a, b),
            x0,
            jac=lambda f: a * f + b,
            method="SLSQP",
            bounds=[(0.0, 1.0)] * n,
            constraints=[{"type": "eq", "fun": lambda f: float(f.sum() - 1.0)}],
            options={"ftol": 1e-16, "maxiter": 1000},
        )
        if res.fun < best_v:
            best_x, best_v = res.x, res.fun
    return np.asarray(best_x)


def random_dag_network(rng, max_nodes: int = 8, demand: float | None = None):
    """Single-OD acyclic road network where every walk ends at the destination.

    Nodes are topologically ordered 0..m-1 with 0 the origin and m-1 the
    destination; every other node gets at least one forward link, so the
    destination is the only reachable sink and path probabilities sum to 1.
    """
    m = int(rng.integers(3, max_nodes + 1))
    links = []
    for v in range(m - 1):
        later = np.arange(v + 1, m)
        k = int(rng.integers(1, later.size + 1))
        targets = rng.choice(later, size=k, replace=False)
        for w in targets:
            links.append((v, int(w)))
    links = sorted(set(links))
    P = np.zeros((m, m))
    for v in range(m - 1):
        outs = [j for (i, j) in links if i == v]
        probs = rng.dirichlet(np.ones(len(outs)))
        for j, p in zip(outs, probs):
            P[v, j] = p
    D = np.zeros((m, m))
    D[0, m - 1] = float(rng.uniform(0.5, 5.0)) if demand is None else demand
    return rg.RoadNetwork(n_nodes=m, links=tuple(links), P=P, D=D)


def random_closed_network(rng, max_nodes: int = 7):
    """Road network where every node has outgoing links (necessarily cyclic)."""
    m = int(rng.integers(3, max_nodes + 1))
    links = set()
    for v in range(m):
        others = [w for w in range(m) if w != v]
        k = int(rng.integers(1, len(others) + 1))
        for w in rng.choice(others, size=k, replace=False):
            links.add((v, int(w)))
    links = sorted(links)
    P = np.zeros((m, m))
    for v in range(m):
        outs = [j for (i, j) in links if i == v]
        probs = rng.dirichlet(np.ones(len(outs)))
        for j, p in zip(outs, probs):
            P[v, j] = p
    D = rng.uniform(0.0, 3.0, size=(m, m))
    np.fill_diagonal(D, 0.0)
    return rg.RoadNetwork(n_nodes=m, links=tuple(links), P=P, D=D)


def diamond_network(p: float = 0.3, demand: float = 10.0) -> rg.RoadNetwork:
    """Origin splits to two middles (probabilities p, 1-p), both feed the sink."""
    links = ((0, 1), (0, 2), (1, 3), (2, 3))
    P = np.zeros((4, 4))
    P[0, 1] = p
    P[0, 2] = 1.0 - p
    P[1, 3] = 1.0
    P[2, 3] = 1.0
    D = np.zeros((4, 4))
    D[0, 3] = demand
    return rg.RoadNetwork(n_nodes=4, links=links, P=P, D=D)
