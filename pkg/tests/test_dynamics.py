"""Simplex closure of the flow dynamics and steady-state helpers."""

import numpy as np
import pytest

import routegame as rg
from routegame.exceptions import DomainError, SingularDynamicsError

from conftest import random_left_stochastic, random_simplex


def test_closure_property_bulk(rng):
    # 10^4 random (A, B, gamma, x, u): the update never leaves the simplex.
    trials = 10_000
    worst_sum, worst_neg = 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        dyn = rg.GameDynamics(
            gamma=float(rng.uniform(0.0, 1.0)),
            A=random_left_stochastic(rng, n),
            B=random_left_stochastic(rng, n),
        )
        x = random_simplex(rng, n)
        u = random_simplex(rng, n)
        x_next = rg.step(dyn, x, u)
        worst_sum = max(worst_sum, abs(float(x_next.sum()) - 1.0))
        worst_neg = max(worst_neg, float(max(0.0, -x_next.min())))
    assert worst_sum < 1e-12
    assert worst_neg < 1e-12


def test_step_hand_value():
    dyn = rg.GameDynamics(gamma=0.5, A=np.eye(2), B=np.eye(2))
    x = rg.step(dyn, [0.2, 0.8], [0.6, 0.4])
    assert np.allclose(x, [0.4, 0.6], atol=1e-15)


def test_uniform_averaging_is_left_stochastic():
    M = rg.uniform_averaging(4)
    assert np.allclose(M, 0.25)
    assert np.allclose(M.sum(axis=0), 1.0)


def test_step_rejects_non_simplex_state():
    dyn = rg.GameDynamics(gamma=0.5, A=np.eye(2), B=np.eye(2))
    with pytest.raises(DomainError):
        rg.step(dyn, [0.9, 0.9], [0.5, 0.5])


def test_rejects_non_stochastic_matrix():
    bad = np.array([[0.5, 0.5], [0.6, 0.5]])
    with pytest.raises(DomainError):
        rg.GameDynamics(gamma=0.5, A=bad, B=np.eye(2))


def test_rejects_gamma_out_of_range():
    with pytest.raises(DomainError):
        rg.GameDynamics(gamma=1.5, A=np.eye(2), B=np.eye(2))


def test_steady_state_identity_A():
    # With A = I the geometric series collapses to the uniform split.
    dyn = rg.GameDynamics(gamma=0.5, A=np.eye(3), B=rg.uniform_averaging(3))
    assert np.allclose(rg.steady_state_averaging_B(dyn), 1.0 / 3.0, atol=1e-12)


def test_steady_state_swap_A():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    dyn = rg.GameDynamics(gamma=0.3, A=A, B=rg.uniform_averaging(2))
    assert np.allclose(rg.steady_state_averaging_B(dyn), 0.5, atol=1e-12)


def test_steady_state_is_a_fixed_point(rng):
    for _ in range(25):
        n = int(rng.integers(2, 5))
        dyn = rg.GameDynamics(
            gamma=float(rng.uniform(0.0, 0.95)),
            A=random_left_stochastic(rng, n),
            B=rg.uniform_averaging(n),
        )
        xbar = rg.steady_state_averaging_B(dyn)
        u = random_simplex(rng, n)  # with averaging B any u maps to 1/n
        assert np.allclose(rg.step(dyn, xbar, u), xbar, atol=1e-10)


def test_steady_state_rejects_gamma_one():
    dyn = rg.GameDynamics(gamma=1.0, A=np.eye(2), B=rg.uniform_averaging(2))
    with pytest.raises(SingularDynamicsError):
        rg.steady_state_averaging_B(dyn)


def test_averaging_A_state_hand_value():
    dyn = rg.GameDynamics(gamma=0.5, A=rg.uniform_averaging(3), B=np.eye(3))
    u = np.array([1.0, 0.0, 0.0])
    # gamma/n * 1 + (1-gamma) u
    assert np.allclose(rg.averaging_A_state(dyn, u), [1 / 6 + 1 / 2, 1 / 6, 1 / 6])


def test_averaging_A_state_matches_step(rng):
    dyn = rg.GameDynamics(gamma=0.4, A=rg.uniform_averaging(3), B=np.eye(3))
    for _ in range(10):
        x = random_simplex(rng, 3)
        u = random_simplex(rng, 3)
        assert np.allclose(rg.step(dyn, x, u), rg.averaging_A_state(dyn, u), atol=1e-14)


def test_reduced_problem_symmetric_cost():
    # Q = I: the best constant suggestion is the uniform split.
    net = rg.network_from_coefficients([1.0, 1.0, 1.0])
    cost = rg.cost_from_network(net, kind="social_welfare")
    dyn = rg.GameDynamics(gamma=0.5, A=rg.uniform_averaging(3), B=np.eye(3))
    running, terminal = rg.reduced_problem_averaging_A(dyn, cost)
    for qp in (running, terminal):
        u = rg.solve_qp(qp, np.ones(3) / 3).z
        assert np.max(np.abs(u - 1.0 / 3.0)) < 1e-9
    x = rg.averaging_A_state(dyn, np.ones(3) / 3)
    assert np.allclose(x, 1.0 / 3.0, atol=1e-12)


def test_reduced_problem_weighted_cost():
    # Q = diag(1,2,4): verify against a dense SLSQP solve of the same program.
    from scipy.optimize import minimize

    net = rg.network_from_coefficients([1.0, 2.0, 4.0])
    cost = rg.cost_from_network(net, kind="social_welfare")
    dyn = rg.GameDynamics(gamma=0.5, A=rg.uniform_averaging(3), B=np.eye(3))
    running, _ = rg.reduced_problem_averaging_A(dyn, cost)
    u = rg.solve_qp(running, np.ones(3) / 3).z

    def steady_cost(v):
        x = 0.5 / 3 + 0.5 * v
        return float(x @ cost.Q @ x)

    res = minimize(
        steady_cost,
        np.ones(3) / 3,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * 3,
        constraints=[{"type": "eq", "fun": lambda v: float(v.sum() - 1.0)}],
        options={"ftol": 1e-16, "maxiter": 500},
    )
    assert np.max(np.abs(u - res.x)) < 1e-6


def test_reduced_problem_requires_averaging_A():
    net = rg.network_from_coefficients([1.0, 1.0])
    cost = rg.cost_from_network(net, kind="social_welfare")
    dyn = rg.GameDynamics(gamma=0.5, A=np.eye(2), B=np.eye(2))
    with pytest.raises(DomainError):
        rg.reduced_problem_averaging_A(dyn, cost)
