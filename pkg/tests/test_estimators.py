"""Estimator-protocol conformance for the two router wrappers."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import routegame as rg
from routegame.exceptions import ConfigError

from conftest import random_simplex


def _parts(slopes=(1.0, 1.0, 1.0), gamma=0.5):
    net = rg.network_from_coefficients(list(slopes))
    cost = rg.cost_from_network(net, kind="social_welfare")
    dyn = rg.GameDynamics(gamma=gamma, A=np.eye(len(slopes)), B=np.eye(len(slopes)))
    return dyn, cost


@pytest.mark.parametrize("cls", [rg.ExplicitMpcRouter, rg.RecedingHorizonRouter])
class TestProtocol:
    def test_get_params_round_trip(self, cls):
        dyn, cost = _parts()
        est = cls(dynamics=dyn, cost=cost, horizon=7, reg=1e-9)
        params = est.get_params()
        assert params["horizon"] == 7
        assert params["reg"] == 1e-9
        est.set_params(horizon=3)
        assert est.get_params()["horizon"] == 3

    def test_clone_keeps_params_drops_state(self, cls):
        dyn, cost = _parts()
        est = cls(dynamics=dyn, cost=cost, horizon=4).fit()
        twin = clone(est)
        assert twin.get_params()["horizon"] == 4
        with pytest.raises(NotFittedError):
            twin.predict(np.ones(3) / 3)

    def test_predict_before_fit_raises(self, cls):
        dyn, cost = _parts()
        with pytest.raises(NotFittedError):
            cls(dynamics=dyn, cost=cost).predict(np.ones(3) / 3)

    def test_fit_without_problem_raises(self, cls):
        with pytest.raises(ConfigError):
            cls().fit()

    def test_single_row_and_batch_shapes(self, cls):
        dyn, cost = _parts()
        est = cls(dynamics=dyn, cost=cost, horizon=5).fit()
        one = est.predict(np.array([0.3, 0.5, 0.2]))
        assert one.shape == (3,)
        batch = est.predict(np.array([[0.3, 0.5, 0.2], [0.1, 0.1, 0.8]]))
        assert batch.shape == (2, 3)
        assert np.allclose(batch[0], one, atol=1e-12)

    def test_wrong_width_rejected(self, cls):
        dyn, cost = _parts()
        est = cls(dynamics=dyn, cost=cost).fit()
        with pytest.raises(ValueError):
            est.predict(np.array([0.5, 0.5]))


def test_explicit_counts_regions_for_symmetric_identity_setup():
    dyn, cost = _parts()
    est = rg.ExplicitMpcRouter(dynamics=dyn, cost=cost, horizon=15).fit()
    assert est.n_regions_ == 4
    # gamma = 0.5, symmetric cost: first move is u = 2/3 - x.
    x = np.array([0.3, 0.5, 0.2])
    assert np.allclose(est.predict(x), 2.0 / 3.0 - x, atol=1e-8)


def test_routers_agree_with_each_other(rng):
    dyn, cost = _parts(slopes=(1.0, 2.0, 4.0), gamma=0.7)
    explicit = rg.ExplicitMpcRouter(dynamics=dyn, cost=cost, horizon=6).fit()
    receding = rg.RecedingHorizonRouter(dynamics=dyn, cost=cost, horizon=6).fit()
    X = np.stack([random_simplex(rng, 3) for _ in range(40)])
    assert np.max(np.abs(explicit.predict(X) - receding.predict(X))) < 1e-6


def test_receding_matches_direct_solve(rng):
    dyn, cost = _parts(slopes=(1.0, 2.0, 4.0))
    est = rg.RecedingHorizonRouter(dynamics=dyn, cost=cost, horizon=5).fit()
    x = random_simplex(rng, 3)
    direct = rg.solve_qp(est.qp_, x).z[:3]
    assert np.allclose(est.predict(x), direct, atol=1e-12)
