"""Scikit-learn style wrappers around the horizon controllers.

Both routers treat a batch of states as rows of ``X`` and return the
first-step routing suggestion for each row. Construction only stores
parameters; all work happens in ``fit``, and fitted attributes carry
the usual trailing underscore.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .dynamics import GameDynamics
from .exceptions import ConfigError
from .network import QuadraticCost
from .qp import DEFAULT_REG, HorizonProblem, condense, solve_qp
from .regions import control_at, enumerate_regions

__all__ = ["ExplicitMpcRouter", "RecedingHorizonRouter"]


def _rows(X: np.ndarray, n: int):
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    rows = np.atleast_2d(X)
    if rows.shape[1] != n:
        raise ValueError(f"X must have {n} columns, got {rows.shape[1]}")
    return rows, single


class ExplicitMpcRouter(BaseEstimator):
    """Routing controller backed by a precomputed piecewise-affine law.

    ``fit`` condenses the horizon problem and enumerates its critical
    regions once; ``predict`` then answers by region lookup only.
    """

    def __init__(
        self,
        dynamics: Optional[GameDynamics] = None,
        cost: Optional[QuadraticCost] = None,
        horizon: int = 5,
        reg: float = DEFAULT_REG,
    ):
        self.dynamics = dynamics
        self.cost = cost
        self.horizon = horizon
        self.reg = reg

    def fit(self, X=None, y=None):
        """Build the explicit law. ``X`` and ``y`` are ignored."""
        if self.dynamics is None or self.cost is None:
            raise ConfigError("ExplicitMpcRouter requires dynamics and cost")
        self.problem_ = HorizonProblem(self.dynamics, self.cost, self.horizon)
        self.qp_ = condense(self.problem_, reg=self.reg)
        self.law_ = enumerate_regions(self.qp_)
        self.n_regions_ = self.law_.n_regions
        self.n_features_in_ = self.dynamics.n
        return self

    def predict(self, X) -> np.ndarray:
        """First-step control for each state row of ``X``."""
        check_is_fitted(self, "law_")
        rows, single = _rows(X, self.n_features_in_)
        out = np.stack([control_at(self.law_, row) for row in rows])
        return out[0] if single else out


class RecedingHorizonRouter(BaseEstimator):
    """Routing controller that re-solves the condensed program per query."""

    def __init__(
        self,
        dynamics: Optional[GameDynamics] = None,
        cost: Optional[QuadraticCost] = None,
        horizon: int = 5,
        reg: float = DEFAULT_REG,
    ):
        self.dynamics = dynamics
        self.cost = cost
        self.horizon = horizon
        self.reg = reg

    def fit(self, X=None, y=None):
        """Condense the horizon problem. ``X`` and ``y`` are ignored."""
        if self.dynamics is None or self.cost is None:
            raise ConfigError("RecedingHorizonRouter requires dynamics and cost")
        self.problem_ = HorizonProblem(self.dynamics, self.cost, self.horizon)
        self.qp_ = condense(self.problem_, reg=self.reg)
        self.n_features_in_ = self.dynamics.n
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "qp_")
        n = self.n_features_in_
        rows, single = _rows(X, n)
        out = np.stack([solve_qp(self.qp_, row).z[:n] for row in rows])
        return out[0] if single else out
