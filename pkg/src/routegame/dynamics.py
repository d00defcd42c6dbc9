"""Flow dynamics with inertia: tomorrow's allocation blends today's habits
with a routing suggestion.

``x+ = gamma * A x + (1 - gamma) * B u`` where ``A`` redistributes the
fraction of drivers who repeat their habitual choice and ``B`` distorts the
suggestion ``u`` into the fraction who comply. Both matrices are left
stochastic (columns sum to 1), which is exactly what keeps the state on the
simplex: column sums of 1 conserve total flow, nonnegativity preserves
nonnegativity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularDynamicsError
from .network import QuadraticCost
from .validation import check_left_stochastic, check_simplex


def uniform_averaging(n: int) -> np.ndarray:
    """The averaging matrix that forgets everything: every column is 1/n."""
    return np.full((n, n), 1.0 / n)


def validate_left_stochastic(M, n: int | None = None) -> np.ndarray:
    """Alias for the stochasticity check, exposed at dynamics level."""
    return check_left_stochastic(M, n)


@dataclass(frozen=True, eq=False)
class GameDynamics:
    """Inertial routing dynamics on the flow simplex."""

    gamma: float
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        A = check_left_stochastic(self.A, name="A")
        B = check_left_stochastic(self.B, len(A), name="B")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def A_eff(self) -> np.ndarray:
        """State matrix of the equivalent linear system."""
        return self.gamma * self.A

    @property
    def B_eff(self) -> np.ndarray:
        """Input matrix of the equivalent linear system."""
        return (1.0 - self.gamma) * self.B


def step(dyn: GameDynamics, x, u) -> np.ndarray:
    """One round of the game; the result is again a valid allocation."""
    x = check_simplex(x, dyn.n, name="x")
    u = check_simplex(u, dyn.n, name="u")
    return check_simplex(dyn.A_eff @ x + dyn.B_eff @ u, dyn.n, name="x_next")


def steady_state_averaging_B(dyn: GameDynamics) -> np.ndarray:
    """Fixed point when the compliance channel averages uniformly.

    With ``B`` the uniform averaging matrix the suggestion is washed out and
    the unique fixed point is ``(1 - gamma)/n * (I - gamma A)^{-1} 1``,
    independent of ``u``. Requires ``gamma < 1``.
    """
    if dyn.gamma >= 1.0:
        raise SingularDynamicsError("gamma = 1 leaves no input channel; no closed form")
    n = dyn.n
    rhs = np.full(n, (1.0 - dyn.gamma) / n)
    x = np.linalg.solve(np.eye(n) - dyn.gamma * dyn.A, rhs)
    return check_simplex(x, n, name="steady state")


def averaging_A_state(dyn: GameDynamics, u) -> np.ndarray:
    """Steady state reached under constant ``u`` when ``A`` averages uniformly."""
    u = check_simplex(u, dyn.n, name="u")
    x = dyn.gamma / dyn.n + (1.0 - dyn.gamma) * (dyn.B @ u)
    return check_simplex(x, dyn.n, name="steady state")


def reduced_problem_averaging_A(dyn: GameDynamics, cost: QuadraticCost):
    """Static problems governing the steady state when ``A`` averages uniformly.

    Habit mixing then contributes the constant ``gamma/n * 1`` regardless of
    the state, so the steady state is ``x(u) = gamma/n * 1 + (1-gamma) B u``
    and choosing the best constant suggestion is a quadratic program over
    one simplex. Returns the running-cost and terminal-cost instances as
    condensed single-stage programs; feed either to the QP solver and map
    the minimizer through ``averaging_A_state``.
    """
    from .qp import CondensedQp  # local import to avoid a cycle

    n = dyn.n
    if np.max(np.abs(dyn.A - uniform_averaging(n))) > 1e-12:
        raise DomainError("reduction requires the uniform averaging A")

    base = np.full(n, dyn.gamma / n)
    Bc = dyn.B_eff

    def build(Qmat: np.ndarray) -> CondensedQp:
        P = 2.0 * (Bc.T @ Qmat @ Bc + cost.R)
        c = 2.0 * (Bc.T @ Qmat @ base) + Bc.T @ cost.linear
        const = float(base @ Qmat @ base + cost.linear @ base)
        return CondensedQp(
            P=P,
            F=np.zeros((n, n)),
            c=c,
            Y=np.zeros((n, n)),
            lin=np.zeros(n),
            const=const,
            G=-np.eye(n),
            W=np.zeros(n),
            S=np.zeros((n, n)),
            A_eq=np.ones((1, n)),
            b_eq=np.ones(1),
            n_e=n,
            T=1,
        )

    return build(cost.Q), build(cost.Qf)
