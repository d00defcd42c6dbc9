"""Closed-loop rollouts of the controlled game and the learning baseline.

Three controller modes produce a trajectory from the same horizon problem:

* ``mpc``       re-solves the condensed QP at every round and applies the
                first block (receding horizon),
* ``explicit``  looks the state up in the precomputed region partition,
* ``open-loop`` solves once at the initial allocation and plays the whole
                stored sequence.

``mirror-descent`` is the uncontrolled baseline: selfish flow updated
multiplicatively against the observed latencies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import step
from .exceptions import ConfigError
from .network import ParallelNetwork, latency_vector
from .qp import CondensedQp, HorizonProblem, condense, solve_qp
from .regions import PwaControlLaw, enumerate_regions, lookup

MODES = ("mpc", "explicit", "open-loop")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A rollout: ``T+1`` states, ``T`` controls, per-round latencies and costs.

    Controlled runs record latencies and stage costs for every state, the
    final entry being the terminal cost. Learning runs record one latency
    and one cost per play.
    """

    states: tuple
    controls: tuple
    latencies: tuple
    stage_costs: tuple

    @property
    def horizon(self) -> int:
        return len(self.controls)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def run_closed_loop(
    hp: HorizonProblem,
    x0,
    mode: str = "mpc",
    *,
    qp: CondensedQp | None = None,
    law: PwaControlLaw | None = None,
    net: ParallelNetwork | None = None,
) -> Trajectory:
    """Roll the controlled game for ``hp.T`` rounds from ``x0``."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
    if qp is None:
        qp = condense(hp)
    if mode == "explicit" and law is None:
        law = enumerate_regions(qp)

    n, T = hp.n, hp.T
    x = np.asarray(x0, dtype=float).reshape(-1)
    states = [x.copy()]
    controls = []
    plan = solve_qp(qp, x).z.reshape(T, n) if mode == "open-loop" else None

    for t in range(T):
        if mode == "mpc":
            u = solve_qp(qp, x).z[:n]
        elif mode == "explicit":
            _, z = lookup(law, x)
            u = z[:n]
        else:
            u = plan[t]
        u = np.clip(u, 0.0, None)
        u = u / u.sum()
        x = step(hp.dyn, x, u)
        controls.append(u)
        states.append(x.copy())

    latencies = tuple(latency_vector(net, s) for s in states) if net is not None else ()
    costs = [hp.cost.stage(states[t], controls[t]) for t in range(T)]
    costs.append(hp.cost.terminal(states[T]))
    return Trajectory(
        states=tuple(states),
        controls=tuple(controls),
        latencies=latencies,
        stage_costs=tuple(costs),
    )


@dataclass(frozen=True)
class LearnerConfig:
    """Mirror-descent parameters: step size (or schedule) and round count."""

    eta: float | None = 0.1
    steps: int = 100
    schedule: object = None  # optional callable t -> eta_t, overrides eta

    def rate(self, t: int) -> float:
        if self.schedule is not None:
            return float(self.schedule(t))
        return float(self.eta)


def run_mirror_descent(net: ParallelNetwork, f0, config: LearnerConfig) -> Trajectory:
    """Multiplicative-weights flow update against observed latencies.

    The entropy-regularized mirror step on the simplex reduces to
    ``f+ propto f * exp(-eta * l(f))``, one latency vector and one incurred
    cost recorded per play.
    """
    from .validation import check_simplex

    f = check_simplex(f0, net.n_edges, name="f0")
    states = [f.copy()]
    latencies = []
    costs = []
    for t in range(config.steps):
        l = latency_vector(net, f)
        latencies.append(l)
        costs.append(float(f @ l))
        y = f * np.exp(-config.rate(t) * l)
        f = y / y.sum()
        states.append(f.copy())
    return Trajectory(
        states=tuple(states),
        controls=tuple(states[1:]),
        latencies=tuple(latencies),
        stage_costs=tuple(costs),
    )


def cumulative_regret(traj: Trajectory) -> float:
    """Incurred total latency minus the best fixed allocation in hindsight.

    With affine latencies the hindsight optimum over the simplex puts all
    mass on the edge with the least summed latency, so the benchmark is
    exact rather than sampled.
    """
    if not traj.latencies:
        raise ConfigError("trajectory has no recorded latencies")
    incurred = sum(
        float(np.asarray(f) @ np.asarray(l))
        for f, l in zip(traj.states, traj.latencies)
    )
    summed = np.sum(np.asarray(traj.latencies), axis=0)
    return incurred - float(np.min(summed))


def detect_convergence(traj: Trajectory, *, tol: float = 1e-3, window: int = 3):
    """First round after which the state stops moving, or ``None``.

    Returns the smallest ``t`` such that every state in the next ``window``
    rounds stays within ``tol`` (sup norm) of ``x_t``. Rounds too close to
    the end to fill the window cannot qualify.
    """
    states = [np.asarray(s, dtype=float) for s in traj.states]
    n_states = len(states)
    for t in range(n_states - window):
        x_t = states[t]
        spread = max(
            float(np.max(np.abs(states[s] - x_t))) for s in range(t + 1, t + window + 1)
        )
        if spread <= tol:
            return t
    return None
