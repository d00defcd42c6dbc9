"""Parallel routing networks with affine edge latencies.

A unit of divisible traffic is split over ``n`` parallel edges between a
single origin-destination pair. Edge ``e`` loaded with flow ``f_e`` responds
with latency ``a_e * f_e + b_e``. Two scalar objectives matter downstream:

* the potential ``sum_e a_e f_e^2 / 2 + b_e f_e``, whose unique constrained
  minimizer is the Nash (Wardrop) allocation, and
* the social welfare ``sum_e f_e (a_e f_e + b_e)``, the total incurred
  latency.

Both are quadratic forms over the simplex, which is what lets the control
layer treat routing as a constrained LQR problem.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .validation import check_simplex, check_symmetric_psd

COST_KINDS = ("rosenthal", "social_welfare", "custom")


@dataclass(frozen=True)
class AffineLatency:
    """Latency function ``l(y) = slope * y + offset`` of a single edge."""

    slope: float
    offset: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.slope) or not np.isfinite(self.offset):
            raise DomainError("latency coefficients must be finite")
        if self.slope < 0:
            raise DomainError(f"latency slope must be nonnegative, got {self.slope!r}")
        if self.offset < 0:
            raise DomainError(f"latency offset must be nonnegative, got {self.offset!r}")

    def __call__(self, y: float) -> float:
        return self.slope * y + self.offset


@dataclass(frozen=True)
class ParallelNetwork:
    """A set of parallel edges sharing one origin-destination pair."""

    latencies: tuple[AffineLatency, ...]

    def __post_init__(self):
        if len(self.latencies) == 0:
            raise DomainError("a network needs at least one edge")
        object.__setattr__(self, "latencies", tuple(self.latencies))

    @property
    def n_edges(self) -> int:
        return len(self.latencies)

    @property
    def slopes(self) -> np.ndarray:
        return np.array([l.slope for l in self.latencies])

    @property
    def offsets(self) -> np.ndarray:
        return np.array([l.offset for l in self.latencies])


def network_from_coefficients(slopes, offsets=None) -> ParallelNetwork:
    slopes = np.asarray(slopes, dtype=float).reshape(-1)
    if offsets is None:
        offsets = np.zeros_like(slopes)
    offsets = np.asarray(offsets, dtype=float).reshape(-1)
    if offsets.shape != slopes.shape:
        raise DomainError("slopes and offsets must have matching lengths")
    return ParallelNetwork(
        tuple(AffineLatency(float(a), float(b)) for a, b in zip(slopes, offsets))
    )


def latency_vector(net: ParallelNetwork, f) -> np.ndarray:
    """Per-edge latencies at allocation ``f``."""
    f = check_simplex(f, net.n_edges, name="f")
    return net.slopes * f + net.offsets


def rosenthal_potential(net: ParallelNetwork, f) -> float:
    """Potential whose minimizer over the simplex is the Nash allocation."""
    f = check_simplex(f, net.n_edges, name="f")
    return float(np.sum(0.5 * net.slopes * f * f + net.offsets * f))


def social_welfare(net: ParallelNetwork, f) -> float:
    """Total latency ``f . l(f)`` incurred by allocation ``f``."""
    f = check_simplex(f, net.n_edges, name="f")
    return float(f @ (net.slopes * f + net.offsets))


def nash_equilibrium(net: ParallelNetwork) -> np.ndarray:
    """Nash allocation: every carrying edge attains the minimum latency.

    Solved exactly by water filling on the offsets. Edges with zero slope
    act as caps: once the common latency reaches the cheapest constant
    offset it cannot rise further, and the leftover mass is split equally
    among the constant edges tied at that offset.
    """
    a, b = net.slopes, net.offsets
    n = net.n_edges
    f = np.zeros(n)

    pos = np.flatnonzero(a > 0)
    flat = np.flatnonzero(a == 0)
    cap = np.min(b[flat]) if flat.size else np.inf

    level = np.inf
    if pos.size:
        order = pos[np.argsort(b[pos], kind="stable")]
        inv_a = 1.0 / a[order]
        # Water level if the first k sloped edges carry all the flow.
        cum_inv = np.cumsum(inv_a)
        cum_b_inv = np.cumsum(b[order] * inv_a)
        for k in range(1, order.size + 1):
            lam = (1.0 + cum_b_inv[k - 1]) / cum_inv[k - 1]
            if k == order.size or lam <= b[order[k]]:
                level = lam
                break

    if level <= cap:
        support = order[: k]
        f[support] = (level - b[support]) / a[support]
        # Guard against -0.0 from a support edge entering exactly at level.
        np.clip(f, 0.0, None, out=f)
        return f / f.sum()

    # Constant edges bind: sloped edges fill up to the cap, the rest of the
    # mass goes to the cheapest constant edges in equal shares.
    used = pos[b[pos] <= cap] if pos.size else np.array([], dtype=int)
    if used.size:
        f[used] = np.clip((cap - b[used]) / a[used], 0.0, None)
    rest = 1.0 - f.sum()
    ties = flat[b[flat] == cap]
    f[ties] = rest / ties.size
    return f


def equilibrium_support(net: ParallelNetwork, f=None, *, tol: float = 1e-12) -> np.ndarray:
    """Indices of edges carrying flow at the (given or computed) equilibrium."""
    if f is None:
        f = nash_equilibrium(net)
    f = check_simplex(f, net.n_edges, name="f")
    return np.flatnonzero(f > tol)


@dataclass(frozen=True, eq=False)
class QuadraticCost:
    """Stage cost ``x'Qx + linear'x + u'Ru`` with terminal weight ``Qf``.

    ``kind`` records which routing objective the matrices encode so runs can
    report it; the numerics only ever look at the matrices.
    """

    Q: np.ndarray
    R: np.ndarray
    Qf: np.ndarray
    linear: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        n = np.asarray(self.Q).shape[0]
        object.__setattr__(self, "Q", check_symmetric_psd(self.Q, n, name="Q"))
        object.__setattr__(self, "R", check_symmetric_psd(self.R, n, name="R"))
        object.__setattr__(self, "Qf", check_symmetric_psd(self.Qf, n, name="Qf"))
        lin = np.asarray(self.linear, dtype=float).reshape(-1)
        if lin.shape != (n,):
            raise ValueError(f"linear term has shape {lin.shape}, expected ({n},)")
        object.__setattr__(self, "linear", lin)
        if self.kind not in COST_KINDS:
            raise ValueError(f"unknown cost kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def stage(self, x, u) -> float:
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return float(x @ self.Q @ x + self.linear @ x + u @ self.R @ u)

    def terminal(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Qf @ x + self.linear @ x)


def cost_from_network(net: ParallelNetwork, kind: str, R=None) -> QuadraticCost:
    """Build the quadratic cost matching a routing objective.

    ``rosenthal`` uses ``Q = diag(a/2)`` so ``x'Qx + b'x`` is the potential;
    ``social_welfare`` uses ``Q = diag(a)`` so it is the total latency.
    """
    if kind not in ("rosenthal", "social_welfare"):
        raise ValueError(f"cost_from_network needs a named kind, got {kind!r}")
    scale = 0.5 if kind == "rosenthal" else 1.0
    Q = np.diag(scale * net.slopes)
    if R is None:
        R = np.zeros((net.n_edges, net.n_edges))
    return QuadraticCost(Q=Q, R=R, Qf=Q.copy(), linear=net.offsets.copy(), kind=kind)
