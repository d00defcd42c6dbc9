"""Finite-horizon control of the routing game as one dense quadratic program.

``condense`` eliminates the states from the horizon cost, leaving a QP in
the stacked suggestions ``z = (u_0, ..., u_{T-1})`` whose linear term is
affine in the initial allocation ``x``. Per-step simplex memberships stay as
explicit rows: nonnegativity as ``G z <= W + S x``, the unit sums as
equalities. State constraints need no rows at all; left-stochastic dynamics
keep any feasible rollout on the simplex.

``solve_qp`` is a primal active-set method over that structure, certified
against the stacked KKT conditions. ``solve_qp_exhaustive`` enumerates every
candidate active set and exists to check the solver, not to be fast.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dynamics import GameDynamics
from .exceptions import DomainError, SolverError
from .network import QuadraticCost
from .validation import check_simplex, simplex_basis

EPS_KKT = 1e-8
DEFAULT_REG = 1e-9


@dataclass(frozen=True, eq=False)
class HorizonProblem:
    """Routing dynamics plus quadratic horizon cost over ``T`` rounds."""

    dyn: GameDynamics
    cost: QuadraticCost
    T: int

    def __post_init__(self):
        if self.T < 1:
            raise DomainError(f"horizon must be at least 1, got {self.T}")
        if self.cost.n != self.dyn.n:
            raise DomainError(
                f"cost is {self.cost.n}-dimensional but dynamics have {self.dyn.n} edges"
            )

    @property
    def n(self) -> int:
        return self.dyn.n


@dataclass(frozen=True, eq=False)
class CondensedQp:
    """``min_z 0.5 z'Pz + (Fx+c)'z  s.t.  Gz <= W + Sx,  A_eq z = b_eq``.

    The optimal value additionally carries ``0.5 x'Yx + lin'x + const`` so
    reported objectives match a raw rollout of the horizon cost. ``P`` is the
    exact Hessian; if it fails strict convexity on the nullspace of the
    equality rows, solves quietly add ``reg_applied * I`` (recorded here) to
    pin a unique minimizer.
    """

    P: np.ndarray
    F: np.ndarray
    c: np.ndarray
    Y: np.ndarray
    lin: np.ndarray
    const: float
    G: np.ndarray
    W: np.ndarray
    S: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    n_e: int
    T: int
    reg: float = DEFAULT_REG
    reg_applied: float = field(default=0.0, init=False)

    def __post_init__(self):
        for name in ("P", "F", "c", "Y", "lin", "G", "W", "S", "A_eq", "b_eq"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "P", 0.5 * (self.P + self.P.T))
        nz = self.P.shape[0]
        if self.G.shape[1] != nz or self.A_eq.shape[1] != nz:
            raise DomainError("constraint rows do not match the decision dimension")
        # Strict convexity is only needed along directions the equalities allow.
        null = scipy.linalg.null_space(self.A_eq)
        applied = 0.0
        if null.shape[1]:
            lam_min = float(np.linalg.eigvalsh(null.T @ self.P @ null)[0])
            if lam_min < self.reg:
                applied = self.reg
        object.__setattr__(self, "reg_applied", applied)
        object.__setattr__(self, "_solver_P", self.P + applied * np.eye(nz))
        object.__setattr__(self, "_kkt_cache", {})

    @property
    def n_z(self) -> int:
        return self.P.shape[0]

    def linear_term(self, x) -> np.ndarray:
        return self.F @ np.asarray(x, dtype=float) + self.c

    def ineq_rhs(self, x) -> np.ndarray:
        return self.W + self.S @ np.asarray(x, dtype=float)

    def objective(self, x, z) -> float:
        """Exact horizon cost of decision ``z`` from state ``x`` (no ridge)."""
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        return float(
            0.5 * z @ self.P @ z
            + self.linear_term(x) @ z
            + 0.5 * x @ self.Y @ x
            + self.lin @ x
            + self.const
        )

    def kkt_matrix(self, active: tuple[int, ...]):
        """LU factorization of the KKT system for a working set, cached."""
        cache = self._kkt_cache
        hit = cache.get(active)
        if hit is None:
            rows = np.vstack([self.A_eq, self.G[list(active)]])
            m = rows.shape[0]
            K = np.block([[self._solver_P, rows.T], [rows, np.zeros((m, m))]])
            hit = scipy.linalg.lu_factor(K)
            cache[active] = hit
        return hit


def condense(hp: HorizonProblem, *, reg: float = DEFAULT_REG) -> CondensedQp:
    """Eliminate states from the horizon cost.

    Stage costs run over ``t = 0..T-1`` plus the terminal term, with states
    substituted by ``x_t = (gamma A)^t x + sum_k (gamma A)^{t-1-k} (1-gamma) B u_k``.
    """
    n, T = hp.n, hp.T
    Ae, Be = hp.dyn.A_eff, hp.dyn.B_eff
    cost = hp.cost

    powers = [np.eye(n)]
    for _ in range(T):
        powers.append(Ae @ powers[-1])
    Phi = np.vstack(powers[1:])

    Gam = np.zeros((n * T, n * T))
    for t in range(1, T + 1):
        for k in range(t):
            Gam[(t - 1) * n : t * n, k * n : (k + 1) * n] = powers[t - 1 - k] @ Be

    Qbar = scipy.linalg.block_diag(*([cost.Q] * (T - 1) + [cost.Qf]))
    Rbar = scipy.linalg.block_diag(*([cost.R] * T))
    bbar = np.tile(cost.linear, T)

    QG = Qbar @ Gam
    P = 2.0 * (Gam.T @ QG + Rbar)
    F = 2.0 * (QG.T @ Phi)
    c = Gam.T @ bbar
    Y = 2.0 * (cost.Q + Phi.T @ Qbar @ Phi)
    lin = cost.linear + Phi.T @ bbar

    return CondensedQp(
        P=P,
        F=F,
        c=c,
        Y=Y,
        lin=lin,
        const=0.0,
        G=-np.eye(n * T),
        W=np.zeros(n * T),
        S=np.zeros((n * T, n)),
        A_eq=np.kron(np.eye(T), np.ones((1, n))),
        b_eq=np.ones(T),
        n_e=n,
        T=T,
        reg=reg,
    )


@dataclass(frozen=True, eq=False)
class QpSolution:
    z: np.ndarray
    value: float
    active_set: tuple[int, ...]
    lam: np.ndarray
    nu: np.ndarray
    n_iter: int
    kkt_residual: float


def _feasible_start(qp: CondensedQp, h: np.ndarray) -> np.ndarray:
    z0 = np.tile(np.full(qp.n_e, 1.0 / qp.n_e), qp.T)
    if z0.shape[0] != qp.n_z:
        raise SolverError("condensed program has unexpected decision dimension")
    if np.max(qp.G @ z0 - h, initial=-np.inf) > 1e-12 or (
        np.max(np.abs(qp.A_eq @ z0 - qp.b_eq)) > 1e-12
    ):
        raise SolverError("uniform split is not feasible for this program")
    return z0


def solve_qp(qp: CondensedQp, x, *, max_iter: int | None = None) -> QpSolution:
    """Primal active-set solve, started from the uniform split.

    Ties in both the drop and the block steps go to the smallest row index,
    which rules out cycling and makes the pivot sequence reproducible.
    """
    x = check_simplex(x, qp.n_e, name="x")
    q = qp.linear_term(x)
    h = qp.ineq_rhs(x)
    nz = qp.n_z
    n_eq = qp.A_eq.shape[0]
    if max_iter is None:
        max_iter = max(10 * nz, 30)

    z = _feasible_start(qp, h)
    work: list[int] = []
    P_solve = qp._solver_P

    for it in range(1, max_iter + 1):
        active = tuple(work)
        grad = P_solve @ z + q
        rhs = np.concatenate([-grad, np.zeros(n_eq + len(work))])
        try:
            sol = scipy.linalg.lu_solve(qp.kkt_matrix(active), rhs)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SolverError(f"singular KKT system for working set {active}") from exc
        p = sol[:nz]
        mults = sol[nz:]

        if np.max(np.abs(p)) <= 1e-11 * max(1.0, np.max(np.abs(z))):
            lam_work = mults[n_eq:]
            if lam_work.size == 0 or np.min(lam_work) >= -1e-10:
                lam = np.zeros(qp.G.shape[0])
                lam[list(work)] = np.clip(lam_work, 0.0, None)
                nu = mults[:n_eq]
                res = _kkt_residual(qp, x, z, lam, nu, q, h)
                if res > EPS_KKT:
                    raise SolverError(f"KKT residual {res:g} exceeds {EPS_KKT:g}")
                return QpSolution(
                    z=z,
                    value=qp.objective(x, z),
                    active_set=tuple(sorted(work)),
                    lam=lam,
                    nu=nu,
                    n_iter=it,
                    kkt_residual=res,
                )
            # Bland: release the lowest-index row among negative multipliers.
            candidates = [work[j] for j in range(len(work)) if lam_work[j] < -1e-10]
            work.remove(min(candidates))
            continue

        Gp = qp.G @ p
        slack = np.clip(h - qp.G @ z, 0.0, None)
        alpha = 1.0
        blocker = -1
        for i in range(qp.G.shape[0]):
            if i in work or Gp[i] <= 1e-13:
                continue
            ai = slack[i] / Gp[i]
            # Ascending scan + strict improvement keeps the smallest index
            # among tied blockers (Bland).
            if ai < alpha - 1e-13:
                alpha, blocker = ai, i
        z = z + alpha * p
        if blocker >= 0:
            work.append(blocker)
            work.sort()

    raise SolverError(f"active-set solver hit the iteration cap ({max_iter})")


def _kkt_residual(qp, x, z, lam, nu, q=None, h=None) -> float:
    if q is None:
        q = qp.linear_term(x)
    if h is None:
        h = qp.ineq_rhs(x)
    station = qp._solver_P @ z + q + qp.A_eq.T @ nu + qp.G.T @ lam
    primal_ineq = np.clip(qp.G @ z - h, 0.0, None)
    primal_eq = np.abs(qp.A_eq @ z - qp.b_eq)
    comp = np.abs(lam * (qp.G @ z - h))
    dual = np.clip(-lam, 0.0, None)
    return float(
        max(
            np.max(np.abs(station), initial=0.0),
            np.max(primal_ineq, initial=0.0),
            np.max(primal_eq, initial=0.0),
            np.max(comp, initial=0.0),
            np.max(dual, initial=0.0),
        )
    )


def solve_qp_exhaustive(qp: CondensedQp, x, *, max_dim: int = 14) -> QpSolution:
    """Enumerate all candidate active sets; the reference answer for small programs.

    Checks every subset of inequality rows for a KKT-consistent stationary
    point and returns the best feasible one. Exponential in the decision
    dimension, hence the guard.
    """
    if qp.n_z > max_dim:
        raise SolverError(f"exhaustive solve limited to {max_dim} variables")
    x = np.asarray(x, dtype=float).reshape(-1)
    q = qp.linear_term(x)
    h = qp.ineq_rhs(x)
    nz = qp.n_z
    n_eq = qp.A_eq.shape[0]
    m = qp.G.shape[0]

    best: QpSolution | None = None
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            rows = np.vstack([qp.A_eq, qp.G[list(subset)]])
            K = np.block(
                [
                    [qp._solver_P, rows.T],
                    [rows, np.zeros((rows.shape[0], rows.shape[0]))],
                ]
            )
            rhs = np.concatenate([-q, qp.b_eq, h[list(subset)]])
            try:
                sol = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(sol)):
                continue
            # A numerically near-singular block can "solve" with garbage; the
            # residual check rejects those before any feasibility reasoning.
            if np.max(np.abs(K @ sol - rhs)) > 1e-8 * max(1.0, np.max(np.abs(rhs))):
                continue
            z = sol[:nz]
            lam_sub = sol[nz + n_eq :]
            if np.max(np.abs(qp.A_eq @ z - qp.b_eq)) > 1e-9:
                continue
            if subset and np.max(np.abs(qp.G[list(subset)] @ z - h[list(subset)])) > 1e-9:
                continue
            if np.max(qp.G @ z - h, initial=-np.inf) > 1e-9:
                continue
            if lam_sub.size and np.min(lam_sub) < -1e-9:
                continue
            value = qp.objective(x, z)
            if best is None or value < best.value - 1e-12:
                lam = np.zeros(m)
                lam[list(subset)] = np.clip(lam_sub, 0.0, None)
                best = QpSolution(
                    z=z,
                    value=value,
                    active_set=subset,
                    lam=lam,
                    nu=sol[nz : nz + n_eq],
                    n_iter=0,
                    kkt_residual=_kkt_residual(qp, x, z, lam, sol[nz : nz + n_eq], q, h),
                )
    if best is None:
        raise SolverError("no KKT point found by enumeration")
    return best


def value_function(qp: CondensedQp, x) -> float:
    """Optimal horizon cost from state ``x``, constants included."""
    return solve_qp(qp, x).value


@dataclass(frozen=True, eq=False)
class RiccatiSequence:
    """Backward value matrices ``P_t`` and gains ``K_t`` (``u = K_t x``)."""

    P_seq: tuple[np.ndarray, ...]
    K_seq: tuple[np.ndarray, ...]
    paper_variant: bool = False


def dare_sequence(A, B, Q, R, Qf, T: int, *, paper_variant: bool = False) -> RiccatiSequence:
    """Backward Riccati recursion for the unconstrained horizon problem.

    The standard recursion inverts ``R + B'P_{t+1}B``. ``paper_variant``
    instead inverts ``R + B'Q_f B`` at every step, matching a published
    variant of the recursion; the two agree at the final step whenever they
    agree at all, and the flag exists so both can be compared.
    """
    A, B, Q, R, Qf = (np.asarray(M, dtype=float) for M in (A, B, Q, R, Qf))
    P = Qf.copy()
    P_seq = [P]
    K_seq = []
    for _ in range(T):
        inner = Qf if paper_variant else P
        M = R + B.T @ inner @ B
        try:
            gain = np.linalg.solve(M, B.T @ P @ A)
        except np.linalg.LinAlgError:
            gain = np.linalg.pinv(M) @ (B.T @ P @ A)
        K_seq.append(-gain)
        P = Q + A.T @ P @ A - A.T @ P @ B @ gain
        P = 0.5 * (P + P.T)
        P_seq.append(P)
    return RiccatiSequence(
        P_seq=tuple(reversed(P_seq)),
        K_seq=tuple(reversed(K_seq)),
        paper_variant=paper_variant,
    )


def riccati_recursion(hp: HorizonProblem, *, paper_variant: bool = False) -> RiccatiSequence:
    """Riccati recursion on the effective pair ``(gamma A, (1-gamma) B)``."""
    return dare_sequence(
        hp.dyn.A_eff,
        hp.dyn.B_eff,
        hp.cost.Q,
        hp.cost.R,
        hp.cost.Qf,
        hp.T,
        paper_variant=paper_variant,
    )


def rollout_value(hp: HorizonProblem, x0, z) -> float:
    """Horizon cost of a stacked decision evaluated by explicit rollout."""
    n, T = hp.n, hp.T
    z = np.asarray(z, dtype=float).reshape(T, n)
    x = np.asarray(x0, dtype=float).reshape(-1)
    total = 0.0
    for t in range(T):
        total += hp.cost.stage(x, z[t])
        x = hp.dyn.A_eff @ x + hp.dyn.B_eff @ z[t]
    return total + hp.cost.terminal(x)
