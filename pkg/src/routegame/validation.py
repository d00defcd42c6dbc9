"""Input validation helpers.

Every public entry point funnels array-likes through these checks, in the
spirit of sklearn's ``check_array``: validate, clamp roundoff-level noise,
and hand back a normalized ``float64`` copy the numerics can trust.
"""
from __future__ import annotations

import numpy as np

from .exceptions import SimplexError, StochasticityError

# Entries this far below zero are treated as roundoff and clamped.
EPS_SIMPLEX = 1e-9
# Allocations whose total is further than this from 1 are rejected
# rather than silently rescaled.
SUM_SLACK = 1e-6
EPS_SYM = 1e-9
EPS_PSD = 1e-9


def check_simplex(x, n: int | None = None, *, name: str = "x") -> np.ndarray:
    """Validate and renormalize a flow allocation.

    Accepts entries within ``EPS_SIMPLEX`` below zero (clamped to 0) and a
    total within ``SUM_SLACK`` of 1 (rescaled to sum exactly to 1).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size == 0:
        raise SimplexError(f"{name} is empty")
    if n is not None and x.size != n:
        raise SimplexError(f"{name} has {x.size} entries, expected {n}")
    if not np.all(np.isfinite(x)):
        raise SimplexError(f"{name} has non-finite entries")
    if np.min(x) < -EPS_SIMPLEX:
        raise SimplexError(f"{name} has negative entry {np.min(x):g}")
    total = float(np.sum(x))
    if not (1.0 - SUM_SLACK <= total <= 1.0 + SUM_SLACK):
        raise SimplexError(f"{name} sums to {total!r}, not 1")
    x = np.clip(x, 0.0, None)
    return x / np.sum(x)


def check_left_stochastic(M, n: int | None = None, *, name: str = "M") -> np.ndarray:
    """Validate a left-stochastic matrix (columns sum to 1) and renormalize."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise StochasticityError(f"{name} must be square, got shape {M.shape}")
    if n is not None and M.shape[0] != n:
        raise StochasticityError(f"{name} has size {M.shape[0]}, expected {n}")
    if not np.all(np.isfinite(M)):
        raise StochasticityError(f"{name} has non-finite entries")
    if np.min(M) < -EPS_SIMPLEX:
        raise StochasticityError(f"{name} has negative entry {np.min(M):g}")
    sums = M.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > SUM_SLACK:
        raise StochasticityError(
            f"{name} columns sum to {sums.tolist()}, must each sum to 1"
        )
    return np.clip(M, 0.0, None) / np.clip(M, 0.0, None).sum(axis=0)


def check_symmetric_psd(M, n: int | None = None, *, name: str = "Q") -> np.ndarray:
    """Validate symmetry and positive semidefiniteness; returns the symmetrized copy."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if n is not None and M.shape[0] != n:
        raise ValueError(f"{name} has size {M.shape[0]}, expected {n}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    if np.max(np.abs(M - M.T), initial=0.0) > EPS_SYM:
        raise ValueError(f"{name} is not symmetric within {EPS_SYM:g}")
    M = 0.5 * (M + M.T)
    if M.size and np.linalg.eigvalsh(M)[0] < -EPS_PSD:
        raise ValueError(
            f"{name} has eigenvalue {np.linalg.eigvalsh(M)[0]:g} below -{EPS_PSD:g}"
        )
    return M


def simplex_basis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the simplex tangent space plus the barycenter.

    Returns ``(E, c0)`` with ``E`` an ``n x (n-1)`` matrix whose columns span
    ``{v : sum(v) = 0}`` and ``c0`` the uniform allocation, so every
    allocation is ``c0 + E @ theta`` for a unique reduced coordinate vector.
    """
    ones = np.ones((1, n))
    # Deterministic basis from the QR factorization of [1 | I].
    full, _ = np.linalg.qr(np.concatenate([ones.T, np.eye(n)], axis=1))
    E = full[:, 1:n]
    c0 = np.full(n, 1.0 / n)
    return E, c0
