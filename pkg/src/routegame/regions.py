"""Explicit solution of the condensed program over the entire simplex.

The optimizer of the condensed QP is piecewise affine in the initial
allocation: each optimal active set holds on a polyhedron (its critical
region) where the KKT system pins ``z*(x) = F x + G``. Because the
parameter lives on the simplex, which is flat in ambient coordinates, the
enumeration runs in reduced coordinates ``x = c0 + E theta`` where the
polyhedra are full dimensional, and lifts the results back for storage.

Exploration walks the partition geometrically: solve at the domain's
Chebyshev center, then repeatedly step a small ``eps`` beyond the midpoint
of every facet of every discovered region and solve again. Facets on the
simplex boundary have no neighbor and end the walk.
"""
from __future__ import annotations

import csv
import dataclasses
import json
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .exceptions import DomainError, RegionBudgetError, RegionNotFoundError, SolverError
from .qp import CondensedQp, solve_qp
from .validation import check_simplex, simplex_basis

EPS_STEP = 1e-6
EPS_REGION = 1e-9
LOOKUP_TOL = 1e-8
MAX_REGIONS = 10_000


@dataclass(frozen=True, eq=False)
class CriticalRegion:
    """One piece of the explicit law: ``z*(x) = Fmat x + Gvec`` on ``Hx <= K``."""

    id: int
    active_set: tuple[int, ...]
    H: np.ndarray
    K: np.ndarray
    Fmat: np.ndarray
    Gvec: np.ndarray
    center: np.ndarray
    radius: float
    degenerate: bool = False

    def contains(self, x, tol: float = LOOKUP_TOL) -> bool:
        if self.H.shape[0] == 0:
            return True
        return float(np.max(self.H @ x - self.K)) <= tol


@dataclass(frozen=True, eq=False)
class PwaControlLaw:
    """The full collection of critical regions for one condensed program."""

    regions: tuple[CriticalRegion, ...]
    n_e: int
    T: int
    degenerate: bool = False

    @property
    def n_regions(self) -> int:
        return len(self.regions)


class _DegenerateKkt(Exception):
    pass


def _chebyshev_center(A: np.ndarray, b: np.ndarray):
    """Center and radius of the largest ball inside ``A theta <= b``."""
    m, d = A.shape
    norms = np.linalg.norm(A, axis=1, keepdims=True)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, norms]),
        b_ub=b,
        bounds=[(None, None)] * d + [(0, None)],
        method="highs",
    )
    if not res.success:
        return None, -np.inf
    return res.x[:d], float(res.x[-1])


def _drop_redundant(A: np.ndarray, b: np.ndarray):
    """Indices of rows that actually support the polyhedron ``A theta <= b``."""
    keep = []
    m = A.shape[0]
    for i in range(m):
        others = [j for j in keep + list(range(i + 1, m))]
        res = linprog(
            -A[i],
            A_ub=np.vstack([A[others], A[i][None, :]]),
            b_ub=np.concatenate([b[others], [b[i] + 1.0]]),
            bounds=[(None, None)] * A.shape[1],
            method="highs",
        )
        # Row supports the region unless the LP proves it slack everywhere.
        if not res.success or -res.fun > b[i] - 1e-9:
            keep.append(i)
    return keep


def _facet_point(A: np.ndarray, b: np.ndarray, i: int):
    """A relatively interior point of facet ``i`` of ``A theta <= b``."""
    a = A[i]
    theta_p = a * (b[i] / float(a @ a))
    d = A.shape[1]
    if d == 1:
        return theta_p
    # Null-space basis of the facet normal spans the facet's hyperplane.
    V = np.linalg.qr(np.concatenate([a[:, None], np.eye(d)], axis=1))[0][:, 1:d]
    others = [j for j in range(A.shape[0]) if j != i]
    AV = A[others] @ V
    bV = b[others] - A[others] @ theta_p
    live = np.linalg.norm(AV, axis=1) > 1e-12
    if np.any(bV[~live] < -1e-9):
        return None
    if not np.any(live):
        return theta_p
    xi, r = _chebyshev_center(AV[live], bV[live])
    if xi is None or r < -1e-9:
        return None
    return theta_p + V @ xi


@dataclass(eq=False)
class _Reduced:
    """Condensed program re-parametrized by simplex tangent coordinates."""

    qp: CondensedQp
    E: np.ndarray
    c0: np.ndarray
    F: np.ndarray
    c: np.ndarray
    W: np.ndarray
    S: np.ndarray
    dom_A: np.ndarray
    dom_b: np.ndarray


def _reduce(qp: CondensedQp) -> _Reduced:
    E, c0 = simplex_basis(qp.n_e)
    return _Reduced(
        qp=qp,
        E=E,
        c0=c0,
        F=qp.F @ E,
        c=qp.c + qp.F @ c0,
        W=qp.W + qp.S @ c0,
        S=qp.S @ E,
        dom_A=-E,
        dom_b=c0.copy(),
    )


@dataclass(eq=False)
class _RawRegion:
    active_set: tuple[int, ...]
    rows_A: np.ndarray  # reduced inequality rows, normalized
    rows_b: np.ndarray
    tags: list[str]
    z0: np.ndarray
    Zt: np.ndarray
    center_theta: np.ndarray
    radius: float


def _region_from_active(red: _Reduced, active: tuple[int, ...]):
    qp = red.qp
    nz = qp.n_z
    n_eq = qp.A_eq.shape[0]
    act = list(active)
    rows = np.vstack([qp.A_eq, qp.G[act]])
    m = rows.shape[0]
    M = np.block([[qp._solver_P, rows.T], [rows, np.zeros((m, m))]])
    rhs = np.zeros((nz + m, 1 + red.F.shape[1]))
    rhs[:nz, 0] = -red.c
    rhs[:nz, 1:] = -red.F
    rhs[nz : nz + n_eq, 0] = qp.b_eq
    rhs[nz + n_eq :, 0] = red.W[act]
    rhs[nz + n_eq :, 1:] = red.S[act]
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise _DegenerateKkt(f"singular KKT for active set {active}") from exc
    if not np.all(np.isfinite(sol)):
        raise _DegenerateKkt(f"ill-conditioned KKT for active set {active}")
    z0, Zt = sol[:nz, 0], sol[:nz, 1:]
    lam0, Lamt = sol[nz + n_eq :, 0], sol[nz + n_eq :, 1:]

    A_list, b_list, tags = [], [], []
    inactive = [i for i in range(qp.G.shape[0]) if i not in active]
    if inactive:
        Gi = qp.G[inactive]
        A_list.append(Gi @ Zt - red.S[inactive])
        b_list.append(red.W[inactive] - Gi @ z0)
        tags.extend(["primal"] * len(inactive))
    if act:
        A_list.append(-Lamt)
        b_list.append(lam0)
        tags.extend(["dual"] * len(act))
    A_list.append(red.dom_A)
    b_list.append(red.dom_b)
    tags.extend(["domain"] * red.dom_A.shape[0])

    A = np.vstack(A_list)
    b = np.concatenate(b_list)

    # Normalize rows; constant rows either prove emptiness or drop out.
    norms = np.linalg.norm(A, axis=1)
    flat = norms <= 1e-11
    if np.any(b[flat] < -1e-9):
        return None
    A, b, tags = A[~flat], b[~flat], [t for t, f in zip(tags, flat) if not f]
    norms = norms[~flat]
    A = A / norms[:, None]
    b = b / norms

    # Deduplicate identical rows so shared primal/dual facets appear once.
    seen_rows = {}
    for j in range(A.shape[0]):
        key = tuple(np.round(A[j], 9)) + (round(float(b[j]), 9),)
        if key not in seen_rows:
            seen_rows[key] = j
    idx = sorted(seen_rows.values())
    A, b, tags = A[idx], b[idx], [tags[j] for j in idx]

    center, radius = _chebyshev_center(A, b)
    if center is None or radius <= EPS_REGION:
        return None
    keep = _drop_redundant(A, b)
    return _RawRegion(
        active_set=tuple(sorted(active)),
        rows_A=A[keep],
        rows_b=b[keep],
        tags=[tags[j] for j in keep],
        z0=z0,
        Zt=Zt,
        center_theta=center,
        radius=radius,
    )


def _lift(red: _Reduced, raw: _RawRegion, region_id: int, degenerate: bool) -> CriticalRegion:
    E, c0 = red.E, red.c0
    H = raw.rows_A @ E.T
    K = raw.rows_b + raw.rows_A @ (E.T @ c0)
    Fmat = raw.Zt @ E.T
    Gvec = raw.z0 - Fmat @ c0
    return CriticalRegion(
        id=region_id,
        active_set=raw.active_set,
        H=H,
        K=K,
        Fmat=Fmat,
        Gvec=Gvec,
        center=c0 + E @ raw.center_theta,
        radius=raw.radius,
        degenerate=degenerate,
    )


def _explore(qp: CondensedQp, *, eps_step: float, max_regions: int, degenerate: bool):
    red = _reduce(qp)
    if red.E.shape[1] == 0:
        # One edge: the simplex is a point and the law is a single constant.
        sol = solve_qp(qp, red.c0)
        region = CriticalRegion(
            id=1,
            active_set=sol.active_set,
            H=np.zeros((0, qp.n_e)),
            K=np.zeros(0),
            Fmat=np.zeros((qp.n_z, qp.n_e)),
            Gvec=sol.z,
            center=red.c0.copy(),
            radius=np.inf,
            degenerate=degenerate,
        )
        return PwaControlLaw((region,), qp.n_e, qp.T, degenerate=degenerate)

    theta_seed, _ = _chebyshev_center(red.dom_A, red.dom_b)
    if theta_seed is None:
        raise SolverError("simplex domain has no interior in reduced coordinates")

    queue: deque[tuple[int, ...]] = deque()
    queue.append(_probe(qp, red, theta_seed))
    seen: dict[tuple[int, ...], bool] = {}
    raws: list[_RawRegion] = []

    while queue:
        active = queue.popleft()
        if active in seen:
            continue
        raw = _region_from_active(red, active)
        seen[active] = raw is not None
        if raw is None:
            continue
        raws.append(raw)
        if len(raws) > max_regions:
            raise RegionBudgetError(f"more than {max_regions} critical regions")
        for j in range(raw.rows_A.shape[0]):
            if raw.tags[j] == "domain":
                continue
            point = _facet_point(raw.rows_A, raw.rows_b, j)
            if point is None:
                point = _project_to_row(raw.center_theta, raw.rows_A[j], raw.rows_b[j])
            normal = raw.rows_A[j]
            eps = eps_step
            for _ in range(5):
                theta_new = point + eps * normal
                if np.max(red.dom_A @ theta_new - red.dom_b) > 1e-12:
                    break
                neighbor = _probe(qp, red, theta_new)
                if neighbor != active:
                    if neighbor not in seen:
                        queue.append(neighbor)
                    break
                eps *= 10.0

    regions = tuple(
        _lift(red, raw, i + 1, degenerate) for i, raw in enumerate(raws)
    )
    return PwaControlLaw(regions, qp.n_e, qp.T, degenerate=degenerate)


def _project_to_row(theta, a, b):
    return theta + a * (b - a @ theta) / float(a @ a)


def _probe(qp: CondensedQp, red: _Reduced, theta) -> tuple[int, ...]:
    x = red.c0 + red.E @ theta
    sol = solve_qp(qp, x)
    return tuple(sorted(sol.active_set))


def enumerate_regions(
    qp: CondensedQp,
    *,
    eps_step: float = EPS_STEP,
    max_regions: int = MAX_REGIONS,
    jitter_seed: int = 0,
) -> PwaControlLaw:
    """Enumerate every critical region of the condensed program over the simplex.

    A singular KKT system along the way marks the program degenerate; the
    inequality offsets are then jittered by a seeded perturbation at the
    1e-9 scale and the walk restarts, with the resulting regions flagged.
    """
    try:
        return _explore(qp, eps_step=eps_step, max_regions=max_regions, degenerate=False)
    except (_DegenerateKkt, SolverError):
        rng = np.random.default_rng(jitter_seed)
        jitter = rng.uniform(0.0, 1e-9, size=qp.W.shape[0])
        qp_j = dataclasses.replace(qp, W=qp.W + jitter)
        return _explore(qp_j, eps_step=eps_step, max_regions=max_regions, degenerate=True)


def lookup(law: PwaControlLaw, x, *, tol: float = LOOKUP_TOL):
    """First region (by id) containing ``x`` and the optimizer it prescribes."""
    x = check_simplex(x, law.n_e, name="x")
    for region in law.regions:
        if region.contains(x, tol):
            return region, region.Fmat @ x + region.Gvec
    raise RegionNotFoundError(x, tol)


def control_at(law: PwaControlLaw, x, *, tol: float = LOOKUP_TOL) -> np.ndarray:
    """First-round suggestion of the explicit law, clamped onto the simplex."""
    _, z = lookup(law, x, tol=tol)
    return check_simplex(z[: law.n_e], law.n_e, name="u")


@dataclass(frozen=True, eq=False)
class LawReport:
    """Sampled comparison of the explicit law against fresh QP solves."""

    max_deviation: float
    coverage: float
    n_samples: int
    holes: tuple

    @property
    def ok(self) -> bool:
        return self.coverage == 1.0 and self.max_deviation <= 1e-6


def verify_law(
    law: PwaControlLaw,
    qp: CondensedQp,
    *,
    n_samples: int = 10_000,
    seed: int = 0,
    tol: float = LOOKUP_TOL,
) -> LawReport:
    rng = np.random.default_rng(seed)
    samples = rng.dirichlet(np.ones(law.n_e), size=n_samples)
    max_dev = 0.0
    holes = []
    for x in samples:
        try:
            _, z_explicit = lookup(law, x, tol=tol)
        except RegionNotFoundError:
            if len(holes) < 10:
                holes.append(x.copy())
            else:
                holes.append(None)
            continue
        z_qp = solve_qp(qp, x).z
        max_dev = max(max_dev, float(np.max(np.abs(z_explicit - z_qp))))
    n_holes = len(holes)
    return LawReport(
        max_deviation=max_dev,
        coverage=1.0 - n_holes / n_samples,
        n_samples=n_samples,
        holes=tuple(h for h in holes if h is not None),
    )


def ternary_projection(x) -> np.ndarray:
    """Planar coordinates of a 3-edge allocation (equilateral triangle)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != 3:
        raise DomainError("planar projection is defined for 3 edges")
    return np.array([x[1] + 0.5 * x[2], (np.sqrt(3.0) / 2.0) * x[2]])


def region_polygons(law: PwaControlLaw) -> dict[int, np.ndarray]:
    """Vertices of each region as planar polygons (3-edge networks only).

    Vertices are intersections of active boundary pairs in reduced
    coordinates, filtered for feasibility, deduplicated, and ordered
    counterclockwise. Returned in the same planar frame as
    ``ternary_projection``.
    """
    if law.n_e != 3:
        raise DomainError("polygon extraction is defined for 3 edges")
    E, c0 = simplex_basis(law.n_e)
    out: dict[int, np.ndarray] = {}
    for region in law.regions:
        A = region.H @ E
        b = region.K - region.H @ c0
        # Regions imported without rows (single-region laws) fall back to the domain.
        A = np.vstack([A, -E]) if A.size else -E.copy()
        b = np.concatenate([b, c0]) if b.size else c0.copy()
        pts = []
        m = A.shape[0]
        for i in range(m):
            for j in range(i + 1, m):
                M = np.vstack([A[i], A[j]])
                det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
                if abs(det) < 1e-12:
                    continue
                theta = np.linalg.solve(M, np.array([b[i], b[j]]))
                if np.max(A @ theta - b) <= 1e-8:
                    pts.append(theta)
        if not pts:
            continue
        pts = np.array(pts)
        keyed = {}
        for p in pts:
            keyed[tuple(np.round(p, 9))] = p
        pts = np.array(list(keyed.values()))
        planar = np.array([ternary_projection(c0 + E @ t) for t in pts])
        centroid = planar.mean(axis=0)
        order = np.argsort(np.arctan2(planar[:, 1] - centroid[1], planar[:, 0] - centroid[0]))
        out[region.id] = planar[order]
    return out


def polygon_area(vertices: np.ndarray) -> float:
    """Shoelace area of an ordered planar polygon."""
    v = np.asarray(vertices, dtype=float)
    if v.shape[0] < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def law_to_dict(law: PwaControlLaw) -> dict:
    return {
        "n_e": law.n_e,
        "T": law.T,
        "degenerate": law.degenerate,
        "regions": [
            {
                "id": r.id,
                "active_set": list(r.active_set),
                "H": r.H.tolist(),
                "K": r.K.tolist(),
                "F": r.Fmat.tolist(),
                "G": r.Gvec.tolist(),
                "center": r.center.tolist(),
            }
            for r in law.regions
        ],
    }


def law_from_dict(data: dict) -> PwaControlLaw:
    regions = tuple(
        CriticalRegion(
            id=int(r["id"]),
            active_set=tuple(int(i) for i in r["active_set"]),
            H=np.asarray(r["H"], dtype=float).reshape(len(r["K"]), data["n_e"]),
            K=np.asarray(r["K"], dtype=float),
            Fmat=np.asarray(r["F"], dtype=float),
            Gvec=np.asarray(r["G"], dtype=float),
            center=np.asarray(r["center"], dtype=float),
            radius=float(r.get("radius", 0.0)),
            degenerate=bool(data.get("degenerate", False)),
        )
        for r in data["regions"]
    )
    return PwaControlLaw(
        regions, int(data["n_e"]), int(data["T"]), degenerate=bool(data.get("degenerate", False))
    )


def export_regions(law: PwaControlLaw, json_path, vertices_csv=None) -> dict:
    """Write the law to JSON (full precision) and optionally its polygons to CSV."""
    data = law_to_dict(law)
    with open(json_path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
    if vertices_csv is not None:
        polygons = region_polygons(law)
        with open(vertices_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["region_id", "vertex_x", "vertex_y"])
            for rid in sorted(polygons):
                for vx, vy in polygons[rid]:
                    writer.writerow([rid, repr(float(vx)), repr(float(vy))])
    return data


def law_from_json(path) -> PwaControlLaw:
    with open(path) as fh:
        return law_from_dict(json.load(fh))
