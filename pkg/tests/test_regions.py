"""Critical-region enumeration and the explicit piecewise-affine law."""

import json

import numpy as np
import pytest

import routegame as rg
from routegame.exceptions import RegionNotFoundError

from conftest import random_simplex


def _qp_for(slopes, A, gamma, T=15):
    net = rg.network_from_coefficients(slopes)
    cost = rg.cost_from_network(net, kind="social_welfare")
    n = len(slopes)
    Amat = rg.uniform_averaging(n) if A == "uniform" else np.eye(n)
    dyn = rg.GameDynamics(gamma=gamma, A=Amat, B=np.eye(n))
    return rg.condense(rg.HorizonProblem(dyn, cost, T))


@pytest.fixture(scope="module")
def law_identity():
    # Identity A, Q = I: the benchmark with four published regions.
    return rg.enumerate_regions(_qp_for([1.0, 1.0, 1.0], "identity", 0.5))


@pytest.fixture(scope="module")
def qp_identity():
    return _qp_for([1.0, 1.0, 1.0], "identity", 0.5)


def test_identity_A_has_four_regions(law_identity):
    assert law_identity.n_regions == 4
    assert not law_identity.degenerate


def test_averaging_A_has_one_region():
    law = rg.enumerate_regions(_qp_for([1.0, 1.0, 1.0], "uniform", 0.5))
    assert law.n_regions == 1


def test_active_sets_are_the_three_single_pins(law_identity):
    # One region per pinned first-stage edge plus the unconstrained one.
    sets = sorted(r.active_set for r in law_identity.regions)
    assert sets == [(), (0,), (1,), (2,)]


def test_published_first_block_law(law_identity):
    region, _ = rg.lookup(law_identity, np.array([0.3, 0.5, 0.2]))
    n = 3
    first_F = region.Fmat[:n, :]
    first_G = region.Gvec[:n]
    assert np.max(np.abs(first_F - (-np.eye(n) + np.ones((n, n)) / 3))) < 1e-8
    assert np.max(np.abs(first_G - 1.0 / 3.0)) < 1e-8


def test_lookup_value_hand_check(law_identity):
    # u0 = 2/3 - x componentwise in the interior region.
    x = np.array([0.3, 0.5, 0.2])
    u = rg.control_at(law_identity, x)
    assert np.max(np.abs(u - np.array([11 / 30, 1 / 6, 7 / 15]))) < 1e-9


def test_more_regions_with_more_inertia():
    slow = rg.enumerate_regions(_qp_for([1.0, 2.0, 4.0], "identity", 0.5))
    fast = rg.enumerate_regions(_qp_for([1.0, 2.0, 4.0], "identity", 0.7))
    assert fast.n_regions > slow.n_regions


def test_law_matches_solver_everywhere(law_identity, qp_identity, rng):
    report = rg.verify_law(law_identity, qp_identity, n_samples=2000, seed=3)
    assert report.coverage == 1.0
    assert report.max_deviation <= 1e-7


def test_law_continuous_across_facets(law_identity, rng):
    # The optimizer is continuous, so adjacent affine pieces must agree on
    # shared boundaries; sample near region borders and compare pieces.
    for _ in range(200):
        x = random_simplex(rng, 3)
        vals = []
        for region in law_identity.regions:
            gap = float(np.max(region.H @ x - region.K))
            if gap <= 1e-4:  # inside or within a hair of this region
                vals.append(region.Fmat @ x + region.Gvec)
        for v in vals[1:]:
            assert np.max(np.abs(v - vals[0])) < 1e-3


def test_lookup_outside_raises(law_identity):
    with pytest.raises(Exception):
        rg.lookup(law_identity, np.array([0.7, 0.7, -0.4]))


def test_region_centers_are_contained(law_identity):
    for region in law_identity.regions:
        assert region.contains(region.center, 1e-9)
        assert region.radius > 1e-9


def test_hole_detection(law_identity, qp_identity):
    # Delete one region: sampling must now report imperfect coverage.
    broken = rg.PwaControlLaw(
        regions=law_identity.regions[1:],
        n_e=law_identity.n_e,
        T=law_identity.T,
        degenerate=law_identity.degenerate,
    )
    report = rg.verify_law(broken, qp_identity, n_samples=500, seed=11)
    assert report.coverage < 1.0
    assert not report.ok
    assert len(report.holes) > 0


def test_ternary_projection_vertices():
    # Corners map to an equilateral triangle with unit sides.
    p1 = rg.ternary_projection([1.0, 0.0, 0.0])
    p2 = rg.ternary_projection([0.0, 1.0, 0.0])
    p3 = rg.ternary_projection([0.0, 0.0, 1.0])
    assert np.allclose(p1, [0.0, 0.0])
    assert np.allclose(p2, [1.0, 0.0])
    assert np.allclose(p3, [0.5, np.sqrt(3) / 2])
    for a, b in ((p1, p2), (p2, p3), (p1, p3)):
        assert abs(np.linalg.norm(np.asarray(a) - np.asarray(b)) - 1.0) < 1e-12


def test_polygon_areas_tile_the_simplex(law_identity):
    polys = rg.region_polygons(law_identity)
    assert set(polys) == {r.id for r in law_identity.regions}
    total = sum(rg.polygon_area(v) for v in polys.values())
    assert abs(total - np.sqrt(3) / 4) < 1e-6


def test_single_region_polygon_is_whole_simplex():
    law = rg.enumerate_regions(_qp_for([1.0, 1.0, 1.0], "uniform", 0.5))
    polys = rg.region_polygons(law)
    (vertices,) = polys.values()
    assert abs(rg.polygon_area(vertices) - np.sqrt(3) / 4) < 1e-6


def test_json_round_trip(tmp_path, law_identity):
    path = tmp_path / "law.json"
    rg.export_regions(law_identity, path)
    back = rg.law_from_json(path)
    assert back.n_regions == law_identity.n_regions
    for a, b in zip(law_identity.regions, back.regions):
        assert a.active_set == b.active_set
        assert np.array_equal(a.H, b.H)  # repr round trip is exact
        assert np.array_equal(a.Fmat, b.Fmat)
        assert np.array_equal(a.Gvec, b.Gvec)


def test_vertex_csv_schema(tmp_path, law_identity):
    jpath = tmp_path / "law.json"
    cpath = tmp_path / "verts.csv"
    rg.export_regions(law_identity, jpath, cpath)
    lines = cpath.read_text().strip().splitlines()
    assert lines[0] == "region_id,vertex_x,vertex_y"
    assert len(lines) > 4  # at least a triangle somewhere
    data = json.loads(jpath.read_text())
    assert data["n_e"] == 3
    assert len(data["regions"]) == 4


def test_lookup_agrees_with_qp_on_weighted_costs(rng):
    qp = _qp_for([1.0, 2.0, 4.0], "identity", 0.7)
    law = rg.enumerate_regions(qp)
    for _ in range(150):
        x = random_simplex(rng, 3)
        _, z = rg.lookup(law, x)
        direct = rg.solve_qp(qp, x).z
        assert np.max(np.abs(z - direct)) < 1e-6


def test_region_budget_guard():
    qp = _qp_for([1.0, 2.0, 4.0], "identity", 0.7)
    with pytest.raises(rg.RegionBudgetError):
        rg.enumerate_regions(qp, max_regions=2)
