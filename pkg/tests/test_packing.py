import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahler_bounds import cpm_geometry as geo
from kahler_bounds.cpm_geometry import ProjectivePoint as P
from kahler_bounds.cutoffs import Annulus
from kahler_bounds.packing import (PackingPreconditionError, WeightedPointCloud, annulus_measure,
                                   covering_number, cpm_covering_constant, pack_annuli, theoretical_c,
                                   verify_packing)


def uniform_cloud(rng, n, m=1):
    return WeightedPointCloud(geo.random_points(rng, n, m), np.full(n, 1.0 / n))


def two_clusters(rng, n=400, spread=0.05):
    a = geo.chart_to_point(P([1, 0]), spread * (rng.standard_normal((n, 1)) + 1j * rng.standard_normal((n, 1))))
    b = geo.chart_to_point(P([0, 1]), spread * (rng.standard_normal((n, 1)) + 1j * rng.standard_normal((n, 1))))
    return WeightedPointCloud(np.concatenate([a, b]), np.ones(2 * n))


# cloud

def test_cloud_validation():
    with pytest.raises(ValueError):
        WeightedPointCloud(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(ValueError):
        WeightedPointCloud(np.eye(2), np.zeros(2))
    with pytest.raises(ValueError):
        WeightedPointCloud(np.eye(2), np.array([1.0, -1.0]))


def test_cloud_total(rng):
    c = uniform_cloud(rng, 1000)
    assert c.total == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("metric", ["fs", "euclidean"])
def test_cloud_csv_round_trip(tmp_path, rng, metric):
    pts = geo.random_points(rng, 50, 2) if metric == "fs" else rng.uniform(size=(50, 2))
    c = WeightedPointCloud(pts, rng.uniform(0.1, 1, 50), metric)
    c.to_csv(tmp_path / "c.csv")
    back = WeightedPointCloud.from_csv(tmp_path / "c.csv")
    assert back.metric == metric
    np.testing.assert_array_equal(back.points, c.points)
    np.testing.assert_array_equal(back.weights, c.weights)


# annulus_measure

def test_annulus_measure_examples(rng):
    c = two_clusters(rng)
    assert annulus_measure(c, Annulus(P([1, 0]), 0.7, 0.8)) == 0
    assert annulus_measure(c, Annulus(P([1, 1j]), 0.0, np.pi)) == pytest.approx(c.total)
    assert annulus_measure(c, Annulus(P([1, 0]), 0.0, np.pi / 4)) == pytest.approx(400)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1.0), st.floats(0.01, 1.0), st.integers(0, 1000))
def test_double_dominates(inner, width, seed):
    rng = np.random.default_rng(seed)
    c = uniform_cloud(rng, 300)
    a = Annulus(P(geo.random_points(rng, 1, 1)[0]), inner, inner + width)
    assert annulus_measure(c, a) <= annulus_measure(c, a, doubled=True)


# pack_annuli

def test_k1_covers_everything(rng):
    c = uniform_cloud(rng, 2000)
    res = pack_annuli(c, 1, 0.5)
    a = res.annuli[0]
    assert a.inner == 0 and res.measures[0] == pytest.approx(c.total)
    assert verify_packing(c, res)["ok"]


def test_two_clusters(rng):
    c = two_clusters(rng)
    res = pack_annuli(c, 2, 0.25)
    assert res.satisfied and res.achieved_fraction >= 1 - 1e-12
    assert all(a.inner == 0 for a in res.annuli)
    assert verify_packing(c, res)["ok"]


def test_strict_constant_uniform(rng):
    c = uniform_cloud(rng, 3000)
    cst = theoretical_c(1)
    assert cst == pytest.approx(1 / (8 * 81.0**12))
    # no finite cloud meets the atom proxy at this c, so the proxy is waived
    res = pack_annuli(c, 8, cst, check_atoms=False)
    assert res.satisfied and verify_packing(c, res)["ok"]


@pytest.mark.parametrize("k", [2, 4, 8, 16])
def test_verified_on_cp2(rng, k):
    c = uniform_cloud(rng, 5000, m=2)
    res = pack_annuli(c, k, 0.01, seed=k)
    v = verify_packing(c, res)
    assert res.satisfied and v["ok"] and v["overlapping_points"] == 0


def test_heavy_atom_rejected(rng):
    c = WeightedPointCloud(geo.random_points(rng, 100, 1), np.r_[100.0, np.ones(99)])
    with pytest.raises(PackingPreconditionError):
        pack_annuli(c, 4, 0.01)


def test_argument_validation(rng):
    c = uniform_cloud(rng, 100)
    with pytest.raises(ValueError):
        pack_annuli(c, 0, 0.01)
    with pytest.raises(ValueError):
        pack_annuli(c, 1, 1.5)


def test_unreachable_target_flagged(rng):
    # four equal clusters cannot give 8 annuli of 1/8 of the mass each with disjoint doubles
    pts = np.concatenate([geo.chart_to_point(w, 1e-3 * np.ones((50, 1))) for w in
                          ([1, 0], [0, 1], [1, 1], [1, -1])])
    c = WeightedPointCloud(pts, np.ones(200))
    res = pack_annuli(c, 8, 1.0, check_atoms=False)
    assert not res.satisfied
    assert not verify_packing(c, res)["ok"]


def test_deterministic(rng):
    c = uniform_cloud(rng, 3000)
    a, b = pack_annuli(c, 6, 0.01, seed=4), pack_annuli(c, 6, 0.01, seed=4)
    assert a.dumps() == b.dumps()


def test_weight_scaling(rng):
    c = uniform_cloud(rng, 3000)
    a, b = pack_annuli(c, 5, 0.01, seed=1), pack_annuli(c.scaled(7.0), 5, 0.01, seed=1)
    for x, y in zip(a.annuli, b.annuli):
        assert x.center == y.center and x.inner == y.inner and x.outer == y.outer
    np.testing.assert_allclose(b.measures, 7 * a.measures, rtol=1e-12)


def test_max_outer_respected(rng):
    c = uniform_cloud(rng, 3000)
    res = pack_annuli(c, 3, 0.01, max_outer=0.5)
    assert all(a.outer < 0.5 for a in res.annuli)


def test_result_json(rng):
    c = uniform_cloud(rng, 1000)
    data = json.loads(pack_annuli(c, 3, 0.01).dumps())
    assert data["k"] == 3 and len(data["annuli"]) == 3
    assert {"center", "inner", "outer", "measure", "double_measure"} <= set(data["annuli"][0])


def test_verifier_catches_overlap(rng):
    c = uniform_cloud(rng, 1000)
    res = pack_annuli(c, 2, 0.01)
    res.annuli[1] = Annulus(res.annuli[0].center, 0.0, res.annuli[1].outer)
    assert not verify_packing(c, res)["disjoint_doubles"]


# covering number

def test_covering_single_point():
    assert covering_number(WeightedPointCloud(np.array([[1, 0j]]), np.ones(1))) == 1


def test_covering_cp1(rng):
    assert covering_number(uniform_cloud(rng, 10_000), trials=30) <= cpm_covering_constant(1) == 81


def test_covering_square(rng):
    c = WeightedPointCloud(rng.uniform(size=(4000, 2)), np.ones(4000), "euclidean")
    assert covering_number(c, trials=30) <= 16


def test_covering_empty():
    with pytest.raises(ValueError):
        WeightedPointCloud(np.zeros((0, 2)), np.zeros(0))
