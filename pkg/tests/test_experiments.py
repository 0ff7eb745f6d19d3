import json

import numpy as np
import pytest

from kahler_bounds import cpm_geometry as geo
from kahler_bounds import experiments as ex
from kahler_bounds.cli import dumps_report
from kahler_bounds.holomorphic import RationalCurveMap, identity_map, random_rational_map
from kahler_bounds.meshes import bumpy_sphere, icosphere
from kahler_bounds.spectra import assemble, rayleigh_quotient


@pytest.fixture(scope="module")
def round_k4():
    return ex.certify(icosphere(6), identity_map(), [1, 4], c_target=0.01)


def failed(report):
    return [c["name"] for c in ex.iter_checks(report) if not c["passed"]]


# geometry suite

def test_geometry_suite_passes():
    rep = ex.geometry_suite(0, scale=0.2)
    assert failed(rep) == []


def test_geometry_suite_detects_wrong_threshold():
    rep = ex.geometry_suite(0, ms=(1,), scale=0.1, psi_threshold=0.36)
    bad = [c for c in ex.iter_checks(rep) if not c["passed"]]
    assert [c["name"] for c in bad] == ["psi>=3/10 on B(R) m=1"]
    worst = bad[0]["worst"]
    assert worst["R"] < np.pi / 8 and len(worst["point"]) == 2
    # the value at R = pi/8 already sits below 0.36
    assert np.cos(np.pi / 8) ** 2 - 0.5 < 0.36


# BLY and eigenfunction checks

def test_bly_round_equality():
    rep = ex.bly_check(icosphere(6))
    assert rep["bound"] == pytest.approx(8.0, rel=1e-3)  # d = pi / mesh area
    assert 0.97 <= rep["ratio"] <= 1.001


def test_bly_bumpy_inequality():
    for seed in range(3):
        assert ex.bly_check(bumpy_sphere(5, seed))["ratio"] <= 1.001


def test_bly_scale_invariance():
    mesh = bumpy_sphere(4, 7)
    ratios = [ex.bly_check(mesh.scaled(s)) for s in (0.25, 1.0, 4.0)]
    for r, s in zip(ratios, (0.25, 1.0, 4.0)):
        assert r["lambda_1"] == pytest.approx(ratios[1]["lambda_1"] / s, rel=1e-9)
        assert r["ratio"] == pytest.approx(ratios[1]["ratio"], rel=1e-9)


def test_eigenfunction_round():
    rep = ex.eigenfunction_check(icosphere(6))
    assert rep["rayleigh_quotient"] == pytest.approx(8, rel=0.01)
    assert failed(rep) == []


def test_eigenfunction_equivariance(rng):
    from dataclasses import replace
    mesh = icosphere(5)
    u = geo.random_special_unitary(rng, 1)
    w = geo.random_points(rng, 1, 1)[0]
    moved = replace(mesh, cp1_param=mesh.cp1_param @ u.T)
    a = ex.eigenfunction_check(mesh, geo.ProjectivePoint(w))["rayleigh_quotient"]
    b = ex.eigenfunction_check(moved, geo.ProjectivePoint(u @ w))["rayleigh_quotient"]
    assert a == pytest.approx(b, abs=1e-9)


def test_eigenfunction_shift_lowers_quotient():
    mesh = icosphere(5)
    s, m = assemble(mesh)
    f = geo.model_eigenfunction(geo.ProjectivePoint([1, 0]), mesh.cp1_param) - 0.5
    assert rayleigh_quotient(s, m, f + 0.3) < 8.0


# certificates

def test_certify_round_identity(round_k4):
    for rec in round_k4["records"]:
        assert rec["satisfied"]
        assert all(c["passed"] for c in rec["checks"]), failed(rec)
        assert rec["pullback_area"] == pytest.approx(np.pi, rel=0.01)


def test_certify_k1_is_ball_case(round_k4):
    rec = round_k4["records"][0]
    assert rec["k"] == 1 and rec["annuli"][0]["inner"] == 0


def test_certify_reports_slack(round_k4):
    rec = round_k4["records"][1]
    d = [c for c in rec["checks"] if c["name"].startswith("(d)")][0]
    assert d["rhs"] == pytest.approx(d["max_rayleigh"] + d["cross_slack"] + d["constant_slack"])
    assert rec["cross_slack_ratio"] <= 0.1
    assert rec["max_dirichlet_ratio"] <= 0.1


def test_certify_degree3_bumpy():
    rng = np.random.default_rng(3)
    f = random_rational_map(rng, 3)
    rep = ex.certify(bumpy_sphere(5, 3), f, range(1, 21, 3))
    for rec in rep["records"]:
        e = [c for c in rec["checks"] if c["name"].startswith("(e)")][0]
        assert e["passed"] and e["lhs"] < 1e-3 * e["rhs"]


def test_strict_constant():
    assert ex.certified_constant(1, 0.01, strict=True) == pytest.approx(12800 * 9.0**24)
    assert ex.certified_constant(2, 0.01, strict=True) == pytest.approx(12800 * 9.0**48)
    assert ex.certified_constant(1, 0.01) == pytest.approx(160000)


def test_recheck_reproduces_flags(round_k4):
    stored = json.loads(dumps_report(round_k4))
    assert ex.recheck(stored)
    # tampering with a stored number flips exactly that check
    c = next(ex.iter_checks(stored["records"][1]["checks"]))
    c["lhs"] = -1.0 if c["op"] == ">=" else 1e300
    assert not ex.recheck(stored)


def test_determinism():
    mesh, f = bumpy_sphere(4, 2), random_rational_map(np.random.default_rng(1), 2)
    a = dumps_report(ex.certify(mesh, f, [3, 5], seed=9))
    b = dumps_report(ex.certify(mesh, f, [3, 5], seed=9))
    assert a == b


def test_scale_covariance():
    base = bumpy_sphere(4, 5)
    f = random_rational_map(np.random.default_rng(2), 2)
    recs = {s: ex.certify(base.scaled(s), f, [4])["records"][0] for s in (0.25, 1.0, 4.0)}
    for s, r in recs.items():
        assert r["lambda_k"] == pytest.approx(recs[1.0]["lambda_k"] / s, rel=1e-8)
        assert r["holomorphic_degree"] == pytest.approx(recs[1.0]["holomorphic_degree"] / s, rel=1e-12)
        for c, c1 in zip(r["checks"], recs[1.0]["checks"]):
            assert c["passed"] == c1["passed"]
            if c1["rhs"] and c["name"][:3] in ("(c)", "(e)"):
                assert c["lhs"] / c["rhs"] == pytest.approx(c1["lhs"] / c1["rhs"], rel=1e-8)


def test_margins_stable_under_refinement():
    f = identity_map()
    recs = [ex.certify(icosphere(L), f, [4])["records"][0] for L in (5, 6)]
    for key in ("max_dirichlet_ratio", "max_rayleigh", "lambda_k"):
        assert 0.5 <= recs[0][key] / recs[1][key] <= 2.0


def test_span_rayleigh_handles_dependence():
    mesh = icosphere(3)
    s, m = assemble(mesh)
    z = mesh.vertices[:, 2]
    funcs = np.stack([z, 2 * z, np.ones_like(z)], axis=1)
    assert ex.span_rayleigh_max(s, m, funcs) == pytest.approx(rayleigh_quotient(s, m, z), rel=1e-9)


# Korevaar and Weyl

def test_round_reference_is_8pi():
    ref = ex.round_reference(6)
    assert ref["ratio"] / (8 * np.pi) == pytest.approx(1, abs=0.01)


def test_korevaar_doubling_degree():
    mesh = bumpy_sphere(5, 4)
    one = ex.certify(mesh, identity_map(), [6])["records"][0]
    two = ex.certify(mesh, RationalCurveMap([[1, 0, 0], [0, 0, 1]]), [6])["records"][0]
    bound = np.pi * ex.certified_constant(1, 0.01)
    for rec, deg in ((one, 1), (two, 2)):
        assert rec["lambda_k"] * rec["volume"] / (deg * 6) <= bound


def test_korevaar_sweep_small():
    cases = ex.random_cases(3, seed=5, max_k=10, level=5)
    records = [ex.run_case(c) for c in cases]
    rep = ex.korevaar_sweep(records, reference=ex.round_reference(5))
    assert failed(rep) == []
    assert rep["empirical_max"] == max(r["korevaar_ratio"] for r in records)


def test_weyl_report_has_trends():
    rep = ex.weyl_check(icosphere(4), 60)
    assert failed(rep) == []
    row = rep["trend"][10]
    assert {"k", "lambda_k", "weyl", "bound"} <= set(row)
    assert "n > 1" in rep["note"]


def test_heavy_atoms_mark_certificate_unsatisfied():
    rep = ex.certify(icosphere(3), identity_map(), [20])
    rec = rep["records"][0]
    assert not rec["satisfied"] and "error" in rec
    assert failed(rep) == ["packing precondition (max atom <= c mu(X)/2k)"]
