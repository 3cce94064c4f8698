import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from matpainleve.catalog import LAX_CATALOG, ThetaParams, get_variant, params_for, random_theta
from matpainleve.checks import random_state
from matpainleve.painleve_core import CanonicalState, SystemId, build_matrix_pair, gauge_rate, integrate
from matpainleve.lax import (LaxError, build_lax, build_lax_from_pair, compatibility_residual, gauge_generator,
                             halton_points, pole_locations, riemann_scheme_of, u_gauge_check)

seeds = st.integers(0, 2**32 - 1)


def _pair(name, seed):
    rng = np.random.default_rng(seed)
    var = get_variant(name)
    th = random_theta(name, rng)
    s = random_state(rng)
    return var, th, s, build_lax(var.system, name, th, s)


def _residual(name, seed, frozen=False):
    var, th, s, pair = _pair(name, seed)
    xs = halton_points(10, pole_locations(pair), seed=seed)
    return compatibility_residual(pair, var.system, params_for(var, th), th, s, xs, variant=name, frozen=frozen)


def test_catalog_has_nine_lax_systems():
    assert len(LAX_CATALOG) == 9
    assert {get_variant(n).system for n in LAX_CATALOG} == set(SystemId) - {SystemId.MatV, SystemId.MatIV}


def _sorted(ev):
    return sorted(np.round(ev, 8), key=lambda z: (z.real, z.imag))


def test_sixth_residues():
    var, th, s, pair = _pair("22,22,22,211", 1)
    v = th.values
    res = {complex(p.location): p.coeffs[0] for p in pair.A.poles}
    assert np.allclose(_sorted(np.linalg.eigvals(res[0])), _sorted([0, 0, v["theta0"], v["theta0"]]))
    total = sum(res.values())
    want = -np.array([v["thetainf1"], v["thetainf1"], v["thetainf2"], v["thetainf3"]])
    assert np.allclose(_sorted(np.linalg.eigvals(total)), _sorted(want))


def test_first_system_top_coefficient():
    th = ThetaParams("(((((11)))))_2", thetainf2=0.3)
    Z = np.zeros((2, 2))
    pair = build_lax_from_pair("(((((11)))))_2", th, Z, Z, 1.0)
    top = pair.A.poly[2]
    assert np.allclose(top, np.block([[Z, np.eye(2)], [Z, Z]]))


def test_unknown_variant_rejected():
    with pytest.raises(KeyError):
        build_lax_from_pair("(2)(2),22,211", {}, np.eye(2), np.eye(2), 0.5)


def test_singular_auxiliary_matrix():
    th = random_theta("(2)_2,(11)_2", np.random.default_rng(0))
    Z = np.zeros((2, 2))
    with pytest.raises(LaxError):
        build_lax_from_pair("(2)_2,(11)_2", th, Z, Z, 0.5)


@pytest.mark.parametrize("name", LAX_CATALOG)
def test_zero_curvature(name):
    assert _residual(name, 11) <= 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from(LAX_CATALOG))
def test_zero_curvature_property(seed, name):
    assert _residual(name, seed) <= 1e-6


@pytest.mark.parametrize("name", LAX_CATALOG)
def test_frozen_state_fails(name):
    assert _residual(name, 12, frozen=True) > 1e-3


def test_degenerate_parameters():
    th = ThetaParams("22,22,22,211", dict.fromkeys(["theta0", "theta1", "thetat", "thetainf1", "thetainf2"], 0))
    s = CanonicalState(0.3, 0, -0.2, 0, 1.1, 0.4 + 0.3j)
    mp = build_matrix_pair(SystemId.MatVI, th, s)
    assert np.all(mp.P == 0)
    pair = build_lax(SystemId.MatVI, th.variant, th, s)
    xs = halton_points(10, pole_locations(pair))
    r = compatibility_residual(pair, SystemId.MatVI, params_for(th.variant, th), th, s, xs)
    assert np.isfinite(r) and r <= 1e-6


# Riemann schemes


def _key(z):
    z = complex(z)
    return (round(z.real, 9), round(z.imag, 9))


def test_scheme_of_d8():
    th = random_theta("(2)_2,(11)_2", np.random.default_rng(2))
    t = 0.6 + 0.2j
    sch = riemann_scheme_of("(2)_2,(11)_2", th, t)
    cols = {c.location: c for c in sch.columns}
    r = np.sqrt(t)
    assert np.allclose(sorted([r, r, -r, -r], key=_key), sorted((complex(row[0]) for row in cols["0"].rows), key=_key))
    assert all(row[-1] == 0 for row in cols["0"].rows)
    v = th.values
    got = sorted(((complex(row[0]), complex(row[-1])) for row in cols["inf"].rows), key=lambda p: _key(p[0]) + _key(p[1]))
    want = sorted([(s_, v[k] / 2) for s_ in (1, -1) for k in ("thetainf2", "thetainf3")],
                  key=lambda p: _key(p[0]) + _key(p[1]))
    assert np.allclose(np.array(got), np.array(want))
    text = sch.to_text()
    assert "x=0 (1/2)" in text and "x=inf (1/2)" in text


def test_fuchs_sum_second_system():
    th = random_theta("(((2)))_2,211", np.random.default_rng(3), rational=False)
    v = th.values
    assert abs(2 * v["thetainf1"] + v["thetainf2"] + v["thetainf3"]) < 1e-12
    assert abs(riemann_scheme_of("(((2)))_2,211", th, 0.3).residue_sum()) < 1e-12


@pytest.mark.parametrize("name", LAX_CATALOG)
def test_zero_exponents_sum_to_zero(name):
    var = get_variant(name)
    vals = {k: 0 for k in var.theta_names if k != "thetainf3"}
    th = ThetaParams(name, vals)
    assert riemann_scheme_of(name, th, 0.5 + 0.1j).residue_sum() == 0


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from(LAX_CATALOG))
def test_fuchs_sum_property(seed, name):
    rng = np.random.default_rng(seed)
    th = random_theta(name, rng, scale=3, rational=False)
    t = complex(rng.uniform(0.2, 2), rng.uniform(-1, 1))
    assert abs(riemann_scheme_of(name, th, t).residue_sum()) <= 1e-10


# gauge equations


def test_second_system_gauge_along_trajectory():
    name = "(((2)))_2,211"
    var = get_variant(name)
    rng = np.random.default_rng(4)
    th = random_theta(name, rng)
    s = random_state(rng, scale=0.3)
    traj = integrate(var.system, params_for(var, th), th, s, s.t + 0.1, 40)
    assert u_gauge_check(var.system, name, th, s, traj) <= 1e-6
    for st_ in traj[::10]:
        mp = build_matrix_pair(var.system, th, st_)
        assert np.allclose(gauge_generator(name, th, mp.Q, mp.P, st_.t), 2 * mp.Q)
        assert np.isclose(gauge_rate(var.system, th, st_), -2 * (st_.q1 + st_.p2))


def test_constant_generator_gives_exponential():
    name = "(((2)))_2,211"
    th = random_theta(name, np.random.default_rng(5))
    Q = np.array([[0.2, 0.5], [-0.1, 0.2]], complex)
    G = gauge_generator(name, th, Q, np.zeros((2, 2)), 0.0)
    h, n = 1e-3, 500
    U = np.eye(2, dtype=complex)
    for _ in range(n):
        k1 = G @ U
        k2 = G @ (U + h / 2 * k1)
        k3 = G @ (U + h / 2 * k2)
        k4 = G @ (U + h * k3)
        U = U + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.allclose(U, scipy.linalg.expm(2 * Q * h * n), atol=1e-10)


def test_d7_gauge_rate():
    name = "(2)_2,(2)(11)"
    rng = np.random.default_rng(6)
    th = random_theta(name, rng)
    s = random_state(rng)
    want = 2 * (s.p1 * s.q1 + s.p2 * s.q2 - s.p2 * s.q1**2 - th["thetainf2"]) / s.t
    assert np.isclose(gauge_rate(SystemId.MatIII_D7, th, s), want)


@pytest.mark.parametrize("name", LAX_CATALOG)
def test_gauge_consistency(name):
    var = get_variant(name)
    rng = np.random.default_rng(8)
    th = random_theta(name, rng)
    s = random_state(rng, scale=0.3)
    traj = integrate(var.system, params_for(var, th), th, s, s.t + 0.05, 20)
    assert u_gauge_check(var.system, name, th, s, traj) <= 1e-6


def test_halton_points_avoid_poles():
    pts = halton_points(20, [0, 1], seed=3)
    assert len(pts) == 20 and all(abs(p) >= 0.15 and abs(p - 1) >= 0.15 for p in pts)
    assert pts == halton_points(20, [0, 1], seed=3)
