import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matpainleve.algebra import LinearSystem
from matpainleve.catalog import random_theta
from matpainleve.htl import classify_system
from matpainleve.laplace import (CORRESPONDENCES, LaplaceError, StructuredSystem, correspondence_table_check,
                                 dual_deformation, eliminate_nilpotent, hankel_rank, invert_chart, laplace_dual,
                                 minimal_twists, mobius_transform, move_to_infinity, mpII_blocks,
                                 mpII_correspondence, mpII_display, nilpotent_laplace, realize_principal_part,
                                 scalar_twist, to_structured)
from matpainleve.painleve_core import CanonicalState

seeds = st.integers(0, 2**32 - 1)


def cmat(rng, m, n=None):
    n = m if n is None else n
    return rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))


def random_structured(rng, m=2, l=3):
    return StructuredSystem(cmat(rng, m, l), cmat(rng, l, m), cmat(rng, l), cmat(rng, m))


# duality


def test_zero_system_dual_is_zero():
    Z = np.zeros((1, 1))
    d = laplace_dual(StructuredSystem(Z, Z, Z, Z))
    assert np.all(d(0.7) == 0)


def test_scalar_example():
    d = laplace_dual(StructuredSystem(1, 1, 0, 0))
    for xi in (0.5, 2j, -3):
        assert np.isclose(d(xi)[0, 0], -1 / xi)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        StructuredSystem(np.ones((2, 3)), np.ones((2, 2)), np.ones((3, 3)), np.ones((2, 2)))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_double_dual_reflects(seed):
    rng = np.random.default_rng(seed)
    s = random_structured(rng)
    dd = laplace_dual(laplace_dual(s))
    for blk, want in ((dd.B, -s.B), (dd.C, -s.C), (dd.T, -s.T), (dd.S, -s.S)):
        assert np.allclose(blk, want)
    x = complex(*rng.normal(size=2)) * 5
    assert np.allclose(dd(x), -s(-x))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_partial_fractions_agree(seed):
    rng = np.random.default_rng(seed)
    s = random_structured(rng)
    lin = s.to_linear_system()
    x = 4 + complex(*rng.normal(size=2))
    assert np.allclose(lin(x), s(x))


def test_partial_fractions_with_jordan_block():
    rng = np.random.default_rng(1)
    T = np.array([[0.5, 1], [0, 0.5]])
    s = StructuredSystem(cmat(rng, 2), cmat(rng, 2), T, np.zeros((2, 2)))
    lin = s.to_linear_system()
    assert len(lin.poles) == 1 and len(lin.poles[0].coeffs) == 2
    assert np.allclose(lin(1.7j), s(1.7j))


def test_empty_structured_system():
    s = StructuredSystem(np.zeros((2, 0)), np.zeros((0, 2)), np.zeros((0, 0)), np.eye(2))
    assert np.allclose(s.to_linear_system()(3), np.eye(2))


# charts and realization


def test_realization_matches_principal_part():
    rng = np.random.default_rng(2)
    coeffs = [cmat(rng, 2), cmat(rng, 2)]
    B, T, C = realize_principal_part(coeffs, 0.3)
    x = 1.1 + 0.4j
    want = coeffs[0] / (x - 0.3) + coeffs[1] / (x - 0.3) ** 2
    assert np.allclose(B @ np.linalg.solve(x * np.eye(T.shape[0]) - T, C), want)
    assert hankel_rank(coeffs) == T.shape[0]


def test_low_rank_residue():
    u = np.array([[1.0], [2.0]])
    assert hankel_rank([u @ u.T]) == 1


def test_mobius_round_trip():
    rng = np.random.default_rng(3)
    sys = LinearSystem.build(2, [(0, [cmat(rng, 2)]), (1, [cmat(rng, 2)])], [cmat(rng, 2)])
    inv = invert_chart(sys)
    back = invert_chart(inv)
    assert np.allclose(back(0.4 + 0.7j), sys(0.4 + 0.7j), atol=1e-8)


def test_mobius_pullback():
    rng = np.random.default_rng(4)
    sys = LinearSystem.build(2, [(0, [cmat(rng, 2)]), (1, [cmat(rng, 2)])])
    moved = move_to_infinity(sys, 1)
    xp = 0.6 - 0.3j
    assert np.allclose(moved(xp), sys(1 + 1 / xp) * (-1 / xp**2), atol=1e-8)
    with pytest.raises(ValueError):
        mobius_transform(sys, 1, 2, 2, 4)


def test_scalar_twist_shifts_residue():
    A = np.array([[1.0, 2.0], [0.0, 3.0]])
    sys = LinearSystem.build(2, [(0, [A])])
    tw = scalar_twist(sys, 0, 1.0)
    assert np.allclose(tw.poles[0].coeffs[0], A - np.eye(2))
    new = scalar_twist(sys, 2, 0.5)
    assert len(new.poles) == 2


def test_minimal_twist_lowers_rank():
    u = np.array([[1.0], [1.0]])
    R = u @ u.T + 0.7 * np.eye(2)
    sys = LinearSystem.build(2, [(0, [R])])
    tw = minimal_twists(sys)
    assert hankel_rank(list(tw.poles[0].coeffs)) == 1


def test_structured_form_requires_constant_polynomial():
    sys = LinearSystem.build(2, [(0, [np.eye(2)])], [np.eye(2), np.eye(2)])
    with pytest.raises(LaplaceError):
        to_structured(sys)


def test_structured_form_round_trip():
    rng = np.random.default_rng(5)
    sys = LinearSystem.build(2, [(0, [cmat(rng, 2)]), (1.5, [cmat(rng, 2), cmat(rng, 2)])], [cmat(rng, 2)])
    st_ = to_structured(sys)
    assert np.allclose(st_(0.3 + 0.9j), sys(0.3 + 0.9j))


# the elimination for the second system


def _state(rng):
    z = rng.normal(size=4) * 0.5
    return CanonicalState(*z, 1.0 + 0.1j, 0.7 + 0.2j)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_elimination_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    th = random_theta("(((11)))_2,22", rng)
    Q, P = cmat(rng, 2), cmat(rng, 2)
    t = complex(*rng.normal(size=2))
    got = mpII_correspondence(th, (Q, P), t)
    want = mpII_display(th, Q, P, t)
    for a, b in zip(got.poly, want):
        assert np.allclose(a, b)


def test_eliminated_system_type():
    rng = np.random.default_rng(6)
    th = random_theta("(((11)))_2,22", rng)
    sys = mpII_correspondence(th, (cmat(rng, 2), cmat(rng, 2)), 0.4)
    assert classify_system(sys).spectral_type.text == "(((2)))(((11)))"


def test_elimination_singular_block():
    A1, B, C = mpII_blocks({"theta0": 0.1}, np.eye(2), np.eye(2), 0.3)
    A1[2:, :2] = 0
    with pytest.raises(LaplaceError):
        eliminate_nilpotent(A1, B, C)


def test_generic_route_matches_direct():
    rng = np.random.default_rng(7)
    th = random_theta("(((11)))_2,22", rng)
    Q, P = cmat(rng, 2), cmat(rng, 2)
    A1, B, C = mpII_blocks(th, Q, P, 0.2)
    N = np.zeros((4, 4), complex)
    N[:2, 2:] = np.eye(2)
    sys = LinearSystem.build(4, [(0, [B @ C])], [A1, N])
    got = nilpotent_laplace(sys)
    assert classify_system(got).spectral_type.text == "(((2)))(((11)))"


def test_generic_route_rejects_other_shapes():
    sys = LinearSystem.build(2, [(0, [np.eye(2)])], [np.eye(2)])
    with pytest.raises(LaplaceError):
        nilpotent_laplace(sys)


def test_dual_deformation_is_polynomial():
    rng = np.random.default_rng(8)
    th = random_theta("(((11)))_2,22", rng)
    coeffs, res = dual_deformation(th, _state(rng))
    assert len(coeffs) == 2 and res <= 1e-6


# correspondence table


def test_table_rows():
    rows = correspondence_table_check(0)
    assert len(rows) == len(CORRESPONDENCES) == 5
    for sid, variant, expected, got, ok in rows:
        assert ok, (variant, expected, got)


def test_table_is_deterministic():
    assert correspondence_table_check(3) == correspondence_table_check(3)


def test_table_routes_cover_infinity():
    assert any(route == math.inf for _, _, route, _ in CORRESPONDENCES)
