from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matpainleve.algebra import (K, LinearSystem, PoleEvaluationError, PuiseuxMatrixSeries, SeriesError, as_fraction,
                                 direct_sum, inv2, local_expansion, mat_commutator, rational_matrix_eval,
                                 series_gauge_transform)

seeds = st.integers(0, 2**32 - 1)


def cmat(rng, n=2, scale=1.0):
    return scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))


def random_series(rng, dim=2, low=-2, order=4, d=1):
    terms = {F(k, d): cmat(rng, dim) for k in range(low * d, order * d)}
    return PuiseuxMatrixSeries(terms, order, dim=dim, d=d)


def random_gauge(rng, dim=2, order=6):
    """Invertible series with an invertible constant term."""
    c0 = np.eye(dim) + 0.3 * cmat(rng, dim)
    terms = {F(0): c0, F(1): cmat(rng, dim), F(2): cmat(rng, dim)}
    return PuiseuxMatrixSeries(terms, order, dim=dim)


# commutator


def test_commutator_examples():
    b = np.arange(4.0).reshape(2, 2)
    assert np.all(mat_commutator(np.eye(2), b) == 0)
    e, f = np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])
    assert np.array_equal(mat_commutator(e, f), np.diag([1, -1]))
    assert np.all(mat_commutator(b, b) == 0)


def test_commutator_shape_mismatch():
    with pytest.raises(ValueError):
        mat_commutator(np.eye(2), np.eye(3))


@settings(max_examples=50, deadline=None)
@given(seeds, st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_commutator_bilinear_antisymmetric(seed, lam):
    rng = np.random.default_rng(seed)
    a, b, c = cmat(rng, 3), cmat(rng, 3), cmat(rng, 3)
    assert np.allclose(mat_commutator(a, b), -mat_commutator(b, a))
    assert np.allclose(mat_commutator(a + lam * c, b), mat_commutator(a, b) + lam * mat_commutator(c, b))
    assert np.allclose(mat_commutator(a, b + lam * c), mat_commutator(a, b) + lam * mat_commutator(a, c))


def test_inv2_and_singular():
    a = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert np.allclose(inv2(a) @ a, np.eye(2))
    with pytest.raises(ZeroDivisionError):
        inv2(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_as_fraction():
    assert as_fraction("3/2") == F(3, 2)
    assert as_fraction(0.25) == F(1, 4)
    with pytest.raises(ValueError):
        as_fraction(np.pi)


# series


def test_series_drops_terms_beyond_order_and_rejects_access():
    s = PuiseuxMatrixSeries({0: np.eye(2), 3: np.eye(2)}, 2)
    assert s.exponents() == [F(0)]
    with pytest.raises(SeriesError):
        s.coeff(2)


def test_identity_gauge_leaves_series_unchanged():
    rng = np.random.default_rng(0)
    a = random_series(rng)
    out = series_gauge_transform(a, PuiseuxMatrixSeries.identity(2, 10))
    assert out.max_abs_diff(a) == 0


def test_square_root_gauge_of_zero_series():
    a = PuiseuxMatrixSeries.zero(2, 4)
    p = PuiseuxMatrixSeries({F(1, 2): np.diag([1, 0]), F(0): np.diag([0, 1])}, 6, d=2)
    out = series_gauge_transform(a, p)
    assert np.allclose(out.coeff(-1), -np.diag([0.5, 0]))
    assert all(np.allclose(c, 0) for e, c in out.terms if e != -1)


def test_singular_gauge_rejected():
    a = PuiseuxMatrixSeries.zero(2, 4)
    p = PuiseuxMatrixSeries({0: np.diag([1, 0])}, 4)
    with pytest.raises(SeriesError):
        series_gauge_transform(a, p)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_gauge_round_trip(seed):
    rng = np.random.default_rng(seed)
    a = random_series(rng, order=4)
    p = random_gauge(rng)
    back = series_gauge_transform(series_gauge_transform(a, p), p.inverse())
    assert back.order <= a.order
    assert back.max_abs_diff(a) <= 1e-10 * (1 + max(np.abs(c).max() for _, c in a.terms)) * 100


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_series_ring_laws(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_series(rng, low=-1, order=3, d=2) for _ in range(3))
    assert ((a + b) + c).max_abs_diff(a + (b + c)) <= 1e-12
    assert ((a @ b) @ c).max_abs_diff(a @ (b @ c)) <= 1e-10
    assert (a @ (b + c)).max_abs_diff(a @ b + a @ c) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_inverse(seed):
    rng = np.random.default_rng(seed)
    p = random_gauge(rng).shift(F(-1, 2))
    assert (p @ p.inverse()).max_abs_diff(PuiseuxMatrixSeries.identity(2, 10, d=2)) <= 1e-10


def test_truncation_is_pessimistic():
    a = PuiseuxMatrixSeries({-2: np.eye(2)}, 1)
    b = PuiseuxMatrixSeries({0: np.eye(2)}, 3)
    assert (a @ b).order == min(a.order + 0, b.order - 2)


def test_derivative():
    s = PuiseuxMatrixSeries({F(1, 2): np.eye(2), F(2): np.eye(2)}, 4, d=2)
    ds = s.derivative()
    assert np.allclose(ds.coeff(F(-1, 2)), 0.5 * np.eye(2))
    assert np.allclose(ds.coeff(1), 2 * np.eye(2))
    assert ds.order == 3


def test_direct_sum():
    a = PuiseuxMatrixSeries({-1: np.eye(1)}, 3)
    b = PuiseuxMatrixSeries({0: 2 * np.eye(2)}, 2)
    s = direct_sum([a, b])
    assert s.dim == 3 and s.order == 2
    assert np.allclose(s.coeff(0), np.diag([0, 2, 2]))


# rational systems


def test_rational_eval_single_pole():
    A = np.array([[1, 2], [3, 4]])
    sys = LinearSystem.build(2, [(0, [A])])
    assert np.allclose(rational_matrix_eval(sys, 2), A / 2)


def test_rational_eval_at_pole_rejected():
    sys = LinearSystem.build(2, [(1, [np.eye(2)])])
    with pytest.raises(PoleEvaluationError):
        sys(1)


def test_fuchsian_decay_at_infinity():
    rng = np.random.default_rng(1)
    res = [cmat(rng, 4) for _ in range(3)]
    sys = LinearSystem.build(4, [(0, [res[0]]), (1, [res[1]]), (0.4 + 0.3j, [res[2]])])
    bound = sum(np.abs(r).sum(axis=1).max() for r in res)
    for x in (1e3, 1e4j, -1e5):
        assert np.linalg.norm(sys(x), np.inf) <= bound / (abs(x) - 1.5)


def test_shape_check():
    with pytest.raises(ValueError):
        LinearSystem.build(2, [(0, [np.eye(3)])])


def test_json_round_trip():
    rng = np.random.default_rng(2)
    sys = LinearSystem.build(2, [(0.5j, [cmat(rng), cmat(rng)])], [cmat(rng)])
    back = LinearSystem.from_json(sys.to_json())
    assert np.allclose(back(1.3), sys(1.3))


def test_local_expansion_matches_evaluation():
    rng = np.random.default_rng(3)
    sys = LinearSystem.build(2, [(0, [cmat(rng), cmat(rng)]), (1, [cmat(rng)])], [cmat(rng)])
    ser = local_expansion(sys, 0, 14)
    z = 0.05
    approx = sum(c * z ** float(e) for e, c in ser.terms)
    assert np.allclose(approx, sys(z), rtol=1e-9, atol=1e-9)
    ser_inf = local_expansion(sys, np.inf, 14)
    zi = 0.05
    approx = sum(c * zi ** float(e) for e, c in ser_inf.terms)
    assert np.allclose(approx, -sys(1 / zi) / zi**2, rtol=1e-8, atol=1e-8)


def test_constant_k():
    assert np.array_equal(K, np.diag([1, -1]))
