import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matpainleve.algebra import LinearSystem, PuiseuxMatrixSeries, SeriesError, local_expansion
from matpainleve.catalog import LAX_CATALOG, get_variant, random_theta
from matpainleve.checks import random_state
from matpainleve.htl import (RAMIFIED_EXAMPLES, HTLError, _split, block_diagonalize, classify_system,
                             cluster_eigenvalues, htl_reduce, htl_reduce_full, is_nilpotent, parse_spectral_type,
                             point_spectral_type, ramified_example_system, rsp_example_system, shear, spectral_type)
from matpainleve.lax import build_lax
from matpainleve.painleve_core import build_matrix_pair

I2 = np.eye(2)
O2 = np.zeros((2, 2))


def cmat(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def catalog_system(name, seed=0):
    rng = np.random.default_rng(seed)
    var = get_variant(name)
    th = random_theta(name, rng)
    s = random_state(rng)
    return var, th, s, build_lax(var.system, name, th, s).A


def test_clusters():
    cl = cluster_eigenvalues([1, 1 + 1e-9, 2, -1])
    assert sorted(c.multiplicity for c in cl) == [1, 1, 2]
    assert cl[0].center == 2


def test_is_nilpotent():
    assert is_nilpotent(np.array([[0, 1], [0, 0]]))
    assert not is_nilpotent(np.eye(2))


# block splitting


def test_block_diagonal_input_unchanged():
    rng = np.random.default_rng(0)
    terms = {F(k): np.block([[cmat(rng, 2), O2], [O2, cmat(rng, 2)]]) for k in range(-2, 3)}
    terms[F(-2)] = np.diag([1, 1, -1, -1]).astype(complex)
    a = PuiseuxMatrixSeries(terms, 3)
    blocks = block_diagonalize(a)
    assert [b.dim for b in blocks] == [2, 2]
    assert blocks[0].max_abs_diff(a.block([0, 1])) <= 1e-12
    assert blocks[1].max_abs_diff(a.block([2, 3])) <= 1e-12


def test_block_split_reconstruction():
    rng = np.random.default_rng(1)
    terms = {F(k): cmat(rng, 4) for k in range(-1, 6)}
    terms[F(-2)] = np.diag([1, 1, 0, 0]).astype(complex)
    a = PuiseuxMatrixSeries(terms, 6)
    v, lead = a.leading()
    clusters = cluster_eigenvalues(np.linalg.eigvals(lead))
    blocks, P, Pi, B = _split(a, v, clusters)
    assert [b.dim for b in blocks] == [2, 2]
    back = Pi @ a @ P - Pi @ P.derivative()
    upto = min(back.order, B.order)
    assert back.max_abs_diff(B, upto) <= 1e-9


def test_sixth_system_blocks_at_infinity():
    var, th, s, A = catalog_system("22,22,22,211", 2)
    blocks = block_diagonalize(local_expansion(A, math.inf, 10))
    assert sorted(b.dim for b in blocks) == [1, 1, 2]


# shearing


def test_zero_shear_is_identity():
    rng = np.random.default_rng(3)
    a = PuiseuxMatrixSeries({F(k): cmat(rng, 3) for k in range(-2, 3)}, 3)
    assert shear(a, [0, 0, 0]).max_abs_diff(a) == 0


def test_shear_of_worked_example():
    name = "(11)_2,(2)(2)"
    var, th, s, A = catalog_system(name, 4)
    mp = build_matrix_pair(var.system, th, s)
    Q, P, t = mp.Q, mp.P, s.t
    out = shear(local_expansion(A, math.inf, 10), [0, 0, F(1, 2), F(1, 2)])
    want = {
        F(-3, 2): np.block([[O2, -I2], [-I2, O2]]),
        F(-1): np.block([[-Q @ P, O2], [O2, P @ Q - (th["theta0"] + 0.5) * I2]]),
        F(-1, 2): np.block([[O2, -Q], [-t * P, O2]]),
        F(0): np.block([[O2, O2], [O2, -t * I2]]),
    }
    for e, w in want.items():
        assert np.abs(out.coeff(e) - w).max() <= 1e-12
    assert out.d == 2


def test_scalar_shift_removes_quarter():
    rng = np.random.default_rng(5)
    a = PuiseuxMatrixSeries({F(-3, 2): np.diag([1, 1, -1, -1]), F(-1): -0.25 * np.eye(4), F(0): cmat(rng, 4)}, 2, d=2)
    out = shear(a, [F(-1, 4)] * 4)
    assert np.allclose(out.coeff(-1), 0)


def test_shear_underflow():
    a = PuiseuxMatrixSeries({F(-2): np.eye(2)}, F(-1, 2))
    with pytest.raises(SeriesError):
        shear(a, [0, 3])


# HTL forms


def test_htl_form_returned_verbatim():
    lv = np.diag([1, 2, -1]).astype(complex)
    res = np.diag([0.3, -0.1, 0.7]).astype(complex)
    a = PuiseuxMatrixSeries({F(-3): lv, F(-1): res}, 6)
    f = htl_reduce(a)
    assert f.levels == [F(3)]
    got = sorted(zip(np.diag(f.level_matrices[0]).real, np.diag(f.residue).real))
    assert np.allclose(got, sorted(zip(np.diag(lv).real, np.diag(res).real)))
    assert f.d == 1


def test_worked_example_htl_form():
    var, th, s, A = catalog_system("(11)_2,(2)(2)", 6)
    f = htl_reduce(local_expansion(A, math.inf, 18))
    assert f.levels == [F(3, 2)] and f.d == 2
    assert sorted(np.diag(f.level_matrices[0]).real.round(9)) == [-1, -1, 1, 1]
    half = [th["thetainf2"] / 2, th["thetainf3"] / 2]
    assert np.allclose(sorted(np.diag(f.residue).real), sorted(half * 2))
    assert spectral_type(f).text == "(11)_2"


def test_nilpotent_leading_gives_ramification():
    rng = np.random.default_rng(7)
    a = PuiseuxMatrixSeries({F(-2): np.array([[0, 1], [0, 0]]), F(-1): cmat(rng, 2), F(0): cmat(rng, 2),
                             F(1): cmat(rng, 2)}, 8)
    r = htl_reduce_full(a)
    assert r.form.d == 2
    assert r.soundness() <= 1e-8


def test_vanishing_series_rejected():
    with pytest.raises(HTLError):
        htl_reduce(PuiseuxMatrixSeries.zero(2, 3))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_reduction_soundness(seed):
    rng = np.random.default_rng(seed)
    lead = np.diag([1, 1, -0.5, 2]).astype(complex)
    g = np.eye(4) + 0.3 * cmat(rng, 4)
    terms = {F(-3): np.linalg.inv(g) @ lead @ g}
    terms.update({F(k): cmat(rng, 4) for k in range(-2, 8)})
    r = htl_reduce_full(PuiseuxMatrixSeries(terms, 8))
    assert r.soundness() <= 1e-8


# spectral types


@pytest.mark.parametrize("want", list(RAMIFIED_EXAMPLES))
def test_ramified_examples(want):
    assert point_spectral_type(ramified_example_system(want), 0) == want


def test_unramified_example():
    assert point_spectral_type(rsp_example_system(), 0) == "((11))((1)(1))"


def test_unknown_example():
    with pytest.raises(KeyError):
        ramified_example_system("(3)_3")


@pytest.mark.parametrize("name,pattern", [("22,22,22,211", "1+1+1+1"), ("(11)_2,(2)(2)", "3/2+2"),
                                          ("(((((11)))))_2", "7/2")])
def test_patterns(name, pattern):
    c = classify_system(catalog_system(name, 8)[3])
    assert c.pattern == pattern
    assert c.spectral_type.text == name


@pytest.mark.parametrize("name", LAX_CATALOG)
@pytest.mark.parametrize("seed", [0, 1])
def test_catalog_types(name, seed):
    assert classify_system(catalog_system(name, 20 + seed)[3]).spectral_type.text == name


def test_parse_counts():
    assert parse_spectral_type("(11)_2,(2)(2)") == [4, 4]
    assert parse_spectral_type("22,22,22,211") == [4, 4, 4, 4]
    assert parse_spectral_type("(((((11)))))_2") == [4]
    assert parse_spectral_type("(1)_3 1") == [4]


def test_classify_regular_system_is_empty():
    sys = LinearSystem.build(2, [], [np.zeros((2, 2))])
    c = classify_system(sys)
    assert c.pattern == "" and c.spectral_type.text == ""
