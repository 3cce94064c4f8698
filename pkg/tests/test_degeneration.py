import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matpainleve import degeneration as dg
from matpainleve.catalog import get_variant

RULES = dg.rule_catalog()
NAMES = [r.name for r in RULES]
seeds = st.integers(0, 2**32 - 1)


def _draw(rule, seed):
    return dg.random_target(rule, np.random.default_rng(seed))


# catalog and graph


def test_catalog_size_and_groups():
    assert len(RULES) == 18
    sizes = {}
    for r in RULES:
        sizes[r.group] = sizes.get(r.group, 0) + 1
    assert sorted(sizes.values()) == sorted([2, 2, 3, 2, 2, 2, 2, 1, 2])


def test_rules_connect_known_variants():
    for r in RULES:
        assert get_variant(r.source) and get_variant(r.target)


def test_get_rule_accepts_arrow():
    r = dg.get_rule("(2)(2),(2)(11) → (2)_2,(2)(11)")
    assert r.name == "(2)(2),(2)(11) -> (2)_2,(2)(11)"
    with pytest.raises(KeyError):
        dg.get_rule("I -> II")


def test_graph():
    g = dg.degeneration_graph()
    assert len(g["edges"]) == 18
    assert "(((((11)))))_2" in g["nodes"]
    dot = dg.graph_dot()
    assert dot.startswith("digraph") and dot.count("\" -> \"") == 18


# maps


def test_scaling_rule_map():
    r = dg.get_rule("(2)(2),(2)(11) -> (2)_2,(2)(11)")
    th, Qt, Pt, tt = _draw(r, 0)
    eps = 0.1
    sp = dg.apply_rule(r, eps, th, Qt, Pt, tt)
    e = mp.mpf(eps)
    with mp.workdps(dg.WORKING_DPS):
        assert dg._max_abs(sp.Q - e * dg._to_mp(Qt)) < 1e-60
        assert dg._max_abs(sp.P - dg._to_mp(Pt) / e) < 1e-60
        assert abs(sp.t - e * mp.mpc(tt)) < 1e-60
        Ht = dg.target_hamiltonian(r, dg._mp_theta(th), dg._to_mp(Qt), dg._to_mp(Pt), mp.mpc(tt))
        assert abs(sp.declared_h - Ht / e) < 1e-50 * (1 + abs(Ht / e))


def test_theta_map_large_parameter():
    r = dg.get_rule("(((2)))_2,211 -> (((((11)))))_2")
    th, *_ = _draw(r, 1)
    eps = mp.mpf("0.2")
    with mp.workdps(dg.WORKING_DPS):
        sth = r.theta_map(eps, dg._mp_theta(th))
        assert abs(sth["thetainf1"] - (-eps**-15 + mp.mpf(1) / 2)) < 1e-40


def test_theta_map_inverse_eps():
    r = dg.get_rule("(2)(11),22,22 -> (11)_2,22,22")
    th, *_ = _draw(r, 2)
    eps = mp.mpf("0.1")
    sth = r.theta_map(eps, dg._mp_theta(th))
    assert abs(sth["thetainf1"] - 1 / eps) < 1e-40


def test_cubic_map_at_identity():
    r = dg.get_rule("(2)(2),(11)_2 -> (2)_2,(11)_2")
    th, _, _, tt = _draw(r, 3)
    I2 = np.eye(2, dtype=complex)
    sp = dg.apply_rule(r, 0.1, th, I2, np.zeros((2, 2), complex), tt)
    assert dg._max_abs(sp.Q + dg._to_mp(I2)) < 1e-60


def test_eps_zero_rejected():
    r = RULES[0]
    th, Qt, Pt, tt = _draw(r, 0)
    with pytest.raises(dg.DegenerationError):
        dg.apply_rule(r, 0, th, Qt, Pt, tt)


@pytest.mark.parametrize("name", NAMES)
def test_round_trip(name):
    r = dg.get_rule(name)
    th, Qt, Pt, tt = _draw(r, 4)
    assert dg.round_trip_error(r, 0.3, th, Qt, Pt, tt) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from(NAMES), st.floats(0.01, 0.5))
def test_round_trip_property(seed, name, eps):
    r = dg.get_rule(name)
    th, Qt, Pt, tt = _draw(r, seed)
    assert dg.round_trip_error(r, eps, th, Qt, Pt, tt) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from(NAMES), st.floats(0.01, 0.5))
def test_fuchs_relation_transported(seed, name, eps):
    r = dg.get_rule(name)
    th, *_ = _draw(r, seed)
    assert abs(dg.fuchs_defect(r.target, th)) <= 1e-12
    with mp.workdps(dg.WORKING_DPS):
        sth = r.theta_map(mp.mpf(eps), dg._mp_theta(th))
        scale = 1 + max(abs(v) for v in sth.values())
        assert abs(dg.fuchs_defect(r.source, sth)) <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from(NAMES), st.floats(0.01, 0.5))
def test_commutator_transported(seed, name, eps):
    r = dg.get_rule(name)
    th, Qt, Pt, tt = _draw(r, seed)
    assert dg.commutator_defect(r, eps, th, Qt, Pt, tt) <= 1e-8


# limits


def test_flow_limit_scaling_rule():
    rep = dg.verify_flow_limit(dg.get_rule("(2)(2),(2)(11) -> (2)_2,(2)(11)"), n_draws=3)
    assert rep.passed and rep.slope >= 0.9


def test_flow_limit_monotone_for_quartic_rule():
    rep = dg.verify_flow_limit(dg.get_rule("(((2)))(((11))) -> (((((11)))))_2"), n_draws=3)
    assert rep.passed
    assert all(b < a for a, b in zip(rep.residuals, rep.residuals[1:]))


def test_wrong_target_detected():
    r = dg.get_rule("(2)(2),22,211 -> (2)_2,22,211")
    wrong = dg.mismatched_target(r)
    assert wrong is not None and get_variant(wrong).system != get_variant(r.target).system
    rep = dg.verify_flow_limit(r, n_draws=2, target=wrong)
    assert not rep.passed and rep.slope < 0.5


def test_flow_report_is_deterministic():
    r = dg.get_rule("(2)(11),22,22 -> (11)_2,22,22")
    a = dg.verify_flow_limit(r, n_draws=2, seed=3)
    b = dg.verify_flow_limit(r, n_draws=2, seed=3)
    assert a.to_json() == b.to_json()


def test_grid_validation():
    r = RULES[0]
    with pytest.raises(ValueError):
        dg.verify_flow_limit(r, eps_grid=(0.1, 0.2))
    with pytest.raises(ValueError):
        dg.verify_flow_limit(r, eps_grid=(0.9, 0.1))


def test_fit_slope():
    grid = (0.1, 0.05, 0.025)
    assert dg.fit_slope(grid, [g**2 for g in grid]) == pytest.approx(2)


def test_scaled_hamiltonian_relation():
    rep = dg.verify_hamiltonian_relation(dg.get_rule("(2)(2),(11)_2 -> (2)_2,(11)_2"), n_draws=3)
    assert rep.passed


def test_hamiltonian_relation_with_trace_correction():
    r = dg.get_rule("(2)_2,(2)(11) -> (((((11)))))_2")
    th, Qt, Pt, tt = _draw(r, 5)
    sp = dg.apply_rule(r, 0.2, th, Qt, Pt, tt)
    assert abs(sp.correction) > 0
    assert dg.verify_hamiltonian_relation(r, n_draws=3).passed


def test_hamiltonian_evaluation_is_deterministic():
    r = dg.get_rule("(2)(2),(11)_2 -> (2)_2,(11)_2")
    th, Qt, Pt, tt = _draw(r, 6)
    a = dg.apply_rule(r, 0.1, th, Qt, Pt, tt)
    b = dg.apply_rule(r, 0.1, th, Qt, Pt, tt)
    assert a.declared_h == b.declared_h


# linear system example


def test_linear_example_leading_order():
    r = dg.get_rule("(2)(2),(2)(11) -> (2)(2),(11)_2")
    th, Qt, Pt, tt = _draw(r, 0)
    got = dg.demo_conjugated(mp.mpf("1e-6"), th, Qt, Pt, tt)
    Q, P = dg._to_mp(Qt), dg._to_mp(Pt)
    I2 = dg._eye()
    want = np.block([[Q @ P, Q], [I2, -P @ Q + th["theta0"] * I2]])
    assert dg._max_abs(got[1] - want) < 1e-4


def test_linear_example_report():
    rep = dg.linear_degeneration_demo(n_draws=2)
    assert rep.passed and rep.slope >= 0.9
    assert rep.details["spectral_type"] == "(11)_2,(2)(2)"


def test_report_serialization():
    rep = dg.ConvergenceReport("x", (0.1, 0.05), [1e-2, 5e-3], 1.0, True, "flow", False, {})
    assert '"rule": "x"' in rep.to_json()
    csv = dg.reports_csv([rep])
    assert csv.splitlines()[0].startswith("rule")
    with pytest.raises(ValueError):
        dg.ConvergenceReport("x", (0.05, 0.1), [1e-2, 5e-3], 1.0, True, "flow", False, {})
