"""Degeneration rules between matrix Painleve systems and their numerical
verification.

Each rule expresses the source system's parameters, matrices and time in
terms of the target's and a small parameter ``eps``.  Verification pushes
the source vector field forward through the inverse of the substitution
and compares it with the target vector field as ``eps -> 0``.  All
arithmetic is done in mpmath at high precision, since several rules carry
``eps**-15`` scales that cancel to O(1).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp
import numpy as np

from .algebra import LinearSystem, inv2
from .catalog import VARIANTS, get_variant, matrix_rhs, params_for, zeta_value
from .painleve_core import pair_from_coordinates, trace_hamiltonian

DEFAULT_GRID = (0.1, 0.05, 0.025, 0.0125)
REDUCED_GRID = (0.2, 0.15, 0.1, 0.075)
SLOPE_THRESHOLD = 0.9
WORKING_DPS = 90
FD_STEP = mp.mpf(10) ** -30
EXACT_FLOOR = mp.mpf(10) ** -40


class DegenerationError(ArithmeticError):
    """A substitution is singular at the requested point."""


# ---------------------------------------------------------------------------
# arithmetic helpers for object arrays of mpmath numbers


def _mat(rows):
    return np.array(rows, dtype=object)


def _eye():
    return _mat([[mp.mpf(1), mp.mpf(0)], [mp.mpf(0), mp.mpf(1)]])


def _inv(m):
    try:
        return inv2(m)
    except ZeroDivisionError as exc:
        raise DegenerationError("singular matrix in substitution") from exc


def _tr(m):
    return m[0, 0] + m[1, 1]


def _to_mp(a):
    a = np.asarray(a)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = mp.mpc(v)
    return out


def _max_abs(*mats):
    return max(abs(v) for m in mats for v in np.asarray(m).ravel())


# ---------------------------------------------------------------------------
# rule record


@dataclass(frozen=True)
class DegenerationRule:
    """One substitution taking a source system to a target system.

    ``theta_map(eps, th)`` returns source exponents from target exponents;
    ``var_map(eps, th, Qt, Pt, tt)`` returns source ``(Q, P, t)``;
    ``inverse_map`` undoes it; ``h_relation(eps, th, Qt, Pt, tt, Ht)`` is the
    declared value of the source Hamiltonian.  ``x_map`` and ``y_gauge``
    record the linear-side substitution as text.
    """

    name: str
    group: str
    source: str
    target: str
    theta_map: Callable
    var_map: Callable
    inverse_map: Callable
    h_relation: Callable
    x_map: str = ""
    y_gauge: str = ""
    notes: str = ""
    grid: tuple = DEFAULT_GRID

    def source_theta(self, eps, th) -> dict:
        return self.theta_map(eps, dict(th))


def _pass(th, keep, **set_to):
    out = {k: th[k] for k in keep}
    out.update(set_to)
    return out


# --- theta maps ------------------------------------------------------------

def _th_r1(e, th):
    return _pass(th, ["theta0"], theta1=-2 / e, thetainf1=th["thetainf1"] + 1 / e,
                 thetainf2=th["thetainf2"] + 1 / e, thetainf3=th["thetainf3"] + 1 / e)


def _th_r2(e, th):
    return _pass(th, ["theta0", "theta1"], thetainf1=1 / e, thetainf2=th["thetainf2"] - 1 / e,
                 thetainf3=th["thetainf3"] - 1 / e)


def _th_r3(e, th):
    s = e ** -6
    return {"theta0": 2 * s, "thetainf1": th["thetainf1"] - s, "thetainf2": th["thetainf2"] - s,
            "thetainf3": th["thetainf3"] - s}


def _th_r4(e, th):
    s = e ** -6
    return _pass(th, ["theta0"], thetainf1=-s, thetainf2=th["thetainf2"] + s, thetainf3=th["thetainf3"] + s)


def _th_r5(e, th):
    s = e ** -3
    return {"theta0": -2 * s, "thetainf1": th["thetainf1"] + s, "thetainf2": th["thetainf2"] + s,
            "thetainf3": th["thetainf3"] + s}


def _th_r6(e, th):
    s = e ** -3
    return _pass(th, ["theta0"], thetainf1=s, thetainf2=th["thetainf2"] - s, thetainf3=th["thetainf3"] - s)


def _th_r7(e, th):
    s = e ** -3
    return {"theta0": 2 * s, "theta1": th["theta0"], "thetainf2": th["thetainf2"] - 2 * s,
            "thetainf3": th["thetainf3"] - 2 * s}


def _th_r8(e, th):
    return _pass(th, ["thetainf1"], theta0=-1 / e, thetainf2=th["thetainf2"] + 1 / e,
                 thetainf3=th["thetainf3"] + 1 / e)


def _th_r9(e, th):
    return _pass(th, ["thetainf2", "thetainf3"], theta0=-1 / e, theta1=th["theta0"] + 1 / e)


def _th_r10(e, th):
    return {"theta0": -2 / e, "thetainf1": th["thetainf1"] + 1 / e, "thetainf2": th["thetainf2"] + 1 / e,
            "thetainf3": th["thetainf3"] + 1 / e}


def _th_r11(e, th):
    return _pass(th, ["theta0"], thetainf1=1 / e, thetainf2=th["thetainf2"] - 1 / e,
                 thetainf3=th["thetainf3"] - 1 / e)


def _th_r12(e, th):
    s = e ** -15 - mp.mpf(1) / 2
    return {"thetainf1": -s, "thetainf2": th["thetainf2"] + s, "thetainf3": th["thetainf3"] + s}


def _th_r13(e, th):
    s = 2 * e ** -15
    return {"theta0": -s, "thetainf2": th["thetainf2"] + s, "thetainf3": th["thetainf3"] + s}


def _th_r14(e, th):
    s = 2 * e ** -15
    return {"thetainf1": s, "thetainf2": th["thetainf2"] - s, "thetainf3": th["thetainf3"] - s}


def _th_r15(e, th):
    s = (1 - 3 * e ** -5) / 2
    return {"thetainf1": s, "thetainf2": th["thetainf2"] - s, "thetainf3": th["thetainf3"] - s}


def _th_r16(e, th):
    s = 3 * e ** -5 - 1
    return {"theta0": s, "thetainf2": th["thetainf2"] - s, "thetainf3": th["thetainf3"] - s}


def _th_r17(e, th):
    s = mp.mpf(1) / 2 - 1 / e
    return {"thetainf1": s, "thetainf2": th["thetainf2"] - s, "thetainf3": th["thetainf3"] - s}


def _th_r18(e, th):
    s = -1 + 2 / e
    return {"theta0": s, "thetainf2": th["thetainf2"] - s, "thetainf3": th["thetainf3"] - s}


# --- variable maps and their inverses ---------------------------------------

def _vm_r1(e, th, Qt, Pt, tt):
    I = _eye()
    return -(Qt + th["theta0"] * _inv(Pt)) / (e * tt), e * tt * (I - Pt), -e * tt


def _iv_r1(e, th, Q, P, t):
    tt = -t / e
    Pt = _eye() - P / (e * tt)
    return -e * tt * Q - th["theta0"] * _inv(Pt), Pt, tt


def _h_r1(e, th, Qt, Pt, tt, Ht):
    I = _eye()
    return (-Ht + _tr((Pt - I) @ (Qt + th["theta0"] * _inv(Pt))) / tt) / e


def _vm_r2(e, th, Qt, Pt, tt):
    return Pt, -Qt, e * tt


def _iv_r2(e, th, Q, P, t):
    return -P, Q, t / e


def _h_scaled(power):
    def rel(e, th, Qt, Pt, tt, Ht):
        return e ** power * Ht
    return rel


def _vm_r3(e, th, Qt, Pt, tt):
    I = _eye()
    return e ** -3 * I + Qt / e + e * (Pt - tt * I), e * Pt, e * tt - 2 * e ** -3


def _iv_r3(e, th, Q, P, t):
    I = _eye()
    tt = (t + 2 * e ** -3) / e
    Pt = P / e
    return e * (Q - e ** -3 * I - e * (Pt - tt * I)), Pt, tt


def _h_r3(e, th, Qt, Pt, tt, Ht):
    return Ht / e - e * _tr(Pt)


def _vm_r4(e, th, Qt, Pt, tt):
    return -e * Pt, Qt / e - e ** -3 * _eye(), -2 * e ** -3 + e * tt


def _iv_r4(e, th, Q, P, t):
    return e * (P + e ** -3 * _eye()), -Q / e, (t + 2 * e ** -3) / e


def _vm_r5(e, th, Qt, Pt, tt):
    I = _eye()
    return e ** -3 * I - e ** -2 * Qt, I - e ** 2 * Pt, e ** -4 * tt + e ** -6


def _iv_r5(e, th, Q, P, t):
    I = _eye()
    return (e ** -3 * I - Q) * e ** 2, (I - P) / e ** 2, (t - e ** -6) * e ** 4


def _vm_shift_inv(key):
    def vm(e, th, Qt, Pt, tt):
        return (-e ** -3 * _eye() + e ** -2 * (Qt - th[key] * _inv(Pt)), e ** 2 * Pt,
                -e ** -4 * tt - e ** -6)
    return vm


def _iv_shift_inv(key):
    def iv(e, th, Q, P, t):
        Pt = P / e ** 2
        return e ** 2 * (Q + e ** -3 * _eye()) + th[key] * _inv(Pt), Pt, -(t + e ** -6) * e ** 4
    return iv


def _vm_r8(e, th, Qt, Pt, tt):
    return e * tt * Pt, -Qt / (e * tt), -e * tt


def _iv_r8(e, th, Q, P, t):
    tt = -t / e
    return -e * tt * P, Q / (e * tt), tt


def _h_r8(e, th, Qt, Pt, tt, Ht):
    return -Ht / e + _tr(Pt @ Qt) / (e * tt)


def _vm_shear(key):
    def vm(e, th, Qt, Pt, tt):
        return e * Qt - (th[key] * e + 1) * _inv(Pt), Pt / e, e * tt
    return vm


def _iv_shear(key):
    def iv(e, th, Q, P, t):
        Pt = e * P
        return (Q + (th[key] * e + 1) * _inv(Pt)) / e, Pt, t / e
    return iv


def _vm_r10(e, th, Qt, Pt, tt):
    return e * Qt, Pt / e, e * tt


def _iv_r10(e, th, Q, P, t):
    return Q / e, e * P, t / e


def _vm_to_i(e, th, Qt, Pt, tt):
    I = _eye()
    Q = e * Qt + e ** -5 * I
    P = e ** 2 * (Qt @ Qt + tt * I) / 2 + Pt / e + e ** -4 * Qt - e ** -10 * I
    return Q, P, e ** 2 * tt - 3 * e ** -10


def _iv_to_i(e, th, Q, P, t):
    I = _eye()
    tt = (t + 3 * e ** -10) / e ** 2
    Qt = (Q - e ** -5 * I) / e
    Pt = e * (P - e ** 2 * (Qt @ Qt + tt * I) / 2 - e ** -4 * Qt + e ** -10 * I)
    return Qt, Pt, tt


def _h_to_i(e, th, Qt, Pt, tt, Ht):
    return Ht / e ** 2 - e / 2 * _tr(Qt)


def _vm_d7_to_i(e, th, Qt, Pt, tt):
    I = _eye()
    R = I - e ** 2 * Qt
    M = _inv(R)
    Q = e ** -10 * R
    P = -e ** 8 * Pt + (mp.mpf(3) / 2 * e ** -5 - 1) * e ** 10 * M - e ** 5 * (1 + e ** 4 * tt) * (M @ M)
    return Q, P, 2 * e ** -15 * (1 + e ** 4 * tt)


def _iv_d7_to_i(e, th, Q, P, t):
    I = _eye()
    tt = (t * e ** 15 / 2 - 1) / e ** 4
    Qt = (I - e ** 10 * Q) / e ** 2
    M = _inv(I - e ** 2 * Qt)
    Pt = -(P - (mp.mpf(3) / 2 * e ** -5 - 1) * e ** 10 * M + e ** 5 * (1 + e ** 4 * tt) * (M @ M)) / e ** 8
    return Qt, Pt, tt


def _h_d7_to_i(e, th, Qt, Pt, tt, Ht):
    M = _inv(_eye() - e ** 2 * Qt)
    return e ** 11 / 2 * Ht - _tr(e ** 10 / 2 * M)


def _vm_to_d8(e, th, Qt, Pt, tt):
    return -Qt @ (e * Pt @ Qt + _eye()), -_inv(Qt) / e, e * tt


def _iv_to_d8(e, th, Q, P, t):
    Qt = -_inv(e * P)
    Qi = _inv(Qt)
    return Qt, Qi @ (-Q - Qt) @ Qi / e, t / e


# ---------------------------------------------------------------------------
# the catalog


def _rule(group, source, target, thm, vm, iv, hr, x_map="", y_gauge="", notes="", grid=DEFAULT_GRID):
    name = f"{source} -> {target}"
    return DegenerationRule(name, group, source, target, thm, vm, iv, hr, x_map, y_gauge, notes, grid)


def rule_catalog() -> list:
    """All eighteen degeneration rules, grouped by singularity pattern."""
    d6 = "(2)_2,22,211"
    return [
        _rule("2+1+1 -> 3/2+1+1", "(2)(2),22,211", d6, _th_r1, _vm_r1, _iv_r1, _h_r1,
              y_gauge="Y = (x-1)^(-1/eps) diag(I, -1/eps) Yt"),
        _rule("2+1+1 -> 3/2+1+1", "(2)(11),22,22", "(11)_2,22,22", _th_r2, _vm_r2, _iv_r2, _h_scaled(-1),
              y_gauge="Y = tt^(-1/eps) diag(I, U)^-1 [[I, 1/(eps tt)], [O, eps I]] [[I, -Pt Qt + theta0], [O, tt I]] Yt"),
        _rule("3+1 -> 5/2+1", "((2))((2)),211", "(((2)))_2,211", _th_r3, _vm_r3, _iv_r3, _h_r3,
              x_map="x = xt/eps",
              y_gauge="Y = xt^(eps^-6) exp(eps^-2/xt) diag(-I, eps^-2 I) Yt"),
        _rule("3+1 -> 5/2+1", "((2))((11)),22", "(((11)))_2,22", _th_r4, _vm_r4, _iv_r4, _h_scaled(-1),
              x_map="x = eps xt",
              y_gauge="Y = exp(eps^-2 (tt - xt)) diag(I, U)^-1 [[I, -eps^-3 I], [O, eps^-1 I]]^-1 Yt"),
        _rule("3/2+1+1 -> 5/2+1", d6, "(((2)))_2,211", _th_r5, _vm_r5, _iv_r5, _h_scaled(4),
              x_map="x = -eps^-2 xt",
              y_gauge="Y = xt^(-eps^-3) diag(I, -eps^2 I) Yt"),
        _rule("3/2+1+1 -> 5/2+1", d6, "(((11)))_2,22", _th_r6, _vm_shift_inv("theta0"),
              _iv_shift_inv("theta0"), lambda e, th, Qt, Pt, tt, Ht: -e ** 4 * Ht,
              x_map="x = 1 + 1/(eps^2 xt - 1)",
              y_gauge="Y = (1 + eps^2 tt)^(eps^-3) diag(U, I)^-1 G1 [[I, -eps^-1 I], [O, eps^2 I]] Yt",
              notes="G1 is the constant gauge that brings the (2)_2,22,211 pair to its printed form; "
                    "factors compose left to right"),
        _rule("3/2+1+1 -> 5/2+1", "(11)_2,22,22", "(((11)))_2,22", _th_r7, _vm_shift_inv("theta0"),
              _iv_shift_inv("theta0"), lambda e, th, Qt, Pt, tt, Ht: -e ** 4 * Ht,
              x_map="x = 1 - eps^2 xt",
              y_gauge="Y = (1 - eps^2 xt)^(-eps^-3) (1 + eps^2 tt)^(-eps^-3) [[I, eps^-1 I], [O, -eps^2 I]] Yt"),
        _rule("3/2+1+1 -> 3/2+2", d6, "(2)_2,(2)(11)", _th_r8, _vm_r8, _iv_r8, _h_r8,
              x_map="x = 1 - eps xt",
              y_gauge="Y = diag(U, I)^-1 [[I, -eps t P], [-(Z + Q)/t, eps (Z P + Q P + theta0)]] diag(Ut, I) Yt",
              notes="Ut solves tt dUt/dtt Ut^-1 = 2 (Qt Pt + thetainf1)"),
        _rule("3/2+1+1 -> 3/2+2", "(11)_2,22,22", "(11)_2,(2)(2)", _th_r9, _vm_shear("theta0"),
              _iv_shear("theta0"), _h_scaled(-1),
              x_map="x = xt/(eps tt)",
              y_gauge="Y = diag(u1, u2, u1, u2) Yt",
              notes="u1, u2 solve du1/dt / u1 = thetainf2/t and du2/dt / u2 = thetainf3/t"),
        _rule("2+2 -> 3/2+2", "(2)(2),(2)(11)", "(2)_2,(2)(11)", _th_r10, _vm_r10, _iv_r10, _h_scaled(-1),
              y_gauge="Y = x^(-1/eps) diag(I, eps^-1 I) Yt"),
        _rule("2+2 -> 3/2+2", "(2)(2),(2)(11)", "(2)(2),(11)_2", _th_r11, _vm_shear("theta0"),
              _iv_shear("theta0"), _h_scaled(-1),
              x_map="x = eps xt",
              y_gauge="Y = diag(U, I)^-1 [[-eps P^-1, P^-1], [O, I]] Yt"),
        _rule("5/2+1 -> 7/2", "(((2)))_2,211", "(((((11)))))_2", _th_r12, _vm_to_i, _iv_to_i, _h_to_i,
              x_map="x = -eps^16 (xt + eps^-6)",
              y_gauge="Y = exp(eps^-3 tt) diag(U, I)^-1 G0 [[I, eps^2 Q], [O, eps^2 I]] Yt",
              grid=REDUCED_GRID),
        _rule("5/2+1 -> 7/2", "(((11)))_2,22", "(((((11)))))_2", _th_r13, _vm_to_i, _iv_to_i, _h_to_i,
              x_map="x = eps^-4 xt - eps^-10",
              y_gauge="Y = (1 - eps^6 xt)^(-eps^-15) diag(I, -eps^2 I) Yt",
              grid=REDUCED_GRID),
        _rule("4 -> 7/2", "(((2)))(((11)))", "(((((11)))))_2", _th_r14, _vm_to_i, _iv_to_i, _h_to_i,
              x_map="x = eps xt + eps^-5",
              y_gauge="Y = exp(eps^-3 xt^2/2 - eps^-9 xt) diag(U, I)^-1 [[I, -eps^-3 I], [O, -eps^-8 I]] Yt",
              grid=REDUCED_GRID),
        _rule("3/2+2 -> 7/2", "(2)_2,(2)(11)", "(((((11)))))_2", _th_r15, _vm_d7_to_i, _iv_d7_to_i, _h_d7_to_i,
              x_map="x = 2 eps^-5 (1 + eps^2 xt)",
              y_gauge="Y = exp(eps^-3 xt - eps^-1 tt) diag(U, I)^-1 [[I, -eps^-1 I], [P, -eps^-1 P + 2 eps^-11/t]] Yt",
              grid=REDUCED_GRID),
        _rule("3/2+2 -> 7/2", "(2)(2),(11)_2", "(((((11)))))_2", _th_r16, _vm_d7_to_i, _iv_d7_to_i, _h_d7_to_i,
              x_map="x = eps^-10 (eps^2 xt - 1)",
              y_gauge="Y = [[I, -eps^-1 I], [O, eps^4 I]] (eps^2 xt - 1)^(3 eps^-5/2) "
                      "exp(eps^-1 tt - eps^-5/(eps^2 xt - 1)) Yt",
              grid=REDUCED_GRID),
        _rule("3/2+2 -> 3/2+3/2", "(2)_2,(2)(11)", "(2)_2,(11)_2", _th_r17, _vm_to_d8, _iv_to_d8, _h_scaled(-1),
              x_map="x = -eps xt",
              y_gauge="Y = xt^(1/2) diag(U, I)^-1 [[P^-1, eps^-1 P^-1], [O, eps^-1 I]] Yt"),
        _rule("3/2+2 -> 3/2+3/2", "(2)(2),(11)_2", "(2)_2,(11)_2", _th_r18, _vm_to_d8, _iv_to_d8, _h_scaled(-1),
              y_gauge="Y = xt^(1/eps) Yt"),
    ]


def get_rule(name: str) -> DegenerationRule:
    key = name.replace(" ", "").replace("→", "->")
    for r in rule_catalog():
        if r.name.replace(" ", "") == key:
            return r
    raise KeyError(f"unknown degeneration rule {name!r}")


def degeneration_graph(rules=None) -> dict:
    """Nodes and edges of the degeneration scheme, as canonical variant names."""
    rules = rule_catalog() if rules is None else rules
    edges = [(get_variant(r.source).name, get_variant(r.target).name) for r in rules]
    nodes = sorted({n for e in edges for n in e})
    return {"nodes": nodes, "edges": edges}


def graph_dot(rules=None) -> str:
    """The degeneration graph as Graphviz DOT text."""
    rules = rule_catalog() if rules is None else rules
    lines = ["digraph degenerations {", "  rankdir=LR;"]
    for r in rules:
        lines.append(f'  "{r.source}" -> "{r.target}" [label="{r.group}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# applying a rule


@dataclass
class SourcePoint:
    Q: np.ndarray
    P: np.ndarray
    t: object
    theta: dict
    declared_h: object
    correction: object


def _mp_theta(th):
    return {k: mp.mpc(v) for k, v in dict(th).items()}


def target_hamiltonian(rule: DegenerationRule, th, Qt, Pt, tt):
    var = get_variant(rule.target)
    return trace_hamiltonian(var.system, params_for(var, th), Qt, Pt, tt)


def source_hamiltonian(rule: DegenerationRule, eps, th, Q, P, t):
    var = get_variant(rule.source)
    sth = rule.theta_map(eps, th)
    return trace_hamiltonian(var.system, params_for(var, sth), Q, P, t)


def apply_rule(rule: DegenerationRule, eps, th, Qt, Pt, tt) -> SourcePoint:
    """Source-side matrices, time and exponents at a target point, with the
    declared source Hamiltonian and its trace correction (the part of the
    declared relation that does not involve the target Hamiltonian)."""
    if eps == 0:
        raise DegenerationError("eps must be nonzero")
    with mp.workdps(WORKING_DPS):
        e = mp.mpf(eps)
        thm = _mp_theta(th)
        Qm, Pm, tm = _to_mp(Qt), _to_mp(Pt), mp.mpc(tt)
        Q, P, t = rule.var_map(e, thm, Qm, Pm, tm)
        Ht = target_hamiltonian(rule, thm, Qm, Pm, tm)
        declared = rule.h_relation(e, thm, Qm, Pm, tm, Ht)
        corr = rule.h_relation(e, thm, Qm, Pm, tm, 0)
        sth = rule.theta_map(e, thm)
    return SourcePoint(Q, P, t, sth, declared, corr)


def round_trip_error(rule: DegenerationRule, eps, th, Qt, Pt, tt) -> float:
    """Max deviation of ``inverse_map(var_map(x))`` from ``x``."""
    with mp.workdps(WORKING_DPS):
        e = mp.mpf(eps)
        thm = _mp_theta(th)
        Qm, Pm, tm = _to_mp(Qt), _to_mp(Pt), mp.mpc(tt)
        Q2, P2, t2 = rule.inverse_map(e, thm, *rule.var_map(e, thm, Qm, Pm, tm))
        return float(max(_max_abs(Q2 - Qm, P2 - Pm), abs(t2 - tm)))


def fuchs_defect(variant, th) -> complex:
    var = get_variant(variant)
    return sum(c * th[k] for k, c in var.fuchs.items())


def commutator_defect(rule: DegenerationRule, eps, th, Qt, Pt, tt) -> float:
    """Relative deviation of ``[P, Q]`` at the source point from ``zeta K``."""
    sp = apply_rule(rule, eps, th, Qt, Pt, tt)
    with mp.workdps(WORKING_DPS):
        z = zeta_value(rule.source, sp.theta)
        c = sp.P @ sp.Q - sp.Q @ sp.P
        target = _mat([[z, 0], [0, -z]])
        scale = 1 + _max_abs(sp.P) * _max_abs(sp.Q)
        return float(_max_abs(c - target) / scale)


# ---------------------------------------------------------------------------
# random target data


def random_target(rule: DegenerationRule, rng: np.random.Generator, theta_bound: float = 3.0,
                  state_bound: float = 2.0):
    """Rational exponents with ``|theta| <= theta_bound`` obeying the target
    Fuchs relation, and a target pair with ``|Q|, |P| <= state_bound``."""
    var = get_variant(rule.target)
    free = [k for k in var.theta_names if k != "thetainf3"]
    while True:
        th = {k: round(rng.uniform(-theta_bound, theta_bound) * 12) / 12 for k in free}
        th["thetainf3"] = -sum(var.fuchs[k] * th[k] for k in free) / var.fuchs["thetainf3"]
        if abs(th["thetainf3"]) <= theta_bound:
            break
    c = zeta_value(var, th)
    for _ in range(100):
        q1, p1, q2, p2 = (complex(*rng.uniform(-0.7, 0.7, 2)) for _ in range(4))
        u = complex(*rng.uniform(0.5, 1.2, 2))
        Q, P = pair_from_coordinates(q1, p1, q2, p2, u, c)
        if max(np.abs(Q).max(), np.abs(P).max()) <= state_bound:
            break
    tt = complex(rng.uniform(0.3, 1.0), rng.uniform(-0.5, 0.5))
    return th, Q, P, tt


# ---------------------------------------------------------------------------
# flow comparison


def _flatten(Q, P):
    return list(Q.ravel()) + list(P.ravel())


def _unflatten(v):
    return _mat(v[:4]).reshape(2, 2), _mat(v[4:]).reshape(2, 2)


def induced_target_flow(rule: DegenerationRule, eps, th, Qt, Pt, tt, source=None):
    """Source vector field pushed through the inverse substitution.

    Solves ``J v = F * dt/dtt - dPhi/dtt`` where ``Phi`` is the variable map,
    ``J`` its Jacobian in the target matrices (central differences) and ``F``
    the source flow.  Returns ``(dQt/dtt, dPt/dtt)`` as mpmath object arrays.
    """
    source = rule.source if source is None else source
    with mp.workdps(WORKING_DPS):
        e = mp.mpf(eps)
        thm = _mp_theta(th)
        Qm, Pm, tm = _to_mp(Qt), _to_mp(Pt), mp.mpc(tt)
        base = _flatten(Qm, Pm)

        def phi(vec, tval):
            Qv, Pv = _unflatten(vec)
            Q, P, t = rule.var_map(e, thm, Qv, Pv, tval)
            return _flatten(Q, P), t

        h = FD_STEP
        cols = []
        for k in range(8):
            vp, vm = list(base), list(base)
            vp[k] += h
            vm[k] -= h
            fp, _ = phi(vp, tm)
            fm, _ = phi(vm, tm)
            cols.append([(a - b) / (2 * h) for a, b in zip(fp, fm)])
        fp, tp = phi(base, tm + h)
        fm, tmm = phi(base, tm - h)
        dphi_dt = [(a - b) / (2 * h) for a, b in zip(fp, fm)]
        dt_dtt = (tp - tmm) / (2 * h)
        Q, P, t = rule.var_map(e, thm, Qm, Pm, tm)
        sth = rule.theta_map(e, thm)
        dQ, dP = matrix_rhs(source, sth, Q, P, t)
        rhs = [f * dt_dtt - d for f, d in zip(_flatten(dQ, dP), dphi_dt)]
        J = mp.matrix(8, 8)
        for j in range(8):
            for i in range(8):
                J[i, j] = cols[j][i]
        try:
            v = mp.lu_solve(J, mp.matrix(rhs))
        except ZeroDivisionError as exc:
            raise DegenerationError("substitution Jacobian is singular") from exc
        return _unflatten([v[i] for i in range(8)])


def _remove_gauge(delta, Qt, Pt):
    """Remove the component of ``delta`` along the infinitesimal diagonal
    conjugation ``([K, Qt], [K, Pt])``; that direction is the residual gauge
    freedom of the canonical parametrization."""
    K = _mat([[1, 0], [0, -1]])
    g = _flatten(K @ Qt - Qt @ K, K @ Pt - Pt @ K)
    gg = sum(abs(x) ** 2 for x in g)
    if gg == 0:
        return delta
    coef = sum(mp.conj(a) * b for a, b in zip(g, delta)) / gg
    return [b - coef * a for a, b in zip(g, delta)]


def flow_residual(rule: DegenerationRule, eps, th, Qt, Pt, tt, target=None) -> float:
    """Relative max-norm difference between the induced and the target flow,
    modulo the diagonal gauge direction."""
    target = rule.target if target is None else target
    with mp.workdps(WORKING_DPS):
        Qm, Pm, tm = _to_mp(Qt), _to_mp(Pt), mp.mpc(tt)
        thm = _mp_theta(th)
        vQ, vP = induced_target_flow(rule, eps, th, Qt, Pt, tt)
        fQ, fP = matrix_rhs(target, thm, Qm, Pm, tm)
        delta = [a - b for a, b in zip(_flatten(vQ, vP), _flatten(fQ, fP))]
        delta = _remove_gauge(delta, Qm, Pm)
        scale = 1 + _max_abs(fQ, fP)
        return float(max(abs(x) for x in delta) / scale)


# ---------------------------------------------------------------------------
# reports


def fit_slope(grid, residuals) -> float:
    """Least-squares slope of ``log residual`` against ``log eps``.  A
    residual sequence that is identically below the exactness floor has
    slope ``inf``."""
    r = np.asarray(residuals, dtype=float)
    if np.all(r <= float(EXACT_FLOOR)):
        return math.inf
    r = np.maximum(r, float(EXACT_FLOOR))
    return float(np.polyfit(np.log(np.asarray(grid, float)), np.log(r), 1)[0])


@dataclass
class ConvergenceReport:
    rule: str
    grid: tuple
    residuals: list
    slope: float
    passed: bool
    kind: str = "flow"
    exact: bool = False
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        g = list(self.grid)
        if any(b >= a for a, b in zip(g, g[1:])):
            raise ValueError("eps grid must be strictly decreasing")
        if not all(math.isfinite(x) for x in self.residuals):
            raise ValueError("non-finite residual")

    def to_dict(self) -> dict:
        return {"rule": self.rule, "kind": self.kind, "grid": list(self.grid),
                "residuals": list(self.residuals),
                "slope": None if math.isinf(self.slope) else self.slope,
                "exact": self.exact, "passed": self.passed, "details": self.details}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def reports_csv(reports) -> str:
    """Summary table (rule, kind, slope, pass) as CSV text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rule", "kind", "slope", "exact", "passed"])
    for r in reports:
        w.writerow([r.rule, r.kind, "inf" if math.isinf(r.slope) else f"{r.slope:.4f}", r.exact, r.passed])
    return buf.getvalue()


def _check_grid(grid):
    grid = tuple(float(g) for g in grid)
    if not grid or any(not 0 < g <= 0.5 for g in grid):
        raise ValueError("eps grid must lie in (0, 0.5]")
    return grid


def _draws(rule, rng, n_draws, check):
    """Target draws, each resampled (up to 10 times) on a map singularity."""
    out = []
    for _ in range(n_draws):
        for _attempt in range(11):
            draw = random_target(rule, rng)
            try:
                check(draw)
            except (DegenerationError, ZeroDivisionError):
                continue
            out.append(draw)
            break
        else:
            raise DegenerationError(f"{rule.name}: map singular on 10 consecutive draws")
    return out


def verify_flow_limit(rule: DegenerationRule, eps_grid=None, n_draws: int = 5, seed: int = 0,
                      target: str | None = None, threshold: float = SLOPE_THRESHOLD) -> ConvergenceReport:
    """Compare the pushed-forward source flow with the target flow on an eps
    grid; pass iff the residual decays with fitted slope >= ``threshold``.
    ``target`` substitutes another system on the target side (mismatch
    control)."""
    grid = _check_grid(rule.grid if eps_grid is None else eps_grid)
    rng = np.random.default_rng(seed)
    draws = _draws(rule, rng, n_draws, lambda d: [flow_residual(rule, e, *d, target=target) for e in grid])
    res = [max(flow_residual(rule, e, *d, target=target) for d in draws) for e in grid]
    slope = fit_slope(grid, res)
    exact = math.isinf(slope)
    name = rule.name if target is None else f"{rule.name} [target {target}]"
    return ConvergenceReport(name, grid, res, slope, bool(slope >= threshold), "flow", exact,
                             {"draws": n_draws, "seed": seed})


def mismatched_target(rule: DegenerationRule) -> str | None:
    """A variant of a different system with the same exponent names as the
    rule's target, usable as a deliberately wrong target; ``None`` if the
    catalog has none."""
    tv = get_variant(rule.target)
    for v in VARIANTS.values():
        if v.theta_names == tv.theta_names and v.system != tv.system:
            return v.name
    return None


def hamiltonian_discrepancy(rule: DegenerationRule, eps, th, states):
    """Per-state ``(H_source - declared) * dt/dtt`` at a common target time."""
    out = []
    with mp.workdps(WORKING_DPS):
        e = mp.mpf(eps)
        for Qt, Pt, tt in states:
            sp = apply_rule(rule, eps, th, Qt, Pt, tt)
            hs = source_hamiltonian(rule, e, _mp_theta(th), sp.Q, sp.P, sp.t)
            h = FD_STEP
            thm = _mp_theta(th)
            tp = rule.var_map(e, thm, _to_mp(Qt), _to_mp(Pt), mp.mpc(tt) + h)[2]
            tm = rule.var_map(e, thm, _to_mp(Qt), _to_mp(Pt), mp.mpc(tt) - h)[2]
            out.append((hs - sp.declared_h) * (tp - tm) / (2 * h))
    return out


def verify_hamiltonian_relation(rule: DegenerationRule, eps_grid=None, n_draws: int = 5,
                                seed: int = 0, threshold: float = SLOPE_THRESHOLD) -> ConvergenceReport:
    """Check the declared Hamiltonian relation.  The relation may be off by
    a function of time alone, which does not change the flow; the residual
    is therefore the spread of the time-rescaled discrepancy over several
    states sharing exponents and time.  Also reports whether the relation
    holds exactly (discrepancy itself below 1e-30)."""
    grid = _check_grid(rule.grid if eps_grid is None else eps_grid)
    rng = np.random.default_rng(seed)
    res = [0.0] * len(grid)
    exact_h = True
    for _ in range(n_draws):
        th, _, _, tt = random_target(rule, rng)
        states = []
        for _ in range(4):
            _, Qt, Pt, _ = random_target(rule, rng)
            Qt, Pt = _retarget(rule, th, Qt, Pt)
            states.append((Qt, Pt, tt))
        for i, e in enumerate(grid):
            d = hamiltonian_discrepancy(rule, e, th, states)
            res[i] = max(res[i], float(max(abs(x - d[0]) for x in d)))
            if max(abs(x) for x in d) > 1e-30:
                exact_h = False
    slope = fit_slope(grid, res)
    return ConvergenceReport(rule.name, grid, res, slope, bool(slope >= threshold), "hamiltonian",
                             math.isinf(slope), {"relation_exact": exact_h, "draws": n_draws, "seed": seed})


def _retarget(rule, th, Qt, Pt):
    """Re-solve the lower-left entry of ``Pt`` so that ``[Pt, Qt] = zeta K``
    holds for the exponents ``th``."""
    q1, p1 = Qt[0, 0], 2 * Pt[0, 0]
    u = Qt[0, 1]
    q2 = -Qt[1, 0] * u
    p2 = -Pt[0, 1] / u
    return pair_from_coordinates(q1, p1, q2, p2, u, zeta_value(rule.target, th))


# ---------------------------------------------------------------------------
# linear-side worked example: (2)(2),(2)(11) -> (11)_2,(2)(2)


def _source_d6_unram(th, Q, P, t):
    """Coefficients ``(A_-1, A_0, A_inf)`` of the unramified (2)(2),(2)(11)
    system ``A_-1/x^2 + A_0/x + A_inf``."""
    I = _eye()
    O = I * 0
    t0, i1 = th["theta0"], th["thetainf1"]
    Theta = _mat([[th["thetainf2"], 0], [0, th["thetainf3"]]])
    Z = (Q @ P + (t0 + 2 * i1) * I) @ P - (Q @ P + (t0 + i1) * I)
    left = np.vstack([I, P])
    right = np.hstack([t * (I - P), t * I])
    Am1 = left @ right
    A0 = np.block([[-i1 * I, -Q], [-Z, -Theta]])
    Ainf = np.block([[-I, O], [O, O]])
    return Am1, A0, Ainf


def _demo_limit(th, Qt, Pt, tt):
    I = _eye()
    O = I * 0
    A0 = np.vstack([O, I]) @ np.hstack([tt * Pt, tt * I])
    A1 = np.block([[Qt @ Pt, Qt], [I, -Pt @ Qt + th["theta0"] * I]])
    A2 = np.block([[O, I], [O, O]])
    return A0, A1, A2


def demo_conjugated(eps, th, Qt, Pt, tt, g1_power: int = -1):
    """``G (eps^-1 A_-1) G^-1``, ``G A_0 G^-1`` and ``G (eps A_inf) G^-1`` after
    ``x = eps xt`` and the parameter substitution of the shear rule, with
    ``G = [[-eps**g1_power P, I/eps], [O, I]]``.  Only ``g1_power = -1``
    cancels the ``eps**-2`` part of the upper block; ``+1`` is kept as a
    diagnostic and diverges."""
    rule = get_rule("(2)(2),(2)(11) -> (2)(2),(11)_2")
    with mp.workdps(WORKING_DPS):
        e = mp.mpf(eps)
        thm = _mp_theta(th)
        Qm, Pm, tm = _to_mp(Qt), _to_mp(Pt), mp.mpc(tt)
        Q, P, t = rule.var_map(e, thm, Qm, Pm, tm)
        sth = rule.theta_map(e, thm)
        Am1, A0, Ainf = _source_d6_unram(sth, Q, P, t)
        I = _eye()
        O = I * 0
        G1 = -(e ** g1_power) * P
        G1i = _inv(G1)
        G = np.block([[G1, I / e], [O, I]])
        Gi = np.block([[G1i, -G1i / e], [O, I]])
        return G @ (Am1 / e) @ Gi, G @ A0 @ Gi, G @ (e * Ainf) @ Gi


def linear_degeneration_demo(eps_grid=DEFAULT_GRID, seed: int = 0, n_draws: int = 3) -> ConvergenceReport:
    """Worked linear-side degeneration of an HTL form.

    Conjugates the unramified (2)(2),(2)(11) system by the shear gauge and
    checks that its coefficients tend to those of the (11)_2,(2)(2) Lax
    matrix at rate O(eps).  The details record the deviation of the limit
    from the Lax-built coefficient and its classified spectral type.
    """
    from .htl import classify_system
    from .lax import build_lax_from_pair

    grid = _check_grid(eps_grid)
    rule = get_rule("(2)(2),(2)(11) -> (2)(2),(11)_2")
    rng = np.random.default_rng(seed)
    draws = [random_target(rule, rng) for _ in range(n_draws)]
    res = []
    for e in grid:
        worst = 0.0
        for th, Qt, Pt, tt in draws:
            got = demo_conjugated(e, th, Qt, Pt, tt)
            with mp.workdps(WORKING_DPS):
                lim = _demo_limit(_mp_theta(th), _to_mp(Qt), _to_mp(Pt), mp.mpc(tt))
                worst = max(worst, float(max(_max_abs(g - l) for g, l in zip(got, lim))))
        res.append(worst)
    th, Qt, Pt, tt = draws[0]
    with mp.workdps(WORKING_DPS):
        lim = _demo_limit(_mp_theta(th), _to_mp(Qt), _to_mp(Pt), mp.mpc(tt))
        alt = demo_conjugated(grid[-1], th, Qt, Pt, tt, g1_power=1)
        alt_dev = float(max(_max_abs(g - l) for g, l in zip(alt, lim)))
    A0, A1, A2 = (np.array(m, dtype=complex) for m in _demo_limit(th, Qt, Pt, tt))
    limit = LinearSystem.build(4, [(0, [A1, A0])], [A2])
    lax = build_lax_from_pair("(11)_2,(2)(2)", th, Qt, Pt, tt).aux
    lax_dev = max(float(np.abs(A0 - lax["A0"]).max()), float(np.abs(A1 - lax["A1"]).max()),
                  float(np.abs(A2 - lax["A2"]).max()))
    spectral = classify_system(limit).spectral_type.text
    slope = fit_slope(grid, res)
    ok = bool(slope >= SLOPE_THRESHOLD and lax_dev < 1e-12 and spectral == "(11)_2,(2)(2)")
    return ConvergenceReport("(2)(2),(2)(11) -> (11)_2,(2)(2) [linear]", grid, res, slope, ok, "linear",
                             False, {"lax_deviation": lax_dev, "spectral_type": spectral, "seed": seed,
                              "g1_plus_eps_deviation": alt_dev})
