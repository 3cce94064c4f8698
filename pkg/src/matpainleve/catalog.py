"""Table of system variants: one matrix Painleve Hamiltonian realized by a
4x4 linear system of a given spectral type.

Nine variants carry explicit Lax pairs (see :mod:`matpainleve.lax`).  Six
more unramified variants appear only as sources of degenerations; for them
the Hamiltonian parameters are fixed so that every degeneration leaving
them has a finite limit, and the gauge scalar follows the matrix flow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .painleve_core import HamiltonianParams, SystemId, nonabelian_rhs

THETA_NAMES = ("theta0", "theta1", "thetat", "thetainf1", "thetainf2", "thetainf3")


@dataclass(frozen=True)
class Variant:
    name: str
    system: SystemId
    pattern: str
    theta_names: tuple
    fuchs: Mapping  # coefficients of the linear Fuchs-Hukuhara relation
    zeta: Mapping  # coefficients of the commutator constant
    params: Callable  # theta dict -> HamiltonianParams without zeta
    u_rate: Callable | None = None  # (th, q1, p1, q2, p2, t) -> (du/dt)/u
    matrix_rhs: Callable | None = None  # (th, hp, Q, P, t) -> (dQ, dP) overriding nonabelian_rhs
    has_lax: bool = False


class ThetaParams:
    """Residue exponents of one variant, checked against its Fuchs-Hukuhara
    relation.  Missing ``thetainf3`` is solved from that relation."""

    def __init__(self, variant: str, values: Mapping | None = None, check: bool = True, **kw):
        var = get_variant(variant)
        vals = dict(values or {})
        vals.update(kw)
        unknown = set(vals) - set(var.theta_names)
        if unknown:
            raise ValueError(f"{variant} has no exponents {sorted(unknown)}")
        if "thetainf3" in var.theta_names and "thetainf3" not in vals:
            rest = sum(var.fuchs[k] * vals[k] for k in var.theta_names if k != "thetainf3")
            vals["thetainf3"] = -rest / var.fuchs["thetainf3"]
        missing = [k for k in var.theta_names if k not in vals]
        if missing:
            raise ValueError(f"{variant} needs exponents {missing}")
        self.variant = var.name
        self.values = {k: vals[k] for k in var.theta_names}
        if check:
            self.check()

    def __getitem__(self, k):
        return self.values[k]

    def get(self, k, default=0):
        return self.values.get(k, default)

    def fuchs_defect(self):
        var = get_variant(self.variant)
        return sum(var.fuchs[k] * self.values[k] for k in var.theta_names)

    def check(self, tol: float = 1e-12):
        scale = 1 + sum(abs(self.values[k]) for k in self.values)
        if abs(self.fuchs_defect()) > tol * scale:
            raise ValueError(f"Fuchs-Hukuhara relation of {self.variant} violated by {abs(self.fuchs_defect()):.3e}")
        return self

    @property
    def theta_sum(self):
        """``theta0 + theta1 + thetat`` (used by the sixth system)."""
        return sum(self.values.get(k, 0) for k in ("theta0", "theta1", "thetat"))

    def __repr__(self):
        return f"ThetaParams({self.variant!r}, {self.values})"


def _lin(coeffs: Mapping, th) -> complex:
    return sum(c * th[k] for k, c in coeffs.items())


# --- Hamiltonian parameter maps --------------------------------------------

def _p_vi(th):
    return HamiltonianParams(alpha=-th["theta0"] - th["thetat"] - th["thetainf1"], beta=-th["theta1"],
                             gamma=th["thetat"], delta=th["theta0"] + 1)


def _p_d6_ram(th):
    return HamiltonianParams(alpha=th["theta0"], beta=-2 * th["thetainf1"] + 1)


def _p_d6_1122(th):
    return HamiltonianParams(alpha=th["theta1"], beta=th["theta1"] - th["theta0"])


def _p_ii_211(th):
    return HamiltonianParams(alpha=-2 * th["thetainf1"] + 1)


def _p_ii_22(th):
    return HamiltonianParams(alpha=-th["theta0"])


def _p_d7_211(th):
    return HamiltonianParams(alpha=2 * th["thetainf1"])


def _p_d7_22(th):
    return HamiltonianParams(alpha=-th["theta0"])


def _p_none(th):
    return HamiltonianParams()


def _p_v_2222(th):
    return HamiltonianParams(alpha=th["theta0"] + th["theta1"] + 3 * th["thetainf1"] - 1,
                             beta=-2 * th["theta0"] - th["theta1"] - 2 * th["thetainf1"],
                             gamma=-th["thetainf1"])


def _p_v_2112(th):
    return HamiltonianParams(alpha=-th["thetainf1"], beta=th["theta0"] - th["theta1"], gamma=th["theta1"])


def _p_iv_22(th):
    return HamiltonianParams(alpha=th["theta0"] + 2 * th["thetainf1"] - 1, beta=th["thetainf1"])


def _p_iv_211(th):
    return HamiltonianParams(alpha=-th["thetainf1"], beta=th["theta0"])


def _p_d6_unram(th):
    return HamiltonianParams(alpha=th["theta0"] + th["thetainf1"], beta=th["theta0"] + 2 * th["thetainf1"])


def _p_ii_unram(th):
    return HamiltonianParams(alpha=th["thetainf1"])


# --- gauge-scalar equations (du/dt)/u -----------------------------------------

def _u_vi(th, q1, p1, q2, p2, t):
    t0, t1, tt, i1, i2 = th["theta0"], th["theta1"], th["thetat"], th["thetainf1"], th["thetainf2"]
    w = 2 * p2 * q2
    num = (-2 * q1 * (q1 - 1) * (q1 - t) * p2
           + (q1 * (q1 - 1) + q1 * (q1 - t) + (q1 - 1) * (q1 - t) - q2) * p1
           + (w - t1 - tt - 2 * i2) * q1
           + (w - t0 - 2 * t1 - tt - 2 * i1 - 2 * i2 + 1) * (q1 - 1)
           + (w + t0 + t1 + 2 * tt + 2 * i1 - 1) * (q1 - t))
    return num / (t * (t - 1))


def _u_d6_ram(th, q1, p1, q2, p2, t):
    return (-2 * q1 * (q1 * p2 + 1) + 2 * (p1 * q1 + p2 * q2)
            - 2 * (th["theta0"] + 2 * th["thetainf1"] + th["thetainf2"]) + 1) / t


def _u_d6_1122(th, q1, p1, q2, p2, t):
    return (2 * (p1 * q1 + p2 * q2) - 2 * q1 * (q1 * p2 + 1) - th["theta0"] + th["theta1"]) / t


def _u_ii(th, q1, p1, q2, p2, t):
    return -2 * (q1 + p2)


def _u_d7_211(th, q1, p1, q2, p2, t):
    return 2 * (p1 * q1 + p2 * q2 - p2 * q1 ** 2 - th["thetainf2"]) / t


def _u_d7_22(th, q1, p1, q2, p2, t):
    return (2 * p1 * q1 + 2 * p2 * q2 - 2 * p2 * q1 ** 2 - 3 * th["theta0"] - 2 * th["thetainf2"]) / t


def _u_i(th, q1, p1, q2, p2, t):
    return -2 * p2


def _u_d8(th, q1, p1, q2, p2, t):
    return (2 * p1 * q1 + 2 * p2 * q2 - 2 * p2 * q1 ** 2 - 2 * th["thetainf2"] + 1) / t


def _rhs_1122(th, hp, Q, P, t):
    # the (11)_2,22,22 pair uses the commutator relation to symmetrize QPQ
    I = np.eye(2, dtype=Q.dtype) if Q.dtype != object else np.array([[1, 0], [0, 1]], dtype=object)
    d = th["theta0"] - th["theta1"]
    dQ = P @ Q @ Q + Q @ Q @ P - Q @ Q - d * Q + t * I
    dP = -P @ P @ Q - Q @ P @ P + P @ Q + Q @ P + d * P + th["theta1"] * I
    return dQ / t, dP / t


_F = dict
VARIANTS = {}


def _add(v: Variant):
    VARIANTS[v.name] = v


_add(Variant("22,22,22,211", SystemId.MatVI, "1+1+1+1",
             ("theta0", "theta1", "thetat", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, theta1=2, thetat=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, theta1=1, thetat=1, thetainf1=1, thetainf2=1), _p_vi, _u_vi, has_lax=True))
_add(Variant("(2)_2,22,211", SystemId.MatIII_D6, "3/2+1+1",
             ("theta0", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, thetainf1=1, thetainf2=1), _p_d6_ram, _u_d6_ram, has_lax=True))
_add(Variant("(11)_2,22,22", SystemId.MatIII_D6, "3/2+1+1",
             ("theta0", "theta1", "thetainf2", "thetainf3"),
             _F(theta0=2, theta1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, theta1=1, thetainf2=1), _p_d6_1122, _u_d6_1122, _rhs_1122, has_lax=True))
_add(Variant("(((2)))_2,211", SystemId.MatII, "5/2+1",
             ("thetainf1", "thetainf2", "thetainf3"),
             _F(thetainf1=2, thetainf2=1, thetainf3=1),
             _F(thetainf1=1, thetainf2=1), _p_ii_211, _u_ii, has_lax=True))
_add(Variant("(((11)))_2,22", SystemId.MatII, "5/2+1",
             ("theta0", "thetainf2", "thetainf3"),
             _F(theta0=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, thetainf2=1), _p_ii_22, _u_ii, has_lax=True))
_add(Variant("(2)_2,(2)(11)", SystemId.MatIII_D7, "3/2+2",
             ("thetainf1", "thetainf2", "thetainf3"),
             _F(thetainf1=2, thetainf2=1, thetainf3=1),
             _F(thetainf1=1, thetainf2=1), _p_d7_211, _u_d7_211, has_lax=True))
_add(Variant("(11)_2,(2)(2)", SystemId.MatIII_D7, "3/2+2",
             ("theta0", "thetainf2", "thetainf3"),
             _F(theta0=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, thetainf2=1), _p_d7_22, _u_d7_22, has_lax=True))
_add(Variant("(((((11)))))_2", SystemId.MatI, "7/2",
             ("thetainf2", "thetainf3"),
             _F(thetainf2=1, thetainf3=1),
             _F(thetainf2=1), _p_none, _u_i, has_lax=True))
_add(Variant("(2)_2,(11)_2", SystemId.MatIII_D8, "3/2+3/2",
             ("thetainf2", "thetainf3"),
             _F(thetainf2=1, thetainf3=1),
             _F(thetainf2=1), _p_none, _u_d8, has_lax=True))
# unramified degeneration sources without a Lax pair here
_add(Variant("(2)(2),22,211", SystemId.MatV, "2+1+1",
             ("theta0", "theta1", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, theta1=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, theta1=1, thetainf1=1, thetainf2=1), _p_v_2222))
_add(Variant("(2)(11),22,22", SystemId.MatV, "2+1+1",
             ("theta0", "theta1", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, theta1=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, theta1=1, thetainf1=1, thetainf2=1), _p_v_2112))
_add(Variant("((2))((2)),211", SystemId.MatIV, "3+1",
             ("theta0", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, thetainf1=1, thetainf2=1), _p_iv_22))
_add(Variant("((2))((11)),22", SystemId.MatIV, "3+1",
             ("theta0", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, thetainf1=1, thetainf2=1), _p_iv_211))
_add(Variant("(2)(2),(2)(11)", SystemId.MatIII_D6, "2+2",
             ("theta0", "thetainf1", "thetainf2", "thetainf3"),
             _F(theta0=2, thetainf1=2, thetainf2=1, thetainf3=1),
             _F(theta0=1, thetainf1=1, thetainf2=1), _p_d6_unram))
_add(Variant("(((2)))(((11)))", SystemId.MatII, "4",
             ("thetainf1", "thetainf2", "thetainf3"),
             _F(thetainf1=2, thetainf2=1, thetainf3=1),
             _F(thetainf1=1, thetainf2=1), _p_ii_unram))

#: the nine variants with explicit Lax pairs
LAX_CATALOG = tuple(v.name for v in VARIANTS.values() if v.has_lax)

#: the variant used for each system when only the system is named
DEFAULT_VARIANT = {
    SystemId.MatVI: "22,22,22,211",
    SystemId.MatV: "(2)(2),22,211",
    SystemId.MatIV: "((2))((2)),211",
    SystemId.MatIII_D6: "(2)_2,22,211",
    SystemId.MatIII_D7: "(2)_2,(2)(11)",
    SystemId.MatIII_D8: "(2)_2,(11)_2",
    SystemId.MatII: "(((2)))_2,211",
    SystemId.MatI: "(((((11)))))_2",
}

_ALIASES = {"(2)(2),(11)_2": "(11)_2,(2)(2)"}


def normalize_name(name: str) -> str:
    name = name.replace(" ", "")
    return _ALIASES.get(name, name)


def get_variant(name) -> Variant:
    if isinstance(name, Variant):
        return name
    if isinstance(name, SystemId) or name in SystemId.__members__:
        return VARIANTS[DEFAULT_VARIANT[SystemId(name)]]
    key = normalize_name(name)
    if key not in VARIANTS:
        raise KeyError(f"unknown system variant {name!r}")
    return VARIANTS[key]


def zeta_value(variant, th) -> complex:
    """Commutator constant ``c`` with ``[P, Q] = c K``."""
    var = get_variant(variant)
    vals = th.values if isinstance(th, ThetaParams) else th
    return _lin(var.zeta, vals)


def params_for(variant, th) -> HamiltonianParams:
    """Hamiltonian parameters ``(alpha, beta, gamma, delta, zeta)`` of a variant."""
    var = get_variant(variant)
    vals = th.values if isinstance(th, ThetaParams) else th
    hp = var.params(vals)
    return HamiltonianParams(hp.alpha, hp.beta, hp.gamma, hp.delta, _lin(var.zeta, vals))


def matrix_rhs(variant, th, Q, P, t):
    """Matrix flow ``(dQ/dt, dP/dt)`` of a variant."""
    var = get_variant(variant)
    vals = th.values if isinstance(th, ThetaParams) else th
    hp = params_for(var, vals)
    if var.matrix_rhs is not None:
        return var.matrix_rhs(vals, hp, Q, P, t)
    return nonabelian_rhs(var.system, hp, Q, P, t)


def random_theta(variant, rng: np.random.Generator, scale: float = 1.0, rational: bool = True) -> ThetaParams:
    """Random exponents in ``[-scale, scale]``; with ``rational`` they are
    multiples of 1/97 (avoids accidental coincidences)."""
    var = get_variant(variant)
    vals = {}
    for k in var.theta_names:
        if k == "thetainf3":
            continue
        x = rng.uniform(-scale, scale)
        vals[k] = round(x * 97) / 97 if rational else x
    return ThetaParams(var.name, vals)
