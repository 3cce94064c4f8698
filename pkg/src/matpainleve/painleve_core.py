"""The eight matrix Painleve Hamiltonian systems on pairs of 2x2 matrices.

Every function that only multiplies, adds and inverts matrices is written
so that it also accepts numpy object arrays holding mpmath numbers; the
degeneration checks rely on that to work at extended precision.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import K, inv2, mat_commutator


class SystemId(str, enum.Enum):
    MatVI = "MatVI"
    MatV = "MatV"
    MatIV = "MatIV"
    MatIII_D6 = "MatIII_D6"
    MatIII_D7 = "MatIII_D7"
    MatIII_D8 = "MatIII_D8"
    MatII = "MatII"
    MatI = "MatI"


class SingularityError(ArithmeticError):
    """A fixed singularity or a vanishing denominator was hit."""


class IntegrationError(RuntimeError):
    """Step-size control gave up."""


@dataclass(frozen=True)
class HamiltonianParams:
    alpha: complex = 0
    beta: complex = 0
    gamma: complex = 0
    delta: complex = 0
    zeta: complex = 0


@dataclass(frozen=True)
class CanonicalState:
    """Scalar canonical coordinates, gauge scalar ``u`` and time ``t``.

    The same container is used for tangent vectors, in which case ``t``
    holds ``dt`` (normally 1).
    """

    q1: complex
    p1: complex
    q2: complex
    p2: complex
    u: complex = 1
    t: complex = 0

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.p1, self.q2, self.p2, self.u, self.t], dtype=complex)

    @classmethod
    def from_array(cls, a) -> "CanonicalState":
        return cls(*(complex(v) for v in a))

    def norm(self) -> float:
        return float(np.max(np.abs(self.as_array()[:5])))


@dataclass(frozen=True)
class MatrixPair:
    """``(Q, P)`` with ``[P, Q] = zeta K``."""

    Q: np.ndarray
    P: np.ndarray
    zeta: complex = 0

    def commutator_defect(self) -> float:
        c = mat_commutator(self.P, self.Q) - self.zeta * K
        return float(np.max(np.abs(c)))

    def check(self, tol: float = 1e-10) -> "MatrixPair":
        scale = 1 + max(float(np.max(np.abs(self.Q))), float(np.max(np.abs(self.P)))) ** 2
        if self.commutator_defect() > tol * scale:
            raise ValueError(f"[P,Q] differs from zeta K by {self.commutator_defect():.3e}")
        return self


def _eye(like):
    if like.dtype == object:
        return np.array([[1, 0], [0, 1]], dtype=object)
    return np.eye(2, dtype=complex)


def _tr(a):
    return a[0, 0] + a[1, 1]


# --------------------------------------------------------------------------
# Hamiltonians


def trace_hamiltonian(sid: SystemId, hp: HamiltonianParams, Q, P, t):
    """Value of the trace Hamiltonian ``H`` (not ``t H`` or ``t(t-1) H``)."""
    sid = SystemId(sid)
    I = _eye(Q)
    a, b, g, d, z = hp.alpha, hp.beta, hp.gamma, hp.delta, hp.zeta
    if sid is SystemId.MatVI:
        Kd = I * 1
        Kd[1, 1] = -Kd[1, 1]
        QQ1 = Q @ (Q - I)
        lin = ((d * I - z * Kd) @ QQ1 - (2 * a + b + g + d) * Q @ (Q - t * I)
               + g * (Q - I) @ (Q - t * I))
        val = _tr(QQ1 @ (Q - t * I) @ P @ P + lin @ P + a * (a + b) * Q)
        den = t * (t - 1)
    elif sid is SystemId.MatV:
        val = _tr(P @ (P + t * I) @ Q @ (Q - I) + b * P @ Q + g * P - (a + g) * t * Q)
        den = t
    elif sid is SystemId.MatIV:
        val = _tr(P @ Q @ (P - Q - t * I) + b * P + a * Q)
        den = 1
    elif sid is SystemId.MatIII_D6:
        val = _tr(P @ P @ Q @ Q - (Q @ Q - b * Q - t * I) @ P - a * Q)
        den = t
    elif sid is SystemId.MatIII_D7:
        val = _tr(P @ P @ Q @ Q + a * P @ Q + t * P + Q)
        den = t
    elif sid is SystemId.MatIII_D8:
        val = _tr(P @ P @ Q @ Q + P @ Q - Q - t * inv2(Q))
        den = t
    elif sid is SystemId.MatII:
        val = _tr(P @ P - (Q @ Q + t * I) @ P - a * Q)
        den = 1
    else:
        val = _tr(P @ P - Q @ Q @ Q - t * Q)
        den = 1
    if den == 0:
        raise SingularityError(f"t = {t} is a fixed singularity of {sid.value}")
    return val / den


def hamiltonian(sid: SystemId, hp: HamiltonianParams, mp: MatrixPair, t):
    """Trace Hamiltonian evaluated on a matrix pair."""
    return trace_hamiltonian(sid, hp, mp.Q, mp.P, t)


def nonabelian_rhs(sid: SystemId, hp: HamiltonianParams, Q, P, t):
    """``(dQ/dt, dP/dt)`` of the matrix (non-abelian) form of the system."""
    sid = SystemId(sid)
    I = _eye(Q)
    a, b, g, d = hp.alpha, hp.beta, hp.gamma, hp.delta
    if sid is SystemId.MatVI:
        e = -2 * a - b - g - d
        Qm1, Qmt = Q - I, Q - t * I
        dQ = (Qmt @ P @ Q @ Qm1 + Q @ Qm1 @ P @ Qmt + d * Q @ Qm1 + e * Q @ Qmt + g * Qm1 @ Qmt)
        dP = (-Qm1 @ P @ Qmt @ P - P @ Qmt @ P @ Q - P @ Q @ Qm1 @ P
              - (d * (P @ Qm1 + Q @ P) + e * (P @ Qmt + Q @ P) + g * (P @ Qmt + Qm1 @ P))
              - a * (a + b) * I)
        den = t * (t - 1)
    elif sid is SystemId.MatV:
        Pt = P + t * I
        dQ = Q @ (Q - I) @ Pt + P @ Q @ (Q - I) + b * Q + g * I
        dP = -(Q - I) @ P @ Pt - P @ Pt @ Q - b * P + (a + g) * t * I
        den = t
    elif sid is SystemId.MatIV:
        dQ = Q @ (P - Q - t * I) + P @ Q + b * I
        dP = P @ (-P + Q + t * I) + Q @ P - a * I
        den = 1
    elif sid is SystemId.MatIII_D6:
        dQ = 2 * Q @ P @ Q - Q @ Q + b * Q + t * I
        dP = -2 * P @ Q @ P + P @ Q + Q @ P - b * P + a * I
        den = t
    elif sid is SystemId.MatIII_D7:
        dQ = 2 * Q @ P @ Q + a * Q + t * I
        dP = -2 * P @ Q @ P - a * P - I
        den = t
    elif sid is SystemId.MatIII_D8:
        Qi = inv2(Q)
        dQ = 2 * Q @ P @ Q + Q
        dP = -2 * P @ Q @ P - P + I - t * Qi @ Qi
        den = t
    elif sid is SystemId.MatII:
        dQ = 2 * P - Q @ Q - t * I
        dP = P @ Q + Q @ P + a * I
        den = 1
    else:
        dQ = 2 * P
        dP = 3 * Q @ Q + t * I
        den = 1
    if den == 0:
        raise SingularityError(f"t = {t} is a fixed singularity of {sid.value}")
    return dQ / den, dP / den


def fixed_singularities(sid: SystemId) -> tuple:
    sid = SystemId(sid)
    if sid is SystemId.MatVI:
        return (0, 1)
    if sid in (SystemId.MatV, SystemId.MatIII_D6, SystemId.MatIII_D7, SystemId.MatIII_D8):
        return (0,)
    return ()


# --------------------------------------------------------------------------
# Canonical coordinates


def pair_from_coordinates(q1, p1, q2, p2, u, c):
    """``Q = [[q1, u], [-q2/u, q1]]`` and
    ``P = [[p1/2, -p2 u], [(p2 q2 - c)/u, p1/2]]``, so that ``[P, Q] = c K``."""
    if u == 0:
        raise ValueError("the gauge scalar u must be nonzero")
    obj = any(not isinstance(v, (int, float, complex, np.number)) for v in (q1, p1, q2, p2, u, c))
    dt = object if obj else complex
    Q = np.array([[q1, u], [-q2 / u, q1]], dtype=dt)
    P = np.array([[p1 / 2, -p2 * u], [(p2 * q2 - c) / u, p1 / 2]], dtype=dt)
    return Q, P


def coordinates_from_pair(Q, P):
    """Inverse of :func:`pair_from_coordinates` on its image:
    returns ``(q1, p1, q2, p2, u)``."""
    u = Q[0, 1]
    if u == 0:
        raise ValueError("Q[0,1] vanishes; the pair is not in canonical form")
    q1 = (Q[0, 0] + Q[1, 1]) / 2
    q2 = -Q[1, 0] * u
    p1 = P[0, 0] + P[1, 1]
    p2 = -P[0, 1] / u
    return q1, p1, q2, p2, u


def pair_velocity(q1, p1, q2, p2, u, c, dq1, dp1, dq2, dp2, du):
    """Derivative of the canonical-form pair along a coordinate velocity."""
    dQ = np.array([[dq1, du], [-(dq2 * u - q2 * du) / u ** 2, dq1]], dtype=complex)
    d21 = ((dp2 * q2 + p2 * dq2) * u - (p2 * q2 - c) * du) / u ** 2
    dP = np.array([[dp1 / 2, -(dp2 * u + p2 * du)], [d21, dp1 / 2]], dtype=complex)
    return dQ, dP


def gradient_fd(f: Callable, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a holomorphic function of several
    complex variables, step ``h = rel_step * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=complex)
    g = np.empty_like(x)
    for i in range(len(x)):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2 * h)
    return g


# --------------------------------------------------------------------------
# Numerical integration


def rk4_step(rhs: Callable, y: np.ndarray, t: complex, h: complex) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_path(rhs: Callable, y0: np.ndarray, t0: complex, t1: complex, n_steps: int,
             tol: float | None = 1e-10, max_halvings: int = 10) -> list:
    """Classical RK4 along the straight segment ``t0 -> t1``.

    With ``tol`` set, every macro step is compared with two half steps and
    refined by halving (at most ``max_halvings`` times) until the two agree
    to ``tol * (1 + |y|)``.  Returns the states at the ``n_steps + 1`` grid
    points.
    """
    y = np.array(y0, dtype=complex)
    out = [y.copy()]
    if n_steps == 0:
        return out
    h = (t1 - t0) / n_steps
    t = t0
    for _ in range(n_steps):
        if tol is None:
            y = rk4_step(rhs, y, t, h)
        else:
            y = _controlled_step(rhs, y, t, h, tol, max_halvings)
        t = t + h
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state near t = {t}")
        out.append(y.copy())
    return out


def _controlled_step(rhs, y, t, h, tol, max_halvings):
    for level in range(max_halvings + 1):
        n = 2 ** level
        sub = h / n
        coarse = y.copy()
        fine = y.copy()
        tt = t
        for _ in range(n):
            coarse = rk4_step(rhs, coarse, tt, sub)
            half = rk4_step(rhs, fine, tt, sub / 2)
            fine = rk4_step(rhs, half, tt + sub / 2, sub / 2)
            tt = tt + sub
        err = float(np.max(np.abs(coarse - fine)))
        if err <= tol * (1 + float(np.max(np.abs(fine)))):
            return fine
    raise IntegrationError(f"step rejected after {max_halvings} halvings at t = {t}")


def check_path(sid: SystemId, t0: complex, t1: complex, min_distance: float = 1e-3) -> None:
    """Reject straight paths that pass within ``min_distance`` of a fixed
    singularity."""
    seg = t1 - t0
    for s in fixed_singularities(sid):
        if seg == 0:
            dist = abs(t0 - s)
        else:
            lam = ((s - t0) * np.conj(seg)).real / abs(seg) ** 2
            lam = min(1.0, max(0.0, lam))
            dist = abs(t0 + lam * seg - s)
        if dist < min_distance:
            raise SingularityError(f"path passes within {dist:.2e} of the fixed singularity t = {s}")


def _principal_sqrt(z):
    return cmath.sqrt(z)


# --------------------------------------------------------------------------
# State-level operations (variant data lives in :mod:`matpainleve.catalog`)


def _theta(sid, th):
    from .catalog import ThetaParams, get_variant

    if isinstance(th, ThetaParams):
        return th
    return ThetaParams(get_variant(sid).name, th)


def zeta_of(sid, th) -> complex:
    """Commutator constant of the variant carried by ``th``."""
    from .catalog import zeta_value

    th = _theta(sid, th)
    return zeta_value(th.variant, th)


def build_matrix_pair(sid, th, s: CanonicalState) -> MatrixPair:
    """Canonical-form pair ``(Q, P)`` of a state; ``[P, Q] = zeta K`` holds
    identically."""
    th = _theta(sid, th)
    c = zeta_of(sid, th)
    Q, P = pair_from_coordinates(s.q1, s.p1, s.q2, s.p2, s.u, c)
    return MatrixPair(Q, P, c)


def state_from_pair(Q, P, t) -> CanonicalState:
    q1, p1, q2, p2, u = coordinates_from_pair(Q, P)
    return CanonicalState(complex(q1), complex(p1), complex(q2), complex(p2), complex(u), complex(t))


def gauge_rate(sid, th, s: CanonicalState) -> complex:
    """``(du/dt)/u`` of the variant; for variants without a printed gauge
    equation it is read off the (1,2) entry of the matrix flow."""
    from .catalog import get_variant, matrix_rhs

    th = _theta(sid, th)
    var = get_variant(th.variant)
    if var.u_rate is not None:
        return var.u_rate(th.values, s.q1, s.p1, s.q2, s.p2, s.t)
    mp = build_matrix_pair(sid, th, s)
    dQ, _ = matrix_rhs(var, th, mp.Q, mp.P, s.t)
    return dQ[0, 1] / s.u


def hamiltonian_rhs(sid, hp: HamiltonianParams, th, s: CanonicalState, rel_step: float = 1e-6) -> CanonicalState:
    """Tangent ``(dq1, dp1, dq2, dp2, du, dt=1)`` of the canonical flow.

    ``dq_i = dH/dp_i`` and ``dp_i = -dH/dq_i`` by central differences of the
    trace Hamiltonian on the canonical-form pair; ``du`` from the gauge
    equation.
    """
    sid = SystemId(sid)
    th = _theta(sid, th)
    c = zeta_of(sid, th)
    if s.u == 0:
        raise ValueError("the gauge scalar u must be nonzero")
    for sing in fixed_singularities(sid):
        if abs(s.t - sing) < 1e-8:
            raise SingularityError(f"t = {s.t} at a fixed singularity")

    def h(x):
        Q, P = pair_from_coordinates(x[0], x[1], x[2], x[3], s.u, c)
        return trace_hamiltonian(sid, hp, Q, P, s.t)

    g = gradient_fd(h, np.array([s.q1, s.p1, s.q2, s.p2]), rel_step)
    du = s.u * gauge_rate(sid, th, s)
    return CanonicalState(g[1], -g[0], g[3], -g[2], du, 1)


def hamiltonian_matrix_velocity(sid, hp, th, s: CanonicalState):
    """``(dQ/dt, dP/dt)`` implied by :func:`hamiltonian_rhs`."""
    th = _theta(sid, th)
    v = hamiltonian_rhs(sid, hp, th, s)
    return pair_velocity(s.q1, s.p1, s.q2, s.p2, s.u, zeta_of(sid, th), v.q1, v.p1, v.q2, v.p2, v.u)


def integrate(sid, hp: HamiltonianParams, th, s0: CanonicalState, t1, n_steps: int,
              mode: str = "hamiltonian", tol: float | None = 1e-10) -> list:
    """RK4 trajectory from ``s0.t`` to ``t1`` along a straight segment.

    ``mode="hamiltonian"`` integrates the canonical coordinates with
    :func:`hamiltonian_rhs`; ``mode="matrix"`` integrates ``(Q, P)`` with the
    variant's matrix flow and converts back.  Returns ``n_steps + 1`` states.
    """
    from .catalog import matrix_rhs

    sid = SystemId(sid)
    th = _theta(sid, th)
    t0 = complex(s0.t)
    t1 = complex(t1)
    check_path(sid, t0, t1)
    if n_steps == 0:
        return [s0]
    if mode == "hamiltonian":

        def rhs(t, y):
            st = CanonicalState(y[0], y[1], y[2], y[3], y[4], t)
            if abs(st.u) < 1e-8:
                raise SingularityError("gauge scalar u approached 0")
            v = hamiltonian_rhs(sid, hp, th, st)
            return np.array([v.q1, v.p1, v.q2, v.p2, v.u])

        y0 = s0.as_array()[:5]
        path = rk4_path(rhs, y0, t0, t1, n_steps, tol)
        h = (t1 - t0) / n_steps
        return [CanonicalState(*y, t0 + k * h) for k, y in enumerate(path)]
    if mode == "matrix":
        mp = build_matrix_pair(sid, th, s0)

        def rhs(t, y):
            Q = y[:4].reshape(2, 2)
            P = y[4:].reshape(2, 2)
            dQ, dP = matrix_rhs(th.variant, th, Q, P, t)
            return np.concatenate([dQ.ravel(), dP.ravel()])

        y0 = np.concatenate([mp.Q.ravel(), mp.P.ravel()])
        path = rk4_path(rhs, y0, t0, t1, n_steps, tol)
        h = (t1 - t0) / n_steps
        return [state_from_pair(y[:4].reshape(2, 2), y[4:].reshape(2, 2), t0 + k * h) for k, y in enumerate(path)]
    raise ValueError(f"unknown integration mode {mode!r}")


def integrate_pairs(variant, th, Q0, P0, t0, t1, n_steps: int, tol: float | None = 1e-10) -> list:
    """Matrix-flow trajectory returned as ``(Q, P, t)`` triples (no
    conversion to canonical coordinates)."""
    from .catalog import get_variant, matrix_rhs

    var = get_variant(variant)
    th = _theta(var.name, th)
    check_path(var.system, complex(t0), complex(t1))

    def rhs(t, y):
        dQ, dP = matrix_rhs(var, th, y[:4].reshape(2, 2), y[4:].reshape(2, 2), t)
        return np.concatenate([dQ.ravel(), dP.ravel()])

    y0 = np.concatenate([np.asarray(Q0, complex).ravel(), np.asarray(P0, complex).ravel()])
    path = rk4_path(rhs, y0, complex(t0), complex(t1), n_steps, tol)
    h = (complex(t1) - complex(t0)) / max(n_steps, 1)
    return [(y[:4].reshape(2, 2), y[4:].reshape(2, 2), complex(t0) + k * h) for k, y in enumerate(path)]
