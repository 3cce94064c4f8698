"""Lax pairs ``dY/dx = A Y``, ``dY/dt = B Y`` of the nine catalog variants
and the zero-curvature residual ``dA/dt - dB/dx + [A, B]``.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .algebra import LinearSystem, mat_commutator
from .catalog import LAX_CATALOG, ThetaParams, get_variant, params_for, zeta_value
from .painleve_core import (CanonicalState, build_matrix_pair, hamiltonian_rhs, pair_from_coordinates,
                            rk4_step)

I2 = np.eye(2, dtype=complex)
O2 = np.zeros((2, 2), dtype=complex)
N4 = np.block([[O2, I2], [O2, O2]])


class LaxError(ValueError):
    """Auxiliary matrices of a Lax pair are not defined at this point."""


@dataclass
class LaxPair:
    A: LinearSystem
    B: LinearSystem
    gauge_U: np.ndarray
    aux: dict = field(default_factory=dict)


def _blk(a, b, c, d):
    return np.block([[a, b], [c, d]])


def _inv(m, what):
    if abs(np.linalg.det(m)) < 1e-12 * max(1.0, float(np.max(np.abs(m)))) ** 2:
        raise LaxError(f"{what} is not invertible")
    return np.linalg.inv(m)


def _solve(m, rhs, what):
    """``m^{-1} rhs``; for singular ``m`` the least-squares solution is used
    when the system is consistent (for instance when ``rhs`` vanishes)."""
    if abs(np.linalg.det(m)) >= 1e-12 * max(1.0, float(np.max(np.abs(m)))) ** 2:
        return np.linalg.solve(m, rhs)
    x, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    if np.max(np.abs(m @ x - rhs)) > 1e-10 * (1 + float(np.max(np.abs(rhs)))):
        raise LaxError(f"{what} is not invertible")
    return x


def _theta_diag(th):
    return np.diag([th["thetainf2"], th["thetainf3"]]).astype(complex)


def _conj(m, v, vi):
    return vi @ m @ v


# ---------------------------------------------------------------------------
# matrix U-equations  (dU/dt) U^{-1}


def _u_gen_vi(th, Q, P, t):
    tsum = th["theta0"] + th["theta1"] + th["thetat"]
    g = (-th["theta1"] * Q + (Q - t * I2) @ (P @ Q + Q @ P) + 2 * (tsum + th["thetainf1"]) * Q
         - th["thetat"] * t * I2)
    return g / (t * (t - 1))


def _u_gen_d6(th, Q, P, t):
    return (-2 * P @ Q + 2 * th["thetainf1"] * I2) / t


def _u_gen_ii(th, Q, P, t):
    return 2 * Q


def _u_gen_d7(th, Q, P, t):
    return 2 * (Q @ P + th["thetainf1"] * I2) / t


U_GENERATORS = {
    "22,22,22,211": _u_gen_vi,
    "(2)_2,22,211": _u_gen_d6,
    "(((2)))_2,211": _u_gen_ii,
    "(2)_2,(2)(11)": _u_gen_d7,
}


# ---------------------------------------------------------------------------
# constructions


def _lax_vi(th, Q, P, t, U):
    Th = _theta_diag(th)
    t0, t1, tt, i1 = th["theta0"], th["theta1"], th["thetat"], th["thetainf1"]
    tsum = t0 + t1 + tt
    W = Q @ P + (tsum + i1) * I2
    Z = _solve(i1 * I2 - Th, -t1 * W + W @ W - t * (P @ Q + tt * I2) @ P, "thetainf1 - Theta")
    X = _blk(I2, O2, Z, I2)
    V = _blk(U, O2, O2, I2)
    XV = X @ V
    XVi = np.linalg.inv(XV)
    h0 = np.vstack([I2, O2]) @ np.hstack([t0 * I2, Q / t - I2])
    h1 = np.vstack([I2, P @ Q - Th]) @ np.hstack([t1 * I2 - P @ Q + Th, I2])
    ht = np.vstack([I2, t * P]) @ np.hstack([tt * I2 + Q @ P, -Q / t])
    A0, A1, At = (XVi @ h @ XV for h in (h0, h1, ht))
    A = LinearSystem.build(4, [(0, [A0]), (1, [A1]), (t, [At])])
    B = LinearSystem.build(4, [(t, [-At])])
    return A, B, {"Z": Z, "X": X, "A0": A0, "A1": A1, "At": At}


def _lax_d6_ram(th, Q, P, t, U):
    Th = _theta_diag(th)
    t0, i1 = th["theta0"], th["thetainf1"]
    Z = _inv(i1 * I2 - Th, "thetainf1 - Theta") @ (-Q @ P @ Q - t0 * Q - t * I2)
    G1 = _blk(I2, O2, -Z / t, I2)
    G1i = np.linalg.inv(G1)
    V = _blk(U, O2, O2, I2)
    Vi = np.linalg.inv(V)
    h11 = G1 @ _blk(O2, -t * I2, O2, O2) @ G1i
    h10 = G1 @ _blk(P @ Q - i1 * I2, t * P, I2, -P @ Q + i1 * I2) @ G1i
    h00 = np.vstack([P, -(Z @ P + Q @ P + t0 * I2) / t]) @ np.hstack([-Z - Q, -t * I2])
    A00, A11, A10 = (_conj(h, V, Vi) for h in (h00, h11, h10))
    A = LinearSystem.build(4, [(0, [A00]), (1, [A10, A11])])
    B = LinearSystem.build(4, [(1, [-A11 / t])])
    return A, B, {"Z": Z, "G1": G1, "A0(0)": A00, "A1(1)": A11, "A1(0)": A10}


def _lax_d6_1122(th, Q, P, t, U):
    t0, t1 = th["theta0"], th["theta1"]
    A0 = np.vstack([O2, I2]) @ np.hstack([I2 - P, t0 * I2])
    A1 = np.vstack([Q @ P + t1 * I2, P]) @ np.hstack([I2, -Q])
    A = LinearSystem.build(4, [(0, [A0]), (1, [A1])], [t * N4])
    B1 = _blk(P @ Q - t0 * I2, O2, I2, -Q @ P - t1 * I2) / t
    B = LinearSystem.build(4, [], [B1, N4])
    return A, B, {"A0": A0, "A1": A1, "B1": B1}


def _lax_ii_211(th, Q, P, t, U):
    Th = _theta_diag(th)
    i1 = th["thetainf1"]
    Z = _inv(i1 * I2 - Th, "thetainf1 - Theta") @ (P - Q @ Q - t * I2)
    G0 = _blk(I2, O2, Z, I2)
    G0i = np.linalg.inv(G0)
    V = _blk(U, O2, O2, I2)
    Vi = np.linalg.inv(V)
    h2 = G0 @ N4 @ G0i
    h1 = G0 @ _blk(Q, -P, I2, -Q) @ G0i
    h0 = -_blk(i1 * I2, O2, O2, Th)
    A2, A1, A0 = (_conj(h, V, Vi) for h in (h2, h1, h0))
    A = LinearSystem.build(4, [(0, [A0, A1, A2])])
    B = LinearSystem.build(4, [(0, [A2])])
    return A, B, {"Z": Z, "G0": G0, "A0": A0, "A1": A1, "A2": A2}


def _lax_ii_22(th, Q, P, t, U):
    t0 = th["theta0"]
    A1 = _blk(O2, P - t * I2, I2, O2)
    A2 = np.vstack([-Q, I2]) @ np.hstack([-P, -P @ Q + t0 * I2])
    A = LinearSystem.build(4, [(0, [A2])], [A1, N4])
    B1 = _blk(O2, -2 * P + t * I2, -I2, O2)
    B = LinearSystem.build(4, [], [B1, -N4])
    return A, B, {"A1": A1, "A2": A2, "B1": B1}


def _lax_d7_211(th, Q, P, t, U):
    Th = _theta_diag(th)
    i1 = th["thetainf1"]
    Z = (Q @ P + 2 * i1 * I2) @ P + I2
    V = _blk(U, O2, O2, I2)
    Vi = np.linalg.inv(V)
    h0 = t * np.vstack([I2, P]) @ np.hstack([-P, I2])
    h1 = _blk(-i1 * I2, -Q, -Z, -Th)
    h2 = _blk(O2, O2, O2, I2)
    A0, A1, A2 = (_conj(h, V, Vi) for h in (h0, h1, h2))
    A = LinearSystem.build(4, [(0, [A1, A0])], [A2])
    B = LinearSystem.build(4, [(0, [-A0 / t])])
    return A, B, {"Z": Z, "A0": A0, "A1": A1, "A2": A2}


def _lax_d7_22(th, Q, P, t, U):
    t0 = th["theta0"]
    A0 = t * np.vstack([O2, I2]) @ np.hstack([P, I2])
    A1 = _blk(Q @ P, Q, I2, -P @ Q + t0 * I2)
    A = LinearSystem.build(4, [(0, [A1, A0])], [N4])
    B0 = -_blk(O2, Q, O2, O2) / t
    B1 = -np.vstack([O2, I2]) @ np.hstack([P, I2])
    B = LinearSystem.build(4, [(0, [B1])], [B0])
    return A, B, {"A0": A0, "A1": A1, "A2": N4, "B0": B0, "B1": B1}


def _lax_i(th, Q, P, t, U):
    c1 = _blk(O2, Q, I2, O2)
    c0 = _blk(-P, Q @ Q + t * I2, -Q, P)
    A = LinearSystem.build(4, [], [c0, c1, N4])
    B = LinearSystem.build(4, [], [_blk(O2, 2 * Q, I2, O2), N4])
    return A, B, {"A0": c0, "A1": c1, "A2": N4}


def _lax_d8(th, Q, P, t, U):
    Qi = _inv(Q, "Q")
    A0 = _blk(O2, O2, -t * Qi, O2)
    A1 = _blk(Q @ P, -Q, I2, -P @ Q - I2)
    A = LinearSystem.build(4, [(0, [A1, A0])], [N4])
    B0 = _blk(O2, Q, O2, O2) / t
    B1 = _blk(O2, O2, Qi, O2)
    B = LinearSystem.build(4, [(0, [B1])], [B0])
    return A, B, {"A0": A0, "A1": A1, "A2": N4, "B0": B0, "B1": B1}


_BUILDERS = {
    "22,22,22,211": _lax_vi,
    "(2)_2,22,211": _lax_d6_ram,
    "(11)_2,22,22": _lax_d6_1122,
    "(((2)))_2,211": _lax_ii_211,
    "(((11)))_2,22": _lax_ii_22,
    "(2)_2,(2)(11)": _lax_d7_211,
    "(11)_2,(2)(2)": _lax_d7_22,
    "(((((11)))))_2": _lax_i,
    "(2)_2,(11)_2": _lax_d8,
}


def build_lax_from_pair(variant: str, th, Q, P, t, U=None) -> LaxPair:
    """Lax pair at given matrices ``(Q, P)``, time ``t`` and gauge ``U``."""
    var = get_variant(variant)
    if var.name not in _BUILDERS:
        raise KeyError(f"no Lax pair for {variant!r}; catalog: {', '.join(LAX_CATALOG)}")
    vals = th.values if isinstance(th, ThetaParams) else th
    U = I2.copy() if U is None else np.asarray(U, dtype=complex)
    A, B, aux = _BUILDERS[var.name](vals, np.asarray(Q, complex), np.asarray(P, complex), complex(t), U)
    return LaxPair(A, B, U, aux)


def build_lax(sid, variant: str, th, s: CanonicalState, U=None) -> LaxPair:
    """Lax pair of a catalog variant at a canonical state (``U = I`` unless
    given)."""
    var = get_variant(variant)
    if not isinstance(th, ThetaParams):
        th = ThetaParams(var.name, th)
    mp = build_matrix_pair(var.system, th, s)
    return build_lax_from_pair(var.name, th, mp.Q, mp.P, s.t, U)


def has_gauge_equation(variant) -> bool:
    return get_variant(variant).name in U_GENERATORS


def gauge_generator(variant, th, Q, P, t) -> np.ndarray:
    """``(dU/dt) U^{-1}``; zero for variants whose pair does not involve U."""
    var = get_variant(variant)
    vals = th.values if isinstance(th, ThetaParams) else th
    if var.name not in U_GENERATORS:
        return np.zeros((2, 2), complex)
    return U_GENERATORS[var.name](vals, Q, P, complex(t))


# ---------------------------------------------------------------------------
# flow with gauge


def _joint_rhs(variant, th, hp, c):
    var = get_variant(variant)

    def rhs(t, y):
        s = CanonicalState(y[0], y[1], y[2], y[3], y[4], t)
        v = hamiltonian_rhs(var.system, hp, th, s)
        Q, P = pair_from_coordinates(s.q1, s.p1, s.q2, s.p2, s.u, c)
        U = y[5:].reshape(2, 2)
        dU = gauge_generator(var, th, Q, P, t) @ U
        return np.concatenate([[v.q1, v.p1, v.q2, v.p2, v.u], dU.ravel()])

    return rhs


def flow_step(variant, th, s: CanonicalState, U, h, frozen: bool = False):
    """One RK4 step of (state, U) of size ``h``; with ``frozen`` only the
    time advances."""
    var = get_variant(variant)
    if frozen:
        return CanonicalState(s.q1, s.p1, s.q2, s.p2, s.u, s.t + h), np.array(U, complex)
    hp = params_for(var, th)
    rhs = _joint_rhs(var, th, hp, zeta_value(var, th))
    y = np.concatenate([s.as_array()[:5], np.asarray(U, complex).ravel()])
    y1 = rk4_step(rhs, y, s.t, h)
    return CanonicalState(*y1[:5], s.t + h), y1[5:].reshape(2, 2)


def halton_points(n: int, poles, seed: int = 0, radius: float = 2.5, min_dist: float = 0.15) -> list:
    """``n`` Halton points in a square of half-width ``radius`` around the
    origin, keeping a distance ``min_dist`` from every pole."""
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    out = []
    while len(out) < n:
        u = sampler.random(1)[0]
        x = complex(radius * (2 * u[0] - 1), radius * (2 * u[1] - 1))
        if all(abs(x - p) >= min_dist for p in poles):
            out.append(x)
    return out


def zero_curvature(pair_m: LaxPair, pair_p: LaxPair, pair: LaxPair, h, x) -> np.ndarray:
    """``dA/dt - dB/dx + [A, B]`` at ``x`` with ``dA/dt`` from the two
    neighbouring pairs at ``t -+ h``."""
    dA = (pair_p.A(x) - pair_m.A(x)) / (2 * h)
    A = pair.A(x)
    B = pair.B(x)
    return dA - pair.B.dx(x) + mat_commutator(A, B)


def compatibility_residual(pair: LaxPair | None, sid, hp, th, s: CanonicalState, x_samples,
                           variant: str | None = None, h: float = 1e-5, frozen: bool = False,
                           relative: bool = True) -> float:
    """Largest zero-curvature residual over ``x_samples``.

    ``dA/dt`` is a central difference with step ``h``: the state and the
    gauge matrix U are advanced by one RK4 step to ``t + h`` and ``t - h``
    and the pair is rebuilt there.  With ``relative`` each residual is
    divided by ``1 + |A(x)|``.
    """
    var = get_variant(variant or sid)
    if not isinstance(th, ThetaParams):
        th = ThetaParams(var.name, th)
    if pair is None:
        pair = build_lax(var.system, var.name, th, s)
    sp, Up = flow_step(var, th, s, I2, h, frozen)
    sm, Um = flow_step(var, th, s, I2, -h, frozen)
    pp = build_lax(var.system, var.name, th, sp, Up)
    pm = build_lax(var.system, var.name, th, sm, Um)
    worst = 0.0
    for x in x_samples:
        r = float(np.max(np.abs(zero_curvature(pm, pp, pair, h, x))))
        if relative:
            r /= 1 + float(np.max(np.abs(pair.A(x))))
        worst = max(worst, r)
    return worst


def pole_locations(pair: LaxPair) -> list:
    return [p.location for p in pair.A.poles] + [p.location for p in pair.B.poles]


# ---------------------------------------------------------------------------
# Riemann schemes


@dataclass
class SchemeColumn:
    location: str
    d: int
    rows: list  # per eigen-direction: irregular coefficients then the residue

    def residues(self):
        return [r[-1] for r in self.rows]


@dataclass
class RiemannScheme:
    columns: list

    def residue_sum(self):
        return sum(sum(c.residues()) for c in self.columns)

    def to_json(self) -> str:
        def enc(z):
            z = complex(z)
            return [z.real, z.imag]

        return json.dumps({"columns": [{"location": c.location, "ramification": c.d,
                                        "rows": [[enc(v) for v in r] for r in c.rows]} for c in self.columns]})

    def to_text(self) -> str:
        out = []
        for c in self.columns:
            head = f"x={c.location}" + (f" (1/{c.d})" if c.d > 1 else "")
            out.append(head)
            for r in c.rows:
                out.append("  " + "  ".join(_fmt(v) for v in r))
        return "\n".join(out)


def _fmt(z) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-15:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


def riemann_scheme_of(variant: str, th, t) -> RiemannScheme:
    """Literal Riemann scheme of a catalog variant with ``sqrt`` on the
    principal branch (cut along the negative reals)."""
    var = get_variant(variant)
    v = th.values if isinstance(th, ThetaParams) else th
    t = complex(t)
    g = v.get
    i1, i2, i3 = g("thetainf1", 0), g("thetainf2", 0), g("thetainf3", 0)
    infs = [[i1], [i1], [i2], [i3]]
    half = [[i2 / 2], [i3 / 2], [i2 / 2], [i3 / 2]]

    def reg(e):
        return SchemeColumn("", 1, [[0], [0], [e], [e]])

    name = var.name
    if name == "22,22,22,211":
        cols = [SchemeColumn("0", 1, reg(g("theta0")).rows), SchemeColumn("1", 1, reg(g("theta1")).rows),
                SchemeColumn("t", 1, reg(g("thetat")).rows), SchemeColumn("inf", 1, infs)]
    elif name == "(2)_2,22,211":
        r = cmath.sqrt(t)
        cols = [SchemeColumn("0", 1, reg(g("theta0")).rows),
                SchemeColumn("1", 2, [[r, 0], [r, 0], [-r, 0], [-r, 0]]), SchemeColumn("inf", 1, infs)]
    elif name == "(11)_2,22,22":
        r = cmath.sqrt(t)
        cols = [SchemeColumn("0", 1, reg(g("theta0")).rows), SchemeColumn("1", 1, reg(g("theta1")).rows),
                SchemeColumn("inf", 2, [[s * r] + h for s, h in zip((1, 1, -1, -1), half)])]
    elif name == "(((2)))_2,211":
        cols = [SchemeColumn("0", 2, [[1, 0, -t / 2, 0], [1, 0, -t / 2, 0], [-1, 0, t / 2, 0], [-1, 0, t / 2, 0]]),
                SchemeColumn("inf", 1, infs)]
    elif name == "(((11)))_2,22":
        cols = [SchemeColumn("0", 1, reg(g("theta0")).rows),
                SchemeColumn("inf", 2, [[s, 0, -s * t / 2] + h for s, h in zip((1, 1, -1, -1), half)])]
    elif name == "(2)_2,(2)(11)":
        r = cmath.sqrt(-t)
        cols = [SchemeColumn("0", 2, [[r, 0], [r, 0], [-r, 0], [-r, 0]]),
                SchemeColumn("inf", 1, [[0, i1], [0, i1], [-1, i2], [-1, i3]])]
    elif name == "(11)_2,(2)(2)":
        t0 = g("theta0")
        cols = [SchemeColumn("0", 1, [[0, 0], [0, 0], [t, t0], [t, t0]]),
                SchemeColumn("inf", 2, [[s] + h for s, h in zip((1, 1, -1, -1), half)])]
    elif name == "(((((11)))))_2":
        cols = [SchemeColumn("inf", 2, [[s, 0, 0, 0, s * t / 2] + h for s, h in zip((1, 1, -1, -1), half)])]
    elif name == "(2)_2,(11)_2":
        r = cmath.sqrt(t)
        cols = [SchemeColumn("0", 2, [[r, 0], [r, 0], [-r, 0], [-r, 0]]),
                SchemeColumn("inf", 2, [[s] + h for s, h in zip((1, 1, -1, -1), half)])]
    else:
        raise KeyError(f"no Riemann scheme recorded for {variant!r}")
    return RiemannScheme(cols)


# ---------------------------------------------------------------------------
# gauge consistency


def integrate_gauge(variant, th, trajectory, U0=None, substeps: int = 8) -> list:
    """Matrix U along a trajectory of canonical states.

    The generator is rebuilt from the states, linearly interpolated inside
    each step, and advanced with ``substeps`` RK4 sub-steps.
    """
    var = get_variant(variant)
    if not isinstance(th, ThetaParams):
        th = ThetaParams(var.name, th)
    c = zeta_value(var, th)
    traj = list(trajectory)
    U = I2.copy() if U0 is None else np.asarray(U0, complex)
    out = [U]
    for a, b in zip(traj[:-1], traj[1:]):
        ya = np.array([a.q1, a.p1, a.q2, a.p2, a.u], complex)
        yb = np.array([b.q1, b.p1, b.q2, b.p2, b.u], complex)
        h = b.t - a.t

        def rhs(t, y, a=a, ya=ya, yb=yb, h=h):
            lam = (t - a.t) / h
            z = ya * (1 - lam) + yb * lam
            Q, P = pair_from_coordinates(*z, c)
            return (gauge_generator(var, th, Q, P, t) @ y.reshape(2, 2)).ravel()

        y = U.ravel()
        for k in range(substeps):
            y = rk4_step(rhs, y, a.t + k * h / substeps, h / substeps)
        U = y.reshape(2, 2)
        if abs(np.linalg.det(U)) < 1e-12:
            raise LaxError(f"gauge matrix U became singular near t = {b.t}")
        out.append(U)
    return out


def u_gauge_check(sid, variant, th, s: CanonicalState | None, trajectory) -> float:
    """Consistency of the gauge equations along a trajectory.

    Three discrepancies are measured at the interior points, each relative
    to ``1 + |reference|``:

    * the scalar rate ``(du/dt)/u`` of the variant against the (1,2) entry
      of the matrix flow, ``(dQ/dt)_12 / u``;
    * the scalar rate against a five-point difference of ``u`` along the
      trajectory (needs at least five states);
    * for variants with a matrix U-equation, ``log det U`` against the
      integral of the trace of the generator (Liouville).

    Returns the largest of them.
    """
    from .catalog import matrix_rhs
    from .painleve_core import gauge_rate

    var = get_variant(variant)
    if not isinstance(th, ThetaParams):
        th = ThetaParams(var.name, th)
    c = zeta_value(var, th)
    traj = list(trajectory)
    worst = 0.0
    for k in range(2, len(traj) - 2):
        st = traj[k]
        rate = gauge_rate(var.system, th, st)
        Q, P = pair_from_coordinates(st.q1, st.p1, st.q2, st.p2, st.u, c)
        dQ, _ = matrix_rhs(var, th, Q, P, st.t)
        ref = dQ[0, 1] / st.u
        worst = max(worst, abs(rate - ref) / (1 + abs(ref)))
        h = (traj[k + 1].t - traj[k - 1].t) / 2
        fd = (traj[k - 2].u - 8 * traj[k - 1].u + 8 * traj[k + 1].u - traj[k + 2].u) / (12 * h) / st.u
        worst = max(worst, abs(rate - fd) / (1 + abs(fd)))
    if var.name in U_GENERATORS and len(traj) > 1:
        Us = integrate_gauge(var, th, traj)
        acc = 0j
        for k in range(1, len(traj)):
            a, b = traj[k - 1], traj[k]
            ga = np.trace(gauge_generator(var, th, *pair_from_coordinates(a.q1, a.p1, a.q2, a.p2, a.u, c), a.t))
            gm = np.trace(gauge_generator(var, th, *pair_from_coordinates(
                *((np.array([a.q1, a.p1, a.q2, a.p2, a.u]) + np.array([b.q1, b.p1, b.q2, b.p2, b.u])) / 2), c),
                (a.t + b.t) / 2))
            gb = np.trace(gauge_generator(var, th, *pair_from_coordinates(b.q1, b.p1, b.q2, b.p2, b.u, c), b.t))
            acc += (b.t - a.t) * (ga + 4 * gm + gb) / 6
            ld = np.log(np.linalg.det(Us[k]) / np.linalg.det(Us[0]))
            # compare exp of both sides to stay off the log branch cut
            worst = max(worst, abs(np.exp(ld) - np.exp(acc)) / (1 + abs(np.exp(acc))))
    return float(worst)
