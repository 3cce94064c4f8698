"""Laplace duality ``(x, d/dx) -> (-d/dxi, xi)`` for systems of the form
``dY/dx = [B (x - T)^{-1} C + S] Y`` and the spectral-type correspondences
it induces.

Besides the duality itself this module holds the chart utilities needed to
bring a catalog system into structured form: Mobius changes of the
independent variable, scalar twists ``Y -> (x - a)^c Y``, and a minimal
realization of each principal part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import LinearSystem, local_expansion
from .catalog import ThetaParams, get_variant
from .htl import CLUSTER_TOL, _invariant_basis, classify_system, cluster_eigenvalues, htl_reduce
from .lax import build_lax

RANK_TOL = 1e-8
I2 = np.eye(2, dtype=complex)
O2 = np.zeros((2, 2), dtype=complex)


class LaplaceError(ValueError):
    """A system cannot be brought into the required structured form."""


@dataclass
class StructuredSystem:
    """``dY/dx = [B (x I_l - T)^{-1} C + S] Y`` with ``B`` m x l, ``C`` l x m,
    ``T`` l x l, ``S`` m x m."""

    B: np.ndarray
    C: np.ndarray
    T: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        self.B = np.atleast_2d(np.asarray(self.B, complex))
        self.C = np.atleast_2d(np.asarray(self.C, complex))
        self.T = np.atleast_2d(np.asarray(self.T, complex))
        self.S = np.atleast_2d(np.asarray(self.S, complex))
        m, l = self.B.shape
        if self.C.shape != (l, m) or self.T.shape != (l, l) or self.S.shape != (m, m):
            raise ValueError(f"inconsistent block shapes B{self.B.shape} C{self.C.shape} "
                             f"T{self.T.shape} S{self.S.shape}")

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def l(self) -> int:
        return self.B.shape[1]

    def __call__(self, x) -> np.ndarray:
        return self.B @ np.linalg.solve(x * np.eye(self.l) - self.T, self.C) + self.S

    def to_linear_system(self) -> LinearSystem:
        """Partial fractions over the eigenvalue clusters of ``T``: on a
        cluster ``T = lam + N`` gives ``sum_k B N^k C / (x - lam)^{k+1}``."""
        if self.l == 0:
            return LinearSystem.build(self.m, [], [self.S])
        ev = np.linalg.eigvals(self.T)
        clusters = cluster_eigenvalues(ev, CLUSTER_TOL * max(1.0, float(np.max(np.abs(self.T)))))
        V = _invariant_basis(self.T, clusters)
        W = np.linalg.inv(V)
        poles = []
        off = 0
        for c in clusters:
            sl = slice(off, off + c.multiplicity)
            off += c.multiplicity
            Vc, Wc = V[:, sl], W[sl, :]
            Nc = Wc @ self.T @ Vc - c.center * np.eye(c.multiplicity)
            coeffs = []
            Nk = np.eye(c.multiplicity, dtype=complex)
            for _ in range(c.multiplicity):
                coeffs.append(self.B @ Vc @ Nk @ Wc @ self.C)
                Nk = Nk @ Nc
            while len(coeffs) > 1 and np.max(np.abs(coeffs[-1])) < RANK_TOL * (1 + np.max(np.abs(coeffs[0]))):
                coeffs.pop()
            poles.append((c.center, coeffs))
        return LinearSystem.build(self.m, poles, [self.S])


def laplace_dual(sys: StructuredSystem) -> StructuredSystem:
    """``dZ/dxi = -[C (xi - S)^{-1} B + T] Z`` as a structured system."""
    return StructuredSystem(-sys.C, sys.B, sys.S, -sys.T)


# ---------------------------------------------------------------------------
# chart utilities


def _contour(f, center, radius, n=128):
    th = 2 * np.pi * np.arange(n) / n
    w = radius * np.exp(1j * th)
    vals = np.array([f(center + wi) for wi in w])
    return w, vals


def _principal_part(f, center, radius, order, n=128):
    w, vals = _contour(f, center, radius, n)
    # coefficient of (x - c)^{-(k+1)} is the mean of f w^{k+1}
    return [np.tensordot(w ** (k + 1), vals, axes=(0, 0)) / n for k in range(order)]


def _poly_part(f, radius, degree, n=256):
    w, vals = _contour(f, 0, radius, n)
    return [np.tensordot(w ** (-j), vals, axes=(0, 0)) / n for j in range(degree + 1)]


def _trim(coeffs, scale):
    coeffs = list(coeffs)
    while coeffs and np.max(np.abs(coeffs[-1])) < 1e-9 * scale:
        coeffs.pop()
    return coeffs


def mobius_transform(sys: LinearSystem, a, b, c, d) -> LinearSystem:
    """The system in the coordinate ``x'`` with ``x = (a x' + b) / (c x' + d)``:
    ``A'(x') = A(x(x')) dx/dx'``.  Principal parts and the polynomial part
    are recovered by contour integrals around the known pole images."""
    det = a * d - b * c
    if det == 0:
        raise ValueError("degenerate Mobius map")

    def f(xp):
        return sys((a * xp + b) / (c * xp + d)) * det / (c * xp + d) ** 2

    deg = len(sys.poly) - 1  # -1 when there is no polynomial part
    targets = []
    for p in sys.poles:
        den = a - c * p.location
        if abs(den) < 1e-14:
            continue
        targets.append(((d * p.location - b) / den, p.order))
    if c != 0:
        targets.append((-d / c, max(deg + 2, 1)))
    # degree of the new polynomial part: from the pole mapped to x' = inf
    new_deg = -1
    if c == 0:
        new_deg = deg
    else:
        for p in sys.poles:
            if abs(a - c * p.location) < 1e-14:
                new_deg = max(new_deg, p.order - 2)
    locs = [t[0] for t in targets]
    scale = 1.0
    poles = []
    for loc, order in targets:
        others = [abs(loc - o) for o in locs if o != loc]
        rad = 0.3 * min(others) if others else 0.5
        coeffs = _principal_part(f, loc, rad, order)
        scale = max(scale, max(float(np.max(np.abs(cf))) for cf in coeffs))
        poles.append((loc, coeffs))
    poles = [(loc, _trim(cf, scale)) for loc, cf in poles]
    poles = [(loc, cf) for loc, cf in poles if cf]
    poly = []
    if new_deg >= 0:
        R = 2 * max([abs(l) for l in locs] + [1.0]) + 2
        poly = _trim(_poly_part(f, R, new_deg), scale)
    return LinearSystem.build(sys.dim, poles, poly)


def move_to_infinity(sys: LinearSystem, point) -> LinearSystem:
    """Chart ``x = point + 1/x'`` sending ``point`` to ``x' = inf`` (and the
    old infinity to ``x' = 0``)."""
    return mobius_transform(sys, point, 1, 1, 0)


def invert_chart(sys: LinearSystem) -> LinearSystem:
    """Chart ``x = 1/x'`` exchanging 0 and infinity."""
    return mobius_transform(sys, 0, 1, 1, 0)


def scalar_twist(sys: LinearSystem, point, c) -> LinearSystem:
    """System for ``Y' = (x - point)^{-c} Y``: the residue at ``point`` is
    shifted by ``-c I``."""
    poles = []
    hit = False
    for p in sys.poles:
        coeffs = list(p.coeffs)
        if p.location == complex(point):
            coeffs[0] = coeffs[0] - c * np.eye(sys.dim)
            hit = True
        poles.append((p.location, coeffs))
    if not hit:
        poles.append((point, [-c * np.eye(sys.dim)]))
    return LinearSystem.build(sys.dim, poles, list(sys.poly))


# ---------------------------------------------------------------------------
# structured form


def _hankel(coeffs, shift=0):
    r = len(coeffs)
    n = coeffs[0].shape[0]
    H = np.zeros((n * r, n * r), complex)
    for i in range(r):
        for j in range(r):
            k = i + j + shift
            if k < r:
                H[i * n:(i + 1) * n, j * n:(j + 1) * n] = coeffs[k]
    return H


def hankel_rank(coeffs, tol: float = RANK_TOL) -> int:
    H = _hankel(coeffs)
    s = np.linalg.svd(H, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def realize_principal_part(coeffs, location, tol: float = RANK_TOL):
    """Minimal ``(B, T, C)`` with ``B (x - T)^{-1} C`` equal to
    ``sum_k coeffs[k] / (x - location)^{k+1}`` (Ho-Kalman on the block
    Hankel matrix of the coefficients)."""
    n = coeffs[0].shape[0]
    H = _hankel(coeffs)
    U, s, Vh = np.linalg.svd(H)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    if r == 0:
        return np.zeros((n, 0)), np.zeros((0, 0)), np.zeros((0, n))
    sq = np.sqrt(s[:r])
    Obs = U[:, :r] * sq
    Ctr = (Vh[:r, :].T * sq).T
    Hs = _hankel(coeffs, 1)
    N = (U[:, :r].conj().T @ Hs @ Vh[:r, :].conj().T) / np.outer(sq, sq)
    B = Obs[:n, :]
    C = Ctr[:, :n]
    return B, location * np.eye(r) + N, C


def to_structured(sys: LinearSystem, tol: float = RANK_TOL) -> StructuredSystem:
    """Structured form of a system whose polynomial part is constant."""
    if len(sys.poly) > 1 and any(np.max(np.abs(c)) > tol for c in sys.poly[1:]):
        raise LaplaceError("polynomial part of positive degree; move the irregular point first")
    Bs, Ts, Cs = [], [], []
    for p in sys.poles:
        B, T, C = realize_principal_part(list(p.coeffs), p.location, tol)
        Bs.append(B)
        Ts.append(T)
        Cs.append(C)
    S = sys.poly[0] if sys.poly else np.zeros((sys.dim, sys.dim), complex)
    l = sum(b.shape[1] for b in Bs)
    T = np.zeros((l, l), complex)
    off = 0
    for t in Ts:
        k = t.shape[0]
        T[off:off + k, off:off + k] = t
        off += k
    return StructuredSystem(np.hstack(Bs) if Bs else np.zeros((sys.dim, 0)), T=T,
                            C=np.vstack(Cs) if Cs else np.zeros((0, sys.dim)), S=S)


def minimal_twists(sys: LinearSystem, tol: float = RANK_TOL) -> LinearSystem:
    """At every pole apply the scalar twist that minimizes the rank of the
    principal part.  Candidates are the eigenvalues of the residue and, at
    higher-order poles, the formal exponents of the HTL form there."""
    out = sys
    for p in sys.poles:
        coeffs = list(p.coeffs)
        best = (hankel_rank(coeffs, tol), 0.0)
        cands = list(np.linalg.eigvals(coeffs[0]))
        if len(coeffs) > 1:
            form = htl_reduce(local_expansion(sys, p.location, 16))
            cands += list(np.diag(form.residue))
        for ev in cands:
            trial = [coeffs[0] - ev * np.eye(sys.dim)] + coeffs[1:]
            rk = hankel_rank(trial, tol)
            if rk < best[0]:
                best = (rk, ev)
        if best[1] != 0:
            out = scalar_twist(out, p.location, best[1])
    return out


# ---------------------------------------------------------------------------
# elimination for a nilpotent linear term


def eliminate_nilpotent(A1, B, C, kappa=1.0) -> LinearSystem:
    """Laplace transform of ``dY/dx = (kappa N x + A1 + B C / x) Y`` with
    ``N = [[0, I], [0, 0]]`` followed by elimination of the first half of
    the transformed ``Y``.  Returns the polynomial system for
    ``(Y_2, Z)``; the lower-left block of ``A1`` must be invertible."""
    A1 = np.asarray(A1, complex)
    B = np.asarray(B, complex)
    C = np.asarray(C, complex)
    h = A1.shape[0] // 2
    r = B.shape[1]
    a11, a12 = A1[:h, :h], A1[:h, h:]
    a21, a22 = A1[h:, :h], A1[h:, h:]
    B1, B2 = B[:h], B[h:]
    C1, C2 = C[:, :h], C[:, h:]
    if abs(np.linalg.det(a21)) < 1e-12:
        raise LaplaceError("lower-left block of the constant term is singular")
    ai = np.linalg.inv(a21)
    n = h + r
    c2 = np.zeros((n, n), complex)
    c1 = np.zeros((n, n), complex)
    c0 = np.zeros((n, n), complex)
    # Y2 row (divided by kappa), Z row
    c2[:h, :h] = -ai / kappa
    c1[:h, :h] = (a11 @ ai + ai @ a22) / kappa
    c0[:h, :h] = (-a11 @ ai @ a22 + a12) / kappa
    c1[:h, h:] = ai @ B2 / kappa
    c0[:h, h:] = (-a11 @ ai @ B2 + B1) / kappa
    c1[h:, :h] = -C1 @ ai
    c0[h:, :h] = C1 @ ai @ a22 - C2
    c0[h:, h:] = C1 @ ai @ B2
    return LinearSystem.build(n, [], [c0, c1, c2])


def _factor(R, tol=RANK_TOL):
    U, s, Vh = np.linalg.svd(R)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return U[:, :r] * s[:r], Vh[:r, :]


def nilpotent_laplace(sys: LinearSystem, tol: float = RANK_TOL) -> LinearSystem:
    """Generic route for ``dY/dx = (A_lin x + A_const + R/x) Y`` with
    ``A_lin`` square-zero of half rank: bring ``A_lin`` to ``N`` by a
    constant gauge, factor ``R``, and eliminate."""
    if len(sys.poly) != 2 or [p.location for p in sys.poles] not in ([0j], [0]):
        raise LaplaceError("expected a linear polynomial part and a single simple pole at 0")
    A0, Alin = sys.poly
    n = sys.dim
    h = n // 2
    _, s, Vh = np.linalg.svd(Alin)
    if np.sum(s > tol * max(1.0, s[0])) != h or np.max(np.abs(Alin @ Alin)) > 1e-8 * max(1.0, s[0]) ** 2:
        raise LaplaceError("linear term is not square-zero of half rank")
    comp = Vh[:h].conj().T  # complement of the kernel
    G = np.hstack([Alin @ comp, comp])
    Gi = np.linalg.inv(G)
    R = Gi @ sys.poles[0].coeffs[0] @ G
    B, C = _factor(R, tol)
    return eliminate_nilpotent(Gi @ A0 @ G, B, C)


# ---------------------------------------------------------------------------
# the H^Mat_II correspondence


def mpII_blocks(th, Q, P, t):
    """``(A1, B, C)`` of the (((11)))_2,22 system written as
    ``N x + A1 + B C / x``."""
    vals = th.values if isinstance(th, ThetaParams) else th
    Q = np.asarray(Q, complex)
    P = np.asarray(P, complex)
    A1 = np.block([[O2, P - t * I2], [I2, O2]])
    B = np.vstack([-Q, I2])
    C = np.hstack([-P, -P @ Q + vals["theta0"] * I2])
    return A1, B, C


def mpII_correspondence(th, mp, t) -> LinearSystem:
    """Laplace transform of the (((11)))_2,22 system with the first half of
    the transformed solution eliminated: a 4x4 system polynomial of degree
    two in the new variable."""
    Q, P = (mp.Q, mp.P) if hasattr(mp, "Q") else mp
    A1, B, C = mpII_blocks(th, Q, P, complex(t))
    return eliminate_nilpotent(A1, B, C)


def mpII_display(th, Q, P, t) -> list:
    """Closed-form coefficients ``[c0, c1, c2]`` of the eliminated system."""
    vals = th.values if isinstance(th, ThetaParams) else th
    Q = np.asarray(Q, complex)
    P = np.asarray(P, complex)
    c2 = np.block([[-I2, O2], [O2, O2]])
    c1 = np.block([[O2, I2], [P, O2]])
    c0 = np.block([[P - t * I2, -Q], [P @ Q - vals["theta0"] * I2, -P]])
    return [c0, c1, c2]


def dual_deformation(th, s, h: float = 1e-5, degree: int = 1, n_samples: int = 12, seed: int = 0):
    """Search a polynomial ``B(xi)`` of the given degree with
    ``dA/dt - dB/dxi + [A, B] = 0`` for the eliminated II system, with
    ``dA/dt`` from the (((11)))_2,22 flow.  Returns ``(B coefficients,
    relative residual)``."""
    from .lax import I2 as _I2, flow_step
    from .painleve_core import build_matrix_pair

    var = get_variant("(((11)))_2,22")
    if not isinstance(th, ThetaParams):
        th = ThetaParams(var.name, th)

    def system_at(state):
        mp = build_matrix_pair(var.system, th, state)
        return mpII_correspondence(th, mp, state.t)

    sp, _ = flow_step(var, th, s, _I2, h)
    sm, _ = flow_step(var, th, s, _I2, -h)
    Ap, Am, A = system_at(sp), system_at(sm), system_at(s)
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=n_samples) + 1j * rng.normal(size=n_samples)
    n = A.dim
    rows, rhs = [], []
    nunk = (degree + 1) * n * n
    for x in xs:
        dA = (Ap(x) - Am(x)) / (2 * h)
        Ax = A(x)
        # unknown B_k entries; equation  -dB/dxi + [A, B] = -dA
        M = np.zeros((n * n, nunk), complex)
        for k in range(degree + 1):
            for e in range(n * n):
                E = np.zeros(n * n, complex)
                E[e] = 1
                E = E.reshape(n, n)
                col = -k * x ** (k - 1) * E if k else np.zeros((n, n))
                col = col + (Ax @ E - E @ Ax) * x ** k
                M[:, k * n * n + e] = col.ravel()
        rows.append(M)
        rhs.append(-dA.ravel())
    M = np.vstack(rows)
    y = np.concatenate(rhs)
    sol, *_ = np.linalg.lstsq(M, y, rcond=None)
    res = np.linalg.norm(M @ sol - y) / (1 + np.linalg.norm(y))
    coeffs = [sol[k * n * n:(k + 1) * n * n].reshape(n, n) for k in range(degree + 1)]
    return coeffs, float(res)


# ---------------------------------------------------------------------------
# correspondence table


CORRESPONDENCES = [
    # (system, catalog variant, point sent to infinity, expected dual type)
    ("MatIII_D6", "(2)_2,22,211", 1, "(2)(2),(2)(11)"),
    ("MatIII_D6", "(11)_2,22,22", math.inf, "(2)(11),(2)(2)"),
    ("MatIII_D7", "(2)_2,(2)(11)", 0, "(2)(2),(11)_2"),
    ("MatII", "(((11)))_2,22", "elimination", "(((2)))(((11)))"),
    ("MatII", "(((2)))_2,211", "inverted elimination", "(((2)))(((11)))"),
]


def _same_points(a: str, b: str) -> bool:
    return sorted(a.split(",")) == sorted(b.split(","))


def dual_of_catalog(variant, th, s, route):
    """Dual system of a catalog Lax system along the given route."""
    var = get_variant(variant)
    pair = build_lax(var.system, var.name, th, s)
    A = pair.A
    if route == "elimination":
        vals = th.values if isinstance(th, ThetaParams) else th
        from .painleve_core import build_matrix_pair

        mp = build_matrix_pair(var.system, th, s)
        return mpII_correspondence(vals, mp, s.t)
    if route == "inverted elimination":
        th1 = (th.values if isinstance(th, ThetaParams) else th)["thetainf1"]
        inv = invert_chart(A)
        return nilpotent_laplace(scalar_twist(inv, 0, th1))
    if route != math.inf:
        A = move_to_infinity(A, route)
    A = minimal_twists(A)
    dual = laplace_dual(to_structured(A))
    return dual.to_linear_system()


def correspondence_table_check(seed: int = 0) -> list:
    """Classify the dual of each catalog system in the table and compare
    with the expected partner type (as a set of points).  Returns rows
    ``(system, variant, expected, obtained, ok)``."""
    from .catalog import random_theta
    from .painleve_core import CanonicalState

    rng = np.random.default_rng(seed)
    out = []
    for sid, variant, route, expected in CORRESPONDENCES:
        th = random_theta(variant, rng)
        z = rng.normal(size=4) * 0.5 + 0.2j * rng.normal(size=4)
        s = CanonicalState(*z, 1.0 + 0.1j, 0.7 + 0.2j)
        try:
            dual = dual_of_catalog(variant, th, s, route)
            got = classify_system(dual).spectral_type.text
        except Exception as exc:  # reported, not raised: this is a table check
            got = f"error: {exc}"
        out.append((sid, variant, expected, got, _same_points(got, expected)))
    return out
