"""Formal reduction of a matrix Laurent series at a singular point to its
canonical form ``T(z) = D_0 / z^{l_0} + ... + D_{s-1} / z^{l_{s-1}} + Theta / z``,
and the spectral-type strings derived from it.

The reduction splits the leading coefficient into eigenvalue clusters
(Sylvester equations order by order), peels off scalar leading terms, and
shears nilpotent leading coefficients with diagonal monomial gauges.  The
full gauge is tracked so that the result can be checked against the input.
"""

from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import solve_sylvester

from .algebra import (LinearSystem, PuiseuxMatrixSeries, SeriesError, _lcm, as_fraction, direct_sum,
                      local_expansion)

CLUSTER_TOL = 1e-7
ZERO_TOL = 1e-8
EXACT = Fraction(10**6)  # truncation order used for exact (monomial) gauges


class HTLError(ValueError):
    """The formal reduction cannot proceed (Jordan residue, exhausted shear
    search, ambiguous clusters or insufficient truncation)."""


@dataclass
class EigenCluster:
    center: complex
    multiplicity: int
    members: list


@dataclass
class HTLForm:
    levels: list  # Fractions, strictly decreasing, all > 1
    level_matrices: list  # diagonal matrices, one per level
    residue: np.ndarray  # diagonal
    d: int

    @property
    def dim(self) -> int:
        return self.residue.shape[0]

    def directions(self) -> list:
        """Per eigen-direction: ``({exponent: coefficient}, residue)`` with
        exponents ``-l_j``."""
        out = []
        for i in range(self.dim):
            irr = {}
            for lv, dm in zip(self.levels, self.level_matrices):
                if dm[i, i] != 0:
                    irr[-lv] = complex(dm[i, i])
            out.append((irr, complex(self.residue[i, i])))
        return out

    def top_level(self) -> Fraction:
        return self.levels[0] if self.levels else Fraction(1)

    def as_series(self, order=Fraction(0)) -> PuiseuxMatrixSeries:
        terms = {-lv: dm for lv, dm in zip(self.levels, self.level_matrices)}
        terms[Fraction(-1)] = terms.get(Fraction(-1), 0) + self.residue
        return PuiseuxMatrixSeries(terms, order, dim=self.dim, d=self.d)

    def to_json(self) -> str:
        def enc(m):
            return [[c.real, c.imag] for c in np.diag(m).astype(complex)]

        return json.dumps({"levels": [str(lv) for lv in self.levels],
                           "level_matrices": [enc(m) for m in self.level_matrices],
                           "residue": enc(self.residue), "ramification": self.d})


@dataclass
class Reduction:
    """HTL form together with the gauge ``P`` (and its inverse) taking the
    input series to it: ``form = P^{-1} a P - P^{-1} P'``."""

    form: HTLForm
    gauge: PuiseuxMatrixSeries
    gauge_inv: PuiseuxMatrixSeries
    source: PuiseuxMatrixSeries

    def soundness(self) -> float:
        """Largest entrywise discrepancy between the gauge-transformed input
        and the HTL form over exponents up to the residue."""
        g, gi = self.gauge, self.gauge_inv
        out = gi @ self.source @ g - gi @ g.derivative()
        if out.order <= -1:
            raise HTLError(f"gauge check truncated at order {out.order}; increase n_terms")
        return out.max_abs_diff(self.form.as_series(out.order), upto=Fraction(-1) + Fraction(1, 10**6))


# ---------------------------------------------------------------------------
# helpers


def _const(m, d: int = 1) -> PuiseuxMatrixSeries:
    m = np.asarray(m, complex)
    return PuiseuxMatrixSeries({Fraction(0): m}, EXACT, dim=m.shape[0], d=d)


def cluster_eigenvalues(values, tol: float = CLUSTER_TOL) -> list:
    """Single-linkage clusters of complex numbers (distance ``<= tol``)."""
    vals = [complex(v) for v in values]
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(len(vals)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        c = sum(vals[i] for i in members) / len(members)
        out.append(EigenCluster(c, len(members), members))
    out.sort(key=lambda c: (-c.center.real, -c.center.imag))
    return out


def is_nilpotent(m, tol: float = 1e-9) -> bool:
    """All power traces ``tr(m^j)``, ``j <= dim``, vanish relative to
    ``|m|^j``."""
    m = np.asarray(m, complex)
    nrm = float(np.linalg.norm(m, 2))
    if nrm == 0:
        return True
    p = np.eye(m.shape[0])
    for j in range(1, m.shape[0] + 1):
        p = p @ m
        if abs(np.trace(p)) > tol * nrm ** j * m.shape[0]:
            return False
    return True


def _scale(a: PuiseuxMatrixSeries) -> float:
    vals = [float(np.max(np.abs(c))) for e, c in a.terms if e <= -1]
    return max([1.0] + vals)


def _invariant_basis(lead, clusters) -> np.ndarray:
    cols = []
    n = lead.shape[0]
    for c in clusters:
        m = np.linalg.matrix_power(lead - c.center * np.eye(n), c.multiplicity)
        _, _, vh = np.linalg.svd(m)
        cols.append(vh[n - c.multiplicity:].conj().T)
    basis = np.hstack(cols)
    if np.linalg.cond(basis) > 1e10:
        raise HTLError("eigenvalue clusters are not separated")
    return basis


def _block_indices(clusters) -> list:
    out, off = [], 0
    for c in clusters:
        out.append(list(range(off, off + c.multiplicity)))
        off += c.multiplicity
    return out


def _split(a: PuiseuxMatrixSeries, v: Fraction, clusters, n_terms: int | None = None):
    """Block-diagonalize ``a`` (leading exponent ``v``) along the given
    clusters.  Returns ``(blocks, P, P^{-1}, B)`` with ``B`` the
    block-diagonal series and ``B = P^{-1} a P - P^{-1} P'``."""
    lead = a.coeff(v)
    C = _invariant_basis(lead, clusters)
    ac = a.conj_const(C)
    d = ac.d
    idx = _block_indices(clusters)
    shift = int(-d * (v + 1))  # d (l - 1)
    K = int(math.ceil((ac.order - v) * d)) - 1
    if n_terms is not None:
        if n_terms > K + 1:
            raise HTLError(f"n_terms={n_terms} exceeds the input truncation ({K + 1} terms)")
        K = n_terms - 1
    n = a.dim
    A = [ac.coeff(v + Fraction(k, d)) for k in range(K + 1)]

    def bdiag(m):
        out = np.zeros_like(m)
        for ix in idx:
            out[np.ix_(ix, ix)] = m[np.ix_(ix, ix)]
        return out

    T = [np.eye(n, dtype=complex)]
    B = [bdiag(A[0])]
    A0 = B[0]
    for k in range(1, K + 1):
        R = A[k].copy()
        for j in range(1, k):
            R += A[k - j] @ T[j] - T[j] @ B[k - j]
        jp = k - shift
        if 1 <= jp < k:
            R -= (jp / d) * T[jp]
        delta = float(Fraction(k, d)) if jp == k else 0.0
        Tk = np.zeros((n, n), complex)
        for ia in idx:
            for ib in idx:
                if ia is ib:
                    continue
                Aaa = A0[np.ix_(ia, ia)] - delta * np.eye(len(ia))
                Abb = A0[np.ix_(ib, ib)]
                try:
                    Tk[np.ix_(ia, ib)] = solve_sylvester(Aaa, -Abb, -R[np.ix_(ia, ib)])
                except np.linalg.LinAlgError as exc:
                    raise HTLError("Sylvester equation is singular") from exc
        T.append(Tk)
        B.append(bdiag(R))
    order_b = v + Fraction(K + 1, d)
    Bs = PuiseuxMatrixSeries({v + Fraction(k, d): B[k] for k in range(K + 1)}, order_b, dim=n, d=d)
    Ts = PuiseuxMatrixSeries({Fraction(k, d): T[k] for k in range(K + 1)}, Fraction(K + 1, d), dim=n, d=d)
    P = _const(C, d) @ Ts
    Pinv = Ts.inverse() @ _const(np.linalg.inv(C), d)
    return [Bs.block(ix) for ix in idx], P, Pinv, Bs


def block_diagonalize(a: PuiseuxMatrixSeries, n_terms: int | None = None) -> list:
    """Split ``a`` into one block per eigenvalue cluster of its leading
    coefficient, computing ``n_terms`` coefficients (default: as many as the
    truncation allows)."""
    v, lead = a.leading(ZERO_TOL * _scale(a))
    clusters = cluster_eigenvalues(np.linalg.eigvals(lead), CLUSTER_TOL * max(1.0, np.max(np.abs(lead))))
    if len(clusters) == 1:
        return [a if n_terms is None else a.truncate(min(a.order, v + Fraction(n_terms, a.d)))]
    blocks, _, _, _ = _split(a, v, clusters, n_terms)
    return blocks


def shear(a: PuiseuxMatrixSeries, exponents) -> PuiseuxMatrixSeries:
    """Gauge transform by ``S = diag(z^{e_1}, ..., z^{e_m})``:
    entry ``(i, j)`` is multiplied by ``z^{e_j - e_i}`` and ``diag(e)/z`` is
    subtracted."""
    ex = [as_fraction(e) for e in exponents]
    if len(ex) != a.dim:
        raise SeriesError(f"{len(ex)} exponents for a {a.dim}x{a.dim} series")
    n = a.dim
    spread = max(ex) - min(ex)
    order = a.order - spread
    if order <= -1:
        raise SeriesError("truncation underflow: sheared series does not reach the residue")
    terms: dict = {}
    for e, c in a.terms:
        for i in range(n):
            for j in range(n):
                if c[i, j] == 0:
                    continue
                ee = e + ex[j] - ex[i]
                if ee < order:
                    terms.setdefault(ee, np.zeros((n, n), complex))[i, j] += c[i, j]
    terms.setdefault(Fraction(-1), np.zeros((n, n), complex))
    terms[Fraction(-1)] = terms[Fraction(-1)] - np.diag([complex(e) for e in ex])
    dd = _lcm([a.d] + [(x - y).denominator for x in ex for y in ex])
    return PuiseuxMatrixSeries(terms, order, dim=n, d=dd)


def _flag_basis(lead, tol):
    """Orthonormal basis adapted to ``ker N ⊂ ker N^2 ⊂ ...`` with the
    height (step index) of each vector."""
    n = lead.shape[0]
    nrm = max(float(np.linalg.norm(lead, 2)), 1e-300)
    cols, heights = [], []
    prev = np.zeros((n, 0), complex)
    p = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        p = p @ lead
        _, s, vh = np.linalg.svd(p)
        rank = int(np.sum(s > tol * nrm ** k))
        ker = vh[rank:].conj().T
        if prev.shape[1]:
            ker = ker - prev @ (prev.conj().T @ ker)
        if ker.shape[1]:
            u, s2, _ = np.linalg.svd(ker, full_matrices=False)
            new = u[:, s2 > 1e-6]
            new = new[:, : n - prev.shape[1]]
            for c in new.T:
                cols.append(c)
                heights.append(k - 1)
            prev = np.hstack([prev, new])
        if prev.shape[1] >= n:
            break
    if len(cols) != n:
        raise HTLError("leading coefficient is not nilpotent")
    return np.array(cols).T, heights


def _shear_candidates(level: Fraction, dim: int) -> list:
    cands = set()
    for m in range(1, dim + 1):
        for k in range(1, int(math.ceil(m * level)) + 1):
            cands.add(Fraction(k, m))
    return sorted(cands)


# ---------------------------------------------------------------------------
# recursive reduction


def _reduce(a: PuiseuxMatrixSeries, tol: float, depth: int = 0):
    """Returns ``(directions, P, P^{-1})``; each direction is
    ``({exponent: coefficient}, residue)``."""
    if depth > 64:
        raise HTLError("reduction did not terminate")
    n = a.dim
    v = a.valuation(tol)
    if v is None or v >= -1:
        if a.order <= -1:
            raise HTLError("truncation does not reach the residue")
        R = a.coeff(-1) if v is not None and v == -1 else np.zeros((n, n), complex)
        w, V = np.linalg.eig(R)
        if np.linalg.cond(V) > 1e8:
            raise HTLError("non-diagonalizable residue")
        return [({}, complex(x)) for x in w], _const(V, a.d), _const(np.linalg.inv(V), a.d)
    lead = a.coeff(v)
    lnorm = float(np.max(np.abs(lead)))
    clusters = cluster_eigenvalues(np.linalg.eigvals(lead), CLUSTER_TOL * max(1.0, lnorm))
    if len(clusters) > 1:
        blocks, P, Pinv, _ = _split(a, v, clusters)
        dirs, ps, pis = [], [], []
        for b in blocks:
            db, pb, pib = _reduce(b, tol, depth + 1)
            dirs += db
            ps.append(pb)
            pis.append(pib)
        return dirs, P @ direct_sum(ps), direct_sum(pis) @ Pinv
    lam = complex(np.trace(lead)) / n
    if abs(lam) > tol:
        shifted = a - PuiseuxMatrixSeries({v: lam * np.eye(n)}, a.order, dim=n, d=a.d)
        dirs, P, Pinv = _reduce(shifted, tol, depth + 1)
        out = []
        for irr, res in dirs:
            irr = dict(irr)
            irr[v] = irr.get(v, 0) + lam
            out.append((irr, res))
        return out, P, Pinv
    # nilpotent, nonzero leading coefficient
    C, heights = _flag_basis(lead, 1e-7)
    ac = a.conj_const(C)
    mean = Fraction(sum(heights), n)
    chosen, partials = None, []
    for s in _shear_candidates(-v, n):
        sig = [s * (h - mean) for h in heights]
        try:
            sh = shear(ac, sig)
        except SeriesError:
            break
        v2 = sh.valuation(tol)
        if v2 is None or v2 >= -1 or not is_nilpotent(sh.coeff(v2)):
            chosen = (sig, sh)
            break
        # nilpotent but less singular: candidates for a further shear
        if v2 > v:
            partials.append((v2, len(partials), sig, sh))
    attempts = [chosen] if chosen is not None else [(p[2], p[3]) for p in sorted(partials, reverse=True)]
    if not attempts:
        raise HTLError("shear search exhausted")
    err = None
    for sig, sh in attempts:
        try:
            dirs, P, Pinv = _reduce(sh, tol, depth + 1)
        except (HTLError, SeriesError) as exc:
            err = exc
            continue
        S = PuiseuxMatrixSeries.monomial_diag(sig, EXACT)
        Si = PuiseuxMatrixSeries.monomial_diag([-x for x in sig], EXACT)
        return dirs, _const(C) @ S @ P, Pinv @ Si @ _const(np.linalg.inv(C))
    raise HTLError(f"no shear leads to a reduction ({err})")


def _assemble(dirs, tol) -> HTLForm:
    exps = sorted({e for irr, _ in dirs for e, c in irr.items() if abs(c) > tol})
    levels = [-e for e in exps if e < -1]
    mats = []
    for lv in levels:
        mats.append(np.diag([complex(irr.get(-lv, 0)) if abs(irr.get(-lv, 0)) > tol else 0j for irr, _ in dirs]))
    residue = np.diag([complex(r) for _, r in dirs])
    d = _lcm([lv.denominator for lv in levels] + [1])
    return HTLForm(levels, mats, residue, d)


def htl_reduce_full(a: PuiseuxMatrixSeries, d_reduce: bool = False) -> Reduction:
    """HTL form of ``a`` with the accumulated gauge."""
    if a.valuation() is None:
        raise HTLError("series vanishes to its truncation order")
    tol = ZERO_TOL * _scale(a)
    dirs, P, Pinv = _reduce(a, tol)
    form = _assemble(dirs, tol)
    if d_reduce:
        # shift each exponent into 0 <= Re < 1/d; the gauge is unchanged,
        # so soundness checks are only meaningful without this flag
        step = 1 / form.d
        form.residue = np.diag([r - step * math.floor(r.real / step + 1e-12) for r in np.diag(form.residue)])
    return Reduction(form, P, Pinv, a)


def htl_reduce(a: PuiseuxMatrixSeries, d_reduce: bool = False) -> HTLForm:
    return htl_reduce_full(a, d_reduce).form


# ---------------------------------------------------------------------------
# spectral types


@dataclass
class SpectralType:
    text: str
    points: list = field(default_factory=list)

    def __str__(self):
        return self.text


def _same(a: dict, b: dict, tol) -> bool:
    keys = set(a) | set(b)
    return all(abs(a.get(k, 0) - b.get(k, 0)) <= tol for k in keys)


def _orbit_size(irr: dict) -> int:
    return _lcm([Fraction(e).denominator for e, c in irr.items() if c != 0] + [1])


def _rotate(irr: dict, k: int, d: int) -> dict:
    # z^{1/d} -> zeta_d z^{1/d} multiplies z^e by zeta_d^{d e}
    return {e: c * cmath.exp(2j * math.pi * k * float(e)) for e, c in irr.items()}


def _residue_digits(res, tol) -> str:
    groups = cluster_eigenvalues(res, tol)
    return "".join(str(m) for m in sorted((g.multiplicity for g in groups), reverse=True))


def _rsp(items, levels, tol) -> str:
    """Nested refined spectral partition of fixed directions; ``items`` are
    ``(irr, residue)`` and ``levels`` the integer levels still to split."""
    if not levels:
        return _residue_digits([r for _, r in items], tol)
    lv = levels[0]
    groups: list = []
    for irr, r in items:
        c = irr.get(-lv, 0)
        for g in groups:
            if abs(g[0] - c) <= tol:
                g[1].append((irr, r))
                break
        else:
            groups.append([c, [(irr, r)]])
    parts = ["(" + _rsp(g[1], levels[1:], tol) + ")" for g in groups]
    return "".join(sorted(parts, reverse=True))


def _point_type(form: HTLForm, tol: float = 1e-7) -> str:
    dirs = form.directions()
    fixed, ramified = [], []
    used = [False] * len(dirs)
    for i, (irr, r) in enumerate(dirs):
        if used[i]:
            continue
        size = _orbit_size(irr)
        if size == 1:
            fixed.append((irr, r))
            used[i] = True
            continue
        if form.d % size:
            raise HTLError(f"orbit size {size} does not divide the ramification {form.d}")
        orbit = [_rotate(irr, k, size) for k in range(size)]
        members = [[] for _ in range(size)]
        for j, (irr2, r2) in enumerate(dirs):
            if used[j]:
                continue
            for k, o in enumerate(orbit):
                if _same(irr2, o, tol):
                    members[k].append(r2)
                    used[j] = True
                    break
        counts = {len(m) for m in members}
        if len(counts) != 1:
            raise HTLError("inconsistent orbit: copies differ in multiplicity")
        l0 = -min(e for e, c in irr.items() if c != 0)
        depth = int(size * (l0 - 1))
        ramified.append("(" * depth + _residue_digits(members[0], tol) + ")" * depth + f"_{size}")
    pieces = sorted(ramified, reverse=True)
    if fixed:
        int_levels = sorted({-e for irr, _ in fixed for e, c in irr.items() if c != 0 and e < -1}, reverse=True)
        if int_levels:
            top = int(int_levels[0])
            rsp = _rsp(fixed, [Fraction(k) for k in range(top, 1, -1)], tol)
        else:
            rsp = _residue_digits([r for _, r in fixed], tol)
        pieces.append(rsp)
    out = ""
    for p in pieces:
        if out and re.search(r"_\d+$", out) and p[0].isdigit():
            out += " "
        out += p
    return out


def spectral_type(f: HTLForm) -> SpectralType:
    t = _point_type(f)
    return SpectralType(t, [t])


_RAMIFIED_PIECE = re.compile(r"\(*(\d+)\)*_(\d+)")


def parse_spectral_type(text: str) -> list:
    """Number of eigen-directions described by each comma-separated point:
    leaf digits of a ramified piece ``(..)_d`` count ``d`` times."""
    out = []
    for point in text.split(","):
        total = 0
        for m in _RAMIFIED_PIECE.finditer(point):
            total += sum(int(ch) for ch in m.group(1)) * int(m.group(2))
        rest = _RAMIFIED_PIECE.sub("", point)
        total += sum(int(ch) for ch in rest if ch.isdigit())
        out.append(total)
    return out


def _fmt_level(lv: Fraction) -> str:
    return str(lv.numerator) if lv.denominator == 1 else f"{lv.numerator}/{lv.denominator}"


@dataclass
class Classification:
    pattern: str
    spectral_type: SpectralType
    points: list  # (location, HTLForm, type string) in emission order


def classify_system(sys: LinearSystem, n_terms: int = 18) -> Classification:
    """Singularity pattern and spectral type of a linear system, from the
    HTL forms at every finite pole and at infinity."""
    found = []
    locs = [p.location for p in sys.poles] + [math.inf]
    for loc in locs:
        ser = local_expansion(sys, loc, n_terms)
        v = ser.valuation(ZERO_TOL * _scale(ser))
        if v is None or v >= 0:
            continue
        form = htl_reduce(ser)
        text = _point_type(form)
        found.append((loc, form, text))
    found.sort(key=lambda x: (0 if "_" in x[2] else 1, -x[1].top_level(), _neg_str(x[2])))
    pattern = "+".join(_fmt_level(f.top_level()) for _, f, _ in found)
    text = ",".join(t for _, _, t in found)
    return Classification(pattern, SpectralType(text, [t for _, _, t in found]), found)


class _neg_str(str):
    """String with reversed ordering (for descending sorts in a key)."""

    def __lt__(self, other):
        return str.__gt__(self, other)


def point_spectral_type(sys: LinearSystem, point, n_terms: int = 18) -> str:
    """Spectral type of the HTL form of ``sys`` at a single point."""
    return _point_type(htl_reduce(local_expansion(sys, point, n_terms)))


# ---------------------------------------------------------------------------
# small systems with a prescribed HTL form at x = 0


def _cyclic_block(a, alpha, d: int) -> np.ndarray:
    """``d x d`` residue-level block whose eigenvalues at ``x = 0`` behave as
    ``a * zeta_d^k * x^(-1 - 1/d)``: a shift matrix with ``a^d / x`` in the
    corner, all divided by ``x``.  Returned as coefficients ``(c1, c2)`` of
    ``c1/x + c2/x^2``."""
    c1 = alpha * np.eye(d, dtype=complex) + np.eye(d, k=1, dtype=complex)
    c2 = np.zeros((d, d), dtype=complex)
    c2[d - 1, 0] = a ** d
    return c1, c2


def _direct_sum(mats) -> np.ndarray:
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for m in mats:
        s = m.shape[0]
        out[k:k + s, k:k + s] = m
        k += s
    return out


def _mix(coeffs, rng):
    n = coeffs[0].shape[0]
    g = np.eye(n) + 0.3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    gi = np.linalg.inv(g)
    return [g @ c @ gi for c in coeffs]


def rsp_example_system(seed: int = 0) -> LinearSystem:
    """4x4 system with a pole of order three at ``x = 0`` whose HTL form has
    leading eigenvalues of multiplicities 2, 2, the second level splitting
    only the second pair, and distinct residues; a constant gauge and a
    holomorphic perturbation hide the diagonal structure."""
    rng = np.random.default_rng(seed)
    t0 = np.diag([1.0, 1.0, -0.7, -0.7]).astype(complex)
    t1 = np.diag([0.3, 0.3, 0.5, -0.4]).astype(complex)
    th = np.diag([0.11, -0.23, 0.37, 0.05]).astype(complex)
    hol = 0.2 * (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    c = _mix([th, t1, t0, hol], rng)
    return LinearSystem.build(4, [(0, c[:3])], [c[3]])


RAMIFIED_EXAMPLES = {
    # spectral type: list of (kind, a, residue) blocks; kind d >= 2 is a
    # cyclic block of ramification d, kind 1 is a scalar regular direction
    "(2)_2": [(2, 0.8, 0.15), (2, 0.8, 0.15)],
    "(1)_2(1)_2": [(2, 0.8, 0.15), (2, 1.3, -0.2)],
    "(1)_2 11": [(2, 0.8, 0.15), (1, 0, 0.31), (1, 0, -0.17)],
    "(1)_3 1": [(3, 0.9, 0.1), (1, 0, 0.27)],
    "(1)_4": [(4, 0.7, 0.05)],
}


def ramified_example_system(spectral: str, seed: int = 0) -> LinearSystem:
    """4x4 system ``c1/x + c2/x^2`` whose singular point ``x = 0`` has the
    given ramified spectral type (a key of :data:`RAMIFIED_EXAMPLES`)."""
    if spectral not in RAMIFIED_EXAMPLES:
        raise KeyError(f"no example for {spectral!r}; known: {', '.join(RAMIFIED_EXAMPLES)}")
    c1s, c2s = [], []
    for d, a, alpha in RAMIFIED_EXAMPLES[spectral]:
        if d == 1:
            c1s.append(np.array([[alpha]], dtype=complex))
            c2s.append(np.zeros((1, 1), dtype=complex))
        else:
            c1, c2 = _cyclic_block(a, alpha, d)
            c1s.append(c1)
            c2s.append(c2)
    c = _mix([_direct_sum(c1s), _direct_sum(c2s)], np.random.default_rng(seed))
    return LinearSystem.build(4, [(0, c)])
