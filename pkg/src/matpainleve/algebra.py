"""Small-matrix arithmetic, truncated Puiseux matrix series and rational
matrix-valued functions of one variable.

Matrix entries are complex floats; series exponents are exact
:class:`fractions.Fraction` values so that ramification bookkeeping never
suffers from rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

#: the 2x2 diagonal matrix diag(1, -1) fixing the commutator of (Q, P)
K = np.diag([1.0 + 0j, -1.0 + 0j])


class SeriesError(ValueError):
    """Raised for invalid series operations (non-invertible leading term,
    truncation underflow, ...)."""


class PoleEvaluationError(ValueError):
    """Raised when a rational matrix function is evaluated at one of its poles."""


def mat_commutator(a, b):
    """Return ``a @ b - b @ a`` for square matrices of equal size."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"commutator needs equal square matrices, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def inv2(a):
    """Inverse of a 2x2 matrix by the adjugate formula.

    Works for any element type supporting field operations (floats, complex
    numbers, mpmath numbers in object arrays).
    """
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if det == 0:
        raise ZeroDivisionError("singular 2x2 matrix")
    out = np.empty((2, 2), dtype=np.result_type(a, complex) if a.dtype != object else object)
    out[0, 0] = a[1, 1] / det
    out[0, 1] = -a[0, 1] / det
    out[1, 0] = -a[1, 0] / det
    out[1, 1] = a[0, 0] / det
    return out


def block(a, b, c, d):
    """Assemble a 2x2 block matrix from four equally sized square blocks."""
    return np.block([[a, b], [c, d]])


def as_fraction(x) -> Fraction:
    """Coerce ints, strings like ``"3/2"`` and Fractions to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        fr = Fraction(x).limit_denominator(10**6)
        if abs(float(fr) - x) > 1e-12:
            raise ValueError(f"{x} is not a small rational")
        return fr
    return Fraction(x)


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


# --------------------------------------------------------------------------
# Puiseux matrix series


@dataclass(frozen=True)
class PuiseuxMatrixSeries:
    """A matrix series ``sum_e C_e z^e`` with rational exponents.

    ``terms`` maps exponents to ``dim x dim`` complex matrices and every
    exponent lies in ``(1/d) Z`` where ``d`` is the ramification.  The
    series is exact for exponents strictly below ``order``; nothing is known
    beyond it, and terms at or beyond ``order`` are never stored.
    """

    dim: int
    d: int
    terms: tuple
    order: Fraction

    def __init__(self, terms: Mapping, order, dim: int | None = None, d: int | None = None):
        order = as_fraction(order)
        clean = {}
        for e, c in terms.items():
            e = as_fraction(e)
            c = np.array(c, dtype=complex)
            if e >= order:
                continue
            if e in clean:
                clean[e] = clean[e] + c
            else:
                clean[e] = c
        if dim is None:
            if not clean:
                raise SeriesError("cannot infer the dimension of an empty series")
            dim = next(iter(clean.values())).shape[0]
        for c in clean.values():
            if c.shape != (dim, dim):
                raise SeriesError(f"coefficient of shape {c.shape} in a {dim}x{dim} series")
        need = _lcm([e.denominator for e in clean] + [1])
        if d is None:
            d = need
        elif d % need:
            raise SeriesError(f"exponent denominators {need} do not divide ramification {d}")
        items = tuple(sorted(clean.items(), key=lambda kv: kv[0]))
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "terms", items)
        object.__setattr__(self, "order", order)

    # construction helpers
    @classmethod
    def zero(cls, dim: int, order, d: int = 1) -> "PuiseuxMatrixSeries":
        return cls({}, order, dim=dim, d=d)

    @classmethod
    def identity(cls, dim: int, order, d: int = 1) -> "PuiseuxMatrixSeries":
        return cls({Fraction(0): np.eye(dim)}, order, dim=dim, d=d)

    @classmethod
    def monomial_diag(cls, exponents, order) -> "PuiseuxMatrixSeries":
        """The diagonal matrix ``diag(z^{e_1}, ..., z^{e_m})`` as a series."""
        exps = [as_fraction(e) for e in exponents]
        dim = len(exps)
        terms = {}
        for i, e in enumerate(exps):
            m = terms.setdefault(e, np.zeros((dim, dim), complex))
            m[i, i] = 1.0
        return cls(terms, order, dim=dim)

    # access
    def coeff(self, e) -> np.ndarray:
        e = as_fraction(e)
        if e >= self.order:
            raise SeriesError(f"coefficient z^{e} lies beyond the truncation order {self.order}")
        for ee, c in self.terms:
            if ee == e:
                return c
        return np.zeros((self.dim, self.dim), complex)

    def as_dict(self) -> dict:
        return {e: c for e, c in self.terms}

    def exponents(self) -> list:
        return [e for e, _ in self.terms]

    def valuation(self, tol: float = 0.0):
        """Smallest exponent with a coefficient of max-norm above ``tol``
        (``None`` for a series that vanishes to its truncation order)."""
        for e, c in self.terms:
            if np.max(np.abs(c)) > tol:
                return e
        return None

    def leading(self, tol: float = 0.0):
        v = self.valuation(tol)
        if v is None:
            raise SeriesError("series vanishes to its truncation order")
        return v, self.coeff(v)

    def truncate(self, order) -> "PuiseuxMatrixSeries":
        order = as_fraction(order)
        if order > self.order:
            raise SeriesError(f"cannot extend truncation from {self.order} to {order}")
        return PuiseuxMatrixSeries(self.as_dict(), order, dim=self.dim, d=self.d)

    def with_ramification(self, d: int) -> "PuiseuxMatrixSeries":
        return PuiseuxMatrixSeries(self.as_dict(), self.order, dim=self.dim, d=_lcm([self.d, d]))

    def lattice(self, start, stop):
        """Exponents ``start, start + 1/d, ...`` strictly below ``stop``."""
        step = Fraction(1, self.d)
        e = Fraction(math.floor(as_fraction(start) * self.d), self.d)
        out = []
        while e < stop:
            out.append(e)
            e += step
        return out

    def chop(self, tol: float) -> "PuiseuxMatrixSeries":
        """Drop coefficients whose max-norm is at most ``tol``."""
        kept = {e: c for e, c in self.terms if np.max(np.abs(c)) > tol}
        return PuiseuxMatrixSeries(kept, self.order, dim=self.dim, d=self.d)

    # arithmetic
    def _check(self, other: "PuiseuxMatrixSeries"):
        if not isinstance(other, PuiseuxMatrixSeries):
            raise TypeError("expected a PuiseuxMatrixSeries")
        if other.dim != self.dim:
            raise SeriesError(f"dimension mismatch {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.as_dict())
        for e, c in other.terms:
            terms[e] = terms.get(e, 0) + c
        return PuiseuxMatrixSeries(terms, min(self.order, other.order), dim=self.dim,
                                   d=_lcm([self.d, other.d]))

    def __neg__(self):
        return PuiseuxMatrixSeries({e: -c for e, c in self.terms}, self.order, dim=self.dim, d=self.d)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "PuiseuxMatrixSeries":
        return PuiseuxMatrixSeries({e: s * c for e, c in self.terms}, self.order, dim=self.dim, d=self.d)

    def shift(self, k) -> "PuiseuxMatrixSeries":
        """Multiply by the scalar ``z^k``."""
        k = as_fraction(k)
        return PuiseuxMatrixSeries({e + k: c for e, c in self.terms}, self.order + k,
                                   dim=self.dim, d=_lcm([self.d, k.denominator]))

    def __matmul__(self, other):
        self._check(other)
        va = self.valuation()
        vb = other.valuation()
        if va is None or vb is None:
            # a vanishing factor still limits what is known about the product
            va = self.order if va is None else va
            vb = other.order if vb is None else vb
        order = min(self.order + vb, other.order + va)
        terms = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = ea + eb
                if e < order:
                    terms[e] = terms.get(e, 0) + ca @ cb
        return PuiseuxMatrixSeries(terms, order, dim=self.dim, d=_lcm([self.d, other.d]))

    def conj_const(self, g: np.ndarray) -> "PuiseuxMatrixSeries":
        """Constant similarity ``g^{-1} A g``."""
        gi = np.linalg.inv(g)
        return PuiseuxMatrixSeries({e: gi @ c @ g for e, c in self.terms}, self.order,
                                   dim=self.dim, d=self.d)

    def derivative(self) -> "PuiseuxMatrixSeries":
        """Term-wise ``d/dz``; the ``z^r`` term becomes ``r z^{r-1}``."""
        terms = {e - 1: e * c for e, c in self.terms if e != 0}
        return PuiseuxMatrixSeries(terms, self.order - 1, dim=self.dim, d=self.d)

    def inverse(self, tol: float = 1e-12) -> "PuiseuxMatrixSeries":
        """Multiplicative inverse.

        With ``A = z^v C (I + R)``, ``C`` invertible and ``R`` of positive
        valuation, the inverse is ``z^{-v} (I - R + R^2 - ...) C^{-1}``.  When
        the leading coefficient is singular the columns are first normalized
        by their own valuations, ``A = B diag(z^{e_j})``, and ``B`` is
        inverted instead.
        """
        v, c = self.leading()
        if np.linalg.cond(c) <= 1 / tol:
            return self._inverse_uniform(v, c)
        cols = []
        for j in range(self.dim):
            cv = [e for e, m in self.terms if np.max(np.abs(m[:, j])) > 0]
            if not cv:
                raise SeriesError("series has a vanishing column")
            cols.append(cv[0])
        b = self._scale_columns([-e for e in cols])
        vb, cb = b.leading()
        if np.linalg.cond(cb) > 1 / tol:
            raise SeriesError("leading coefficient is not invertible")
        return b._inverse_uniform(vb, cb)._scale_rows([-e for e in cols])

    def _scale_columns(self, ex) -> "PuiseuxMatrixSeries":
        """``A diag(z^{ex_j})``."""
        return self._monomial_scale(ex, axis=1)

    def _scale_rows(self, ex) -> "PuiseuxMatrixSeries":
        """``diag(z^{ex_i}) A``."""
        return self._monomial_scale(ex, axis=0)

    def _monomial_scale(self, ex, axis) -> "PuiseuxMatrixSeries":
        ex = [as_fraction(e) for e in ex]
        order = self.order + min(ex)
        terms: dict = {}
        for e, c in self.terms:
            for k, s in enumerate(ex):
                if e + s < order:
                    m = terms.setdefault(e + s, np.zeros((self.dim, self.dim), complex))
                    if axis == 1:
                        m[:, k] += c[:, k]
                    else:
                        m[k, :] += c[k, :]
        d = _lcm([self.d] + [e.denominator for e in ex])
        return PuiseuxMatrixSeries(terms, order, dim=self.dim, d=d)

    def _inverse_uniform(self, v, c) -> "PuiseuxMatrixSeries":
        ci = np.linalg.inv(c)
        # the constant term of the normalized series is I by construction
        normalized = PuiseuxMatrixSeries({e - v: ci @ m for e, m in self.terms if e != v}, self.order - v,
                                         dim=self.dim, d=self.d)
        rem = normalized
        inv = PuiseuxMatrixSeries.identity(self.dim, normalized.order, self.d)
        power = PuiseuxMatrixSeries.identity(self.dim, normalized.order, self.d)
        rv = rem.valuation()
        if rv is not None:
            if rv <= 0:
                raise SeriesError("normalized remainder has non-positive valuation")
            nmax = int(math.ceil((normalized.order) / rv)) + 1
            for k in range(1, nmax + 1):
                power = power @ rem
                inv = inv + power.scale((-1) ** k)
        out = PuiseuxMatrixSeries({e: m @ ci for e, m in inv.terms}, inv.order, dim=self.dim, d=self.d)
        return out.shift(-v)

    def max_abs_diff(self, other: "PuiseuxMatrixSeries", upto=None) -> float:
        """Largest entrywise difference over exponents below ``upto``
        (default: the common truncation order)."""
        upto = min(self.order, other.order) if upto is None else as_fraction(upto)
        a = self.as_dict()
        b = other.as_dict()
        worst = 0.0
        for e in set(a) | set(b):
            if e < upto:
                diff = a.get(e, 0) - b.get(e, 0)
                worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def block(self, idx) -> "PuiseuxMatrixSeries":
        idx = list(idx)
        return PuiseuxMatrixSeries({e: c[np.ix_(idx, idx)] for e, c in self.terms}, self.order,
                                   dim=len(idx), d=self.d)

    def __repr__(self) -> str:
        shown = ", ".join(str(e) for e, _ in self.terms[:6])
        return f"PuiseuxMatrixSeries(dim={self.dim}, d={self.d}, exponents=[{shown}...], order={self.order})"


def series_gauge_transform(a: PuiseuxMatrixSeries, p: PuiseuxMatrixSeries) -> PuiseuxMatrixSeries:
    """Gauge action ``p^{-1} a p - p^{-1} dp/dz`` on the system ``dY/dz = a Y``."""
    a._check(p)
    pi = p.inverse()
    return pi @ a @ p - pi @ p.derivative()


def direct_sum(blocks) -> PuiseuxMatrixSeries:
    """Block-diagonal direct sum of series."""
    blocks = list(blocks)
    dim = sum(b.dim for b in blocks)
    order = min(b.order for b in blocks)
    d = _lcm([b.d for b in blocks])
    terms = {}
    off = 0
    for b in blocks:
        for e, c in b.terms:
            if e >= order:
                continue
            m = terms.setdefault(e, np.zeros((dim, dim), complex))
            m[off:off + b.dim, off:off + b.dim] += c
        off += b.dim
    return PuiseuxMatrixSeries(terms, order, dim=dim, d=d)


# --------------------------------------------------------------------------
# Rational matrix functions


@dataclass(frozen=True)
class Pole:
    """Principal part ``sum_k coeffs[k] / (x - location)^{k+1}``."""

    location: complex
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class LinearSystem:
    """Coefficient ``A(x)`` of ``dY/dx = A(x) Y``: finite poles plus a
    polynomial part ``sum_j poly[j] x^j``."""

    dim: int
    poles: tuple = ()
    poly: tuple = ()

    @classmethod
    def build(cls, dim: int, poles=(), poly=()) -> "LinearSystem":
        ps = []
        for loc, coeffs in poles:
            coeffs = tuple(np.array(c, dtype=complex) for c in coeffs)
            ps.append(Pole(complex(loc), coeffs))
        pl = tuple(np.array(c, dtype=complex) for c in poly)
        for c in [c for p in ps for c in p.coeffs] + list(pl):
            if c.shape != (dim, dim):
                raise ValueError(f"coefficient shape {c.shape} does not match dimension {dim}")
        return cls(dim, tuple(ps), pl)

    def __call__(self, x) -> np.ndarray:
        return rational_matrix_eval(self, x)

    def dx(self, x) -> np.ndarray:
        """Exact derivative ``dA/dx`` at ``x``."""
        x = complex(x)
        out = np.zeros((self.dim, self.dim), complex)
        for p in self.poles:
            w = x - p.location
            if w == 0:
                raise PoleEvaluationError(f"x = {x} is a pole")
            for k, c in enumerate(p.coeffs):
                out -= (k + 1) * c / w ** (k + 2)
        for j, c in enumerate(self.poly):
            if j:
                out += j * c * x ** (j - 1)
        return out

    def scaled(self, s) -> "LinearSystem":
        return LinearSystem(self.dim, tuple(Pole(p.location, tuple(s * c for c in p.coeffs)) for p in self.poles),
                            tuple(s * c for c in self.poly))

    def conjugated(self, g) -> "LinearSystem":
        """Constant similarity ``g^{-1} A g``."""
        gi = np.linalg.inv(g)
        return LinearSystem(self.dim,
                            tuple(Pole(p.location, tuple(gi @ c @ g for c in p.coeffs)) for p in self.poles),
                            tuple(gi @ c @ g for c in self.poly))

    def singular_points(self):
        """Finite pole locations, then ``inf`` when the point at infinity is
        singular (nonzero polynomial part or a Fuchsian residue there)."""
        pts = [p.location for p in self.poles]
        pts.append(math.inf)
        return pts

    def to_json(self) -> str:
        def enc(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]

        doc = {
            "dim": self.dim,
            "poles": [{"location": [p.location.real, p.location.imag], "order": p.order,
                       "coeffs": [enc(c) for c in p.coeffs]} for p in self.poles],
            "poly": [enc(c) for c in self.poly],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "LinearSystem":
        doc = json.loads(text)

        def dec(m):
            return np.array([[complex(re, im) for re, im in row] for row in m])

        poles = [(complex(*p["location"]), [dec(c) for c in p["coeffs"]]) for p in doc["poles"]]
        return cls.build(doc["dim"], poles, [dec(c) for c in doc["poly"]])


def rational_matrix_eval(sys: LinearSystem, x) -> np.ndarray:
    """Evaluate all pole terms and the polynomial part at ``x``."""
    x = complex(x)
    out = np.zeros((sys.dim, sys.dim), complex)
    for p in sys.poles:
        w = x - p.location
        if w == 0:
            raise PoleEvaluationError(f"x = {x} is a pole")
        for k, c in enumerate(p.coeffs):
            out += c / w ** (k + 1)
    for j, c in enumerate(sys.poly):
        out += c * x ** j
    return out


def _binom(n, k):
    return math.comb(n, k)


def local_expansion(sys: LinearSystem, point, n_terms: int = 12) -> PuiseuxMatrixSeries:
    """Laurent expansion of the system at a point in the local coordinate.

    At a finite point ``v`` the coordinate is ``z = x - v`` and the series is
    ``A(v + z)``.  At ``point = inf`` the coordinate is ``z = 1/x`` and the
    series is the coefficient of ``dY/dz = -z^{-2} A(1/z) Y``.  The result is
    exact for the ``n_terms`` integer exponents following its most singular
    term.
    """
    dim = sys.dim
    terms: dict = {}

    def add(e, c):
        terms[e] = terms.get(e, 0) + c

    if point == math.inf or point is None:
        top = max([len(sys.poly) + 1] + [1])
        low = -top
        order = Fraction(low + n_terms)
        for p in sys.poles:
            w = p.location
            for k, c in enumerate(p.coeffs):
                # c z^{k+1} (1 - w z)^{-(k+1)} times -z^{-2}
                n = 0
                while k + 1 + n - 2 < order:
                    add(Fraction(k + 1 + n - 2), -_binom(n + k, k) * w ** n * c)
                    n += 1
                    if w == 0:
                        break
        for j, c in enumerate(sys.poly):
            add(Fraction(-j - 2), -c)
        return PuiseuxMatrixSeries(terms, order, dim=dim)
    v = complex(point)
    own = [p for p in sys.poles if p.location == v]
    low = -max([p.order for p in own] + [0])
    order = Fraction(low + n_terms)
    for p in sys.poles:
        if p.location == v:
            for k, c in enumerate(p.coeffs):
                add(Fraction(-(k + 1)), c)
            continue
        h = v - p.location
        for k, c in enumerate(p.coeffs):
            # (h + z)^{-(k+1)} = sum_n binom(-(k+1), n) h^{-(k+1)-n} z^n
            for n in range(0, int(order) + 1):
                coef = (-1) ** n * _binom(n + k, k) * h ** (-(k + 1) - n)
                add(Fraction(n), coef * c)
    for j, c in enumerate(sys.poly):
        for n in range(j + 1):
            add(Fraction(n), _binom(j, n) * v ** (j - n) * c)
    return PuiseuxMatrixSeries(terms, order, dim=dim)
