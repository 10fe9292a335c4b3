"""Truncated power series over W(k): the ring W(k)[[u]] mod (p^N, u^M).

A series carries ``uprec``: coefficients of u^i for i >= uprec are unknown
(stored as zero). Products and sums take the minimum of their operands'
u-precision, so precision loss from division propagates automatically.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coeffs import CoeffParams, WittElem
from .errors import ParamsError, PrecisionError, UnitError


class SeriesRing:
    """W(k)[[u]] / (p^N, u^M) for fixed coefficient parameters."""

    def __init__(self, params, M):
        if M < 1:
            raise ParamsError("need M >= 1")
        self.params = params
        self.M = M
        self.dtype = params.dtype_for(M * params.r * params.r + 1)

    def key(self):
        return (self.params.key(), self.M)

    def __eq__(self, other):
        return isinstance(other, SeriesRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SeriesRing({self.params!r}, M={self.M})"

    def zeros(self):
        return np.zeros((self.M, self.params.r), dtype=self.dtype)

    def zero(self):
        return SeriesS(self, self.zeros(), exact=True)

    def one(self):
        return self.const(1)

    def const(self, c):
        arr = self.zeros()
        c = WittElem(self.params, c)
        arr[0] = c.coords
        return SeriesS(self, arr, exact=True)

    def u(self, power=1):
        arr = self.zeros()
        if power < self.M:
            arr[power, 0] = 1
        return SeriesS(self, arr, exact=power < self.M)

    def __call__(self, coeffs):
        """Build a series from a list: ints, coordinate lists or WittElems per power of u."""
        if isinstance(coeffs, SeriesS):
            return self.coerce(coeffs)
        if isinstance(coeffs, (int, np.integer, WittElem)):
            return self.const(coeffs)
        arr = self.zeros()
        for i, c in enumerate(coeffs):
            if i >= self.M:
                break
            arr[i] = WittElem(self.params, c).coords
        return SeriesS(self, arr, exact=len(coeffs) <= self.M)

    def coerce(self, f):
        if f.ring == self:
            return f
        if f.ring.params != self.params:
            raise ParamsError("coefficient rings differ")
        arr = self.zeros()
        m = min(self.M, f.ring.M)
        arr[:m] = f.c[:m]
        exact = f.exact and f.degree() < self.M
        return SeriesS(self, arr, self.M if exact else min(f.uprec, self.M), exact=exact)

    def random(self, rng, degree=None, unit=False):
        """Random series, optionally a polynomial of given degree, optionally a unit."""
        top = self.M if degree is None else min(self.M, degree + 1)
        arr = self.zeros()
        arr[:top] = rng.integers(0, self.params.q, size=(top, self.params.r)).astype(self.dtype)
        if unit:
            arr[0, 0] = (arr[0, 0] // self.params.p * self.params.p + rng.integers(1, self.params.p)) % self.params.q
        return SeriesS(self, arr, exact=degree is not None and degree < self.M)

    def _conv(self, a, b):
        M, r, q = self.M, self.params.r, self.params.q
        if r == 1:
            return (np.convolve(a[:, 0], b[:, 0])[:M] % q).reshape(M, 1).astype(self.dtype)
        wide = np.zeros((M, 2 * r - 1), dtype=self.dtype)
        for i in range(r):
            ai = a[:, i]
            if not ai.any():
                continue
            for j in range(r):
                wide[:, i + j] += np.convolve(ai, b[:, j])[:M]
        return self.params.vreduce(wide).astype(self.dtype)


@lru_cache(maxsize=None)
def series_ring(params, M):
    return SeriesRing(params, M)


class SeriesS:
    """An element of W(k)[[u]] known modulo (p^N, u^uprec)."""

    __slots__ = ("ring", "c", "uprec", "exact")

    def __init__(self, ring, c, uprec=None, exact=False):
        self.ring = ring
        q = ring.params.q
        c = np.asarray(c).astype(ring.dtype) % q
        if c.shape != (ring.M, ring.params.r):
            raise ParamsError(f"coefficient array has shape {c.shape}")
        self.uprec = ring.M if uprec is None else max(0, min(uprec, ring.M))
        if self.uprec < ring.M:
            c[self.uprec:] = 0
        self.c = c
        # exact: the true series is a polynomial, zero beyond the stored window
        self.exact = exact and self.uprec == ring.M

    @property
    def params(self):
        return self.ring.params

    def _other(self, other):
        if isinstance(other, SeriesS):
            if other.ring != self.ring:
                raise ParamsError("series rings differ")
            return other
        if isinstance(other, (int, np.integer, WittElem)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return SeriesS(self.ring, self.c + other.c, min(self.uprec, other.uprec), self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return SeriesS(self.ring, -self.c, self.uprec, self.exact)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return SeriesS(self.ring, self.c - other.c, min(self.uprec, other.uprec), self.exact and other.exact)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return SeriesS(self.ring, self.c * (int(other) % self.params.q), self.uprec, self.exact)
        other = self._other(other)
        if other is NotImplemented:
            return other
        prec = self._product_uprec(other)
        exact = self.exact and other.exact and self.degree() + other.degree() < self.ring.M
        return SeriesS(self.ring, self.ring._conv(self.c, other.c), prec, exact)

    __rmul__ = __mul__

    def _product_uprec(self, other):
        if self.uprec == self.ring.M and other.uprec == self.ring.M:
            return self.ring.M
        va, vb = self.valuation_u(), other.valuation_u()
        return min(self.uprec + vb, other.uprec + va, self.ring.M)

    def __pow__(self, e):
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return False
        m = min(self.uprec, other.uprec)
        return bool(np.array_equal(self.c[:m] % self.params.q, other.c[:m] % self.params.q))

    def __hash__(self):
        return hash((self.ring.key(), self.c.tobytes()))

    def __repr__(self):
        terms = []
        for i in range(self.ring.M):
            if self.c[i].any():
                co = self.c[i, 0] if self.params.r == 1 else list(self.c[i])
                terms.append(f"{co}*u^{i}" if i else f"{co}")
        body = " + ".join(terms[:8]) + (" + ..." if len(terms) > 8 else "")
        return f"S[{body or '0'}; O(u^{self.uprec})]"

    def coeff(self, i):
        return WittElem(self.params, list(self.c[i]))

    def constant(self):
        return self.coeff(0)

    def is_zero(self, pprec=None):
        """Zero at precision: all known coefficients vanish modulo p^pprec."""
        m = self.params.q if pprec is None else self.params.p ** pprec
        return not (self.c[: self.uprec] % m).any()

    def valuation_u(self):
        nz = np.nonzero(self.c[: self.uprec].any(axis=1))[0]
        return int(nz[0]) if len(nz) else self.uprec

    def degree(self):
        nz = np.nonzero(self.c.any(axis=1))[0]
        return int(nz[-1]) if len(nz) else -1

    def is_unit(self):
        return self.constant().is_unit()

    def reduce_mod_p(self):
        """Coefficient array modulo p (shape (M, r))."""
        return self.c % self.params.p

    def inv(self):
        if not self.is_unit():
            raise UnitError("constant coefficient is not a unit")
        x = self.ring.const(self.constant().inv())
        prec = 1
        while prec < self.ring.M:
            x = x * (2 - self * x)
            prec *= 2
        return SeriesS(self.ring, x.c, self.uprec, self.exact and self.degree() <= 0)

    def phi(self):
        return phi_series(self)

    def shift(self, k):
        """Multiply by u^k (k >= 0) or divide by u^{-k} when exact."""
        arr = self.ring.zeros()
        M = self.ring.M
        if k >= 0:
            arr[k:] = self.c[: M - k]
            return SeriesS(self.ring, arr, min(self.uprec + k, M), self.exact and self.degree() + k < M)
        k = -k
        if self.c[:k].any():
            raise UnitError("series is not divisible by that power of u")
        arr[: M - k] = self.c[k:]
        return SeriesS(self.ring, arr, self.uprec - k, self.exact)

    def to_json(self):
        return {
            "coeffs": [[int(x) for x in row] for row in self.c[: max(self.degree() + 1, 1)]],
            "N": self.params.N,
            "M": self.ring.M,
        }


def phi_series(f, report=False, M_cap=None):
    """Frobenius u -> u^p with sigma on coefficients.

    The value is stored at the ambient truncation M; with ``report=True`` the
    u-precision actually determined by the input, min(p * uprec, M_cap), is
    returned alongside.
    """
    ring, p = f.ring, f.params.p
    out = ring.zeros()
    idx = np.arange(0, ring.M, p)
    src = f.c[: len(idx)]
    out[idx] = f.params.vsigma(src)
    known = p * f.uprec
    val = SeriesS(ring, out, min(known, ring.M), f.exact and p * f.degree() < ring.M)
    if report:
        cap = p * ring.M if M_cap is None else M_cap
        return val, min(known, cap)
    return val


class EisensteinP:
    """An Eisenstein polynomial normalised by P(0) = p."""

    def __init__(self, params, coeffs):
        coeffs = [WittElem(params, c) for c in coeffs]
        if len(coeffs) < 2:
            raise ParamsError("Eisenstein polynomial needs degree >= 1")
        p = params.p
        if coeffs[0] != WittElem(params, p):
            raise ParamsError("P(0) must equal p exactly")
        if any(c.is_unit() for c in coeffs[1:-1]):
            raise ParamsError("middle coefficients must be divisible by p")
        if not coeffs[-1].is_unit():
            raise ParamsError("leading coefficient must be a unit")
        self.params = params
        self.coeffs = coeffs
        self.e = len(coeffs) - 1

    def series(self, ring):
        return ring(self.coeffs)

    def leading(self):
        return self.coeffs[-1]

    def power_coeffs(self, h):
        """Coefficients of P^h as a list of WittElems."""
        out = [WittElem(self.params, 1)]
        for _ in range(h):
            new = [WittElem(self.params, 0)] * (len(out) + self.e)
            for i, a in enumerate(out):
                for j, b in enumerate(self.coeffs):
                    new[i + j] = new[i + j] + a * b
            out = new
        return out

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    def __repr__(self):
        return f"EisensteinP({[c for c in self.coeffs]})"


@dataclass
class WeierstrassResult:
    """f = quotient * P^h + remainder, with the precision each part is known to."""

    quotient: SeriesS
    remainder: SeriesS
    quotient_uprec: int
    remainder_eff_N: int
    steps: int


def weierstrass_divide(f, P, h=1):
    """Divide by P^h by successive approximation in powers of p.

    P^h = U u^{he} + p T with U a unit and deg T < he, so each pass moves the
    part of f above degree he into the quotient at the cost of a factor p.
    After at most N passes the high part vanishes. An unknown tail beyond
    u^uprec reaches the quotient down to degree uprec - N deg(P^h), one
    factor of p per pass, so that is the quotient's u-precision.
    """
    if h < 1:
        raise ParamsError("h must be >= 1")
    ring, params = f.ring, f.params
    p, N, M = params.p, params.N, ring.M
    Q = P.power_coeffs(h)
    d = len(Q) - 1
    if d >= M:
        raise PrecisionError(f"u-precision {M} too small to divide by P^{h}")
    U_inv = Q[-1].inv()
    T = ring([c.divide_by_p() * U_inv for c in Q[:-1]])
    g = SeriesS(ring, f.c, f.uprec)
    quot = ring.zeros()
    steps = 0
    for steps in range(1, N + 2):
        high = g.c[d:]
        if not (high % params.q).any():
            break
        top = ring.zeros()
        top[: M - d] = high
        top_s = SeriesS(ring, top)
        qpart = top_s * U_inv
        quot += qpart.c
        low = ring.zeros()
        low[:d] = g.c[:d]
        g = SeriesS(ring, low) - (qpart * T) * p
    else:
        raise PrecisionError("Weierstrass division did not terminate")
    q_uprec = f.uprec if f.exact else max(f.uprec - N * d, 0)
    r_eff = min(N, f.uprec // d)
    rem = SeriesS(ring, g.c, exact=True)
    return WeierstrassResult(SeriesS(ring, quot, q_uprec), rem, q_uprec, r_eff, steps)


@dataclass
class PUnitFactorization:
    exponent: int
    unit: bool
    cofactor: SeriesS


def p_unit_factorization(f, P):
    """Largest s with P^s | f, and whether the cofactor is a unit of W(k)[[u]]."""
    s = 0
    g = f
    while True:
        if g.is_zero():
            raise PrecisionError("series is zero at working precision; divisibility undecidable")
        if g.uprec <= P.e:
            raise PrecisionError("u-precision exhausted while dividing by P")
        res = weierstrass_divide(g, P, 1)
        if res.remainder_eff_N <= 0:
            raise PrecisionError("remainder undecidable at working precision")
        if res.remainder.is_zero(res.remainder_eff_N):
            s += 1
            g = res.quotient
        else:
            break
    return PUnitFactorization(s, g.is_unit(), g)


def extend_series(f, big, cols):
    """Image of f under W(k)[[u]] -> W(k')[[u]] for the embedding ``cols`` of W(k) in W(k')."""
    ring = series_ring(big, f.ring.M)
    E = np.array(cols, dtype=object)
    arr = (f.c.astype(object) @ E) % big.q
    return SeriesS(ring, arr, f.uprec, f.exact)


def extend_witt(a, big, cols):
    E = np.array(cols, dtype=object)
    return WittElem(big, list((np.array(a.coords, dtype=object) @ E) % big.q))
