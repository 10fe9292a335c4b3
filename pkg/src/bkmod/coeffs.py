"""Witt vectors of finite fields at finite precision.

W(k') for k' = F_{p^r} is modelled as (Z/p^N)[g]/(f) where the generator g
is the Teichmuller lift of a primitive element of k'. Because g is
Teichmuller, Frobenius acts on it by g -> g^p and Teichmuller lifts of
arbitrary residues are exact p^r-th power fixed points.

Arrays of coefficients have shape (..., r); the last axis holds coordinates
in the power basis 1, g, ..., g^{r-1}.
"""

from functools import lru_cache

import numpy as np

from .errors import ParamsError, UnitError
from . import modlin

_INT64_SAFE = 2 ** 62


# -- polynomials over Z/m as coefficient lists, lowest degree first ---------

def _pmul(a, b, m):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % m
    return out


def _pmod(a, f, m):
    """Remainder of a modulo monic f over Z/m."""
    a = [x % m for x in a]
    d = len(f) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] = (a[i - d + j] - c * f[j]) % m
    return (a + [0] * d)[:d]


def _ppow(a, e, f, m):
    result = [1]
    base = _pmod(a, f, m)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, m), f, m)
        base = _pmod(_pmul(base, base, m), f, m)
        e >>= 1
    return _pmod(result, f, m)


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def _is_primitive(fbar, p, r):
    """True iff x has multiplicative order p^r - 1 modulo fbar (so fbar is irreducible)."""
    order = p ** r - 1
    one = [1] + [0] * (r - 1)
    x = [0, 1] if r > 1 else [0]
    if r == 1:
        x = [(-fbar[0]) % p]
    if _ppow(x, order, fbar, p) != one:
        return False
    return all(_ppow(x, order // l, fbar, p) != one for l in _prime_factors(order))


def _primitive_poly(p, r):
    """Lexicographically first monic primitive polynomial of degree r over F_p."""
    if r == 1:
        for g in range(1, p):
            f = [(-g) % p, 1]
            if _is_primitive(f, p, 1):
                return f
    for code in range(p ** r):
        low = [(code // p ** i) % p for i in range(r)]
        f = low + [1]
        if f[0] and _is_primitive(f, p, r):
            return f
    raise ParamsError(f"no primitive polynomial of degree {r} over F_{p}")


class CoeffParams:
    """The coefficient ring W(F_{p^r}) / p^N with a Teichmuller generator.

    ``f`` is the monic defining polynomial (lowest degree first). When omitted,
    the lexicographically first primitive polynomial over F_p is lifted so
    that its roots are Teichmuller.
    """

    def __init__(self, p, r=1, N=6, f=None):
        if not _is_prime(p):
            raise ParamsError(f"p={p} is not prime")
        if r < 1 or N < 1:
            raise ParamsError("need r >= 1 and N >= 1")
        self.p, self.r, self.N = p, r, N
        self.q = p ** N
        if f is None:
            f = self._teichmuller_poly(_primitive_poly(p, r))
        f = [int(c) % self.q for c in f]
        if len(f) != r + 1 or f[-1] != 1:
            raise ParamsError("f must be monic of degree r")
        self.f = tuple(f)
        self._check_f()
        self.red = self._reduction_table()
        self.sigma_matrix = self._sigma_matrix()

    # -- construction -------------------------------------------------------

    def _teichmuller_poly(self, fbar):
        p, r, q = self.p, self.r, self.q
        if r == 1:
            t = pow((-fbar[0]) % p, p ** (self.N - 1), q)
            return [(-t) % q, 1]
        x = [0, 1]
        t = _ppow(x, (p ** r) ** (self.N - 1), fbar, q)
        powers = [[1] + [0] * (r - 1)]
        for _ in range(r):
            powers.append(_pmod(_pmul(powers[-1], t, q), fbar, q))
        T = [[powers[j][i] for j in range(r)] for i in range(r)]
        c = modlin.solve_mod(T, powers[r], p, self.N)
        return [(-ci) % q for ci in c] + [1]

    def _check_f(self):
        p, r, q = self.p, self.r, self.q
        fbar = [c % p for c in self.f]
        if not _is_primitive(fbar, p, r) and not self._irreducible(fbar):
            raise ParamsError("f mod p is not irreducible")
        if r > 1:
            lhs = [q - 1] + [0] * (p ** r - 2) + [1]
            if any(_pmod(lhs, list(self.f), q)):
                raise ParamsError("f does not divide x^(p^r-1) - 1; generator is not Teichmuller")

    def _irreducible(self, fbar):
        p, r = self.p, self.r
        x = [0, 1]
        for d in range(1, r // 2 + 1):
            h = _ppow(x, p ** d, fbar, p)
            h = [(a - b) % p for a, b in zip(h, x + [0] * (r - 2))]
            if self._pgcd_deg(fbar, h) > 0:
                return False
        return True

    def _pgcd_deg(self, a, b):
        p = self.p

        def trim(v):
            v = [x % p for x in v]
            while v and v[-1] == 0:
                v.pop()
            return v

        a, b = trim(a), trim(b)
        while b:
            inv = pow(b[-1], -1, p)
            while len(a) >= len(b):
                c = a[-1] * inv % p
                s = len(a) - len(b)
                for i, y in enumerate(b):
                    a[s + i] = (a[s + i] - c * y) % p
                a = trim(a)
                if not a:
                    break
            a, b = b, a
        return len(a) - 1

    def _reduction_table(self):
        """Row j holds the coordinates of g^j for j < 2r - 1."""
        r, q = self.r, self.q
        rows = []
        for j in range(2 * r - 1):
            mono = [0] * j + [1]
            rows.append(_pmod(mono, list(self.f), q))
        return np.array(rows, dtype=object)

    def _sigma_matrix(self):
        """Columns are sigma(g^i); sigma(g) is the Newton-refined root of f near g^p."""
        r, q, p = self.r, self.q, self.p
        f = list(self.f)
        df = [(i * c) % q for i, c in enumerate(f)][1:]
        z = self.power_coords(self.gen_coords(), p)
        for _ in range(self.N.bit_length() + 1):
            fz = self._eval_poly(f, z)
            dfz = self._eval_poly(df, z)
            z = self._sub(z, self._mul(fz, self._inv_coords(dfz)))
        if any(self._eval_poly(f, z)):
            raise ParamsError("Hensel lift of Frobenius failed")
        cols = [[1] + [0] * (r - 1)]
        for _ in range(1, r):
            cols.append(self._mul(cols[-1], z))
        return [[cols[j][i] for j in range(r)] for i in range(r)]

    # -- scalar coordinate arithmetic (tuples of ints) ----------------------

    def gen_coords(self):
        if self.r == 1:
            return [(-self.f[0]) % self.q]
        return [0, 1] + [0] * (self.r - 2)

    def _mul(self, a, b):
        r, q = self.r, self.q
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        out = [0] * r
        for j, c in enumerate(prod):
            if c:
                for i in range(r):
                    out[i] += c * int(self.red[j][i])
        return [x % q for x in out]

    def _sub(self, a, b):
        return [(x - y) % self.q for x, y in zip(a, b)]

    def _eval_poly(self, poly, z):
        acc = [0] * self.r
        for c in reversed(poly):
            acc = self._mul(acc, z)
            acc[0] = (acc[0] + c) % self.q
        return acc

    def power_coords(self, a, e):
        result = [1] + [0] * (self.r - 1)
        base = list(a)
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    def _inv_coords(self, a):
        p, r = self.p, self.r
        if not any(x % p for x in a):
            raise UnitError("element is not a unit")
        # residue inverse via a^(p^r - 2), then Newton doubling
        x = [c % p for c in self.power_coords([c % p for c in a], p ** r - 2)]
        x = [c % self.q for c in x]
        for _ in range(self.N.bit_length() + 1):
            ax = self._mul(a, x)
            two_minus = [(-c) % self.q for c in ax]
            two_minus[0] = (two_minus[0] + 2) % self.q
            x = self._mul(x, two_minus)
        return x

    # -- vectorised arithmetic on arrays of shape (..., r) -----------------

    def dtype_for(self, terms):
        """int64 when sums of ``terms`` products of residues mod p^N cannot overflow."""
        return np.int64 if terms * self.q * self.q < _INT64_SAFE else object

    def vreduce(self, wide):
        """Reduce an array (..., 2r-1) of power-basis coordinates to (..., r)."""
        wide = wide % self.q
        red = self.red.astype(wide.dtype) if wide.dtype != object else self.red
        return (wide @ red) % self.q

    def vmul(self, a, b):
        r = self.r
        shape = np.broadcast_shapes(a.shape, b.shape)
        dtype = object if object in (a.dtype, b.dtype) else self.dtype_for(2 * r)
        wide = np.zeros(shape[:-1] + (2 * r - 1,), dtype=dtype)
        for i in range(r):
            for j in range(r):
                wide[..., i + j] += a[..., i].astype(dtype) * b[..., j].astype(dtype)
        return self.vreduce(wide)

    def vsigma(self, a, times=1):
        if self.r == 1 or times % self.r == 0:
            return a.copy()
        S = np.array(self.sigma_matrix, dtype=object)
        out = a.astype(object)
        for _ in range(times % self.r if self.r > 1 else 0):
            out = (out @ S.T) % self.q
        return out.astype(a.dtype) if a.dtype != object else out

    # -- element constructors -------------------------------------------------

    def __call__(self, value):
        return WittElem(self, value)

    def zero(self):
        return WittElem(self, 0)

    def one(self):
        return WittElem(self, 1)

    def gen(self):
        return WittElem(self, self.gen_coords())

    def key(self):
        return (self.p, self.r, self.N, self.f)

    def __eq__(self, other):
        return isinstance(other, CoeffParams) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"CoeffParams(p={self.p}, r={self.r}, N={self.N})"

    def with_precision(self, N):
        if self.r == 1:
            return CoeffParams(self.p, 1, N)
        if N <= self.N:
            return CoeffParams(self.p, self.r, N, [c % self.p ** N for c in self.f])
        return CoeffParams(self.p, self.r, N)

    def residue_field_elements(self):
        """All residue coordinate vectors, lexicographic order."""
        p, r = self.p, self.r
        for code in range(p ** r):
            yield tuple((code // p ** i) % p for i in range(r))

    def extension(self, d):
        return _extension(self, d)


@lru_cache(maxsize=64)
def _extension_cached(p, r, N, f, d):
    base = CoeffParams(p, r, N, list(f))
    big = CoeffParams(p, r * d, N)
    if r == 1:
        return big, ((1,) + (0,) * (big.r - 1),)
    Q = p ** r - 1
    step = (p ** (r * d) - 1) // Q
    g = big.gen_coords()
    for m in range(1, Q + 1):
        if Q > 1 and any(m % l == 0 for l in _prime_factors(Q)):
            continue
        y = big.power_coords(g, step * m)
        if not any(big._eval_poly(list(base.f), y)):
            break
    else:
        raise ParamsError("no Teichmuller root of f in the extension")
    cols = [[1] + [0] * (r * d - 1)]
    for _ in range(1, r):
        cols.append(big._mul(cols[-1], y))
    return big, tuple(tuple(c) for c in cols)


def _extension(params, d):
    """Return (big_params, embedding) with W(k) -> W(k_d) given by ``embedding``.

    ``embedding`` is an r-tuple of big-coordinate vectors: the images of g^i.
    """
    big, cols = _extension_cached(params.p, params.r, params.N, params.f, d)
    return big, cols


def embed_coords(cols, big, coords):
    out = [0] * big.r
    for c, col in zip(coords, cols):
        if c:
            for i, x in enumerate(col):
                out[i] = (out[i] + c * x) % big.q
    return out


class WittElem:
    """An element of W(k')/p^N in the power basis of the Teichmuller generator."""

    __slots__ = ("params", "coords")

    def __init__(self, params, value):
        self.params = params
        if isinstance(value, WittElem):
            if value.params != params:
                raise ParamsError("coefficient rings differ")
            value = value.coords
        if isinstance(value, (int, np.integer)):
            value = [int(value)] + [0] * (params.r - 1)
        value = [int(x) % params.q for x in value]
        if len(value) != params.r:
            raise ParamsError(f"expected {params.r} coordinates, got {len(value)}")
        self.coords = tuple(value)

    def _coerce(self, other):
        if isinstance(other, WittElem):
            if other.params != self.params:
                raise ParamsError("coefficient rings differ")
            return other
        if isinstance(other, (int, np.integer)):
            return WittElem(self.params, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WittElem(self.params, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return WittElem(self.params, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WittElem(self.params, self.params._mul(self.coords, other.coords))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        return WittElem(self.params, self.params.power_coords(self.coords, e))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coords == other.coords

    def __hash__(self):
        return hash((self.params.key(), self.coords))

    def __repr__(self):
        if self.params.r == 1:
            return f"W({self.coords[0]})"
        return f"W{list(self.coords)}"

    def is_zero(self):
        return not any(self.coords)

    def is_unit(self):
        return any(c % self.params.p for c in self.coords)

    def valuation(self):
        """p-adic valuation, N for zero."""
        p, N = self.params.p, self.params.N
        v = N
        for c in self.coords:
            if c:
                w = 0
                while c % p == 0:
                    c //= p
                    w += 1
                v = min(v, w)
        return v

    def inv(self):
        if not self.is_unit():
            raise UnitError(f"{self!r} is not a unit")
        return WittElem(self.params, self.params._inv_coords(self.coords))

    def sigma(self, times=1):
        arr = np.array(self.coords, dtype=object)
        return WittElem(self.params, list(self.params.vsigma(arr, times)))

    def residue(self):
        return ResidueElem(self.params, [c % self.params.p for c in self.coords])

    def divide_by_p(self, k=1):
        """Exact division by p^k; the result is only meaningful mod p^(N-k)."""
        pk = self.params.p ** k
        if any(c % pk for c in self.coords):
            raise UnitError(f"{self!r} is not divisible by p^{k}")
        return WittElem(self.params, [c // pk for c in self.coords])

    def to_json(self):
        return list(self.coords)


class ResidueElem:
    """An element of the residue field F_{p^r}, coordinates mod p."""

    __slots__ = ("params", "coords")

    def __init__(self, params, coords):
        self.params = params
        if isinstance(coords, (int, np.integer)):
            coords = [int(coords)] + [0] * (params.r - 1)
        self.coords = tuple(int(c) % params.p for c in coords)

    def __add__(self, other):
        return ResidueElem(self.params, [a + b for a, b in zip(self.coords, other.coords)])

    def __mul__(self, other):
        prod = self.params._mul(self.coords, other.coords)
        return ResidueElem(self.params, prod)

    def __eq__(self, other):
        return isinstance(other, ResidueElem) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"Res{list(self.coords)}"

    def is_zero(self):
        return not any(self.coords)


def teichmuller(res):
    """Teichmuller lift: the unique (p^r)-th power fixed point reducing to ``res``."""
    params = res.params
    lift = WittElem(params, list(res.coords))
    if params.N == 1:
        return lift
    return lift ** ((params.p ** params.r) ** (params.N - 1))
