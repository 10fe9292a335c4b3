"""Breuil's ring S in the divided basis u^i / q(i)!, q(i) = floor(i / e).

An element is a coordinate array b (one W(k)-coordinate vector per index)
standing for sum_i b_i u^i / q(i)!. Products and Frobenius only ever pick up
integer weights, computed exactly before reduction mod p^N. Division by p
(for phi_1) lowers ``eff_N``, the p-adic precision that is still meaningful.

The quotient S / Fil^1 S is modelled as O_K = W(k)[u] / (P), so Fil^1
membership becomes "evaluates to zero at pi".
"""

from functools import lru_cache
from math import factorial

import numpy as np

from .coeffs import WittElem
from .errors import FilError, ParamsError, PrecisionError, UnitError
from .series import SeriesS


def _vp_int(x, p):
    v = 0
    while x and x % p == 0:
        x //= p
        v += 1
    return v


class SRing:
    """S truncated at index M_S and reduced mod p^N."""

    def __init__(self, P, M):
        self.P = P
        self.params = P.params
        self.e = P.e
        self.M = M
        p, q, e = self.params.p, self.params.q, self.e
        self.qidx = [i // e for i in range(M)]
        self.fact = [factorial(k) for k in range(max(self.qidx) * p + 2)]
        # embed weight q(i)! and the N eigenvalue -i
        self.embed_w = np.array([self.fact[k] % q for k in self.qidx], dtype=object)
        self.dtype = self.params.dtype_for(M * self.params.r * self.params.r + 1)
        self._mul_w = None
        self._phi_w = None
        self._pi_table = None

    def key(self):
        return (self.params.key(), tuple(c.coords for c in self.P.coeffs), self.M)

    def __eq__(self, other):
        return isinstance(other, SRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SRing(e={self.e}, M={self.M}, {self.params!r})"

    # -- weight tables --------------------------------------------------------

    def mul_weights(self):
        """W[i, j] = q(i+j)! / (q(i)! q(j)!) mod p^N for i + j < M."""
        if self._mul_w is None:
            M, q, e = self.M, self.params.q, self.e
            W = np.zeros((M, M), dtype=self.dtype)
            for i in range(M):
                for j in range(M - i):
                    w = self.fact[(i + j) // e] // (self.fact[i // e] * self.fact[j // e])
                    W[i, j] = w % q
            self._mul_w = W
        return self._mul_w

    def phi_weights(self):
        """Weight q(pi)! / q(i)! for each source index i with pi < M."""
        if self._phi_w is None:
            p, q, e = self.params.p, self.params.q, self.e
            n = (self.M - 1) // p + 1
            self._phi_w = np.array(
                [(factorial(p * i // e) // self.fact[i // e]) % q for i in range(n)], dtype=self.dtype
            )
        return self._phi_w

    def pi_table(self):
        """Array T of shape (M, e, r): the class of u^i / q(i)! in W(k)[u]/(P), mod p^N.

        u^i is reduced modulo P at raised precision N + v_p(q(i)!), where the
        exact division by q(i)! is possible because pi^i is divisible by p^q(i).
        """
        if self._pi_table is None:
            p, e, M, N = self.params.p, self.e, self.M, self.params.N
            extra = max(_vp_int(self.fact[k], p) for k in self.qidx)
            hi = self.params.with_precision(N + extra)
            if any((a - b) % self.params.q for a, b in zip(hi.f, self.params.f)):
                raise ParamsError("defining polynomial does not lift to the raised precision")
            coeffs = [WittElem(hi, list(c.coords)) for c in self.P.coeffs]
            lead_inv = coeffs[-1].inv()
            tail = [-(c * lead_inv) for c in coeffs[:-1]]
            T = np.zeros((M, e, self.params.r), dtype=object)
            cur = [WittElem(hi, 1)] + [WittElem(hi, 0)] * (e - 1)
            for i in range(M):
                d = self.fact[self.qidx[i]]
                v = _vp_int(d, p)
                unit_inv = pow(d // p ** v, -1, self.params.q)
                for k in range(e):
                    coords = cur[k].coords
                    if any(c % p ** v for c in coords):
                        raise PrecisionError("divided evaluation is not integral")
                    T[i, k] = [(c // p ** v) * unit_inv % self.params.q for c in coords]
                top = cur[-1]
                cur = [WittElem(hi, 0)] + cur[:-1]
                cur = [a + top * t for a, t in zip(cur, tail)]
            self._pi_table = T
        return self._pi_table

    # -- constructors -----------------------------------------------------------

    def zeros(self):
        return np.zeros((self.M, self.params.r), dtype=self.dtype)

    def zero(self):
        return SElem(self, self.zeros(), exact=True)

    def one(self):
        return self.const(1)

    def const(self, c):
        arr = self.zeros()
        arr[0] = WittElem(self.params, c).coords
        return SElem(self, arr, exact=True)

    def basis(self, i):
        """The divided basis element u^i / q(i)!."""
        arr = self.zeros()
        arr[i, 0] = 1
        return SElem(self, arr, exact=True)

    def tail_precision(self):
        """Lower bound on v_p of pi^i / q(i)! over all dropped indices i >= M.

        With Q = q(M), v_p(pi^i / q(i)!) >= Q - (Q - 1)/(p - 1), which stays
        at 1 for p = 2: truncating S in u does not control the value at pi.
        """
        p, Q = self.params.p, self.M // self.e
        return max(1, -(-(Q * (p - 2) + 1) // (p - 1)))

    def __call__(self, x):
        if isinstance(x, SElem):
            return x
        if isinstance(x, SeriesS):
            return self.embed(x)
        return self.const(x)

    def embed(self, f):
        """The inclusion W(k)[[u]] -> S: b_i = q(i)! a_i."""
        m = min(self.M, f.ring.M)
        arr = self.zeros()
        w = self.embed_w[:m].reshape(-1, 1)
        arr[:m] = (f.c[:m].astype(object) * w) % self.params.q
        return SElem(self, arr, exact=f.exact and f.degree() < self.M)

    def gamma_P(self, k):
        """The divided power P^k / k!, computed from embed(P)^k by exact division."""
        P = self.embed(self.P.series(_series_ring_for(self)))
        prod = self.one()
        for _ in range(k):
            prod = prod * P
        return divide_by_integer(prod, factorial(k))

    def c1(self):
        """phi(P) / p, which must be a unit of S."""
        P = self.embed(self.P.series(_series_ring_for(self)))
        c = phi1_S(P)
        if not c.constant().is_unit():
            raise UnitError("phi(P)/p is not a unit")
        return c


@lru_cache(maxsize=None)
def s_ring(P_key, P, M):
    return SRing(P, M)


def make_sring(P, M):
    key = (P.params.key(), tuple(c.coords for c in P.coeffs))
    return s_ring(key, P, M)


def _series_ring_for(S):
    from .series import series_ring

    return series_ring(S.params, S.M)


class SElem:
    """sum_i b_i u^i / q(i)!, known mod p^eff_N."""

    __slots__ = ("ring", "c", "eff_N", "exact")

    def __init__(self, ring, c, eff_N=None, exact=False):
        self.ring = ring
        c = np.asarray(c)
        if c.dtype != ring.dtype:
            c = c.astype(ring.dtype)
        self.c = c % ring.params.q
        self.eff_N = ring.params.N if eff_N is None else eff_N
        # exact: no support at or beyond index M in the untruncated element
        self.exact = exact

    def degree(self):
        nz = np.nonzero(self.c.any(axis=1))[0]
        return int(nz[-1]) if len(nz) else -1

    @property
    def params(self):
        return self.ring.params

    def _other(self, other):
        if isinstance(other, SElem):
            if other.ring != self.ring:
                raise ParamsError("S rings differ")
            return other
        if isinstance(other, SeriesS):
            return self.ring.embed(other)
        if isinstance(other, (int, np.integer, WittElem)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return SElem(self.ring, self.c + other.c, min(self.eff_N, other.eff_N), self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return SElem(self.ring, -self.c, self.eff_N, self.exact)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return SElem(self.ring, self.c - other.c, min(self.eff_N, other.eff_N), self.exact and other.exact)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return SElem(self.ring, self.c * (int(other) % self.params.q), self.eff_N, self.exact)
        other = self._other(other)
        if other is NotImplemented:
            return other
        exact = self.exact and other.exact and self.degree() + other.degree() < self.ring.M
        return SElem(self.ring, sm_mul_coords(self.ring, self.c, other.c), min(self.eff_N, other.eff_N), exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return False
        m = self.params.p ** min(self.eff_N, other.eff_N)
        return not ((self.c - other.c) % m).any()

    def __hash__(self):
        return hash((self.ring.key(), self.c.tobytes()))

    def __repr__(self):
        terms = []
        for i in range(self.ring.M):
            if self.c[i].any():
                co = self.c[i, 0] if self.params.r == 1 else list(self.c[i])
                terms.append(f"{co}*g{i}")
        body = " + ".join(terms[:8]) + (" + ..." if len(terms) > 8 else "")
        return f"SElem[{body or '0'}; eff_N={self.eff_N}]"

    def coeff(self, i):
        return WittElem(self.params, list(self.c[i]))

    def constant(self):
        return self.coeff(0)

    def is_zero(self):
        return not (self.c % self.params.p ** self.eff_N).any()

    def phi(self):
        return phi_S(self)

    def inv(self):
        """Inverse of a unit: Newton iteration x <- x (2 - f x) from the constant inverse."""
        if not self.constant().is_unit():
            raise UnitError("constant coordinate is not a unit")
        x = self.ring.const(self.constant().inv())
        for _ in range(max(1, (self.ring.M - 1).bit_length()) + 1):
            x = x * (2 - self * x)
        return SElem(self.ring, x.c, self.eff_N, self.exact and self.degree() <= 0)

    def to_json(self):
        nz = np.nonzero(self.c.any(axis=1))[0]
        top = int(nz[-1]) + 1 if len(nz) else 1
        return {
            "coeffs": [[int(x) for x in row] for row in self.c[:top]],
            "N": self.params.N,
            "M": self.ring.M,
            "divided": True,
            "eff_N": self.eff_N,
        }


def sm_mul_coords(S, a, b):
    """Weighted convolution of divided-basis coordinate arrays."""
    M, r, q = S.M, S.params.r, S.params.q
    W = S.mul_weights()
    ia = np.nonzero(a.any(axis=1))[0]
    ib = np.nonzero(b.any(axis=1))[0]
    out_wide = np.zeros((M, 2 * r - 1), dtype=S.dtype)
    if len(ia) == 0 or len(ib) == 0:
        return S.zeros()
    I, J = np.meshgrid(ia, ib, indexing="ij")
    mask = (I + J) < M
    I, J = I[mask], J[mask]
    w = W[I, J]
    K = I + J
    for s in range(r):
        aw = (a[I, s] * w) % q
        for t in range(r):
            np.add.at(out_wide[:, s + t], K, (aw * b[J, t]) % q)
    return S.params.vreduce(out_wide).astype(S.dtype)


def sm_mul(f, g):
    return f * g


def embed_frakS(S, f):
    return S.embed(f)


def phi_S(f):
    """Frobenius on S: u^i/q(i)! -> [q(pi)!/q(i)!] u^{pi}/q(pi)!, sigma on coefficients."""
    S = f.ring
    p = S.params.p
    w = S.phi_weights()
    n = len(w)
    out = S.zeros()
    src = S.params.vsigma(f.c[:n])
    out[::p][:n] = (src * w.reshape(-1, 1)) % S.params.q
    return SElem(S, out, f.eff_N, f.exact and p * f.degree() < S.M)


def n_S(f):
    """Monodromy N = -u d/du: scales the i-th coordinate by -i."""
    S = f.ring
    scale = -np.arange(S.M, dtype=S.dtype).reshape(-1, 1)
    return SElem(S, f.c * scale, f.eff_N, f.exact)


class OKElem:
    """An element of O_K = W(k)[u]/(P) as e coordinate vectors in the basis 1, u, ..., u^{e-1}."""

    __slots__ = ("ring", "c", "eff_N")

    def __init__(self, ring, c, eff_N=None):
        self.ring = ring
        self.c = np.asarray(c, dtype=object) % ring.params.q
        self.eff_N = ring.params.N if eff_N is None else eff_N

    def is_zero(self):
        return not (self.c % self.ring.params.p ** self.eff_N).any()

    def valuation(self):
        """pi-adic valuation, capped at e * eff_N."""
        p, e = self.ring.params.p, self.ring.e
        best = e * self.eff_N
        for k in range(e):
            for x in self.c[k]:
                x = int(x) % p ** self.eff_N
                if x:
                    best = min(best, e * _vp_int(x, p) + k)
        return best

    def __eq__(self, other):
        m = self.ring.params.p ** min(self.eff_N, other.eff_N)
        return not ((self.c - other.c) % m).any()

    def __add__(self, other):
        return OKElem(self.ring, self.c + other.c, min(self.eff_N, other.eff_N))

    def __sub__(self, other):
        return OKElem(self.ring, self.c - other.c, min(self.eff_N, other.eff_N))

    def __neg__(self):
        return OKElem(self.ring, -self.c, self.eff_N)

    def __mul__(self, other):
        S = self.ring
        a = self.c.reshape(S.e, S.params.r)
        b = other.c.reshape(S.e, S.params.r)
        out = np.zeros((S.e, S.params.r), dtype=object)
        T = S.pi_table()
        for i in range(S.e):
            for j in range(S.e):
                # q(i+j) <= 1 here, so the table row is plain u^{i+j} mod P
                out += S.params.vmul(S.params.vmul(a[i], b[j]), T[i + j])
        return OKElem(S, out % S.params.q, min(self.eff_N, other.eff_N))

    def is_unit(self):
        return bool(np.any(self.c[0] % self.ring.params.p))

    def inv(self):
        """Inverse of a unit by Newton iteration from the inverse of its constant coordinate."""
        if not self.is_unit():
            raise UnitError("element of O_K is not a unit")
        S = self.ring
        params = S.params
        x0 = np.zeros_like(self.c)
        x0[0] = WittElem(params, [int(v) for v in self.c[0]]).inv().coords
        x = OKElem(S, x0, self.eff_N)
        two = OKElem(S, _ok_const(S, 2), self.eff_N)
        for _ in range((S.e * params.N).bit_length() + 1):
            x = x * (two - self * x)
        return x

    def to_json(self):
        return [[int(x) for x in row] for row in self.c]

    def __repr__(self):
        return f"OK[{self.to_json()}]"


def _ok_const(S, c):
    arr = np.zeros((S.e, S.params.r), dtype=object)
    arr[0] = WittElem(S.params, c).coords
    return arr


def ok_const(S, c):
    return OKElem(S, _ok_const(S, c))


def ok_to_selem(x):
    """Lift sum_k c_k pi^k to the polynomial sum_k c_k u^k in S (indices below e carry no divided weight)."""
    S = x.ring
    arr = S.zeros()
    arr[: S.e] = x.c
    return SElem(S, arr, x.eff_N, exact=True)


def eval_pi(f):
    """Image of f in S / Fil^1 S = O_K, i.e. substitution u -> pi."""
    S = f.ring
    T = S.pi_table()
    eff = f.eff_N if f.exact else min(f.eff_N, S.tail_precision())
    if S.params.r == 1:
        vals = (f.c[:, 0].astype(object)[:, None] * T[:, :, 0]).sum(axis=0) % S.params.q
        return OKElem(S, vals.reshape(S.e, 1), eff)
    prod = S.params.vmul(f.c.astype(object)[:, None, :], T)
    return OKElem(S, prod.sum(axis=0) % S.params.q, eff)


def eval_pi_series(S, f):
    """Image of a series of W(k)[[u]] in O_K, known mod p^floor(uprec / e)."""
    return _eval_poly_pi(S, f)


def _eval_poly_pi(S, f):
    params = S.params
    e = S.e
    out = np.zeros((e, params.r), dtype=object)
    P = [np.array(c.coords, dtype=object) for c in S.P.coeffs]
    lead_inv = np.array(S.P.coeffs[-1].inv().coords, dtype=object)
    tail = [-params.vmul(c, lead_inv) % params.q for c in P[:-1]]
    cur = np.zeros((e, params.r), dtype=object)
    cur[0, 0] = 1
    top = f.degree() + 1
    for i in range(top):
        if f.c[i].any():
            out = (out + params.vmul(f.c[i].astype(object)[None, :], cur)) % params.q
        lead = cur[-1].copy()
        cur = np.roll(cur, 1, axis=0)
        cur[0] = 0
        cur = (cur + params.vmul(lead[None, :], np.array(tail))) % params.q
    eff = params.N if f.exact else min(params.N, f.uprec // e)
    return OKElem(S, out, eff)


def fil1_test(f):
    """Fil^1 membership; raises PrecisionError if the evaluation carries no information."""
    val = eval_pi(f)
    if not val.is_zero():
        return False
    if val.eff_N < f.eff_N:
        raise PrecisionError(
            f"value at pi vanishes only mod p^{val.eff_N}; truncated element is undecided"
        )
    return True


def divide_by_integer(f, d):
    """Exact division by an integer d = p^v * unit; lowers eff_N by v."""
    S = f.ring
    p, q = S.params.p, S.params.q
    v = _vp_int(d, p)
    unit = d // p ** v
    c = f.c.astype(object)
    pv = p ** v
    if (c % pv).any():
        raise PrecisionError(f"element is not divisible by p^{v} at working precision")
    c = (c // pv) * pow(unit, -1, q)
    return SElem(S, c, f.eff_N - v, f.exact)


def phi1_S(f):
    """phi / p on Fil^1 S."""
    if not fil1_test(f):
        raise FilError("element does not lie in Fil^1 S")
    g = phi_S(f)
    p = f.params.p
    if (g.c.astype(object) % p).any():
        raise PrecisionError("phi of a Fil^1 element is not divisible by p at working precision")
    return SElem(f.ring, g.c.astype(object) // p, g.eff_N - 1, g.exact)


def c1(S):
    return S.c1()


def phi1_of_P_multiple(S, x):
    """phi_1(P x) = c_1 phi(x), without a Fil^1 test on P x."""
    return S.c1() * phi_S(x)


def in_I0(f):
    """Membership in the ideal generated by u^{ei}/i!, i >= 1: no support below index e."""
    m = f.params.p ** f.eff_N
    return not (f.c[: f.ring.e] % m).any()
