"""Frobenius modules over W(k)[[u]] of finite height.

Matrix convention, used everywhere: phi(e_j) = sum_i A[i][j] e_i, so columns
are images of basis vectors. With it, changing basis by X gives
X^{-1} A phi(X), a matrix F is a morphism iff A_tgt phi(F) = F A_src, and the
n-fold Frobenius has matrix A phi(A) ... phi^{n-1}(A).
"""

from dataclasses import dataclass, field
from math import ceil, log

import numpy as np

from . import matrix as mx
from .coeffs import WittElem
from .errors import (
    EquivarianceError,
    HeightError,
    NotIsogeny,
    ParamsError,
    PrecisionError,
    ResidualUnsolvable,
)
from .modlin import rref_mod_p, smith_mod
from .series import extend_series, extend_witt, p_unit_factorization, series_ring, weierstrass_divide


class PhiModule:
    """A free module with Frobenius matrix A, Eisenstein polynomial P and declared height h."""

    def __init__(self, A, P, h=1, V=None, ring=None):
        self.A = [list(row) for row in A]
        self.P = P
        self.h = h
        self.V = V
        self.n = len(A)
        if ring is None:
            if not self.n:
                raise ParamsError("rank-0 module needs an explicit ring")
            ring = A[0][0].ring
        self.ring = ring
        for row in self.A:
            if len(row) != self.n or any(a.ring != ring for a in row):
                raise ParamsError("Frobenius matrix must be square over one series ring")

    @property
    def params(self):
        return self.ring.params

    def __repr__(self):
        return f"PhiModule(rank={self.n}, h={self.h}, {self.ring!r})"

    def validated(self):
        if self.V is None:
            validate_height(self)
        return self

    def to_json(self):
        return {
            "rank": self.n,
            "h": self.h,
            "A": [[a.to_json() for a in row] for row in self.A],
        }


def rank_zero(ring, P, h=1):
    return PhiModule([], P, h, V=[], ring=ring)


@dataclass
class ModuleMap:
    """A morphism given by its matrix in the standard bases (columns are images)."""

    source: PhiModule
    target: PhiModule
    F: list

    def is_equivariant(self):
        if self.source.n == 0 or self.target.n == 0:
            return True
        lhs = mx.mat_mul(self.target.A, mx.mat_phi(self.F))
        rhs = mx.mat_mul(self.F, self.source.A)
        return mx.mat_equal(lhs, rhs)

    def check(self):
        if not self.is_equivariant():
            raise EquivarianceError("A_target phi(F) != F A_source")
        return self


@dataclass
class HeightCheck:
    ok: bool
    V: list
    det_exponent: int
    uprec: int


def _power(P, ring, k):
    return P.series(ring) ** k


def validate_height(M):
    """Check that P^h annihilates the cokernel of the linearised Frobenius and cache V.

    det(A) must be P^s times a unit; then V = P^h adj(A) / det(A) is integral
    exactly when each adjugate entry is divisible by P^(s-h). Polynomial
    matrices are processed in a ring enlarged by n*h*e so that the quotients
    keep the full u-precision.
    """
    n, h, P, ring = M.n, M.h, M.P, M.ring
    if n == 0:
        M.V = []
        return HeightCheck(True, [], 0, ring.M)
    exact = all(a.exact for row in M.A for a in row)
    work = series_ring(ring.params, ring.M + n * h * P.e) if exact else ring
    A = [[work.coerce(a) for a in row] for row in M.A]
    d = mx.det(A, work)
    if d.is_zero():
        raise PrecisionError("det(A) vanishes at working precision")
    fac = p_unit_factorization(d, P)
    s = fac.exponent
    if not fac.unit:
        raise HeightError(f"det(A) = P^{s} * c with c not a unit", entry="det")
    if s > n * h:
        raise HeightError(f"det(A) divisible by P^{s}, more than P^{n * h}", entry="det")
    adj = mx.adjugate(A, work)
    cinv = fac.cofactor.inv()
    if s <= h:
        scale = _power(P, work, h - s) * cinv
        V = mx.mat_scale(scale, adj)
    else:
        V = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                res = weierstrass_divide(adj[i][j], P, s - h)
                if res.remainder_eff_N <= 0:
                    raise PrecisionError("divisibility by P undecidable at working precision")
                if not res.remainder.is_zero(res.remainder_eff_N):
                    raise HeightError(f"adjugate entry ({i}, {j}) is not divisible by P^{s - h}", entry=(i, j))
                V[i][j] = res.quotient * cinv
    V = [[ring.coerce(v) for v in row] for row in V]
    target = mx.mat_scale(_power(P, ring, h), mx.identity(ring, n))
    if not (mx.mat_equal(mx.mat_mul(M.A, V), target) and mx.mat_equal(mx.mat_mul(V, M.A), target)):
        raise HeightError("A V = V A = P^h Id fails at working precision", entry="V")
    M.V = V
    uprec = min(v.uprec for row in V for v in row)
    return HeightCheck(True, V, s, uprec)


def dual(M):
    """The dual module: matrix V^T, whose own Verschiebung is A^T."""
    M.validated()
    return PhiModule(mx.transpose(M.V), M.P, M.h, V=mx.transpose(M.A), ring=M.ring)


def change_basis(M, X):
    """The same module in the basis given by the columns of X, plus the map to M."""
    Xinv = mx.inverse(X, M.ring)
    B = mx.mat_mul(mx.mat_mul(Xinv, M.A), mx.mat_phi(X))
    N = PhiModule(B, M.P, M.h, ring=M.ring)
    return N, ModuleMap(N, M, X)


# -- residue-level helpers ------------------------------------------------------


def residue_params(params):
    return params.with_precision(1)


def residue_matrix(A, params):
    """A mod (p, u) with entries in the residue field (WittElem at precision 1)."""
    kp = residue_params(params)
    return [[WittElem(kp, [c % params.p for c in a.coeff(0).coords]) for a in row] for row in A]


def _sigma_mat(B, times):
    return [[b.sigma(times) for b in row] for row in B]


def residue_frobenius_power(Abar, n):
    """Abar sigma(Abar) ... sigma^{n-1}(Abar) over the residue field."""
    out = Abar
    for i in range(1, n):
        out = mx.mat_mul(out, _sigma_mat(Abar, i))
    return out


def is_residually_nilpotent(A, params):
    n = len(A)
    if n == 0:
        return True
    B = residue_frobenius_power(residue_matrix(A, params), n)
    return all(b.is_zero() for row in B for b in row)


@dataclass
class Classification:
    etale: bool
    multiplicative: bool
    nilpotent: bool
    unipotent: bool
    det_exponent: int

    def as_dict(self):
        return {
            "etale": self.etale,
            "multiplicative": self.multiplicative,
            "nilpotent": self.nilpotent,
            "unipotent": self.unipotent,
            "det_exponent": self.det_exponent,
        }


def classify(M):
    """Etale / multiplicative from the P-adic valuation of det(A); nilpotent / unipotent mod (p, u)."""
    M.validated()
    if M.n == 0:
        return Classification(True, True, True, True, 0)
    d = mx.det(M.A, M.ring)
    fac = p_unit_factorization(d, M.P)
    s = fac.exponent
    return Classification(
        etale=s == 0,
        multiplicative=s == M.n * M.h,
        nilpotent=is_residually_nilpotent(M.A, M.params),
        unipotent=is_residually_nilpotent(mx.transpose(M.V), M.params),
        det_exponent=s,
    )


# -- connected-etale decomposition -------------------------------------------------


@dataclass
class Decomposition:
    """0 -> sub -> M -> quotient -> 0 with explicit bases.

    ``inclusion`` maps sub into M, ``projection`` maps M onto quotient and
    ``section`` holds lifts to M of the quotient basis. ``basis`` is the
    adapted basis (inclusion columns followed by section columns).
    """

    sub: PhiModule
    quotient: PhiModule
    inclusion: ModuleMap
    projection: ModuleMap
    section: list
    basis: list
    iterations: int = 0


def _lift_residue_vector(v, params):
    return [WittElem(params, list(x.coords)) for x in v]


def fitting_basis(M):
    """Residual basis adapted to k^n = image(T^n) + kernel(T^n), T the semilinear Frobenius."""
    n, params = M.n, M.params
    kp = residue_params(params)
    Abar = residue_matrix(M.A, params)
    B = residue_frobenius_power(Abar, n)
    img = mx.field_column_basis(B)
    ker = mx.field_kernel_basis(B, kp.zero(), kp.one())
    back = (-n) % params.r
    ker = [[x.sigma(back) for x in v] for v in ker]
    cols = img + ker
    X = [[cols[j][i] for j in range(n)] for i in range(n)]
    return len(img), [[M.ring.const(c) for c in row] for row in (_lift_rows(X, params))]


def _lift_rows(X, params):
    return [_lift_residue_vector(row, params) for row in X]


def _split(A, d):
    top = [row[:d] for row in A[:d]]
    tr = [row[d:] for row in A[:d]]
    bl = [row[:d] for row in A[d:]]
    br = [row[d:] for row in A[d:]]
    return top, tr, bl, br


def connected_etale(M, budget=None):
    """Maximal etale submodule and phi-nilpotent quotient.

    After a residual Fitting change of basis the matrix is block diagonal mod
    (p, u). The lower-left block is then killed by Y = [[I, 0], [S, I]] with
    S the fixed point of S = (c + d phi(S)) (a + b phi(S))^{-1}; the map is
    contracting for the (p, u)-adic filtration because d is residually
    nilpotent and c lies in the maximal ideal.
    """
    M.validated()
    n, ring, P, h = M.n, M.ring, M.P, M.h
    d, X = fitting_basis(M)
    Xinv = mx.inverse(X, ring)
    A1 = mx.mat_mul(mx.mat_mul(Xinv, M.A), mx.mat_phi(X))
    iterations = 0
    if 0 < d < n:
        a, b, c, dd = _split(A1, d)
        S = mx.zeros(ring, n - d, d)
        if budget is None:
            budget = n * (ring.params.N + ring.M) + 2
        for iterations in range(1, budget + 1):
            phS = mx.mat_phi(S)
            top = mx.mat_add(a, mx.mat_mul(b, phS))
            new = mx.mat_mul(mx.mat_add(c, mx.mat_mul(dd, phS)), mx.inverse(top, ring))
            if mx.mat_equal(new, S):
                break
            S = new
        else:
            raise PrecisionError("connected-etale correction did not stabilise within the budget")
        I_d, I_c = mx.identity(ring, d), mx.identity(ring, n - d)
        Y = mx.block([[I_d, mx.zeros(ring, d, n - d)], [S, I_c]])
        Yinv = mx.block([[I_d, mx.zeros(ring, d, n - d)], [mx.mat_scale(-1, S), I_c]])
    else:
        Y = Yinv = mx.identity(ring, n)
    Z = mx.mat_mul(X, Y)
    Zinv = mx.mat_mul(Yinv, Xinv)
    A2 = mx.mat_mul(mx.mat_mul(Yinv, A1), mx.mat_phi(Y))
    a2, _, c2, d2 = _split(A2, d)
    if not all(x.is_zero() for row in c2 for x in row):
        raise PrecisionError("lower-left block did not vanish at working precision")
    sub = PhiModule(a2, P, h, ring=ring) if d else rank_zero(ring, P, h)
    quot = PhiModule(d2, P, h, ring=ring) if d < n else rank_zero(ring, P, h)
    sub.validated()
    quot.validated()
    inc = ModuleMap(sub, M, [row[:d] for row in Z])
    proj = ModuleMap(M, quot, [list(row) for row in Zinv[d:]])
    section = [row[d:] for row in Z]
    return Decomposition(sub, quot, inc, proj, section, Z, iterations)


def mult_unipotent(M):
    """Unipotent submodule and multiplicative quotient, by duality from connected_etale."""
    D = dual(M)
    ce = connected_etale(D)
    unip = dual(ce.quotient) if ce.quotient.n else rank_zero(M.ring, M.P, M.h)
    mult = dual(ce.sub) if ce.sub.n else rank_zero(M.ring, M.P, M.h)
    n = M.n
    # transposes of projection / inclusion of the dual sequence
    G = mx.transpose(ce.projection.F) if ce.quotient.n else [[] for _ in range(n)]
    H = mx.transpose(ce.inclusion.F) if ce.sub.n else []
    inc = ModuleMap(unip, M, G)
    proj = ModuleMap(M, mult, H)
    # dual basis of the adapted basis of the dual: its first d columns lift the quotient
    W = mx.transpose(mx.inverse(ce.basis, M.ring))
    d = ce.sub.n
    section = [row[:d] for row in W]
    basis = [row[d:] + row[:d] for row in W]
    return Decomposition(unip, mult, inc, proj, section, basis, ce.iterations)


# -- trivialisation of etale modules ------------------------------------------------


@dataclass
class Trivialization:
    """phi(U) A U^{-1} = Id over W(k')[[u]], with k' of degree ``degree`` over k."""

    U: list
    U0: list
    params: object
    embedding: tuple
    degree: int
    iterations: int
    A_ext: list = field(default=None, repr=False)


def _frobenius_row_system(A0, big):
    """Z/p^N matrix of x -> sigma(x) A0 - x on row vectors, in coordinates."""
    n, R, q = len(A0), big.r, big.q
    size = n * R
    L = [[0] * size for _ in range(size)]
    for t in range(n):
        for s in range(R):
            col = t * R + s
            coords = [0] * R
            coords[s] = 1
            x = WittElem(big, coords)
            sx = x.sigma()
            for j in range(n):
                val = sx * A0[t][j]
                if j == t:
                    val = val - x
                for k, c in enumerate(val.coords):
                    L[j * R + k][col] = c % q
    return L


def solve_residual(A0, params, budget=6, search_cap=None):
    """Find U0 over W(k') with sigma(U0) A0 = U0 and U0 invertible, k' of degree d <= budget.

    The rows of U0 solve the Z_p-linear equation x = sigma(x) A0, so the
    solution module is read off a Smith form over Z/p^N; n solutions whose
    reductions are independent give U0. The residue of U0 is put in reduced
    echelon form, which makes the output deterministic.
    """
    n, p, N = len(A0), params.p, params.N
    cap = budget if search_cap is None else search_cap
    for d in range(1, cap + 1):
        big, cols = params.extension(d)
        A0e = [[extend_witt(a, big, cols) for a in row] for row in A0]
        U0 = _row_solutions(A0e, big)
        if U0 is None:
            continue
        if d > budget:
            raise ResidualUnsolvable(
                f"residual equation needs an extension of degree {d} > budget {budget}", suggested_degree=d
            )
        return big, cols, U0, d
    raise ResidualUnsolvable(f"no solution over extensions of degree <= {cap}", suggested_degree=None)


def _row_solutions(A0, big):
    n, R, p, N, q = len(A0), big.r, big.p, big.N, big.q
    L = _frobenius_row_system(A0, big)
    vals, Q = smith_mod(L, p, N)
    size = n * R
    free = [[Q[i][j] for i in range(size)] for j in range(size) if vals[j] >= N]
    chosen = []
    for v in free:
        trial = chosen + [v]
        if len(rref_mod_p(trial, p)[1]) == len(trial):
            chosen.append(v)
        if len(chosen) == n:
            break
    if len(chosen) < n:
        return None
    # normalise: T * chosen == reduced echelon form mod p
    aug = [[x % p for x in v] + [int(i == j) for j in range(n)] for i, v in enumerate(chosen)]
    Rr, _ = rref_mod_p(aug, p)
    T = [row[size:] for row in Rr]
    rows = [[sum(T[i][k] * chosen[k][c] for k in range(n)) % q for c in range(size)] for i in range(n)]
    return [[WittElem(big, row[t * R:(t + 1) * R]) for t in range(n)] for row in rows]


def trivialize_etale(M, budget=6):
    """U over W(k')[[u]] with phi(U) A U^{-1} = Id modulo (p^N, u^M).

    Stage 1 solves the constant-term problem exactly. Stage 2 runs the
    product iteration U_{i+1} = A_i, where A_1 = phi(U0) A U0^{-1} and
    A_{i+1} = phi(A_i) is congruent to Id mod u^{p^i}.
    """
    if not classify(M).etale:
        raise ParamsError("module is not etale")
    params, ring, n = M.params, M.ring, M.n
    A0 = [[a.coeff(0) for a in row] for row in M.A]
    big, cols, U0, d = solve_residual(A0, params, budget)
    bring = series_ring(big, ring.M)
    Ae = [[extend_series(a, big, cols) for a in row] for row in M.A]
    U0s = [[bring.const(x) for x in row] for row in U0]
    A1 = mx.mat_mul(mx.mat_mul(mx.mat_phi(U0s), Ae), mx.inverse(U0s, bring))
    I = mx.identity(bring, n)
    U = U0s
    cur = A1
    limit = ceil(log(ring.M) / log(params.p) - 1e-12) + 1
    iterations = 0
    while not mx.mat_equal(cur, I):
        if iterations >= limit:
            raise PrecisionError("product iteration did not reach the identity")
        U = mx.mat_mul(cur, U)
        cur = mx.mat_phi(cur)
        iterations += 1
    residual = mx.mat_mul(mx.mat_mul(mx.mat_phi(U), Ae), mx.inverse(U, bring))
    if not mx.mat_equal(residual, I):
        raise PrecisionError("phi(U) A U^{-1} differs from Id at working precision")
    return Trivialization(U, U0, big, cols, d, iterations, Ae)


# -- torsion modules ---------------------------------------------------------------------


@dataclass
class TorsionPhiModule:
    """A p-power torsion module, either as coker(F) or as a sum of W(k)[[u]]/p^m_i."""

    kind: str
    A: list
    P: object
    h: int
    exponents: list = None
    isogeny: ModuleMap = None
    length: int = None
    killed_by: int = None

    @property
    def n(self):
        return len(self.A)

    def reduced_matrix(self):
        """Frobenius matrix reduced mod p (the module mod p in sum form)."""
        return [[a.reduce_mod_p() for a in row] for row in self.A]


def _series_valuation(f):
    p, N = f.params.p, f.params.N
    v = N
    for x in f.c.ravel():
        x = int(x) % f.params.q
        if x:
            w = 0
            while x % p == 0:
                x //= p
                w += 1
            v = min(v, w)
    return v


def coker_of_isogeny(f):
    """Cokernel of an injective equivariant map whose determinant is p^a times a unit."""
    src, tgt = f.source, f.target
    if src.n != tgt.n:
        raise NotIsogeny("source and target ranks differ")
    if not f.is_equivariant():
        raise EquivarianceError("map is not phi-equivariant")
    ring = tgt.ring
    d = mx.det(f.F, ring)
    a = d.coeff(0).valuation()
    N = ring.params.N
    if a >= N:
        raise NotIsogeny("det vanishes at u = 0: a factor of u or P")
    pa = ring.params.p ** a
    if (d.c.astype(object) % pa).any():
        raise NotIsogeny("det is not a power of p times a unit")
    w = type(d)(ring, d.c.astype(object) // pa, d.uprec)
    winv = w.inv()
    adj = mx.adjugate(f.F, ring)
    check = mx.mat_mul(f.F, mx.mat_scale(winv, adj))
    if not mx.mat_equal(check, mx.mat_scale(pa, mx.identity(ring, src.n))):
        raise PrecisionError("p^a does not kill the cokernel at working precision")
    inv_scaled = mx.mat_scale(winv, adj)
    vmin = min(_series_valuation(x) for row in inv_scaled for x in row)
    killed = max(a - vmin, 0)
    return TorsionPhiModule("coker", tgt.A, tgt.P, tgt.h, isogeny=f, length=a, killed_by=killed)


def sum_form(exponents, A, P, h=1):
    """The module sum_i W(k)[[u]]/p^{m_i} with Frobenius matrix A."""
    return TorsionPhiModule("sum", A, P, h, exponents=list(exponents), length=sum(exponents), killed_by=max(exponents))


def as_sum_form(T):
    """Convert coker(F) to sum form when F is diagonal with constant entries p^m_i times units."""
    if T.kind == "sum":
        return T
    F = T.isogeny.F
    n = len(F)
    exps = []
    for i in range(n):
        for j in range(n):
            if i != j and not F[i][j].is_zero():
                raise ParamsError("isogeny is not diagonal")
        x = F[i][i]
        if x.degree() > 0:
            raise ParamsError("diagonal entry is not constant")
        exps.append(x.coeff(0).valuation())
    return sum_form(exps, T.A, T.P, T.h)


# -- tensor constructions ----------------------------------------------------------------


def tensor(M1, M2):
    out = PhiModule(mx.kron(M1.A, M2.A), M1.P, M1.h + M2.h, ring=M1.ring)
    return out.validated()


def direct_sum(M1, M2):
    out = PhiModule(mx.block_diag(M1.ring, M1.A, M2.A), M1.P, max(M1.h, M2.h), ring=M1.ring)
    return out.validated()
