"""From Frobenius modules over W(k)[[u]] to filtered modules over S.

For a module with Frobenius matrix A, the S-module M = S (x)_{phi} frakM has
basis 1 (x) e_j. In that basis:

* the linearised Frobenius is A_S = A embedded in S,
* phi_M(x) = phi_S(A_S x) and phi_1(x) = phi_S(A_S x) / p on Fil^1,
* x lies in Fil^1 M iff A_S x has entries in Fil^1 S, i.e. A(pi) x(pi) = 0.

The monodromy operator is stored as the matrix Nmat whose columns are
N(1 (x) e_j); on a general vector N(x) = N_S(x) + Nmat x.
"""

from dataclasses import dataclass, field

import numpy as np

from . import matrix as mx
from .coeffs import WittElem
from .errors import NonConvergence, PrecisionError
from .modlin import rank_mod_p
from .phimod import residue_params
from .sring import (
    SElem,
    eval_pi,
    eval_pi_series,
    in_I0,
    make_sring,
    n_S,
    ok_const,
    ok_to_selem,
    phi1_S,
    phi_S,
)


@dataclass
class BreuilModule:
    module: object
    S: object
    A_S: list
    Abar: list
    fil1_gens: list
    phi1_images: list
    N_values: list = None
    N_iterations: int = None
    kernel_rank: int = 0
    notes: list = field(default_factory=list)

    @property
    def n(self):
        return self.module.n

    def phi(self, x):
        """phi_M on a column vector of S elements."""
        return [phi_S(y) for y in _matvec(self.A_S, x)]

    def phi1(self, x):
        return [phi1_S(y) for y in _matvec(self.A_S, x)]

    def N(self, x):
        """Monodromy on a vector by the Leibniz rule."""
        if self.N_values is None:
            raise ValueError("monodromy not computed yet")
        return [a + b for a, b in zip([n_S(y) for y in x], _matvec(self.N_values, x))]


def _matvec(A, x):
    out = []
    for row in A:
        acc = row[0] * x[0]
        for a, y in zip(row[1:], x[1:]):
            acc = acc + a * y
        out.append(acc)
    return out


def _ok_kernel(Abar, S):
    """Kernel of a matrix over O_K / p^N whose elementary divisors are units or zero.

    Reduced echelon form with unit pivots; any non-unit entry left over after
    elimination would be a non-trivial elementary divisor, which a module of
    height <= 1 cannot have.
    """
    n = len(Abar[0]) if Abar else 0
    R = [list(row) for row in Abar]
    m = len(R)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if R[i][c].is_unit()), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = R[r][c].inv()
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and not R[i][c].is_zero():
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        for x in R[i]:
            if not x.is_zero():
                raise PrecisionError("non-unit elementary divisor in A(pi); Fil^1 is not free at this precision")
    zero, one = ok_const(S, 0), ok_const(S, 1)
    basis = []
    for fc in [c for c in range(n) if c not in pivots]:
        x = [zero] * n
        x[fc] = one
        for i, pc in enumerate(pivots):
            x[pc] = -R[i][fc]
        basis.append(x)
    return basis


def build_breuil(M, M_S=None, validate=True):
    """S (x)_phi M with Fil^1 generators and their phi_1 images."""
    if validate:
        M.validated()
    ring = M.ring
    M_S = ring.M if M_S is None else M_S
    S = make_sring(M.P, M_S)
    A_S = [[S.embed(a) for a in row] for row in M.A]
    Abar = [[eval_pi_series(S, a) for a in row] for row in M.A]
    ker = _ok_kernel(Abar, S)
    gens = [[ok_to_selem(x) for x in v] for v in ker]
    images = []
    for g in gens:
        images.append([phi1_S(y) for y in _matvec(A_S, g)])
    return BreuilModule(M, S, A_S, Abar, gens, images, kernel_rank=len(gens))


def _unit_vector(S, n, j, scale=None):
    v = [S.zero() for _ in range(n)]
    v[j] = S.one() if scale is None else scale
    return v


@dataclass
class DivisibilityReport:
    passed: bool
    divisible: bool
    spanning: bool
    residue_rank: int
    witnesses: list

    def as_dict(self):
        return {
            "passed": self.passed,
            "divisible": self.divisible,
            "spanning": self.spanning,
            "residue_rank": self.residue_rank,
            "witnesses": self.witnesses,
        }


def _residue_coords(x, p):
    """Image in k of an element of S: its constant coordinate mod p."""
    return [int(c) % p for c in x.c[0]]


def check_strong_divisibility(B):
    """phi(Fil^1 M) in p M, and phi_1(Fil^1 M) generates M.

    Generators of Fil^1 M are the kernel lifts together with P e_j (the
    remaining part Fil^1 S M has phi_1 image c_1-multiples of P e_j's image
    up to phi(Fil^1 S) in p S). Spanning is tested on residues in k^n.
    """
    S, n, p = B.S, B.n, B.S.params.p
    P = S.embed(B.module.P.series(B.module.ring))
    gens = [("kernel", i, g) for i, g in enumerate(B.fil1_gens)]
    gens += [("P_e", j, _unit_vector(S, n, j, P)) for j in range(n)]
    witnesses = []
    divisible = True
    residues = []
    for kind, idx, g in gens:
        img = [phi_S(y) for y in _matvec(B.A_S, g)]
        bad = [k for k, y in enumerate(img) if (y.c.astype(object) % p).any()]
        if bad:
            divisible = False
            witnesses.append({"generator": [kind, idx], "entry": bad[0], "reason": "phi image not divisible by p"})
            continue
        q = [SElem(S, y.c.astype(object) // p, y.eff_N - 1) for y in img]
        r = S.params.r
        residues.append([c for y in q for c in _residue_coords(y, p)])
    rank = _residue_rank(residues, n, S.params)
    spanning = rank == n
    if not spanning:
        witnesses.append({"reason": "phi_1 images do not span M mod (p, u)", "residue_rank": rank})
    return DivisibilityReport(divisible and spanning, divisible, spanning, rank, witnesses)


def _residue_rank(vectors, n, params):
    """Rank over k of residue vectors given by coordinates (n blocks of r entries)."""
    if not vectors:
        return 0
    kp = residue_params(params)
    r = params.r
    rows = [[WittElem(kp, v[j * r:(j + 1) * r]) for j in range(n)] for v in vectors]
    return len(mx.field_rref(rows)[1])


def _phi_mat(A):
    return [[phi_S(a) for a in row] for row in A]


def _n_mat(A):
    return [[n_S(a) for a in row] for row in A]


def monodromy_step(B, Nmat, c1inv, phiA, phiV, const):
    """Nmat -> c_1^{-1} (phi(A) phi(Nmat) phi(V) - phi(N_S(A) V))."""
    body = mx.mat_mul(mx.mat_mul(phiA, _phi_mat(Nmat)), phiV)
    return mx.mat_scale(c1inv, mx.mat_sub(body, const))


def compute_N(B, M_N=None, seed=None, budget=None):
    """Monodromy on M from N phi = p phi N, solved by fixed-point iteration.

    Writing N(1 (x) e_j) as the columns of Nmat, the relation becomes
    Nmat = c_1^{-1} (phi(A) phi(Nmat) phi(V) - phi(N_S(A) V)), where phi(A)
    phi(V) = p c_1 was used to invert phi(A). The map multiplies the u-adic
    order of a correction by p, so ceil(log_p M_N) + 2 rounds suffice.
    """
    S, n = B.S, B.n
    p = S.params.p
    M_N = S.M if M_N is None else M_N
    if budget is None:
        budget = 2
        while p ** (budget - 2) < M_N:
            budget += 1
    V_S = [[S.embed(v) for v in row] for row in B.module.V]
    phiA = _phi_mat(B.A_S)
    phiV = _phi_mat(V_S)
    const = _phi_mat(mx.mat_mul(_n_mat(B.A_S), V_S))
    c1inv = S.c1().inv()
    Nmat = seed if seed is not None else [[S.zero() for _ in range(n)] for _ in range(n)]
    for it in range(1, budget + 1):
        new = monodromy_step(B, Nmat, c1inv, phiA, phiV, const)
        if _agree(new, Nmat, M_N):
            B.N_values = new
            B.N_iterations = it
            return new
        Nmat = new
    raise NonConvergence(f"monodromy iteration did not stabilise in {budget} rounds", budget=budget)


def _agree(X, Y, M_N):
    for rx, ry in zip(X, Y):
        for a, b in zip(rx, ry):
            m = a.params.p ** min(a.eff_N, b.eff_N)
            if ((a.c[:M_N] - b.c[:M_N]) % m).any():
                return False
    return True


def griffiths_residual(B, M_N=None):
    """Largest u-index below which N phi_1(g) = c_1^{-1} phi_1(P N(g)) holds for all Fil^1 generators.

    Uses the Leibniz rule directly, independently of the iteration formula;
    returns M_N when the residual vanishes in the whole window.
    """
    S, n = B.S, B.n
    M_N = S.M if M_N is None else M_N
    P = S.embed(B.module.P.series(B.module.ring))
    gens = list(B.fil1_gens) + [_unit_vector(S, n, j, P) for j in range(n)]
    gens += [_unit_vector(S, n, j, S.gamma_P(2)) for j in range(n)]
    order = M_N
    for g in gens:
        lhs = B.N(B.phi1(g))
        Ng = B.N(g)
        # c_1^{-1} phi_1(P N(g)) = phi_M(N(g))
        rhs = B.phi(Ng)
        for a, b in zip(lhs, rhs):
            m = a.params.p ** min(a.eff_N, b.eff_N)
            diff = (a.c[:M_N] - b.c[:M_N]) % m
            nz = np.nonzero(diff.any(axis=1))[0]
            if len(nz):
                order = min(order, int(nz[0]))
    return order


def N_in_I0(B):
    return all(in_I0(x) for row in B.N_values for x in row)


# -- exactness of the functor on short exact sequences --------------------------------


@dataclass
class ExactnessReport:
    passed: bool
    checks: dict
    witnesses: list

    def as_dict(self):
        return {"passed": self.passed, "checks": self.checks, "witnesses": self.witnesses}


def _residue_int_matrix(F, params):
    """Matrix over F_p of the residues of F, expanding each k-entry into its r coordinates."""
    p, r = params.p, params.r
    kp = residue_params(params)
    return [[WittElem(kp, [int(c) % p for c in x.c[0]]) for x in row] for row in F]


def _k_rank(F, params):
    if not F or not F[0]:
        return 0
    return len(mx.field_rref(_residue_int_matrix(F, params))[1])


def _ok_rank_mod_pi(vectors, S):
    """Rank over k of O_K vectors reduced mod pi."""
    if not vectors:
        return 0
    kp = residue_params(S.params)
    p = S.params.p
    rows = [[WittElem(kp, [int(c) % p for c in x.c[0]]) for x in v] for v in vectors]
    return len(mx.field_rref(rows)[1])


def transport_exactness(inc, proj):
    """Check that S (x)_phi (-) keeps 0 -> M' -> M -> M'' -> 0 exact, also on Fil^1."""
    Mp, M, Mpp = inc.source, inc.target, proj.target
    params = M.params
    checks = {}
    witnesses = []
    checks["equivariant"] = inc.is_equivariant() and proj.is_equivariant()
    comp = mx.mat_mul(proj.F, inc.F) if Mp.n and Mpp.n else []
    checks["composite_zero"] = all(x.is_zero() for row in comp for x in row)
    checks["ranks_add_up"] = Mp.n + Mpp.n == M.n
    checks["injective_saturated"] = _k_rank(inc.F, params) == Mp.n
    checks["surjective"] = _k_rank(proj.F, params) == Mpp.n
    if not checks["injective_saturated"]:
        witnesses.append({"reason": "inclusion is not injective mod (p, u): image not saturated"})
    phi_inc = mx.mat_phi(inc.F)
    phi_proj = mx.mat_phi(proj.F)
    checks["twisted_injective"] = _k_rank(phi_inc, params) == Mp.n
    checks["twisted_surjective"] = _k_rank(phi_proj, params) == Mpp.n
    if not all(checks.values()):
        return ExactnessReport(False, checks, witnesses)
    Bp, B, Bpp = build_breuil(Mp), build_breuil(M), build_breuil(Mpp)
    S = B.S
    iS = [[S.embed(x) for x in row] for row in phi_inc]
    pS = [[S.embed(x) for x in row] for row in phi_proj]
    # Fil^1 of M' lands in Fil^1 of M, with phi_1 compatibility
    fil_in = True
    phi1_ok = True
    for g in Bp.fil1_gens:
        img = _matvec(iS, g)
        if not all(v.is_zero() for v in _ok_apply(B.Abar, [eval_pi(x) for x in img])):
            fil_in = False
            witnesses.append({"reason": "image of a Fil^1 generator of M' leaves Fil^1 M"})
            continue
        lhs = B.phi1(img)
        rhs = _matvec(iS, Bp.phi1(g))
        if not all(a == b for a, b in zip(lhs, rhs)):
            phi1_ok = False
    checks["fil1_into"] = fil_in
    # Fil^1 of M maps onto Fil^1 of M''
    imgs = []
    fil_out = True
    for g in B.fil1_gens:
        img = _matvec(pS, g)
        vals = [eval_pi(x) for x in img]
        if not all(v.is_zero() for v in _ok_apply(Bpp.Abar, vals)):
            fil_out = False
        imgs.append(vals)
        lhs = Bpp.phi1(img)
        rhs = _matvec(pS, B.phi1(g))
        if not all(a == b for a, b in zip(lhs, rhs)):
            phi1_ok = False
    onto = _ok_rank_mod_pi(imgs, S) == Bpp.kernel_rank
    checks["fil1_onto"] = fil_out and onto
    checks["phi1_compatible"] = phi1_ok
    if not onto:
        witnesses.append({"reason": "Fil^1 generators of M do not cover Fil^1 of the quotient"})
    return ExactnessReport(all(checks.values()), checks, witnesses)


def _ok_apply(Abar, x):
    out = []
    for row in Abar:
        acc = row[0] * x[0]
        for a, y in zip(row[1:], x[1:]):
            acc = acc + a * y
        out.append(acc)
    return out
