"""Random and named modules used by the test-suite, the CLI and the benchmarks.

Random matrices are polynomial with controlled degree so that products stay
exact inside the truncation window.
"""

import numpy as np

from . import matrix as mx
from .errors import ResidualUnsolvable
from .phimod import PhiModule, solve_residual


def random_poly(ring, rng, degree, valuation=0):
    """Random polynomial of the given degree with no terms below u^valuation."""
    f = ring.random(rng, degree=degree)
    if valuation:
        arr = f.c.copy()
        arr[:valuation] = 0
        f = type(f)(ring, arr, exact=True)
    return f


def random_unitriangular(ring, n, rng, degree=2, lower=False):
    I = mx.identity(ring, n)
    out = [row[:] for row in I]
    for i in range(n):
        for j in range(n):
            if (i > j if lower else i < j):
                out[i][j] = random_poly(ring, rng, degree)
    return out


def random_unipotent_change(ring, n, rng, degree=2):
    """L U with L, U unitriangular: invertible with a polynomial inverse."""
    L = random_unitriangular(ring, n, rng, degree, lower=True)
    U = random_unitriangular(ring, n, rng, degree)
    X = mx.mat_mul(L, U)
    Xinv = mx.mat_mul(_unitri_inverse(ring, U, upper=True), _unitri_inverse(ring, L, upper=False))
    return X, Xinv


def _unitri_inverse(ring, T, upper):
    n = len(T)
    Nil = mx.mat_sub(T, mx.identity(ring, n))
    out = mx.identity(ring, n)
    power = mx.identity(ring, n)
    for k in range(1, n):
        power = mx.mat_mul(power, Nil)
        out = mx.mat_add(out, mx.mat_scale(-1 if k % 2 else 1, power))
    return out


def random_unit_constant_matrix(ring, n, rng):
    """Constant matrix over W(k) with invertible residue."""
    params = ring.params
    while True:
        A = [[ring.const(list(rng.integers(0, params.q, size=params.r))) for _ in range(n)] for _ in range(n)]
        if mx.det(A, ring).is_unit():
            return A


def random_gl(ring, n, rng, degree=2):
    """Polynomial matrix with unit determinant (invertible residue)."""
    while True:
        A = [[random_poly(ring, rng, degree) for _ in range(n)] for _ in range(n)]
        if mx.det(A, ring).is_unit():
            return A


def diag_P_powers(ring, P, exps):
    Ps = P.series(ring)
    n = len(exps)
    return [[(Ps ** exps[i] if i == j else ring.zero()) for j in range(n)] for i in range(n)]


def random_height_one(ring, P, n, rng, degree=2):
    """X diag(P^eps) Y with X, Y invertible: a module of height <= 1."""
    exps = [int(x) for x in rng.integers(0, 2, size=n)]
    X = random_gl(ring, n, rng, degree)
    Y = random_gl(ring, n, rng, degree)
    A = mx.mat_mul(mx.mat_mul(X, diag_P_powers(ring, P, exps)), Y)
    return PhiModule(A, P, 1)


def permutation_matrix(ring, perm, scalars=None):
    n = len(perm)
    out = mx.zeros(ring, n, n)
    for j, i in enumerate(perm):
        out[i][j] = ring.const(1 if scalars is None else scalars[j])
    return out


def twist(ring, B, rng, degree=2):
    """X^{-1} B phi(X) for a random polynomial change of basis X."""
    X, Xinv = random_unipotent_change(ring, len(B), rng, degree)
    return mx.mat_mul(mx.mat_mul(Xinv, B), mx.mat_phi(X)), X


def random_etale(ring, P, n, rng, degree=2, max_field_degree=6):
    """Etale module whose constant term is sigma-conjugate to a finite-order matrix.

    Residual trivialisation over a finite extension exists exactly for such
    modules. Candidates are resampled until the residual field k' has degree
    at most ``max_field_degree`` over the prime field.
    """
    params = ring.params
    budget = max(1, max_field_degree // params.r)
    while True:
        perm = [int(x) for x in rng.permutation(n)]
        scalars = None
        if params.r > 1 and rng.integers(0, 2):
            g = params.gen()
            scalars = [g ** int(rng.integers(0, params.p ** params.r - 1)) for _ in range(n)]
        C = permutation_matrix(ring, perm, scalars)
        try:
            solve_residual([[c.coeff(0) for c in row] for row in C], params, budget)
        except ResidualUnsolvable:
            continue
        # phi(X^{-1}) C X: the action under which phi(U) A U^{-1} = Id is solved
        X, Xinv = random_unipotent_change(ring, n, rng, degree)
        A = mx.mat_mul(mx.mat_mul(mx.mat_phi(Xinv), C), X)
        return PhiModule(A, P, 1)


def nilpotent_block(ring, P, m, rng, degree=1):
    """A residually nilpotent block of height <= 1 and rank m."""
    Ps = P.series(ring)
    if m == 1:
        return [[Ps * random_unit_constant_matrix(ring, 1, rng)[0][0]]]
    kind = int(rng.integers(0, 2))
    if kind == 0:
        G = random_gl(ring, m, rng, degree)
        return mx.mat_scale(Ps, G)
    out = mx.zeros(ring, m, m)
    for i in range(m - 1):
        out[i][i + 1] = ring.one()
    out[m - 1][0] = Ps
    return out


def random_mixed(ring, P, n, rng, d=None, degree=1):
    """Block upper-triangular [[E, b], [0, Q]] with E etale, Q nilpotent, then twisted.

    Returns (module, etale rank, the untwisted block matrix, the twist X).
    """
    if d is None:
        d = int(rng.integers(1, n))
    E = random_gl(ring, d, rng, degree)
    Q = nilpotent_block(ring, P, n - d, rng, degree)
    b = [[random_poly(ring, rng, degree) for _ in range(n - d)] for _ in range(d)]
    B = mx.block([[E, b], [mx.zeros(ring, n - d, d), Q]])
    A, X = twist(ring, B, rng, degree)
    return PhiModule(A, P, 1), d, B, X


def rng_from_seed(seed):
    return np.random.default_rng(seed)
