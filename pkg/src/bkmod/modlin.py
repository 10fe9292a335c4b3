"""Integer linear algebra modulo p and p^N.

Matrices are lists of lists of Python ints. Everything here is exact and
small; these routines back the finite-field solves and the Smith form over
Z/p^N used by the sigma-conjugacy search.
"""

from .errors import UnitError


def _vp(x, p, cap):
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def inverse_mod(A, p, N):
    """Inverse of a square matrix over Z/p^N; raises UnitError if singular mod p."""
    q = p ** N
    n = len(A)
    M = [[x % q for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] % p), None)
        if piv is None:
            raise UnitError("matrix is singular modulo p")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, q)
        M[c] = [x * inv % q for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % q for x, y in zip(M[i], M[c])]
    return [row[n:] for row in M]


def solve_mod(A, b, p, N):
    """Solve A x = b over Z/p^N for A invertible mod p."""
    q = p ** N
    Ai = inverse_mod(A, p, N)
    return [sum(a * y for a, y in zip(row, b)) % q for row in Ai]


def rref_mod_p(A, p):
    """Reduced row echelon form over F_p. Returns (R, pivot_columns)."""
    R = [[x % p for x in row] for row in A]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, p)
        R[r] = [x * inv % p for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [(x - f * y) % p for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank_mod_p(A, p):
    if not A or not A[0]:
        return 0
    return len(rref_mod_p(A, p)[1])


def nullspace_mod_p(A, p, ncols=None):
    """Basis of {x : A x = 0} over F_p, in reduced (deterministic) form."""
    if not A:
        n = ncols or 0
        return [[int(i == j) for i in range(n)] for j in range(n)]
    n = len(A[0])
    R, pivots = rref_mod_p(A, p)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        x = [0] * n
        x[fc] = 1
        for i, pc in enumerate(pivots):
            x[pc] = (-R[i][fc]) % p
        basis.append(x)
    return basis


def solve_affine_mod_p(A, b, p):
    """One solution of A x = b over F_p (free variables zero), or None."""
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref_mod_p(aug, p)
    if n in pivots:
        return None
    x = [0] * n
    for i, pc in enumerate(pivots):
        x[pc] = R[i][n] % p
    return x


def smith_mod(A, p, N):
    """Smith form over Z/p^N.

    Returns (vals, Q) where A = L D Q^{-1}-style bookkeeping is reduced to what
    kernels need: ``vals[i]`` is the p-adic valuation (capped at N) of the i-th
    diagonal entry and ``Q`` is the column transform, so the kernel of A mod
    p^N is Q applied to {y : p^vals[i] y_i = 0}. Pivoting always takes an entry
    of minimal valuation.
    """
    q = p ** N
    m = len(A)
    n = len(A[0]) if m else 0
    S = [[x % q for x in row] for row in A]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    vals = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j]:
                    v = _vp(S[i][j], p, N)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        S[t], S[i] = S[i], S[t]
        for row in S:
            row[t], row[j] = row[j], row[t]
        for row in Q:
            row[t], row[j] = row[j], row[t]
        unit = (S[t][t] // p ** v) % q
        uinv = pow(unit, -1, q)
        for i2 in range(m):
            if i2 != t and S[i2][t]:
                f = (S[i2][t] // p ** v) * uinv % q
                S[i2] = [(x - f * y) % q for x, y in zip(S[i2], S[t])]
        for j2 in range(n):
            if j2 != t and S[t][j2]:
                f = (S[t][j2] // p ** v) * uinv % q
                for row in S:
                    row[j2] = (row[j2] - f * row[t]) % q
                for row in Q:
                    row[j2] = (row[j2] - f * row[t]) % q
        vals.append(v)
    vals += [N] * (n - len(vals))
    return vals, Q


def kernel_mod_p_image(A, p, N):
    """F_p-basis of the reductions mod p of solutions of A x = 0 over Z/p^N."""
    vals, Q = smith_mod(A, p, N)
    n = len(Q)
    cols = [[Q[i][j] % p for i in range(n)] for j in range(n) if vals[j] >= N]
    if not cols:
        return []
    R, piv = rref_mod_p(cols, p)
    return [row for row in R[: len(piv)]]
