"""Small dense matrices over a commutative ring, as lists of rows.

Entries only need +, -, * and a ``phi`` method, so the same helpers serve
W(k)[[u]] and Breuil's ring S. Sizes stay small (rank <= 6 or so), which
keeps cofactor expansion for determinants and adjugates cheap.
"""

from itertools import permutations


def shape(A):
    return len(A), (len(A[0]) if A else 0)


def identity(ring, n):
    return [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]


def zeros(ring, m, n):
    return [[ring.zero() for _ in range(n)] for _ in range(m)]


def from_entries(ring, rows):
    return [[ring(x) for x in row] for row in rows]


def mat_mul(A, B):
    m, k = shape(A)
    k2, n = shape(B)
    if k != k2:
        raise ValueError(f"cannot multiply {m}x{k} by {k2}x{n}")
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def mat_phi(A):
    return [[a.phi() for a in row] for row in A]


def mat_map(fn, A):
    return [[fn(a) for a in row] for row in A]


def transpose(A):
    m, n = shape(A)
    return [[A[i][j] for i in range(m)] for j in range(n)]


def mat_equal(A, B):
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def columns(A, cols):
    return [[row[j] for j in cols] for row in A]


def rows(A, idx):
    return [list(A[i]) for i in idx]


def block(blocks):
    """Assemble a matrix from a 2D list of blocks."""
    out = []
    for brow in blocks:
        height = len(brow[0])
        for i in range(height):
            row = []
            for B in brow:
                row.extend(B[i])
            out.append(row)
    return out


def block_diag(ring, A, B):
    m1, n1 = shape(A)
    m2, n2 = shape(B)
    return block([[A, zeros(ring, m1, n2)], [zeros(ring, m2, n1), B]])


def kron(A, B):
    m1, n1 = shape(A)
    m2, n2 = shape(B)
    return [
        [A[i1][j1] * B[i2][j2] for j1 in range(n1) for j2 in range(n2)]
        for i1 in range(m1)
        for i2 in range(m2)
    ]


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det(A, ring):
    """Determinant by cofactor expansion along the first row."""
    n = len(A)
    if n == 0:
        return ring.one()
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if n <= 4:
        total = ring.zero()
        for perm in permutations(range(n)):
            term = A[0][perm[0]]
            for i in range(1, n):
                term = term * A[i][perm[i]]
            total = total + term if _perm_sign(perm) > 0 else total - term
        return total
    total = ring.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        term = A[0][j] * det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def adjugate(A, ring):
    """Classical adjoint: adj(A) A = A adj(A) = det(A) Id."""
    n = len(A)
    if n == 1:
        return [[ring.one()]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(A) if k != i]
            c = det(minor, ring)
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out


def inverse(A, ring):
    """Inverse of a matrix with unit determinant."""
    d = det(A, ring).inv()
    return mat_scale(d, adjugate(A, ring))


def phi_power_product(A, n):
    """A phi(A) ... phi^{n-1}(A): the matrix of the n-fold Frobenius."""
    out = A
    cur = A
    for _ in range(n - 1):
        cur = mat_phi(cur)
        out = mat_mul(out, cur)
    return out


# -- linear algebra over a field whose elements support is_zero() and inv() --


def field_rref(A):
    """Reduced row echelon form over a field. Returns (R, pivot_columns)."""
    R = [list(row) for row in A]
    m, n = shape(R)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if not R[i][c].is_zero()), None)
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
        if r == m:
            break
    return R, pivots


def field_column_basis(A):
    """Linearly independent columns of A spanning its column space (as column vectors)."""
    if not A or not A[0]:
        return []
    _, pivots = field_rref(A)
    return [[row[j] for row in A] for j in pivots]


def field_kernel_basis(A, zero, one):
    """Basis of {x : A x = 0} as a list of column vectors."""
    n = len(A[0])
    R, pivots = field_rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        x = [zero] * n
        x[fc] = one
        for i, pc in enumerate(pivots):
            x[pc] = -R[i][fc]
        basis.append(x)
    return basis
