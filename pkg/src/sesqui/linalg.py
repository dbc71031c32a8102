"""Exact dense linear algebra over a base field.

Matrices here are plain lists of lists of field elements (rows); these are the
workhorse routines behind regular representations, endomorphism-ring solving
and matrix inversion over an algebra.  Everything is classical Gaussian
elimination with exact field arithmetic.

Reduced row echelon form is computed with a fixed pivoting strategy (first
nonzero entry scanning rows top to bottom), so the result -- and in particular
the canonical nullspace basis -- is stable under extension of the base field.
"""

from __future__ import annotations


def identity(field, n):
    z, o = field.zero(), field.one()
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def zeros(field, rows, cols):
    z = field.zero()
    return [[z] * cols for _ in range(rows)]


def mat_mul(field, a, b):
    rows, inner = len(a), len(b)
    cols = len(b[0]) if b else 0
    out = zeros(field, rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            aik = ai[k]
            if field.is_zero(aik):
                continue
            bk = b[k]
            for j in range(cols):
                oi[j] = field.add(oi[j], field.mul(aik, bk[j]))
    return out


def mat_sub(field, a, b):
    return [
        [field.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)
    ]


def rref(field, rows):
    """Reduced row echelon form (in place); returns the pivot column list."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if not field.is_zero(rows[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [
                    field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])
                ]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(field, rows):
    work = [list(r) for r in rows]
    return len(rref(field, work))


def solve(field, a, b):
    """Solve A X = B exactly; returns X or None when the system is inconsistent.

    When the solution is not unique the free variables are set to zero, which
    keeps the output canonical.
    """
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    b_cols = len(b[0]) if b and b[0] is not None else 0
    if n_rows == 0:
        return zeros(field, n_cols, b_cols)
    aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    pivots = rref(field, aug)
    pivot_set = set(pivots)
    # inconsistent when a pivot lands in the augmented part
    for row in aug:
        if all(field.is_zero(x) for x in row[:n_cols]) and any(
            not field.is_zero(x) for x in row[n_cols:]
        ):
            return None
    x = zeros(field, n_cols, b_cols)
    for r, c in enumerate(pivots):
        if c >= n_cols:
            return None
        for j in range(b_cols):
            x[c][j] = aug[r][n_cols + j]
    del pivot_set
    return x


def inverse(field, a):
    """Exact inverse of a square matrix, or None when singular."""
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("matrix is not square")
    aug = [list(r) + row_i for r, row_i in zip(a, identity(field, n))]
    pivots = rref(field, aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in aug]


def nullspace(field, a, ncols):
    """Canonical basis of the right nullspace of A (free variables set to 1).

    The basis vectors are ordered by their free column index; thanks to the
    deterministic RREF this basis is stable when the field is extended.
    """
    work = [list(r) for r in a] if a else []
    pivots = rref(field, work)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    z, o = field.zero(), field.one()
    for fc in free:
        vec = [z] * ncols
        vec[fc] = o
        for r, pc in enumerate(pivots):
            vec[pc] = field.neg(work[r][fc])
        basis.append(vec)
    return basis


def det(field, a):
    """Exact determinant by fraction-free-enough elimination with pivoting."""
    n = len(a)
    if n == 0:
        return field.one()
    work = [list(r) for r in a]
    sign_flip = False
    result = field.one()
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if not field.is_zero(work[i][c]):
                pivot = i
                break
        if pivot is None:
            return field.zero()
        if pivot != c:
            work[c], work[pivot] = work[pivot], work[c]
            sign_flip = not sign_flip
        result = field.mul(result, work[c][c])
        inv = field.inv(work[c][c])
        for i in range(c + 1, n):
            if field.is_zero(work[i][c]):
                continue
            f = field.mul(work[i][c], inv)
            work[i] = [
                field.sub(x, field.mul(f, y)) for x, y in zip(work[i], work[c])
            ]
    return field.neg(result) if sign_flip else result


def charpoly(field, a):
    """Characteristic polynomial det(xI - A), ascending coefficients.

    Uses the Faddeev-LeVerrier recurrence, which divides by 1..n and is
    therefore restricted to characteristic-0 fields; finite-field callers use
    the small-dimension direct formulas instead.
    """
    n = len(a)
    if field.characteristic != 0:
        raise ValueError("charpoly recurrence needs characteristic 0")
    coeffs = [field.zero()] * (n + 1)
    coeffs[n] = field.one()
    m = identity(field, n)
    for k in range(1, n + 1):
        m = mat_mul(field, a, m)
        tr = field.zero()
        for i in range(n):
            tr = field.add(tr, m[i][i])
        ck = field.neg(field.div(tr, field.from_int(k)))
        coeffs[n - k] = ck
        for i in range(n):
            m[i][i] = field.add(m[i][i], ck)
    return coeffs
