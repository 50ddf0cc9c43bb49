"""Dense exact linear algebra over the rationals.

Matrices are lists of rows, entries are ``fractions.Fraction``.  Everything
here is deterministic: pivots are chosen left to right, top to bottom, with
no pivoting heuristics, so reduced row echelon forms (and hence every
downstream basis) are canonical.
"""

from __future__ import annotations

from fractions import Fraction

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def zeros(rows: int, cols: int) -> list[list[Fraction]]:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> list[list[Fraction]]:
    mat = zeros(n, n)
    for i in range(n):
        mat[i][i] = ONE
    return mat


def transpose(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    if not mat:
        return []
    return [list(col) for col in zip(*mat)]


def mat_mul(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i, row in enumerate(a):
        acc = out[i]
        for t in range(k):
            x = row[t]
            if x == 0:
                continue
            brow = b[t]
            for j in range(m):
                if brow[j] != 0:
                    acc[j] += x * brow[j]
    return out


def mat_vec(mat: list[list[Fraction]], vec: list[Fraction]) -> list[Fraction]:
    return [sum((r[j] * vec[j] for j in range(len(vec)) if vec[j] != 0), ZERO) for r in mat]


def is_zero_matrix(mat: list[list[Fraction]]) -> bool:
    return all(x == 0 for row in mat for x in row)


def rref(mat: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.

    Returns (reduced nonzero rows, pivot column indices).  Zero rows are
    dropped; pivot entries are 1 and are the only nonzero entries in their
    column.
    """
    rows = [list(r) for r in mat if any(x != 0 for x in r)]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    reduced = [row for row in rows[:r]]
    return reduced, pivots


def rank(mat: list[list[Fraction]]) -> int:
    return len(rref(mat)[0])


def row_reduce_vector(
    vec: list[Fraction], basis: list[list[Fraction]], pivots: list[int]
) -> list[Fraction]:
    """Reduce vec against RREF rows (basis, pivots); returns the residual."""
    out = list(vec)
    for row, p in zip(basis, pivots):
        if out[p] != 0:
            f = out[p]
            out = [x - f * y for x, y in zip(out, row)]
    return out


def kernel_basis(mat: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of the null space of mat (acting on column vectors of length ncols).

    The basis is the standard one read off the RREF: one vector per free
    column, with entry 1 at the free column, listed by ascending free column.
    """
    reduced, pivots = rref(mat)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        v = [ZERO] * ncols
        v[fc] = ONE
        for row, p in zip(reduced, pivots):
            if row[fc] != 0:
                v[p] = -row[fc]
        basis.append(v)
    return basis


def solve(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """One solution of mat @ x = rhs, or None if inconsistent.

    The particular solution has zeros in all free coordinates, which makes it
    canonical for a fixed matrix.
    """
    if not mat:
        return None if any(x != 0 for x in rhs) else []
    ncols = len(mat[0])
    aug = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    reduced, pivots = rref(aug)
    x = [ZERO] * ncols
    for row, p in zip(reduced, pivots):
        if p == ncols:
            return None
        x[p] = row[-1]
    return x


def column_space_rows(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    """Columns of mat, as row vectors (for feeding the image into rref)."""
    return transpose(mat)


def vectors_span_contains(
    span_rows: list[list[Fraction]], vec: list[Fraction]
) -> bool:
    reduced, pivots = rref(span_rows)
    return all(x == 0 for x in row_reduce_vector(vec, reduced, pivots))
