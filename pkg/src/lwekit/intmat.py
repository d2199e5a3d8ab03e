"""Exact integer matrix algebra: HNF, unimodular completion, inversion mod q.

Matrices are small (dimensions in the tens) and entries are arbitrary
precision, so everything here is plain row-list arithmetic.  The modulus q is
never assumed prime: inversion modulo q uses gcd-combination pivoting, and
non-invertibility is reported as a value (None), not an exception, because
callers of the reductions must be able to count that outcome.
"""

from __future__ import annotations

from .errors import CoprimalityError, ParameterError
from .torus import extended_gcd

import math


class IntMatrix:
    """Immutable-by-convention integer matrix (list of row lists)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data):
        self.data = [list(map(int, row)) for row in data]
        self.rows = len(self.data)
        if self.rows == 0:
            raise ParameterError("matrix must be nonempty")
        self.cols = len(self.data[0])
        if any(len(r) != self.cols for r in self.data):
            raise ParameterError("ragged rows")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMatrix":
        return cls([[0] * c for _ in range(r)])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.data == other.data

    def __repr__(self):
        return f"IntMatrix({self.data!r})"

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.data]

    def transpose(self) -> "IntMatrix":
        return IntMatrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ParameterError("dimension mismatch")
        ot = other.transpose().data
        return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.data])

    def matvec(self, v) -> list[int]:
        if len(v) != self.cols:
            raise ParameterError("dimension mismatch")
        return [sum(a * b for a, b in zip(row, v)) for row in self.data]

    def mod(self, q: int) -> "IntMatrix":
        return IntMatrix([[x % q for x in row] for row in self.data])

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[x * k for x in row] for row in self.data])

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ParameterError("determinant of a non-square matrix")
        n = self.rows
        m = [row[:] for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1

    def norm_fro(self) -> float:
        return math.sqrt(sum(x * x for row in self.data for x in row))


def invert_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix (integer output).

    Uses the adjugate route via Bareiss determinants on the small dimensions
    in play here.
    """
    n = m.rows
    d = m.det()
    if abs(d) != 1:
        raise ParameterError("matrix is not unimodular")
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [
                [m.data[r][c] for c in range(n) if c != i]
                for r in range(n) if r != j
            ]
            cof = IntMatrix(sub).det() if n > 1 else 1
            inv[i][j] = d * (-1) ** (i + j) * cof
    return IntMatrix(inv)


def invert_mod_q(m: IntMatrix, q: int):
    """Inverse of m modulo q, or None when m is singular mod q.

    Gauss elimination over Z_q with gcd-combination pivoting: each pivot is
    first driven to the gcd of its column tail by unimodular row combinations,
    which works for composite q where no single entry need be invertible.
    """
    if m.rows != m.cols:
        raise ParameterError("inversion of a non-square matrix")
    if q < 2:
        raise ParameterError("q must be >= 2")
    n = m.rows
    a = [[x % q for x in row] for row in m.data]
    inv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def rowcomb(i, j, x, y, u, v):
        # (row_i, row_j) <- (x*row_i + y*row_j, u*row_i + v*row_j) on both a and inv
        for mat in (a, inv):
            ri, rj = mat[i], mat[j]
            for k in range(n):
                ri[k], rj[k] = (x * ri[k] + y * rj[k]) % q, (u * ri[k] + v * rj[k]) % q

    for col in range(n):
        # reduce column tail to put gcd at the pivot position
        for i in range(col + 1, n):
            if a[i][col] == 0:
                continue
            p, x, y = extended_gcd(a[col][col], a[i][col])
            # unimodular: [[x, y], [-b/g, a/g]] has determinant 1
            rowcomb(col, i, x, y, -(a[i][col] // p), a[col][col] // p)
        piv = a[col][col]
        g, pinv, _ = extended_gcd(piv if piv else q, q)
        if g != 1:
            return None
        pinv %= q
        for mat in (a, inv):
            mat[col] = [(x * pinv) % q for x in mat[col]]
        for i in range(n):
            if i == col or a[i][col] == 0:
                continue
            f = a[i][col]
            for mat in (a, inv):
                ri, rc = mat[i], mat[col]
                for k in range(n):
                    ri[k] = (ri[k] - f * rc[k]) % q
    return IntMatrix(inv)


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style HNF: returns (H, U) with H = U @ m, U unimodular.

    H is in row echelon form with positive pivots and entries above each
    pivot reduced into [0, pivot).
    """
    h = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]

    def rowcomb(i, j, x, y, s, t):
        for mat in (h, u):
            ri, rj = mat[i], mat[j]
            for k in range(len(ri)):
                ri[k], rj[k] = x * ri[k] + y * rj[k], s * ri[k] + t * rj[k]

    def addmul(i, j, f):
        for mat in (h, u):
            ri, rj = mat[i], mat[j]
            for k in range(len(ri)):
                ri[k] += f * rj[k]

    def swap(i, j):
        h[i], h[j] = h[j], h[i]
        u[i], u[j] = u[j], u[i]

    pivot_row = 0
    for col in range(cols):
        # gcd the column tail into pivot_row
        nz = [i for i in range(pivot_row, rows) if h[i][col] != 0]
        if not nz:
            continue
        if nz[0] != pivot_row:
            swap(pivot_row, nz[0])
        for i in range(pivot_row + 1, rows):
            if h[i][col] == 0:
                continue
            g, x, y = extended_gcd(h[pivot_row][col], h[i][col])
            rowcomb(pivot_row, i, x, y, -(h[i][col] // g), h[pivot_row][col] // g)
        if h[pivot_row][col] < 0:
            for mat in (h, u):
                mat[pivot_row] = [-x for x in mat[pivot_row]]
        # reduce entries above the pivot into [0, pivot)
        p = h[pivot_row][col]
        for i in range(pivot_row):
            f = h[i][col] // p
            if f:
                addmul(i, pivot_row, -f)
        pivot_row += 1
        if pivot_row == rows:
            break
    return IntMatrix(h), IntMatrix(u)


def unimodular_completion(a: list[int], q: int) -> IntMatrix:
    """A matrix U, invertible mod q, whose leftmost column is the vector a.

    Builds a unimodular R with R a = (r, 0, ..., 0)^T by an extended-GCD
    chain, then returns R^{-1} diag(r, 1, ..., 1); requires gcd(a) coprime
    with q.
    """
    n = len(a)
    if n == 0:
        raise ParameterError("empty vector")
    if all(x == 0 for x in a):
        raise CoprimalityError("zero vector cannot be completed")
    vec = list(map(int, a))
    # maintain rinv with rinv @ (current vec embedded ops) : apply inverse column ops
    rinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def bezout_rows(i, j):
        # drive vec[j] to 0 using a 2x2 unimodular transform on rows i, j of R;
        # R^{-1} gets the inverse transform applied on columns i, j.
        g, x, y = extended_gcd(vec[i], vec[j])
        ai, aj = vec[i] // g, vec[j] // g
        vec[i], vec[j] = g, 0
        # R rows: (x, y; -aj, ai); inverse acts on columns of rinv: (ai, -y; aj, x)
        for row in rinv:
            ci, cj = row[i], row[j]
            row[i] = ci * ai + cj * aj
            row[j] = -ci * y + cj * x

    for j in range(1, n):
        if vec[j] == 0:
            continue
        bezout_rows(0, j)
    r = vec[0]
    if math.gcd(r, q) != 1:
        raise CoprimalityError(f"gcd of the vector ({r}) shares a factor with q={q}")
    # U = R^{-1} diag(r, 1, ..., 1): scale the first column of R^{-1} by r
    for row in rinv:
        row[0] *= r
    return IntMatrix(rinv)
