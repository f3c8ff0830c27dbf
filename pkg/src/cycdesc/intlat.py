"""Exact integer linear algebra: Smith normal form and lattice questions.

Plain list-of-lists matrices over Python ints (arbitrary precision), with a
naive SNF that tracks both transformation matrices.  Matrices here stay
small, so there is no need for modular tricks; every result self-checks its
defining identities because the checks are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass


class IntMatrix:
    """A rectangular matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: list[list[int]], cols: int | None = None):
        self.rows = len(data)
        if self.rows:
            self.cols = len(data[0])
            if any(len(r) != self.cols for r in data):
                raise ValueError("ragged matrix")
        else:
            self.cols = cols or 0
        self.data = [list(map(int, r)) for r in data]

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def from_columns(cls, columns: list[list[int]], rows: int) -> "IntMatrix":
        return cls([[col[i] for col in columns] for i in range(rows)], cols=len(columns))

    def column(self, j: int) -> list[int]:
        return [self.data[i][j] for i in range(self.rows)]

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = [[sum(self.data[i][k] * other.data[k][j] for k in range(self.cols))
                for j in range(other.cols)] for i in range(self.rows)]
        return IntMatrix(out, cols=other.cols)

    def mul_vec(self, v: list[int]) -> list[int]:
        if self.cols != len(v):
            raise ValueError("dimension mismatch")
        return [sum(self.data[i][k] * v[k] for k in range(self.cols))
                for i in range(self.rows)]

    def det(self) -> int:
        """Fraction-free Bareiss determinant (square matrices)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [row[:] for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and other.rows == self.rows
                and other.cols == self.cols and other.data == self.data)

    def __str__(self):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.data) + "]"

    __repr__ = __str__


@dataclass
class SNFResult:
    """U * A * V == D with U, V unimodular and the diagonal divisibility chain."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    def diagonal(self) -> list[int]:
        return [self.D.data[i][i] for i in range(min(self.D.rows, self.D.cols))]

    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d)

    def verify(self, A: IntMatrix):
        if self.U.mul(A).mul(self.V) != self.D:
            raise AssertionError("SNF transformation identity failed")
        if abs(self.U.det()) != 1 or abs(self.V.det()) != 1:
            raise AssertionError("SNF transformations are not unimodular")
        diag = self.diagonal()
        for i in range(len(diag) - 1):
            if diag[i + 1] and (diag[i] == 0 or diag[i + 1] % diag[i]):
                raise AssertionError("SNF divisibility chain failed")
        for i in range(self.D.rows):
            for j in range(self.D.cols):
                if i != j and self.D.data[i][j]:
                    raise AssertionError("SNF result not diagonal")


def snf(A: IntMatrix) -> SNFResult:
    """Smith normal form with deterministic pivoting: smallest absolute
    nonzero entry, ties broken by position."""
    m, n = A.rows, A.cols
    D = [row[:] for row in A.data]
    U = IntMatrix.identity(m)
    V = IntMatrix.identity(n)

    def row_op(i, j, q):  # row_i -= q * row_j
        for t in range(n):
            D[i][t] -= q * D[j][t]
        for t in range(m):
            U.data[i][t] -= q * U.data[j][t]

    def col_op(i, j, q):  # col_i -= q * col_j
        for t in range(m):
            D[t][i] -= q * D[t][j]
        for t in range(n):
            V.data[t][i] -= q * V.data[t][j]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U.data[i], U.data[j] = U.data[j], U.data[i]

    def swap_cols(i, j):
        for t in range(m):
            D[t][i], D[t][j] = D[t][j], D[t][i]
        for t in range(n):
            V.data[t][i], V.data[t][j] = V.data[t][j], V.data[t][i]

    k = 0
    while k < min(m, n):
        pivot = None
        for i in range(k, m):
            for j in range(k, n):
                v = abs(D[i][j])
                if v and (pivot is None or v < pivot[0]):
                    pivot = (v, i, j)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != k:
            swap_rows(k, pi)
        if pj != k:
            swap_cols(k, pj)
        if D[k][k] < 0:
            for t in range(n):
                D[k][t] = -D[k][t]
            for t in range(m):
                U.data[k][t] = -U.data[k][t]
        dirty = False
        for i in range(k + 1, m):
            if D[i][k]:
                q = D[i][k] // D[k][k]
                if q:
                    row_op(i, k, q)
                if D[i][k]:
                    dirty = True
        for j in range(k + 1, n):
            if D[k][j]:
                q = D[k][j] // D[k][k]
                if q:
                    col_op(j, k, q)
                if D[k][j]:
                    dirty = True
        if dirty:
            continue
        # enforce the divisibility chain before moving on
        offender = None
        for i in range(k + 1, m):
            for j in range(k + 1, n):
                if D[i][j] % D[k][k]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(k, offender, -1)
            continue
        k += 1
    result = SNFResult(U, IntMatrix(D, cols=n), V)
    result.verify(A)
    return result


def solve_integer(A: IntMatrix, b: list[int]) -> list[int] | None:
    """Some integer solution of A x = b, or None when the SNF divisibility
    conditions certify unsolvability."""
    if len(b) != A.rows:
        raise ValueError("dimension mismatch")
    res = snf(A)
    c = res.U.mul_vec(list(b))
    z = [0] * A.cols
    diag = res.diagonal()
    for i in range(A.rows):
        d = diag[i] if i < len(diag) else 0
        if d:
            if c[i] % d:
                return None
            z[i] = c[i] // d
        elif c[i]:
            return None
    x = res.V.mul_vec(z)
    assert A.mul_vec(x) == list(b)
    return x


def quotient_invariants(ambient_rank: int, gens: IntMatrix) -> list[int]:
    """Invariant factors of Z^rank modulo the column lattice of gens; zeros
    stand for free summands."""
    if gens.rows != ambient_rank:
        raise ValueError("generator matrix has the wrong number of rows")
    if gens.cols == 0 or ambient_rank == 0:
        return [0] * ambient_rank
    res = snf(gens)
    nonzero = [d for d in res.diagonal() if d]
    return nonzero + [0] * (ambient_rank - len(nonzero))


def is_saturated(ambient_rank: int, gens: IntMatrix) -> bool:
    """True iff the quotient by the column lattice is torsion-free."""
    return all(d in (0, 1) for d in quotient_invariants(ambient_rank, gens))


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns spanning the integer kernel of A; the basis is primitive
    (saturated) because it consists of columns of a unimodular matrix."""
    if A.cols == 0:
        return IntMatrix.zero(0, 0)
    if A.rows == 0:
        return IntMatrix.identity(A.cols)
    res = snf(A)
    diag = res.diagonal()
    free = [j for j in range(A.cols) if j >= len(diag) or diag[j] == 0]
    cols = [res.V.column(j) for j in free]
    return IntMatrix.from_columns(cols, A.cols)
