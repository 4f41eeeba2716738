"""Exact rational construction of the Pascal matrix family and its commuting
tridiagonal companions, with bit-exact identity verification.

All scalars are ``fractions.Fraction`` (kept canonical by the stdlib), so
every check in this module is exact: a reported defect of zero means the
identity holds bit for bit, not merely to rounding.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .report import Check, IdentityReport

Rational = Fraction


def binomial(j: int, k: int) -> Fraction:
    """Binomial coefficient C(j, k) by the multiplicative formula.

    Returns 0 when k > j.  Negative arguments are rejected.
    """
    if j < 0 or k < 0:
        raise ValueError("binomial requires nonnegative arguments")
    if k > j:
        return Fraction(0)
    k = min(k, j - k)
    num = 1
    for i in range(1, k + 1):
        num = num * (j - k + i) // i
    return Fraction(num)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class ExactMatrix:
    """Dense matrix of exact rationals, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence]):
        self.data = [[_as_fraction(x) for x in row] for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        if any(len(row) != self.cols for row in self.data):
            raise ValueError("ragged rows")
        if self.rows == 0 or self.cols == 0:
            raise ValueError("empty matrices are not supported")

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls(
            [[_as_fraction(values[i]) if i == j else Fraction(0) for j in range(n)]
             for i in range(n)]
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)]
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)]
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in row] for row in self.data])

    def __matmul__(self, other) -> "ExactMatrix":
        if isinstance(other, ExactTridiagonal):
            return _dense_times_tri(self, other)
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        bt = other.transpose().data
        return ExactMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.data]
        )

    def scale(self, s) -> "ExactMatrix":
        s = _as_fraction(s)
        return ExactMatrix([[s * a for a in row] for row in self.data])

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.data for a in row)

    def max_abs(self):
        """Largest absolute entry and its index: (value, (i, j))."""
        best = Fraction(0)
        where = (0, 0)
        for i, row in enumerate(self.data):
            for j, a in enumerate(row):
                if abs(a) > best:
                    best = abs(a)
                    where = (i, j)
        return best, where

    def to_float(self):
        return [[float(a) for a in row] for row in self.data]

    def submatrix(self, rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix([row[:cols] for row in self.data[:rows]])

    def to_json(self) -> str:
        entries = [[str(a.numerator), str(a.denominator)] for row in self.data for a in row]
        return json.dumps({"rows": self.rows, "cols": self.cols, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "ExactMatrix":
        obj = json.loads(text)
        r, c = obj["rows"], obj["cols"]
        entries = obj["entries"]
        if len(entries) != r * c:
            raise ValueError("entry count does not match dimensions")
        data = [
            [Fraction(int(entries[i * c + j][0]), int(entries[i * c + j][1]))
             for j in range(c)]
            for i in range(r)
        ]
        return cls(data)

    def _check_same_shape(self, other: "ExactMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols})"


@dataclass
class ExactTridiagonal:
    """Symmetric tridiagonal matrix; a single off-diagonal is stored."""

    diag: list
    offdiag: list

    def __post_init__(self):
        self.diag = [_as_fraction(x) for x in self.diag]
        self.offdiag = [_as_fraction(x) for x in self.offdiag]
        if len(self.diag) < 1:
            raise ValueError("dimension must be at least 1")
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError("offdiag must have length n-1")

    @property
    def n(self) -> int:
        return len(self.diag)

    def to_dense(self) -> ExactMatrix:
        n = self.n
        m = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = self.diag[i]
        for i in range(n - 1):
            m[i][i + 1] = self.offdiag[i]
            m[i + 1][i] = self.offdiag[i]
        return ExactMatrix(m)

    def trace(self) -> Fraction:
        return sum(self.diag, Fraction(0))

    def apply(self, v: Sequence) -> list:
        """Matrix-vector product, O(n)."""
        n = self.n
        if len(v) != n:
            raise ValueError("dimension mismatch")
        v = [_as_fraction(x) for x in v]
        out = []
        for i in range(n):
            s = self.diag[i] * v[i]
            if i > 0:
                s += self.offdiag[i - 1] * v[i - 1]
            if i < n - 1:
                s += self.offdiag[i] * v[i + 1]
            out.append(s)
        return out


MatrixLike = Union[ExactMatrix, ExactTridiagonal]


def _tri_times_dense(t: ExactTridiagonal, m: ExactMatrix) -> ExactMatrix:
    if t.n != m.rows:
        raise ValueError("dimension mismatch")
    n, c = m.rows, m.cols
    out = []
    for i in range(n):
        row = [t.diag[i] * m.data[i][j] for j in range(c)]
        if i > 0:
            e = t.offdiag[i - 1]
            for j in range(c):
                row[j] += e * m.data[i - 1][j]
        if i < n - 1:
            e = t.offdiag[i]
            for j in range(c):
                row[j] += e * m.data[i + 1][j]
        out.append(row)
    return ExactMatrix(out)


def _dense_times_tri(m: ExactMatrix, t: ExactTridiagonal) -> ExactMatrix:
    if m.cols != t.n:
        raise ValueError("dimension mismatch")
    return _tri_times_dense(t, m.transpose()).transpose()


def _to_dense(a: MatrixLike) -> ExactMatrix:
    return a.to_dense() if isinstance(a, ExactTridiagonal) else a


def matmul(a: MatrixLike, b: MatrixLike) -> ExactMatrix:
    """Exact product, using the tridiagonal structure when available."""
    if isinstance(a, ExactTridiagonal) and isinstance(b, ExactTridiagonal):
        return _tri_times_dense(a, b.to_dense())
    if isinstance(a, ExactTridiagonal):
        return _tri_times_dense(a, b)
    if isinstance(b, ExactTridiagonal):
        return _dense_times_tri(a, b)
    return a @ b


def commutator(a: MatrixLike, b: MatrixLike) -> ExactMatrix:
    """AB - BA, exact.  Square matrices of equal dimension only."""
    da = a.n if isinstance(a, ExactTridiagonal) else a.rows
    db = b.n if isinstance(b, ExactTridiagonal) else b.rows
    if isinstance(a, ExactMatrix) and a.rows != a.cols:
        raise ValueError("commutator requires square matrices")
    if isinstance(b, ExactMatrix) and b.rows != b.cols:
        raise ValueError("commutator requires square matrices")
    if da != db:
        raise ValueError("dimension mismatch")
    return matmul(a, b) - matmul(b, a)


def _require_dim(n: int):
    if n < 1:
        raise ValueError("dimension must be at least 1")


def pascal_symmetric(n: int) -> ExactMatrix:
    """Symmetric Pascal matrix with entry (j, k) = C(j+k, j)."""
    _require_dim(n)
    return ExactMatrix([[binomial(j + k, j) for k in range(n)] for j in range(n)])


def pascal_lower(n: int) -> ExactMatrix:
    """Lower-triangular Pascal matrix with entry (j, k) = C(j, k)."""
    _require_dim(n)
    return ExactMatrix([[binomial(j, k) for k in range(n)] for j in range(n)])


def sign_diagonal(n: int) -> ExactMatrix:
    """diag(1, -1, 1, ..., (-1)^(n-1))."""
    _require_dim(n)
    return ExactMatrix.diagonal([Fraction((-1) ** j) for j in range(n)])


def jacobi_J(n: int) -> ExactTridiagonal:
    """Top-left n x n block of the linear Jacobi matrix: diag -k, offdiag k."""
    _require_dim(n)
    return ExactTridiagonal([-k for k in range(n)], [k for k in range(1, n)])


def jacobi_Jtilde(n: int) -> ExactTridiagonal:
    """Top-left n x n block of the cubic Jacobi matrix:
    diag -2k^3-3k^2-2k, offdiag k^3."""
    _require_dim(n)
    return ExactTridiagonal(
        [-2 * k**3 - 3 * k**2 - 2 * k for k in range(n)],
        [k**3 for k in range(1, n)],
    )


def jacobi_JN(n: int) -> ExactTridiagonal:
    """The n x n Jacobi matrix commuting with the symmetric Pascal matrix.

    Entries are those of n^2 * (linear) - (cubic); the coupling just past the
    block, n^2 * n - n^3, cancels exactly, which is what makes the truncation
    close up.  The cancellation is asserted.
    """
    _require_dim(n)
    assert n**2 * n - n**3 == 0
    diag = [-(n**2) * k + 2 * k**3 + 3 * k**2 + 2 * k for k in range(n)]
    off = [n**2 * k - k**3 for k in range(1, n)]
    return ExactTridiagonal(diag, off)


def dual_S(n: int) -> ExactMatrix:
    """Dual Gram matrix with entry (j, k) = sum_i C(i, j) C(i, k), i < n."""
    _require_dim(n)
    return ExactMatrix(
        [
            [
                sum((binomial(i, j) * binomial(i, k) for i in range(n)), Fraction(0))
                for k in range(n)
            ]
            for j in range(n)
        ]
    )


def fourier_image_JN(n: int) -> ExactTridiagonal:
    """Image of the commuting Jacobi matrix under the generalized Fourier map:
    -L J L + (n^2 - 1) I for L the alternating sign diagonal.

    Sign conjugation flips the off-diagonal once and the leading minus flips
    it back, so the off-diagonal is unchanged while the diagonal reflects.
    """
    _require_dim(n)
    jn = jacobi_JN(n)
    shift = Fraction(n**2 - 1)
    return ExactTridiagonal([shift - d for d in jn.diag], list(jn.offdiag))


def _zero_check(name: str, n: int, defect_matrix: ExactMatrix) -> Check:
    big, where = defect_matrix.max_abs()
    return Check(name, n, big == 0, big, where if big != 0 else None)


def verify_suite(n: int) -> IdentityReport:
    """Run every exact matrix identity at dimension n and report defects."""
    _require_dim(n)
    report = IdentityReport()
    psi = pascal_lower(n)
    t = pascal_symmetric(n)
    lam = sign_diagonal(n)
    jn = jacobi_JN(n)
    s = dual_S(n)

    report.add(_zero_check("pascal = lower * lower^T", n, psi @ psi.transpose() - t))

    b = psi @ lam
    report.add(_zero_check("binomial transform is an involution", n,
                           b @ b - ExactMatrix.identity(n)))

    report.add(_zero_check("pascal commutes with its Jacobi matrix", n,
                           commutator(t, jn)))

    report.add(_zero_check("dual Gram commutes with the Fourier image", n,
                           commutator(s, fourier_image_JN(n))))

    # Exact inverse of the Pascal matrix via the triangular involution,
    # cross-checked against the dual Gram matrix built from the sum formula.
    psi_inv = lam @ psi @ lam
    t_inv = psi_inv.transpose() @ psi_inv
    report.add(_zero_check("triangular inverse reproduces pascal^-1", n,
                           t @ t_inv - ExactMatrix.identity(n)))
    report.add(_zero_check("dual Gram = sign-conjugated pascal inverse", n,
                           s - lam @ t_inv @ lam))

    expected_trace = Fraction(n * (n**2 - 1), 2)
    tr = jn.trace()
    report.add(Check("Jacobi trace equals n(n^2-1)/2", n, tr == expected_trace,
                     tr - expected_trace))
    return report
