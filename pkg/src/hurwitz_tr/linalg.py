"""Small dense matrices over Scalar and truncated matrix power series."""

from __future__ import annotations

from .errors import PreconditionError
from .scalar import as_scalar

__all__ = ["mat_identity", "mat_zero", "mat_mul", "mat_add", "mat_sub", "mat_scale",
           "mat_transpose", "mat_inverse", "mat_eq", "FormalMatrixSeries"]

ZERO = as_scalar(0)
ONE = as_scalar(1)


def mat_zero(n: int, m: int | None = None) -> list:
    m = n if m is None else m
    return [[ZERO] * m for _ in range(n)]


def mat_identity(n: int) -> list:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def mat_mul(a: list, b: list) -> list:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = mat_zero(n, m)
    for i in range(n):
        for l in range(k):
            x = a[i][l]
            if x.is_zero():
                continue
            row = b[l]
            for j in range(m):
                if not row[j].is_zero():
                    out[i][j] = out[i][j] + x * row[j]
    return out


def mat_add(a: list, b: list) -> list:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def mat_sub(a: list, b: list) -> list:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def mat_scale(a: list, c) -> list:
    c = as_scalar(c)
    return [[x * c for x in r] for r in a]


def mat_transpose(a: list) -> list:
    return [list(r) for r in zip(*a)] if a else []


def mat_eq(a: list, b: list) -> bool:
    return all(x == y for r, s in zip(a, b) for x, y in zip(r, s))


def mat_inverse(a: list) -> list:
    """Gauss-Jordan elimination with exact pivots."""
    n = len(a)
    m = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            raise PreconditionError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [r[n:] for r in m]


class FormalMatrixSeries:
    """sum_k M_k z^k for k = 0..K, with N x N Scalar matrices M_k."""

    def __init__(self, coeffs: list):
        if not coeffs:
            raise PreconditionError("empty matrix series")
        self.coeffs = [[[as_scalar(x) for x in r] for r in m] for m in coeffs]
        self.N = len(coeffs[0])

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def identity(cls, N: int, K: int) -> "FormalMatrixSeries":
        return cls([mat_identity(N)] + [mat_zero(N) for _ in range(K)])

    def __getitem__(self, k: int) -> list:
        if k > self.K:
            raise IndexError("coefficient %d beyond truncation %d" % (k, self.K))
        return self.coeffs[k]

    def __mul__(self, other: "FormalMatrixSeries") -> "FormalMatrixSeries":
        K = min(self.K, other.K)
        out = []
        for k in range(K + 1):
            acc = mat_zero(self.N)
            for j in range(k + 1):
                acc = mat_add(acc, mat_mul(self.coeffs[j], other.coeffs[k - j]))
            out.append(acc)
        return FormalMatrixSeries(out)

    def __add__(self, other):
        K = min(self.K, other.K)
        return FormalMatrixSeries([mat_add(self.coeffs[k], other.coeffs[k]) for k in range(K + 1)])

    def __sub__(self, other):
        K = min(self.K, other.K)
        return FormalMatrixSeries([mat_sub(self.coeffs[k], other.coeffs[k]) for k in range(K + 1)])

    def scale(self, c) -> "FormalMatrixSeries":
        return FormalMatrixSeries([mat_scale(m, c) for m in self.coeffs])

    def transpose(self) -> "FormalMatrixSeries":
        return FormalMatrixSeries([mat_transpose(m) for m in self.coeffs])

    def negate_z(self) -> "FormalMatrixSeries":
        """M(-z)."""
        return FormalMatrixSeries([m if k % 2 == 0 else mat_scale(m, -1)
                                   for k, m in enumerate(self.coeffs)])

    def inverse(self) -> "FormalMatrixSeries":
        inv0 = mat_inverse(self.coeffs[0])
        out = [inv0]
        for k in range(1, self.K + 1):
            acc = mat_zero(self.N)
            for j in range(1, k + 1):
                acc = mat_add(acc, mat_mul(self.coeffs[j], out[k - j]))
            out.append(mat_scale(mat_mul(inv0, acc), -1))
        return FormalMatrixSeries(out)

    def truncate(self, K: int) -> "FormalMatrixSeries":
        return FormalMatrixSeries(self.coeffs[:K + 1])

    def __eq__(self, other):
        if not isinstance(other, FormalMatrixSeries):
            return NotImplemented
        K = min(self.K, other.K)
        return all(mat_eq(self.coeffs[k], other.coeffs[k]) for k in range(K + 1))

    __hash__ = None

    def first_mismatch(self, other: "FormalMatrixSeries"):
        for k in range(min(self.K, other.K) + 1):
            for i in range(self.N):
                for j in range(self.N):
                    if self.coeffs[k][i][j] != other.coeffs[k][i][j]:
                        return (k, i, j)
        return None

    def __repr__(self):
        return "FormalMatrixSeries(N=%d, K=%d)" % (self.N, self.K)
