"""Exact integer matrix algebra.

Everything here works on Python ints, so entries never overflow and no
floating point is involved.  Matrices are dense; the graphs this package
handles stay at a few hundred vertices, where dense elimination is cheap
enough and far easier to audit than sparse code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SmithForm",
    "AbelianGroupClass",
    "DimensionError",
    "as_matrix",
    "smith_normal_form",
    "determinant",
    "cokernel",
]


class DimensionError(ValueError):
    """Raised when a matrix has the wrong shape for an operation."""


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(data[0]) if data else 0
        for r in data:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(data), cols, tuple(x for r in data for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)], self.rows
        )

    def delete(self, row: int, col: int) -> "IntMatrix":
        """Return the matrix with one row and one column removed."""
        return IntMatrix.from_rows(
            [[x for j, x in enumerate(self.row(i)) if j != col]
             for i in range(self.rows) if i != row],
            self.cols - 1,
        )

    def permute(self, row_order: Sequence[int], col_order: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[self[i, j] for j in col_order] for i in row_order], len(col_order)
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.entries[j::other.cols] for j in range(other.cols)]
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(self.row(i), c)) for c in cols]
             for i in range(self.rows)],
            other.cols,
        )


def as_matrix(a) -> IntMatrix:
    """Coerce an IntMatrix or a nested sequence of ints to an IntMatrix."""
    if isinstance(a, IntMatrix):
        return a
    return IntMatrix.from_rows(a)


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors of a matrix, optionally with the unimodular transforms.

    ``diag`` has ``min(rows, cols)`` entries; nonzero ones come first and
    each divides the next.  When transforms were requested,
    ``left @ A @ right`` is the diagonal matrix carrying ``diag``.
    """

    diag: tuple[int, ...]
    left: IntMatrix | None = None
    right: IntMatrix | None = None
    # +1 or -1: det(left) * det(right).  Lets a square SNF recover det(A) with sign.
    transform_sign: int = field(default=1, repr=False)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)


@dataclass(frozen=True)
class AbelianGroupClass:
    """Finitely generated abelian group Z^free_rank + sum of Z/d_i, d_1 | d_2 | ..."""

    invariant_factors: tuple[int, ...]
    free_rank: int = 0

    def __post_init__(self):
        facs = self.invariant_factors
        if any(d <= 1 for d in facs):
            raise ValueError(f"invariant factors must exceed 1: {facs}")
        if any(b % a for a, b in zip(facs, facs[1:])):
            raise ValueError(f"invariant factors must form a divisibility chain: {facs}")
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    @property
    def torsion_order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def order(self) -> int | None:
        """Group order, or None when the group is infinite."""
        return None if self.free_rank else self.torsion_order

    def torsion(self) -> "AbelianGroupClass":
        return AbelianGroupClass(self.invariant_factors, 0)

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def _identity_rows(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a, want_transforms: bool = False) -> SmithForm:
    """Smith normal form by elimination on a minimal-absolute-value pivot.

    Each step moves the smallest nonzero entry of the trailing block to
    the pivot, clears its row and column with Euclidean quotients, and
    repeats until the pivot divides every remaining entry.
    """
    A = as_matrix(a)
    m, n = A.shape
    M = A.tolist()
    L = _identity_rows(m) if want_transforms else None
    R = _identity_rows(n) if want_transforms else None
    sign = 1

    def swap_rows(i, k):
        nonlocal sign
        if i != k:
            M[i], M[k] = M[k], M[i]
            if L is not None:
                L[i], L[k] = L[k], L[i]
            sign = -sign

    def swap_cols(j, k, top):
        nonlocal sign
        if j != k:
            for r in range(top, m):
                row = M[r]
                row[j], row[k] = row[k], row[j]
            if R is not None:
                for row in R:
                    row[j], row[k] = row[k], row[j]
            sign = -sign

    def add_row(dst, src, q, top):
        # row[dst] -= q * row[src]
        rd, rs = M[dst], M[src]
        for c in range(top, n):
            if rs[c]:
                rd[c] -= q * rs[c]
        if L is not None:
            ld, ls = L[dst], L[src]
            for c in range(m):
                if ls[c]:
                    ld[c] -= q * ls[c]

    def add_col(dst, src, q, top):
        # col[dst] -= q * col[src]
        for r in range(top, m):
            row = M[r]
            if row[src]:
                row[dst] -= q * row[src]
        if R is not None:
            for row in R:
                if row[src]:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = M[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2], t)

        while True:
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = M[i][t]
                if x:
                    add_row(i, t, x // p, t)
                    dirty = dirty or M[i][t] != 0
            for j in range(t + 1, n):
                x = M[t][j]
                if x:
                    add_col(j, t, x // p, t)
                    dirty = dirty or M[t][j] != 0
            if dirty:
                # a remainder survived: bring the smallest one to the pivot
                cands = [(abs(M[i][t]), i, t) for i in range(t + 1, m) if M[i][t]]
                cands += [(abs(M[t][j]), t, j) for j in range(t + 1, n) if M[t][j]]
                _, i, j = min(cands)
                swap_rows(t, i)
                swap_cols(t, j, t)
                continue
            if abs(p) != 1:
                bad = next(
                    (i for i in range(t + 1, m)
                     if any(x % p for x in M[i][t + 1:])),
                    None,
                )
                if bad is not None:
                    add_row(t, bad, -1, t)
                    continue
            break

        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            if L is not None:
                L[t] = [-x for x in L[t]]
            sign = -sign
        t += 1

    diag = tuple(M[i][i] for i in range(min(m, n)))
    if want_transforms:
        return SmithForm(diag, IntMatrix.from_rows(L, m), IntMatrix.from_rows(R, n), sign)
    return SmithForm(diag, transform_sign=sign)


def _bareiss(M: list[list[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pk = M[k][k]
        rk = M[k]
        for i in range(k + 1, n):
            ri = M[i]
            a = ri[k]
            if a:
                M[i] = [0] * (k + 1) + [
                    (x * pk - a * y) // prev for x, y in zip(ri[k + 1:], rk[k + 1:])
                ]
            elif pk != prev:
                M[i] = [0] * (k + 1) + [x * pk // prev for x in ri[k + 1:]]
        prev = pk
    return sign * M[n - 1][n - 1]


def determinant(a, method: str = "bareiss") -> int:
    """Exact determinant of a square integer matrix.

    ``method`` is ``"bareiss"`` (fraction-free elimination, the default) or
    ``"smith"``, which multiplies the invariant factors and recovers the
    sign from the parity of the elementary operations used.
    """
    A = as_matrix(a)
    if A.rows != A.cols:
        raise DimensionError(f"determinant of a non-square {A.rows}x{A.cols} matrix")
    if method == "bareiss":
        return _bareiss(A.tolist())
    if method == "smith":
        snf = smith_normal_form(A)
        return snf.transform_sign * prod(snf.diag)
    raise ValueError(f"unknown determinant method {method!r}")


def cokernel(a) -> AbelianGroupClass:
    """Structure of Z^rows / (column span of a)."""
    A = as_matrix(a)
    diag = smith_normal_form(A).diag
    nonzero = [d for d in diag if d]
    return AbelianGroupClass(
        tuple(d for d in nonzero if d != 1), A.rows - len(nonzero)
    )
