"""Matrices over the quaternions.

An :class:`HMatrix` stores its entries as an array of shape ``(rows, cols, 4)``
holding the real components of each quaternion.  Float matrices use a
``float64`` array; exact matrices use an ``object`` array of ``int`` /
``Fraction``.  Numerical work (inverse, rank, determinant) goes through the
complex embedding ``A = A1 + A2 j  ->  [[A1, A2], [-conj(A2), conj(A1)]]``;
the exact backend uses Gaussian elimination over the quaternions instead.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import quat
from .errors import DimensionMismatch, NonSquare, ParseError, Singular, ZeroMatrix
from .quat import Quaternion


def default_rank_tol(rows: int, cols: int) -> float:
    return 1e-9 * max(rows, cols)


class HMatrix:
    """Immutable quaternionic matrix; products keep left-to-right order."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ValueError(f"HMatrix data must have shape (rows, cols, 4), got {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("HMatrix needs positive dimensions")
        if arr.dtype == object:
            arr = arr.copy()
        else:
            arr = np.array(arr, dtype=np.float64)
        arr.setflags(write=False)
        self.data = arr

    # construction -----------------------------------------------------

    @classmethod
    def from_entries(cls, grid, exact: bool | None = None) -> "HMatrix":
        """Build from a nested list of quaternions / numbers / complex numbers."""
        rows = [[Quaternion.coerce(x) for x in row] for row in grid]
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        if exact is None:
            exact = all(q.is_exact for r in rows for q in r)
        arr = np.array([[q.components for q in r] for r in rows], dtype=object if exact else np.float64)
        if exact:
            arr = _to_exact(arr)
        return cls(arr)

    @classmethod
    def from_complex(cls, a1, a2=None) -> "HMatrix":
        """``A1 + A2 j`` for complex arrays ``A1``, ``A2``."""
        a1 = np.atleast_2d(np.asarray(a1, dtype=complex))
        a2 = np.zeros_like(a1) if a2 is None else np.atleast_2d(np.asarray(a2, dtype=complex))
        return cls(np.stack([a1.real, a1.imag, a2.real, a2.imag], axis=-1))

    @classmethod
    def identity(cls, n: int, exact: bool = False) -> "HMatrix":
        return cls.diag([1] * n, exact=exact)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None, exact: bool = False) -> "HMatrix":
        cols = rows if cols is None else cols
        if exact:
            arr = np.empty((rows, cols, 4), dtype=object)
            arr[...] = 0
            return cls(arr)
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def diag(cls, entries, exact: bool | None = None) -> "HMatrix":
        qs = [Quaternion.coerce(x) for x in entries]
        n = len(qs)
        if exact is None:
            exact = all(q.is_exact for q in qs)
        grid = [[qs[i] if i == j else Quaternion() for j in range(n)] for i in range(n)]
        return cls.from_entries(grid, exact=exact)

    @classmethod
    def unit(cls, i: int, j: int, n: int, exact: bool = True) -> "HMatrix":
        """E_{i,j} (0-based indices) of size n x n."""
        z = cls.zeros(n, exact=exact).data.copy()
        z[i, j, 0] = 1
        return cls(z)

    # basic protocol ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_exact(self) -> bool:
        return self.data.dtype == object

    def __getitem__(self, idx) -> Quaternion:
        i, j = idx
        return Quaternion(*self.data[i, j])

    def entries(self) -> list[list[Quaternion]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        kind = "exact" if self.is_exact else "float"
        return f"HMatrix({self.rows}x{self.cols}, {kind})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HMatrix) or self.shape != other.shape:
            return NotImplemented if not isinstance(other, HMatrix) else False
        return bool(np.all(self.data == other.data))

    __hash__ = None

    def __matmul__(self, other: "HMatrix") -> "HMatrix":
        return matmul(self, other)

    def __add__(self, other: "HMatrix") -> "HMatrix":
        a, b = _common(self, other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return HMatrix(a + b)

    def __sub__(self, other: "HMatrix") -> "HMatrix":
        a, b = _common(self, other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return HMatrix(a - b)

    def __neg__(self) -> "HMatrix":
        return HMatrix(-self.data)

    def scale(self, c) -> "HMatrix":
        """Multiply by a real scalar."""
        return HMatrix(self.data * c)

    def lmul(self, q) -> "HMatrix":
        """``q * A`` for a quaternion scalar ``q``."""
        q = Quaternion.coerce(q)
        return matmul(HMatrix.diag([q] * self.rows, exact=self.is_exact and q.is_exact), self)

    def rmul(self, q) -> "HMatrix":
        """``A * q`` for a quaternion scalar ``q``."""
        q = Quaternion.coerce(q)
        n = self.cols
        d = HMatrix.diag([q] * n, exact=self.is_exact and q.is_exact)
        return matmul(self, d)

    def conj_transpose(self) -> "HMatrix":
        d = self.data.transpose(1, 0, 2).copy()
        d[..., 1:] = -d[..., 1:]
        return HMatrix(d)

    def to_float(self) -> "HMatrix":
        if not self.is_exact:
            return self
        return HMatrix(self.data.astype(np.float64))

    def column(self, j: int) -> np.ndarray:
        return np.array(self.data[:, j, :])

    def to_json(self) -> dict:
        if self.rows != self.cols:
            return {"rows": self.rows, "cols": self.cols, "entries": _entries_json(self)}
        return {"n": self.rows, "entries": _entries_json(self)}

    @classmethod
    def from_json(cls, obj) -> "HMatrix":
        if not isinstance(obj, dict) or "entries" not in obj:
            raise ParseError("matrix must be an object with an 'entries' field")
        grid = obj["entries"]
        if not isinstance(grid, list) or not grid or not all(isinstance(r, list) and r for r in grid):
            raise ParseError("'entries' must be a non-empty list of non-empty rows")
        rows = [[Quaternion.from_json(x) for x in r] for r in grid]
        if any(len(r) != len(rows[0]) for r in rows):
            raise ParseError("ragged 'entries'")
        if "n" in obj:
            n = obj["n"]
            if not isinstance(n, int) or len(rows) != n or len(rows[0]) != n:
                raise ParseError(f"'n'={n!r} does not match a {len(rows)}x{len(rows[0])} entry grid")
        return cls.from_entries(rows)


def _entries_json(A: HMatrix) -> list:
    return [[A[i, j].to_json() for j in range(A.cols)] for i in range(A.rows)]


def _to_exact(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, (int, np.integer)):
            out[idx] = int(x)
        elif isinstance(x, Fraction):
            out[idx] = x
        else:
            out[idx] = Fraction(x)
    return out


def _common(A: HMatrix, B: HMatrix):
    if A.is_exact == B.is_exact:
        return A.data, B.data
    return A.data.astype(np.float64), B.data.astype(np.float64)


def _qmul_arrays(a, b):
    # matrix product of component arrays, Hamilton table entrywise
    a0, a1, a2, a3 = (a[..., i] for i in range(4))
    b0, b1, b2, b3 = (b[..., i] for i in range(4))
    op = np.matmul
    return np.stack(
        [
            op(a0, b0) - op(a1, b1) - op(a2, b2) - op(a3, b3),
            op(a0, b1) + op(a1, b0) + op(a2, b3) - op(a3, b2),
            op(a0, b2) - op(a1, b3) + op(a2, b0) + op(a3, b1),
            op(a0, b3) + op(a1, b2) - op(a2, b1) + op(a3, b0),
        ],
        axis=-1,
    )


def matmul(A: HMatrix, B: HMatrix) -> HMatrix:
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    a, b = _common(A, B)
    return HMatrix(_qmul_arrays(a, b))


# complex embedding ----------------------------------------------------


def phi(A: HMatrix) -> np.ndarray:
    """Complex embedding of a (possibly rectangular) matrix; float output."""
    d = A.data.astype(np.float64) if A.is_exact else A.data
    a1 = d[..., 0] + 1j * d[..., 1]
    a2 = d[..., 2] + 1j * d[..., 3]
    return np.block([[a1, a2], [-a2.conj(), a1.conj()]])


def embed_phi(A: HMatrix) -> np.ndarray:
    if not A.is_square:
        raise NonSquare(f"embed_phi needs a square matrix, got {A.rows}x{A.cols}")
    return phi(A)


def from_phi(F: np.ndarray) -> HMatrix:
    """Pull a matrix in the image of the embedding back to H (reads the top blocks)."""
    F = np.asarray(F)
    r, c = F.shape[0] // 2, F.shape[1] // 2
    a1 = F[:r, :c]
    a2 = F[:r, c:]
    return HMatrix.from_complex(a1, a2)


def entry_norms(A: HMatrix) -> np.ndarray:
    d = A.data.astype(np.float64) if A.is_exact else A.data
    return np.sqrt(np.sum(d * d, axis=-1))


# determinant, inverse, rank ----------------------------------------------


def det_h(A: HMatrix):
    """Study determinant ``det(phi(A))``; exact rational for exact input."""
    if not A.is_square:
        raise NonSquare(f"det_h needs a square matrix, got {A.rows}x{A.cols}")
    if A.is_exact:
        return _exact_det_h(A)
    return float(np.linalg.det(phi(A)).real)


def inverse(A: HMatrix, tol: float | None = None) -> HMatrix:
    if not A.is_square:
        raise NonSquare(f"inverse needs a square matrix, got {A.rows}x{A.cols}")
    if A.is_exact:
        return _exact_inverse(A)
    if rank(A, tol) < A.rows:
        raise Singular("matrix is singular at the rank tolerance")
    return from_phi(np.linalg.inv(phi(A)))


def rank(A: HMatrix, tol: float | None = None) -> int:
    """Quaternionic rank: half the number of singular values of phi(A) above ``tol * s_max``."""
    if A.is_exact:
        return _exact_rank(A)
    if tol is None:
        tol = default_rank_tol(A.rows, A.cols)
    s = np.linalg.svd(phi(A), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0])) // 2


def max_entry_norm(A: HMatrix) -> tuple[float, tuple[int, int]]:
    """Largest entry modulus and its 0-based position (first in row-major order on ties)."""
    norms = entry_norms(A)
    flat = int(np.argmax(norms))
    value = float(norms.flat[flat])
    if value == 0:
        raise ZeroMatrix("max_entry_norm of the zero matrix")
    return value, divmod(flat, A.cols)


def matrix_power(A: HMatrix, m: int) -> HMatrix:
    """``A**m`` by binary exponentiation; negative ``m`` uses the inverse."""
    if not A.is_square:
        raise NonSquare("matrix_power needs a square matrix")
    if m < 0:
        A = inverse(A)
        m = -m
    result = HMatrix.identity(A.rows, exact=A.is_exact)
    base = A
    while m:
        if m & 1:
            result = result @ base
        m >>= 1
        if m:
            base = base @ base
    return result


def max_abs_diff(A: HMatrix, B: HMatrix) -> float:
    a, b = _common(A, B)
    return float(np.max(np.abs(np.asarray(a - b, dtype=np.float64))))


def jordan_block(lam, size: int, exact: bool | None = None) -> HMatrix:
    """J(lam, size): ``lam`` on the diagonal, 1 on the superdiagonal."""
    q = Quaternion.coerce(lam)
    if exact is None:
        exact = q.is_exact
    grid = [
        [q if i == j else (Quaternion(1) if j == i + 1 else Quaternion()) for j in range(size)]
        for i in range(size)
    ]
    return HMatrix.from_entries(grid, exact=exact)


def direct_sum(*mats: HMatrix) -> HMatrix:
    exact = all(m.is_exact for m in mats)
    n = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = HMatrix.zeros(n, c, exact=exact).data.copy()
    r0 = c0 = 0
    for m in mats:
        out[r0:r0 + m.rows, c0:c0 + m.cols] = m.data
        r0 += m.rows
        c0 += m.cols
    if not exact:
        out = out.astype(np.float64)
    return HMatrix(out)


# exact backend ----------------------------------------------------------


def _rows_as_quaternions(A: HMatrix) -> list[list[Quaternion]]:
    return [[Quaternion(*(Fraction(c) for c in A.data[i, j])) for j in range(A.cols)] for i in range(A.rows)]


def _row_echelon(rows: list[list[Quaternion]]):
    """Left Gaussian elimination: row_i <- row_i - f * row_p with f on the left.

    Returns (echelon rows, pivot columns, list of pivot values, swap parity).
    """
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    pivot_vals = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if rows[i][c].norm2() != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        piv_inv = quat.inverse(piv)
        for i in range(nrows):
            if i == r or rows[i][c].norm2() == 0:
                continue
            f = rows[i][c] * piv_inv
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        pivot_vals.append(piv)
        r += 1
        if r == nrows:
            break
    return rows, pivots, pivot_vals


def _exact_rank(A: HMatrix) -> int:
    _, pivots, _ = _row_echelon(_rows_as_quaternions(A))
    return len(pivots)


def _exact_det_h(A: HMatrix) -> Fraction:
    # row swaps and left row operations have Study determinant 1, so the
    # determinant is the product of |pivot|^2 over the reduced matrix
    _, pivots, vals = _row_echelon(_rows_as_quaternions(A))
    if len(pivots) < A.rows:
        return Fraction(0)
    out = Fraction(1)
    for v in vals:
        out *= v.norm2()
    return out


def _exact_inverse(A: HMatrix) -> HMatrix:
    n = A.rows
    rows = _rows_as_quaternions(A)
    aug = [r + [Quaternion(1 if i == j else 0) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots, _ = _row_echelon(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise Singular("exact matrix is singular")
    out = []
    for i in range(n):
        d_inv = quat.inverse(red[i][i])
        out.append([d_inv * x for x in red[i][n:]])
    return HMatrix.from_entries(out, exact=True)
