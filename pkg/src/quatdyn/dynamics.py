"""Dynamical type, pseudo-projective maps, normalized powers and limit kernels.

Powers of a Jordan block grow like ``binom(m, size - 1) |lam|^m`` in the
upper-right corner, and every other entry becomes negligible next to it.  A
block therefore has the growth order ``(log|lam|, size - 1)``; after dividing
by the largest entry, the only surviving entries of ``gamma^m`` sit in the
corners of the blocks of maximal order.  The kernel of any limit is spanned by
all Jordan basis vectors except the last one of each such block.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import hmat
from .errors import DimensionMismatch, PowerOverflowGuard, ZeroMatrix
from .hmat import HMatrix
from .projective import (
    ProjectiveSubspace,
    coordinate_subspace,
    empty_subspace,
    span,
    subspace_from_complex,
    transform,
)
from .quat import Quaternion
from .spectral import JordanData

#: Default tolerance for deciding |lam| == 1.
DEFAULT_UNIT_TOL = 1e-6
#: Default cap on |m| for normalized powers.
DEFAULT_POWER_CAP = 200


class DynamicalType(str, enum.Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    LOXODROMIC = "Loxodromic"
    LOXOPARABOLIC = "Loxoparabolic"

    def __str__(self) -> str:
        return self.value


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


def classify(J: JordanData, unit_tol: float = DEFAULT_UNIT_TOL) -> DynamicalType:
    semisimple = all(b.size == 1 for b in J.blocks)
    unit = all(abs(abs(b.rep) - 1) < unit_tol for b in J.blocks)
    if semisimple:
        return DynamicalType.ELLIPTIC if unit else DynamicalType.LOXODROMIC
    return DynamicalType.PARABOLIC if unit else DynamicalType.LOXOPARABOLIC


# pseudo-projective maps ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PseudoProjectiveMap:
    """A nonzero, possibly singular, matrix acting off its projectivized kernel."""

    matrix: HMatrix
    kernel: ProjectiveSubspace
    image: ProjectiveSubspace

    @property
    def rank(self) -> int:
        return self.image.count


def _exact_kernel_image(M: HMatrix):
    rows, pivots, _ = hmat._row_echelon(hmat._rows_as_quaternions(M))
    n = M.cols
    # normalize pivot rows so the pivot entry is 1
    red = []
    for i, c in enumerate(pivots):
        inv = rows[i][c].inverse()
        red.append([inv * x for x in rows[i]])
    kernel = []
    for f in (c for c in range(n) if c not in pivots):
        v = [Quaternion(0)] * n
        v[f] = Quaternion(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        kernel.append(np.array([q.components for q in v], dtype=object))
    image = [M.column(c) for c in pivots]
    return kernel, image


def pseudo_from_matrix(M: HMatrix, tol: float | None = None) -> PseudoProjectiveMap:
    """Kernel and image of ``M`` (rank cutoff ``tol`` relative to the largest singular value)."""
    if not M.is_square:
        raise DimensionMismatch("pseudo-projective maps need a square matrix")
    if M.is_exact:
        if all(x == 0 for x in M.data.flat):
            raise ZeroMatrix("pseudo-projective map of the zero matrix")
        kernel, image = _exact_kernel_image(M)
        amb = M.rows - 1
        K = span(kernel) if kernel else empty_subspace(amb)
        return PseudoProjectiveMap(M, K, span(image))
    if tol is None:
        tol = hmat.default_rank_tol(M.rows, M.cols)
    F = hmat.phi(M)
    U, s, vh = np.linalg.svd(F)
    if s[0] == 0 or not np.isfinite(s[0]):
        raise ZeroMatrix("pseudo-projective map of the zero matrix")
    r = int(np.count_nonzero(s > tol * s[0]))
    # singular values come in equal pairs; keep the count even
    r -= r % 2
    amb = M.rows - 1
    kernel = subspace_from_complex(vh[r:].conj().T, amb)
    image = subspace_from_complex(U[:, :r], amb)
    return PseudoProjectiveMap(M, kernel, image)


def least_singular_subspace(M: HMatrix, count: int) -> ProjectiveSubspace:
    """Span of the ``count`` right-singular directions of M with the smallest singular values."""
    amb = M.rows - 1
    if count == 0:
        return empty_subspace(amb)
    _, _, vh = np.linalg.svd(hmat.phi(M))
    return subspace_from_complex(vh[vh.shape[0] - 2 * count:].conj().T, amb)


# normalized powers -------------------------------------------------------------


def _rescale(P: HMatrix) -> HMatrix:
    d = P.data
    if not np.all(np.isfinite(d)):
        raise PowerOverflowGuard("power overflowed before rescaling")
    try:
        big, _ = hmat.max_entry_norm(P)
    except ZeroMatrix as exc:
        raise PowerOverflowGuard("rescaled power underflowed to zero") from exc
    return P.scale(1.0 / big)


def _exact_sqrt(x: Fraction):
    num, den = x.numerator, x.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def normalized_power(gamma: HMatrix, m: int, cap: int = DEFAULT_POWER_CAP) -> HMatrix:
    """``gamma^m`` divided by its largest entry modulus.

    Exact input stays exact when the largest modulus is rational.  Float input is
    built one factor at a time with a rescale after every multiplication.
    """
    if abs(m) > cap:
        raise ValueError(f"|m| = {abs(m)} exceeds the power cap {cap}")
    if gamma.is_exact:
        P = hmat.matrix_power(gamma, m)
        norms2 = [Quaternion(*P.data[i, j]).norm2() for i in range(P.rows) for j in range(P.cols)]
        big2 = max(norms2)
        if big2 == 0:
            raise PowerOverflowGuard("power is the zero matrix")
        root = _exact_sqrt(Fraction(big2))
        if root is not None:
            return P.scale(Fraction(1) / root)
        gamma = gamma.to_float()
    step = gamma if m >= 0 else hmat.inverse(gamma)
    P = HMatrix.identity(gamma.rows)
    for _ in range(abs(m)):
        P = _rescale(P @ step)
    return _rescale(P)


def normalized_dyadic_power(gamma: HMatrix, j: int, backward: bool = False) -> HMatrix:
    """Normalized ``gamma^(+-2^j)`` by repeated squaring with rescaling."""
    P = gamma.to_float()
    if backward:
        P = hmat.inverse(P)
    P = _rescale(P)
    for _ in range(j):
        P = _rescale(P @ P)
    return P


# growth orders and limit kernels -------------------------------------------------


@dataclass(frozen=True)
class GrowthOrder:
    """Per-iteration growth ``exp(m * log_modulus) * m**poly_degree``."""

    log_modulus: float
    poly_degree: int

    def compare(self, other: "GrowthOrder", tol: float = DEFAULT_UNIT_TOL) -> int:
        """-1, 0, 1 in lexicographic order, with ``log_modulus`` equal within ``tol``."""
        d = self.log_modulus - other.log_modulus
        if abs(d) > tol:
            return 1 if d > 0 else -1
        return (self.poly_degree > other.poly_degree) - (self.poly_degree < other.poly_degree)


def _growth(J: JordanData, sign: int, tol: float) -> tuple[GrowthOrder, list[int]]:
    orders = [GrowthOrder(sign * math.log(abs(b.rep)), b.size - 1) for b in J.blocks]
    best = orders[0]
    for o in orders[1:]:
        if o.compare(best, tol) > 0:
            best = o
    achievers = [i for i, o in enumerate(orders) if o.compare(best, tol) == 0]
    return best, achievers


def forward_growth(J: JordanData, tol: float = DEFAULT_UNIT_TOL) -> tuple[GrowthOrder, list[int]]:
    """Maximal growth order of ``gamma^m`` and the (0-based) blocks attaining it."""
    return _growth(J, 1, tol)


def backward_growth(J: JordanData, tol: float = DEFAULT_UNIT_TOL) -> tuple[GrowthOrder, list[int]]:
    """Same for ``gamma^-m``: the inverse block at ``1/lam`` has the same size."""
    return _growth(J, -1, tol)


def limit_kernel(J: JordanData, direction: str | Direction = Direction.FORWARD,
                 unit_tol: float = DEFAULT_UNIT_TOL) -> ProjectiveSubspace:
    """Kernel of every limit of normalized powers, in Jordan coordinates.

    Empty for elliptic elements (normalized powers stay invertible).
    """
    direction = Direction(direction)
    n = J.size
    if classify(J, unit_tol) is DynamicalType.ELLIPTIC:
        return empty_subspace(n - 1)
    grow = forward_growth if direction is Direction.FORWARD else backward_growth
    _, achievers = grow(J, unit_tol)
    offsets = J.offsets
    dropped = {offsets[i] + J.blocks[i].size - 1 for i in achievers}
    return coordinate_subspace(n - 1, [i for i in range(n) if i not in dropped])


def analytic_limit(J: JordanData, direction: str | Direction = Direction.FORWARD,
                   unit_tol: float = DEFAULT_UNIT_TOL) -> np.ndarray:
    """Moduli pattern of a limit in Jordan coordinates: 1 at the corner of each maximal block."""
    direction = Direction(direction)
    n = J.size
    grow = forward_growth if direction is Direction.FORWARD else backward_growth
    _, achievers = grow(J, unit_tol)
    out = np.zeros((n, n))
    for i in achievers:
        s = J.offsets[i]
        out[s, s + J.blocks[i].size - 1] = 1.0
    return out


def block_power_entry(lam: complex, i: int, j: int, m: int) -> complex:
    """Entry (i, j) of ``J(lam, k)^m`` for 0-based ``i <= j``; ``m`` may be negative."""
    d = j - i
    if d < 0:
        return 0j
    if m >= 0:
        if d > m:
            return 0j
        return math.comb(m, d) * lam ** (m - d)
    p = -m
    return (-1) ** d * math.comb(p + d - 1, d) * lam ** (-p - d)


def kernel_in_jordan_coords(K: ProjectiveSubspace, J: JordanData) -> ProjectiveSubspace:
    """Transport a subspace given in original coordinates by ``S``."""
    return transform(K, J.S)

