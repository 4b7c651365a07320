"""Points and subspaces of quaternionic projective space.

Vectors of H^N are arrays of shape ``(N, 4)``.  Right-H-linear algebra is done
on their complex images ``psi(v) = [v1; -conj(v2)]`` (``v = v1 + v2 j``),
which satisfy ``phi(A) psi(v) = psi(A v)`` and ``psi(v z) = z psi(v)`` for
complex ``z``.  Right multiplication by ``j`` becomes the antiunitary map
``tau``, so the complex image of a quaternionic subspace is a ``tau``-invariant
subspace of twice the dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import hmat
from .errors import DimensionMismatch, ParseError
from .hmat import HMatrix
from .quat import Quaternion

#: Default cutoff for subspace equality and membership.
DEFAULT_SUBSPACE_TOL = 1e-8
_INDEPENDENCE_TOL = 1e-9


def psi(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    v1 = v[:, 0] + 1j * v[:, 1]
    v2 = v[:, 2] + 1j * v[:, 3]
    return np.concatenate([v1, -v2.conj()])


def psi_inv(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    n = x.shape[0] // 2
    v1 = x[:n]
    v2 = -x[n:].conj()
    return np.stack([v1.real, v1.imag, v2.real, v2.imag], axis=-1)


def tau(x) -> np.ndarray:
    """Complex image of right multiplication by j."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0] // 2
    return np.concatenate([x[n:].conj(), -x[:n].conj()])


def _as_vector(v) -> np.ndarray:
    if isinstance(v, ProjectivePoint):
        return v.coords
    arr = np.asarray(v)
    if arr.ndim == 1:
        # plain real/complex coordinates
        arr = np.asarray([Quaternion.coerce(x).components for x in arr], dtype=object if _all_exact(arr) else float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"quaternionic vector must have shape (N, 4), got {arr.shape}")
    return arr


def _all_exact(values) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in np.asarray(values, dtype=object).flat)


def _is_exact(v: np.ndarray) -> bool:
    return v.dtype == object


def _vector_json(v: np.ndarray) -> list:
    return [Quaternion(*v[i]).to_json() for i in range(v.shape[0])]


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """The line ``[x] = {x * a : a in H^x}``; ``coords`` is any nonzero lift."""

    coords: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.coords)
        if _is_exact(v):
            if all(x == 0 for x in v.flat):
                raise ValueError("projective point needs a nonzero lift")
        elif not np.any(v):
            raise ValueError("projective point needs a nonzero lift")
        object.__setattr__(self, "coords", v)

    @classmethod
    def basis(cls, i: int, size: int) -> "ProjectivePoint":
        v = np.zeros((size, 4))
        v[i, 0] = 1.0
        return cls(v)

    @classmethod
    def from_quaternions(cls, entries) -> "ProjectivePoint":
        qs = [Quaternion.coerce(x) for x in entries]
        exact = all(q.is_exact for q in qs)
        return cls(np.array([q.components for q in qs], dtype=object if exact else float))

    @property
    def size(self) -> int:
        return self.coords.shape[0]

    def right_scale(self, a) -> "ProjectivePoint":
        col = HMatrix(self.coords[:, None, :]).rmul(a)
        return ProjectivePoint(col.data[:, 0, :])

    def apply(self, M: HMatrix) -> "ProjectivePoint":
        return ProjectivePoint((M @ HMatrix(self.coords[:, None, :])).data[:, 0, :])


@dataclass(frozen=True, eq=False)
class ProjectiveSubspace:
    """Projectivization of a right-H-linear subspace of H^(ambient+1).

    ``basis`` has shape ``(k, ambient + 1, 4)``; ``k == 0`` is the empty subspace.
    """

    ambient: int
    basis: np.ndarray = field(default=None)

    def __post_init__(self):
        size = self.ambient + 1
        b = self.basis
        if b is None or (isinstance(b, (list, tuple)) and len(b) == 0):
            b = np.zeros((0, size, 4))
        elif isinstance(b, np.ndarray) and b.ndim == 3:
            pass
        else:
            vecs = [_as_vector(v) for v in b]
            exact = all(_is_exact(v) for v in vecs)
            b = np.array(vecs, dtype=object if exact else float)
        if b.ndim != 3 or b.shape[1:] != (size, 4):
            raise DimensionMismatch(f"basis shape {b.shape} does not fit ambient P^{self.ambient}")
        object.__setattr__(self, "basis", b)

    @property
    def count(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        """Projective dimension (``-1`` for the empty subspace)."""
        return self.count - 1

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    @property
    def is_exact(self) -> bool:
        return self.basis.dtype == object

    def vectors(self) -> list[np.ndarray]:
        return [self.basis[i] for i in range(self.count)]

    def frame(self) -> np.ndarray:
        """Orthonormal basis (columns) of the complex image, shape ``(2N, 2k)``."""
        return _frame([psi(v) for v in self.vectors()], 2 * (self.ambient + 1))

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "basis": [_vector_json(v) for v in self.vectors()]}

    @classmethod
    def from_json(cls, obj) -> "ProjectiveSubspace":
        if not isinstance(obj, dict) or "ambient" not in obj or "basis" not in obj:
            raise ParseError("subspace must have 'ambient' and 'basis'")
        n = obj["ambient"]
        vecs = []
        for v in obj["basis"]:
            if not isinstance(v, list) or len(v) != n + 1:
                raise ParseError("basis vector has the wrong length")
            vecs.append([Quaternion.from_json(x) for x in v])
        if not vecs:
            return cls(n)
        exact = all(q.is_exact for v in vecs for q in v)
        arr = np.array([[q.components for q in v] for v in vecs], dtype=object if exact else float)
        return cls(n, arr)


def _frame(columns, rows: int) -> np.ndarray:
    """Orthonormal columns spanning ``{x, tau(x)}`` for the given complex vectors."""
    Q = np.zeros((rows, 0), dtype=complex)
    for x in columns:
        r = x - Q @ (Q.conj().T @ x)
        r = r - Q @ (Q.conj().T @ r)
        nr = np.linalg.norm(r)
        if nr == 0:
            continue
        r = r / nr
        Q = np.column_stack([Q, r, tau(r)])
    return Q


def canonical_vector(v: np.ndarray) -> np.ndarray:
    """Right-rescale so the first nonzero coordinate is real positive.

    Float vectors are also scaled to unit length; exact vectors get their first
    nonzero coordinate set to 1 (no square roots needed).
    """
    if _is_exact(v):
        first = next(i for i in range(v.shape[0]) if any(c != 0 for c in v[i]))
        q = Quaternion(*v[first])
        col = HMatrix(v[:, None, :]).rmul(q.inverse())
        return col.data[:, 0, :]
    v = np.asarray(v, dtype=float)
    norms = np.sqrt(np.sum(v * v, axis=1))
    first = int(np.argmax(norms > 1e-14 * norms.max()))
    q = Quaternion(*v[first])
    a = q.conj() * (1.0 / (np.linalg.norm(v) * abs(q)))
    out = HMatrix(v[:, None, :]).rmul(a).data[:, 0, :].copy()
    out[first, 1:] = 0.0
    out[out == 0] = 0.0
    return out


def coordinate_subspace(ambient: int, indices) -> ProjectiveSubspace:
    """L{e_i : i in indices} with exact 0/1 coordinates (0-based indices)."""
    size = ambient + 1
    idx = sorted(set(int(i) for i in indices))
    if any(i < 0 or i >= size for i in idx):
        raise ValueError(f"coordinate index out of range for P^{ambient}")
    arr = np.empty((len(idx), size, 4), dtype=object)
    arr[...] = 0
    for r, i in enumerate(idx):
        arr[r, i, 0] = 1
    return ProjectiveSubspace(ambient, arr)


def empty_subspace(ambient: int) -> ProjectiveSubspace:
    return ProjectiveSubspace(ambient)


# metric -------------------------------------------------------------


def _line_residual(x: np.ndarray, y: np.ndarray) -> float:
    # component of unit y orthogonal to the complex 2-plane {x, tau x}
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    tx = tau(x)
    r = y - x * (x.conj() @ y) - tx * (tx.conj() @ y)
    return float(np.linalg.norm(r))


def point_dist(p, q) -> float:
    """sqrt(1 - |<x,y>|^2 / (|x|^2 |y|^2)) with <x,y> = sum conj(x_i) y_i."""
    x = _as_vector(p)
    y = _as_vector(q)
    if x.shape != y.shape:
        raise DimensionMismatch(f"points live in different spaces: {x.shape[0]} vs {y.shape[0]} coordinates")
    return min(1.0, _line_residual(psi(x), psi(y)))


def quaternion_inner(x, y) -> Quaternion:
    """<x, y> = sum_i conj(x_i) y_i."""
    X = HMatrix(_as_vector(x)[:, None, :])
    Y = HMatrix(_as_vector(y)[:, None, :])
    return (X.conj_transpose() @ Y)[0, 0]


# spans and membership -------------------------------------------------


def _exact_rank_of(vectors) -> int:
    if not vectors:
        return 0
    M = HMatrix(np.stack(vectors, axis=1))
    return hmat.rank(M)


def span(points) -> ProjectiveSubspace:
    """Smallest subspace containing the points (greedy column-rank reduction)."""
    vecs = [_as_vector(p) for p in points]
    if not vecs:
        raise ValueError("span of an empty list")
    size = vecs[0].shape[0]
    if any(v.shape[0] != size for v in vecs):
        raise DimensionMismatch("points live in different spaces")
    chosen = []
    if all(_is_exact(v) for v in vecs):
        for v in vecs:
            if all(c == 0 for c in v.flat):
                continue
            if _exact_rank_of(chosen + [v]) > len(chosen):
                chosen.append(v)
        return ProjectiveSubspace(size - 1, np.array([canonical_vector(v) for v in chosen], dtype=object)
                                  if chosen else None)
    Q = np.zeros((2 * size, 0), dtype=complex)
    for v in vecs:
        x = psi(v)
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        r = x - Q @ (Q.conj().T @ x)
        r = r - Q @ (Q.conj().T @ r)
        if np.linalg.norm(r) > _INDEPENDENCE_TOL * nx:
            chosen.append(np.asarray(v, dtype=float))
            r = r / np.linalg.norm(r)
            Q = np.column_stack([Q, r, tau(r)])
    if not chosen:
        return ProjectiveSubspace(size - 1)
    return ProjectiveSubspace(size - 1, np.array([canonical_vector(v) for v in chosen]))


def subspace_from_complex(X: np.ndarray, ambient: int) -> ProjectiveSubspace:
    """Quaternionic subspace whose complex image is the (tau-invariant) column span of X."""
    X = np.asarray(X, dtype=complex)
    if X.shape[1] == 0:
        return ProjectiveSubspace(ambient)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    U = U[:, s > _INDEPENDENCE_TOL * max(s[0], 1e-300)]
    picked = []
    Q = np.zeros((X.shape[0], 0), dtype=complex)
    while Q.shape[1] < U.shape[1] - 1:
        R = U - Q @ (Q.conj().T @ U)
        k = int(np.argmax(np.linalg.norm(R, axis=0)))
        r = R[:, k] / np.linalg.norm(R[:, k])
        picked.append(psi_inv(U[:, k]))
        Q = np.column_stack([Q, r, tau(r)])
    if not picked:
        return ProjectiveSubspace(ambient)
    return ProjectiveSubspace(ambient, np.array([canonical_vector(v) for v in picked]))


def point_subspace_dist(p, W: ProjectiveSubspace) -> float:
    """Sine of the angle between the line of p and the subspace W (1 for empty W)."""
    x = psi(_as_vector(p))
    if W.is_empty:
        return 1.0
    Q = W.frame()
    x = x / np.linalg.norm(x)
    r = x - Q @ (Q.conj().T @ x)
    return float(min(1.0, np.linalg.norm(r)))


def contains(W: ProjectiveSubspace, p, tol: float = DEFAULT_SUBSPACE_TOL) -> bool:
    v = _as_vector(p)
    if v.shape[0] != W.ambient + 1:
        raise DimensionMismatch("point and subspace live in different spaces")
    if W.is_empty:
        return False
    if W.is_exact and _is_exact(v):
        return _exact_rank_of(W.vectors() + [v]) == W.count
    return point_subspace_dist(v, W) < tol


def subspace_dist(V: ProjectiveSubspace, W: ProjectiveSubspace) -> float:
    """Sine of the largest principal angle between equal-dimensional subspaces."""
    if V.ambient != W.ambient:
        raise DimensionMismatch(f"subspaces of P^{V.ambient} and P^{W.ambient}")
    if V.dim != W.dim:
        raise DimensionMismatch(f"subspace dimensions differ: {V.dim} vs {W.dim}")
    if V.is_empty:
        return 0.0
    if V.is_exact and W.is_exact:
        if _exact_rank_of(V.vectors() + W.vectors()) == V.count:
            return 0.0
    Qv = V.frame()
    Qw = W.frame()
    R = Qv - Qw @ (Qw.conj().T @ Qv)
    return float(min(1.0, np.linalg.norm(R, 2)))


def same_subspace(V: ProjectiveSubspace, W: ProjectiveSubspace, tol: float = DEFAULT_SUBSPACE_TOL) -> bool:
    if V.ambient != W.ambient or V.dim != W.dim:
        return False
    return subspace_dist(V, W) < tol


def transform(W: ProjectiveSubspace, M: HMatrix) -> ProjectiveSubspace:
    """Image of W under an invertible matrix M."""
    if M.rows != W.ambient + 1 or M.cols != W.ambient + 1:
        raise DimensionMismatch("matrix does not act on this projective space")
    if W.is_empty:
        return W
    B = HMatrix(np.stack(W.vectors(), axis=1))
    if B.is_exact != M.is_exact:
        B = B.to_float()
        M = M.to_float()
    images = M @ B
    return span([images.column(j) for j in range(images.cols)])
