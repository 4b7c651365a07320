"""Right-eigenvalue classes and the quaternionic Jordan decomposition.

Every quaternionic matrix ``A`` is similar to a direct sum of Jordan blocks
``J(lam, m)`` with ``lam`` complex, ``Im lam >= 0``.  The numerical route works
on the complex embedding ``F = phi(A)``: its spectrum is closed under
conjugation, a class ``lam`` with ``Im lam > 0`` shows up once at ``lam`` and
once at ``conj(lam)``, and a real class shows up with doubled block structure.

Clusters of eigenvalues of ``F`` are found by single-linkage agglomeration:
we walk the merge levels upward and accept the first partition whose clusters
all have a moderate spectral projector (a split defective eigenvalue has a
huge one).  Each cluster is then moved to the top of the Schur form, and the
rank sequence of ``T11 - c I`` gives the block sizes and Jordan chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import lapack, schur

from . import hmat
from .errors import IllConditioned, NonSquare, ParseError, UnknownEigenvalue
from .hmat import HMatrix
from .projective import psi_inv, tau
from .quat import Quaternion, canonical_rep, similarity_to_rep

#: Default tolerance for eigenvalue clustering and rank decisions.
DEFAULT_TOL = 1e-8
# ratio between the rank cutoff and the band where a decision counts as ambiguous
_AMBIGUITY_FACTOR = 100.0


@dataclass(frozen=True)
class EigenClass:
    """Similarity class of right eigenvalues, represented by ``rep`` with ``Im rep >= 0``."""

    rep: complex
    multiplicity: int

    @property
    def is_real(self) -> bool:
        return self.rep.imag == 0


@dataclass(frozen=True)
class JordanBlock:
    rep: complex
    size: int

    @property
    def modulus(self) -> float:
        return abs(self.rep)

    def sort_key(self) -> tuple:
        return (abs(self.rep), self.size, self.rep.imag)

    def to_json(self) -> dict:
        return {"re": float(self.rep.real), "im": float(self.rep.imag) + 0.0, "size": self.size}


@dataclass(frozen=True, eq=False)
class JordanData:
    """Blocks plus ``S`` with ``S A S^-1 = J(rep_1, size_1) + ... + J(rep_p, size_p)``."""

    blocks: tuple[JordanBlock, ...]
    S: HMatrix
    S_inv: HMatrix = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.S_inv is None:
            object.__setattr__(self, "S_inv", hmat.inverse(self.S))

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def offsets(self) -> list[int]:
        """0-based index of the first Jordan basis vector of each block."""
        out, acc = [], 0
        for b in self.blocks:
            out.append(acc)
            acc += b.size
        return out

    def jordan_matrix(self, exact: bool | None = None) -> HMatrix:
        return hmat.direct_sum(*(hmat.jordan_block(_rep_scalar(b.rep), b.size, exact=exact) for b in self.blocks))

    def reconstruction_error(self, A: HMatrix) -> float:
        """Max-abs entry of ``S A S^-1 - J`` (float)."""
        lhs = self.S.to_float() @ A.to_float() @ self.S_inv.to_float()
        return hmat.max_abs_diff(lhs, self.jordan_matrix(exact=False))

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks], "S": self.S.to_json()}

    @classmethod
    def from_json(cls, obj) -> "JordanData":
        try:
            blocks = [JordanBlock(complex(b["re"], b["im"]), int(b["size"])) for b in obj["blocks"]]
            S = HMatrix.from_json(obj["S"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad Jordan data: {exc}") from exc
        return cls(blocks, S)


def _rep_scalar(rep: complex):
    # keep exact-looking reps exact so Jordan matrices stay rational where possible
    if rep.imag == 0 and float(rep.real).is_integer():
        return int(rep.real)
    return rep


def _as_float_square(A: HMatrix) -> np.ndarray:
    if not A.is_square:
        raise NonSquare(f"expected a square matrix, got {A.rows}x{A.cols}")
    return hmat.phi(A)


# clustering ---------------------------------------------------------------


@dataclass
class _Cluster:
    members: tuple[int, ...]
    center: complex
    spread: float


def _make_cluster(ev: np.ndarray, members) -> _Cluster:
    members = tuple(sorted(members))
    vals = ev[list(members)]
    c = complex(np.mean(vals))
    return _Cluster(members, c, float(np.max(np.abs(vals - c))))


def _trsen(T: np.ndarray, Z: np.ndarray, members, job: str, wantq: int):
    select = np.zeros(T.shape[0], dtype=np.int32)
    select[list(members)] = 1
    n = T.shape[0]
    return lapack.ztrsen(select, T, Z, job=job, wantq=wantq, lwork=max(1, n * n))


def _projector_norm(T: np.ndarray, Z: np.ndarray, members) -> float:
    if len(members) == T.shape[0]:
        return 1.0
    *_, s, _sep, info = _trsen(T, Z, members, "E", 0)
    if info != 0 or s <= 0:
        return math.inf
    return 1.0 / s


def _pairing_ok(clusters: list[_Cluster], tol: float) -> bool:
    for c in clusters:
        slack = c.spread + tol * (1 + abs(c.center))
        if abs(c.center.imag) <= slack:
            if len(c.members) % 2:
                return False
            continue
        partner = [d for d in clusters if d is not c and abs(d.center - c.center.conjugate()) <= slack + d.spread]
        if len(partner) != 1 or len(partner[0].members) != len(c.members):
            return False
    return True


def _partitions(ev: np.ndarray, tol: float):
    """Single-linkage partitions of ``ev`` in order of increasing merge level."""
    n = ev.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            d = abs(ev[a] - ev[b])
            scale = 1 + max(abs(ev[a]), abs(ev[b]))
            edges.append((d / scale, a, b))
    edges.sort()
    k = 0
    # always merge what is within tol
    while k < len(edges) and edges[k][0] <= tol:
        _, a, b = edges[k]
        parent[find(a)] = find(b)
        k += 1

    def snapshot():
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return [_make_cluster(ev, g) for g in groups.values()]

    yield snapshot()
    while k < len(edges):
        level = edges[k][0]
        merged = False
        while k < len(edges) and edges[k][0] <= level:
            _, a, b = edges[k]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                merged = True
            k += 1
        if merged:
            yield snapshot()


@dataclass
class _Spectrum:
    F: np.ndarray
    T: np.ndarray
    Z: np.ndarray
    clusters: list[_Cluster]
    tol: float


def _spectrum(A: HMatrix, tol: float) -> _Spectrum:
    F = _as_float_square(A)
    T, Z = schur(F, output="complex")
    ev = np.diag(T).copy()
    bound = 1.0 / math.sqrt(tol)
    cache: dict[tuple, float] = {}
    for clusters in _partitions(ev, tol):
        if not _pairing_ok(clusters, tol):
            continue
        ok = True
        for c in clusters:
            if c.members not in cache:
                cache[c.members] = _projector_norm(T, Z, c.members)
            if cache[c.members] > bound:
                ok = False
                break
        if ok:
            return _Spectrum(F, T, Z, clusters, tol)
    raise IllConditioned("no consistent eigenvalue clustering found")


def _upper_clusters(sp: _Spectrum) -> list[tuple[_Cluster, complex, bool]]:
    """Clusters representing classes (Im >= 0) with their representative and realness."""
    out = []
    for c in sp.clusters:
        slack = c.spread + sp.tol * (1 + abs(c.center))
        if abs(c.center.imag) <= slack:
            out.append((c, complex(c.center.real, 0.0), True))
        elif c.center.imag > 0:
            out.append((c, c.center, False))
    return out


def right_eigenvalues(A: HMatrix, tol: float = DEFAULT_TOL) -> list[EigenClass]:
    """Eigenvalue classes of ``A`` sorted by (modulus, imaginary part)."""
    sp = _spectrum(A, tol)
    classes = []
    for c, rep, real in _upper_clusters(sp):
        mult = len(c.members) // 2 if real else len(c.members)
        classes.append(EigenClass(rep, mult))
    return sorted(classes, key=lambda e: (abs(e.rep), e.rep.imag))


# rank sequence and chains ---------------------------------------------------


def _rank_sequence(G: np.ndarray, tau_cut: float) -> list[int]:
    """r_0 = size, r_t = rank(G^t) until 0; raises on ambiguous singular values."""
    s_dim = G.shape[0]
    ranks = [s_dim]
    P = np.eye(s_dim, dtype=complex)
    for _t in range(1, s_dim + 1):
        P = P @ G
        sv = np.linalg.svd(P, compute_uv=False)
        lo, hi = tau_cut / _AMBIGUITY_FACTOR, tau_cut * _AMBIGUITY_FACTOR
        bad = sv[(sv > lo) & (sv < hi)]
        if bad.size:
            raise IllConditioned(
                f"ambiguous rank decision: singular value {bad[0]:.3e} within the band ({lo:.1e}, {hi:.1e})",
                gap=float(bad[0] / tau_cut),
            )
        r = int(np.count_nonzero(sv >= hi))
        ranks.append(r)
        if r == 0:
            return ranks
    raise IllConditioned("cluster is not nilpotent after shifting by its center", gap=None)


def _block_counts(ranks: list[int]) -> dict[int, int]:
    """Number of blocks of each exact size from a rank sequence."""
    r = ranks + [0]
    at_least = [r[t - 1] - r[t] for t in range(1, len(r))]
    counts = {}
    for t in range(1, len(at_least) + 1):
        exact = at_least[t - 1] - (at_least[t] if t < len(at_least) else 0)
        if exact < 0:
            raise IllConditioned("inconsistent rank sequence")
        if exact:
            counts[t] = exact
    return counts


def _null_basis(M: np.ndarray, cut: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(M)
    r = int(np.count_nonzero(s >= cut))
    return vh[r:].conj().T


def _orth_complement_pick(K: np.ndarray, Z: np.ndarray, count: int) -> list[np.ndarray]:
    """Up to ``count`` orthonormal vectors of span(K) orthogonal to span(Z)."""
    R = K
    if Z.shape[1]:
        Uz, sz, _ = np.linalg.svd(Z, full_matrices=False)
        Qz = Uz[:, sz > 1e-8 * max(sz[0], 1e-300)]
        R = K - Qz @ (Qz.conj().T @ K)
    U, s, _ = np.linalg.svd(R, full_matrices=False)
    good = int(np.count_nonzero(s > 1e-6))
    return [U[:, i] for i in range(min(count, good))]


def _cluster_chains(sp: _Spectrum, cluster: _Cluster, rep: complex, real: bool):
    """Jordan chains (columns of phi-space vectors) for one class; returns list of (size, [x1..xk])."""
    ts, qs, *_rest, info = _trsen(sp.T, sp.Z, cluster.members, "N", 1)
    if info != 0:
        raise IllConditioned("Schur reordering failed")
    s_dim = len(cluster.members)
    Q1 = qs[:, :s_dim]
    center = rep if not real else complex(cluster.center.real, 0.0)
    G = ts[:s_dim, :s_dim] - center * np.eye(s_dim)
    tau_cut = sp.tol * max(1.0, float(np.linalg.norm(sp.F, 2)))
    ranks = _rank_sequence(G, tau_cut)
    counts = _block_counts(ranks)
    if real and any(v % 2 for v in counts.values()):
        raise IllConditioned("real eigenvalue with unpaired Jordan chains")
    # tau in Q1 coordinates: y -> W conj(y)
    W = Q1.conj().T @ np.column_stack([tau(Q1[:, i]) for i in range(s_dim)])

    def tau_y(y):
        return W @ y.conj()

    powers = [np.eye(s_dim, dtype=complex)]
    for _ in range(max(counts)):
        powers.append(powers[-1] @ G)
    hi = tau_cut * _AMBIGUITY_FACTOR
    chains = []
    chosen_tops: list[tuple[int, np.ndarray]] = []
    for t in sorted(counts, reverse=True):
        need = counts[t] // 2 if real else counts[t]
        K = _null_basis(powers[t], hi)
        Zcols = [_null_basis(powers[t - 1], hi)] if t > 1 else []
        for size, y in chosen_tops:
            for d in range(size - t, size):
                Zcols.append((powers[d] @ y)[:, None])
        for _ in range(need):
            Z = np.column_stack(Zcols) if Zcols else np.zeros((s_dim, 0), dtype=complex)
            pick = _orth_complement_pick(K, Z, 1)
            if not pick:
                raise IllConditioned("could not complete a Jordan chain basis")
            y = pick[0]
            new_tops = [y, tau_y(y)] if real else [y]
            for yy in new_tops:
                chosen_tops.append((t, yy))
                for d in range(0, t):
                    Zcols.append((powers[d] @ yy)[:, None])
            chain = [Q1 @ (powers[t - 1 - i] @ y) for i in range(t)]
            chains.append((t, chain))
    return center, chains, ranks


def block_structure(A: HMatrix, cls, tol: float = DEFAULT_TOL) -> list[int]:
    """Block sizes (descending) of the class ``cls`` (an EigenClass or a complex number)."""
    rep = cls.rep if isinstance(cls, EigenClass) else complex(cls)
    sp = _spectrum(A, tol)
    for c, r, real in _upper_clusters(sp):
        if abs(r - rep) <= c.spread + tol * (1 + abs(r)) + 10 * tol:
            _, chains, _ = _cluster_chains(sp, c, r, real)
            return sorted((size for size, _ in chains), reverse=True)
    raise UnknownEigenvalue(f"{rep} is not a right eigenvalue class within tol {tol}")


def jordan_decomposition(A: HMatrix, tol: float = DEFAULT_TOL) -> JordanData:
    """Numerical Jordan form of an invertible quaternionic matrix."""
    sp = _spectrum(A, tol)
    n = A.rows
    found = []
    for c, rep, real in _upper_clusters(sp):
        center, chains, _ = _cluster_chains(sp, c, rep, real)
        for size, chain in chains:
            found.append((JordanBlock(center, size), chain))
    if sum(b.size for b, _ in found) != n:
        raise IllConditioned("Jordan blocks do not fill the space")
    found.sort(key=lambda item: item[0].sort_key())
    cols = []
    for block, chain in found:
        vecs = [psi_inv(x) for x in chain]
        if block.rep.imag == 0:
            # any unit scalar commutes with a real eigenvalue: make the largest eigenvector entry real positive
            k = int(np.argmax(np.sum(vecs[0] ** 2, axis=1)))
            q = Quaternion(*vecs[0][k])
            mu = q.conj() * (1.0 / abs(q))
            vecs = [HMatrix(v[:, None, :]).rmul(mu).data[:, 0, :] for v in vecs]
        cols.extend(vecs)
    S_inv = HMatrix(np.stack(cols, axis=1))
    try:
        S = hmat.inverse(S_inv, tol=1e-13)
    except Exception as exc:
        raise IllConditioned(f"Jordan basis is numerically singular: {exc}") from exc
    return JordanData(tuple(b for b, _ in found), S, S_inv)


def is_semisimple(A: HMatrix, tol: float = DEFAULT_TOL) -> bool:
    sp = _spectrum(A, tol)
    tau_cut = tol * max(1.0, float(np.linalg.norm(sp.F, 2)))
    for c, rep, real in _upper_clusters(sp):
        ts, *_ = _trsen(sp.T, sp.Z, c.members, "N", 0)
        s_dim = len(c.members)
        G = ts[:s_dim, :s_dim] - rep * np.eye(s_dim)
        if len(_rank_sequence(G, tau_cut)) > 2:
            return False
    return True


# structural (assume-jordan) path ------------------------------------------------


def _qzero(q: Quaternion) -> bool:
    return all(c == 0 for c in q.components)


def _commutes(p: Quaternion, q: Quaternion) -> bool:
    d = p * q - q * p
    if d.is_exact:
        return _qzero(d)
    return all(abs(c) <= 1e-12 * (1 + abs(p) * abs(q)) for c in d.components)


def _canonical_mu(q: Quaternion):
    """Unit ``mu`` with ``mu^-1 q mu`` canonical; exact when possible."""
    rep = canonical_rep(q)
    if q.a2 == 0 and q.a3 == 0:
        if q.a1 >= 0:
            return Quaternion(1, 0, 0, 0) if q.is_exact else Quaternion(1.0, 0.0, 0.0, 0.0), rep
        # conj by j flips the sign of i
        return Quaternion(0, 0, 1, 0) if q.is_exact else Quaternion(0.0, 0.0, 1.0, 0.0), rep
    return similarity_to_rep(q), rep


def jordan_from_structure(A: HMatrix) -> JordanData:
    """Read off Jordan data from a matrix that is already an upper-bidiagonal block sum.

    Each block has a constant diagonal ``q`` and nonzero superdiagonal entries
    commuting with ``q``; everything else must vanish.  ``S`` is a permutation
    (to the sorted block order) times a diagonal rescaling.
    """
    if not A.is_square:
        raise NonSquare(f"expected a square matrix, got {A.rows}x{A.cols}")
    n = A.rows
    E = A.entries()
    for i in range(n):
        for j in range(n):
            if j != i and j != i + 1 and not _qzero(E[i][j]):
                raise ParseError(f"entry ({i}, {j}) breaks the Jordan block structure")
    raw = []  # (start, size, q)
    start = 0
    for i in range(n):
        last = i == n - 1 or _qzero(E[i][i + 1])
        if not last:
            same = E[i + 1][i + 1] - E[i][i]
            if not (same.is_exact and _qzero(same)) and not all(abs(c) <= 1e-14 for c in same.components):
                raise ParseError(f"diagonal changes inside a block at row {i}")
            if not _commutes(E[i][i + 1], E[i][i]):
                raise ParseError(f"superdiagonal entry at row {i} does not commute with the eigenvalue")
        if last:
            raw.append((start, i + 1 - start, E[start][start]))
            start = i + 1
    if any(_qzero(q) for _, _, q in raw):
        raise ParseError("zero eigenvalue: matrix is singular")
    exact = A.is_exact
    d = [None] * n
    blocks = []
    for s0, size, q in raw:
        mu, rep = _canonical_mu(q)
        d[s0] = mu
        for i in range(s0, s0 + size - 1):
            d[i + 1] = E[i][i + 1].inverse() * d[i]
        if q.is_exact and q.a2 == 0 and q.a3 == 0 and q.a1 == 0:
            rep_val = complex(float(q.a0), 0.0)
        else:
            rep_val = rep
        blocks.append((JordanBlock(rep_val, size), s0))
    order = sorted(range(len(blocks)), key=lambda k: blocks[k][0].sort_key())
    exact = exact and all(x.is_exact for x in d)
    # S^-1 columns: new basis vector i = e_{old} * d_old
    cols = np.zeros((n, n, 4), dtype=object if exact else float)
    if exact:
        cols[...] = 0
    new = 0
    for k in order:
        block, s0 = blocks[k]
        for i in range(s0, s0 + block.size):
            comp = d[i].components
            cols[i, new] = comp if exact else [float(c) for c in comp]
            new += 1
    S_inv = HMatrix(cols)
    S = hmat.inverse(S_inv)
    return JordanData(tuple(blocks[k][0] for k in order), S, S_inv)
