"""Independent numerical checks of an equicontinuity region.

Two estimators that never look at the Jordan form:

* ``crushed_subspace`` squares the normalized generator over and over and
  collects the right-singular directions whose singular values collapse.
  Parabolic kernels converge only like ``1/m``, so the ladder runs to very
  large exponents ``m = 2**j``.
* ``equicontinuity_probe`` perturbs a point by at most ``eps`` and measures
  how far the orbits drift apart under normalized powers ``gamma^m``.  Besides
  random perturbations it tries, for every power, the perturbation that
  cancels the image of the point to first order (a single Newton step on
  ``|M x|^2``), plus a push along the top singular direction of ``M``.

``verify_region`` compares both against an :class:`EqRegionReport`.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from . import hmat
from .dynamics import DEFAULT_POWER_CAP, Direction
from .eqregion import EqRegionReport
from .errors import Unstable
from .hmat import HMatrix
from .projective import (
    ProjectivePoint,
    ProjectiveSubspace,
    empty_subspace,
    point_subspace_dist,
    psi,
    subspace_dist,
    subspace_from_complex,
    tau,
    transform,
)


class Verdict(str, enum.Enum):
    EQUICONTINUOUS = "Equicontinuous"
    NOT_EQUICONTINUOUS = "NotEquicontinuous"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ProbeConfig:
    max_power: int = DEFAULT_POWER_CAP
    eps_ladder: tuple[float, ...] = (1e-2, 1e-4, 1e-6)
    separation_threshold: float = 0.1
    samples_per_point: int = 8
    seed: int = 0
    # dyadic powers 2**j beyond max_power, used by the probe
    far_exponent: int = 26
    # squaring ladder for the crushed subspace
    ladder_exponent: int = 40
    crush_tol: float = 1e-8
    tail: int = 4
    subspace_tol: float = 1e-6
    probe_points: int = 3
    # off-complement probe points keep at least this projective distance
    min_clearance: float = 0.3

    def __post_init__(self):
        ladder = tuple(float(e) for e in self.eps_ladder)
        object.__setattr__(self, "eps_ladder", ladder)
        if not ladder or any(e <= 0 for e in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("eps_ladder must be strictly decreasing and positive")
        if not 0 < self.separation_threshold < 1:
            raise ValueError("separation_threshold must lie in (0, 1)")
        if self.max_power < 1 or self.samples_per_point < 1:
            raise ValueError("max_power and samples_per_point must be positive")
        if self.tail < 1 or self.tail > self.ladder_exponent + 1:
            raise ValueError("tail must fit inside the squaring ladder")

    def to_json(self) -> dict:
        out = asdict(self)
        out["eps_ladder"] = list(self.eps_ladder)
        return out


# crushed subspace ----------------------------------------------------------------


def _unit_scaled(F: np.ndarray) -> np.ndarray:
    big = np.max(np.abs(F))
    if not np.isfinite(big) or big == 0:
        raise Unstable("normalized power overflowed or vanished")
    return F / big


def crushed_subspace(gamma: HMatrix, direction: str | Direction = Direction.FORWARD,
                     cfg: ProbeConfig | None = None) -> ProjectiveSubspace:
    """Common kernel of the limits of ``gamma^(+-m)/|gamma^(+-m)|``, estimated numerically.

    Works on the complex embedding: the matrix is squared ``ladder_exponent``
    times with rescaling, and at each rung singular values below
    ``crush_tol`` times the largest are counted as crushed.  The count must be
    constant over the last ``tail`` rungs.
    """
    cfg = cfg or ProbeConfig()
    direction = Direction(direction)
    F = hmat.phi(gamma.to_float())
    if direction is Direction.BACKWARD:
        F = np.linalg.inv(F)
    F = _unit_scaled(F)
    dims = []
    vh = None
    crushed = 0
    for j in range(cfg.ladder_exponent + 1):
        if j:
            F = _unit_scaled(F @ F)
        _, s, vh = np.linalg.svd(F)
        crushed = int(np.count_nonzero(s < cfg.crush_tol * s[0]))
        dims.append(crushed // 2)
    tail = dims[-cfg.tail:]
    if len(set(tail)) != 1:
        raise Unstable(f"crushed dimension did not stabilize: {dims}", dims=tuple(dims))
    amb = gamma.rows - 1
    count = tail[-1]
    if count == 0:
        return empty_subspace(amb)
    return subspace_from_complex(vh[vh.shape[0] - 2 * count:].conj().T, amb)


# probes -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PowerStack:
    """Complex embeddings of the normalized powers used by the probe, both directions."""

    mats: np.ndarray  # (K, 2N, 2N)
    top: np.ndarray  # (K, 2N) most amplified right-singular direction of each


def power_stack(gamma: HMatrix, cfg: ProbeConfig) -> PowerStack:
    F = hmat.phi(gamma.to_float())
    mats = []
    for step in (F, np.linalg.inv(F)):
        step = _unit_scaled(step)
        P = np.eye(F.shape[0], dtype=complex)
        for _ in range(cfg.max_power):
            P = _unit_scaled(P @ step)
            mats.append(P)
        D = step
        for j in range(1, cfg.far_exponent + 1):
            D = _unit_scaled(D @ D)
            if 2**j > cfg.max_power:
                mats.append(D)
    stack = np.array(mats)
    _, _, vh = np.linalg.svd(stack)
    return PowerStack(stack, vh[:, 0, :].conj())


def _tau_rows(X: np.ndarray) -> np.ndarray:
    h = X.shape[-1] // 2
    return np.concatenate([X[..., h:].conj(), -X[..., :h].conj()], axis=-1)


def _dist_rows(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Projective distances between rows of complex images (broadcasting); nan where an image vanishes."""
    nx = np.linalg.norm(X, axis=-1, keepdims=True)
    ny = np.linalg.norm(Y, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        X = X / nx
        Y = Y / ny
        TX = _tau_rows(X)
        R = Y - X * np.sum(X.conj() * Y, axis=-1, keepdims=True) - TX * np.sum(TX.conj() * Y, axis=-1, keepdims=True)
        d = np.minimum(1.0, np.linalg.norm(R, axis=-1))
    bad = (nx[..., 0] <= 1e-300) | (ny[..., 0] <= 1e-300)
    return np.where(bad, np.nan, d)


def _perp(x: np.ndarray, V: np.ndarray) -> np.ndarray:
    tx = tau(x)
    return V - np.outer(V @ x.conj(), x) - np.outer(V @ tx.conj(), tx)


def _ball_samples(x: np.ndarray, eps: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random points within projective distance ``eps`` of the unit vector ``x`` (rows)."""
    h = x.shape[0] // 2
    W = np.array([psi(rng.normal(size=(h, 4))) for _ in range(count)])
    W = _perp(x, W)
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    angles = eps * rng.uniform(0.05, 1.0, size=count)
    return np.cos(angles)[:, None] * x[None, :] + np.sin(angles)[:, None] * W


def _adversarial(stack: PowerStack, x: np.ndarray, U: np.ndarray, eps: float) -> np.ndarray:
    """Two perturbations per power, shape (K, 2, 2N): a Newton step killing M x, and a push along the top direction."""
    M = stack.mats
    G = np.einsum("kji,kj->ki", M.conj(), U)
    ng2 = np.sum(np.abs(G) ** 2, axis=1)
    nu2 = np.sum(np.abs(U) ** 2, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        Z = -(nu2 / ng2)[:, None] * G
        nz = np.linalg.norm(Z, axis=1)
        t = np.where(nz > 0, np.minimum(1.0, eps / nz), 0.0)
        Q1 = x[None, :] + np.nan_to_num(t[:, None] * Z)
    V = _perp(x, stack.top)
    nv = np.linalg.norm(V, axis=1, keepdims=True)
    Q2 = x[None, :] + eps * np.where(nv > 1e-12, V / np.where(nv > 0, nv, 1.0), 0.0)
    return np.stack([Q1, Q2], axis=1)


@dataclass(frozen=True)
class ProbeResult:
    verdict: Verdict
    sups: tuple[float, ...]

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "sups": list(self.sups)}


def probe_separation(gamma: HMatrix, p, cfg: ProbeConfig | None = None, salt: int = 0,
                     stack: PowerStack | None = None) -> ProbeResult:
    """Sup of orbit separation for each eps in the ladder, and the resulting verdict."""
    cfg = cfg or ProbeConfig()
    if stack is None:
        stack = power_stack(gamma, cfg)
    point = p if isinstance(p, ProjectivePoint) else ProjectivePoint(p)
    x = psi(np.asarray(point.coords, dtype=float))
    x = x / np.linalg.norm(x)
    rng = np.random.default_rng([cfg.seed, salt])
    M = stack.mats
    U = M @ x
    sups = []
    for eps in cfg.eps_ladder:
        samples = _ball_samples(x, eps, cfg.samples_per_point, rng)
        img_s = np.einsum("kij,sj->ksi", M, samples)
        img_a = np.einsum("kij,kaj->kai", M, _adversarial(stack, x, U, eps))
        d = np.concatenate([_dist_rows(U[:, None, :], img_s), _dist_rows(U[:, None, :], img_a)], axis=1)
        sups.append(float(np.nanmax(d)) if np.any(np.isfinite(d)) else 0.0)
    if all(s > cfg.separation_threshold for s in sups):
        verdict = Verdict.NOT_EQUICONTINUOUS
    elif all(b <= a / 10 for a, b in zip(sups, sups[1:])) and sups[-1] < cfg.separation_threshold:
        verdict = Verdict.EQUICONTINUOUS
    else:
        verdict = Verdict.INCONCLUSIVE
    return ProbeResult(verdict, tuple(sups))


def equicontinuity_probe(gamma: HMatrix, p, cfg: ProbeConfig | None = None) -> Verdict:
    return probe_separation(gamma, p, cfg).verdict


# verification -------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float | None = None
    expected: str = ""
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "expected": self.expected, "detail": self.detail}


@dataclass(frozen=True)
class VerificationSummary:
    checks: tuple[Check, ...]
    seed: int
    config: ProbeConfig

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_kind(self, prefix: str) -> list[Check]:
        return [c for c in self.checks if c.name.startswith(prefix)]

    def to_json(self) -> dict:
        return {"passed": self.passed, "seed": self.seed, "config": self.config.to_json(),
                "checks": [c.to_json() for c in self.checks]}


def _subspace_check(name: str, found: ProjectiveSubspace, target: ProjectiveSubspace, tol: float) -> Check:
    if found.dim != target.dim:
        return Check(name, False, 1.0, f"< {tol}", {"found_dim": found.dim, "expected_dim": target.dim})
    d = subspace_dist(found, target)
    return Check(name, d < tol, d, f"< {tol}", {"dim": target.dim})


def _interior_point(W: ProjectiveSubspace, others, rng: np.random.Generator) -> np.ndarray:
    # random right-combination of the basis, kept away from the other subspaces when possible
    best, best_gap = None, -1.0
    for _ in range(16):
        coeffs = rng.normal(size=(W.count, 4))
        B = HMatrix(np.stack([np.asarray(v, dtype=float) for v in W.vectors()], axis=1))
        v = (B @ HMatrix(coeffs[:, None, :])).data[:, 0, :]
        if not np.any(v):
            continue
        gap = min((point_subspace_dist(v, U) for U in others), default=1.0)
        if gap > best_gap:
            best, best_gap = v, gap
        if gap > 0.3:
            break
    return best


def _off_point(complement, size: int, rng: np.random.Generator, clearance: float) -> np.ndarray:
    best, best_gap = None, -1.0
    for _ in range(200):
        v = rng.normal(size=(size, 4))
        gap = min((point_subspace_dist(v, W) for W in complement), default=1.0)
        if gap > best_gap:
            best, best_gap = v, gap
        if gap >= clearance:
            break
    return best


def verify_region(gamma: HMatrix, report: EqRegionReport, cfg: ProbeConfig | None = None) -> VerificationSummary:
    """Cross-check a region report against the crushed subspaces and orbit probes."""
    cfg = cfg or ProbeConfig()
    S = report.jordan.S.to_float()
    targets = [transform(W, S) for W in report.complement]
    checks: list[Check] = []
    if len(targets) == 1:
        for d in (Direction.FORWARD, Direction.BACKWARD):
            K = transform(crushed_subspace(gamma, d, cfg), S)
            checks.append(_subspace_check(f"subspace:{d.value}", K, targets[0], cfg.subspace_tol))
    elif len(targets) == 2:
        for d, target in zip((Direction.FORWARD, Direction.BACKWARD), targets):
            K = transform(crushed_subspace(gamma, d, cfg), S)
            checks.append(_subspace_check(f"subspace:{d.value}", K, target, cfg.subspace_tol))

    rng = np.random.default_rng(cfg.seed)
    stack = power_stack(gamma, cfg)
    complement = list(report.complement)
    salt = 1
    for idx, W in enumerate(complement):
        if W.is_empty:
            continue
        others = [U for k, U in enumerate(complement) if k != idx]
        x = _interior_point(W, others, rng)
        res = probe_separation(gamma, x, cfg, salt=salt, stack=stack)
        salt += 1
        checks.append(Check(f"probe:interior:{idx}", res.verdict is Verdict.NOT_EQUICONTINUOUS,
                            max(res.sups), Verdict.NOT_EQUICONTINUOUS.value, res.to_json()))
    n_off = max(cfg.probe_points, 5 if not complement else cfg.probe_points)
    for k in range(n_off):
        x = _off_point(complement, gamma.rows, rng, cfg.min_clearance)
        res = probe_separation(gamma, x, cfg, salt=salt, stack=stack)
        salt += 1
        clearance = min((point_subspace_dist(x, W) for W in complement), default=1.0)
        detail = res.to_json()
        detail["clearance"] = clearance
        checks.append(Check(f"probe:off:{k}", res.verdict is Verdict.EQUICONTINUOUS,
                            max(res.sups), Verdict.EQUICONTINUOUS.value, detail))
    return VerificationSummary(tuple(checks), cfg.seed, cfg)
