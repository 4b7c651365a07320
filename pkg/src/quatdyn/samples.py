"""Random and structured test inputs: quaternions, unitaries, Jordan lifts."""

from __future__ import annotations

import cmath
from collections.abc import Iterator, Sequence

import numpy as np

from . import hmat
from .hmat import HMatrix
from .projective import psi, psi_inv, tau
from .quat import Quaternion

#: Irrational rotation surrogate used in phase sweeps.
GOLDEN_PHASE = 0.6180339887


def random_quaternion(rng: np.random.Generator) -> Quaternion:
    return Quaternion(*rng.normal(size=4))


def random_hmatrix(rows: int, cols: int | None, rng: np.random.Generator) -> HMatrix:
    cols = rows if cols is None else cols
    return HMatrix(rng.normal(size=(rows, cols, 4)))


def random_vector(size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(size, 4))


def random_unitary(n: int, rng: np.random.Generator) -> HMatrix:
    """Quaternionic unitary (U* U = I) by Gram-Schmidt over H, done on complex images."""
    basis = []
    cols = []
    while len(cols) < n:
        x = psi(rng.normal(size=(n, 4)))
        for b in basis:
            x = x - b * (b.conj() @ x)
        nx = np.linalg.norm(x)
        if nx < 1e-8:
            continue
        x = x / nx
        basis.extend([x, tau(x)])
        cols.append(psi_inv(x))
    return HMatrix(np.stack(cols, axis=1))


def random_conditioned(n: int, kappa: float, rng: np.random.Generator) -> HMatrix:
    """U diag(s) V with singular values in [1, kappa], so cond <= kappa."""
    s = np.exp(rng.uniform(0.0, np.log(kappa), size=n))
    s[0], s[-1] = 1.0, kappa
    rng.shuffle(s)
    return random_unitary(n, rng) @ HMatrix.diag(list(s)) @ random_unitary(n, rng)


def phase(theta: float) -> complex:
    return cmath.exp(2j * cmath.pi * theta)


def jordan_lift(blocks: Sequence[tuple]) -> HMatrix:
    """Direct sum of J(lam, size) for (lam, size) pairs; scalar-times-block allowed via (lam, size, scale)."""
    mats = []
    for item in blocks:
        lam, size = item[0], item[1]
        mats.append(hmat.jordan_block(lam, size))
    return hmat.direct_sum(*mats)


def compositions(total: int) -> Iterator[tuple[int, ...]]:
    """Ordered block-size tuples summing to ``total``."""
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in compositions(total - first):
            yield (first,) + rest


def partitions(total: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Block-size multisets (non-increasing) summing to ``total``."""
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for rest in partitions(total - first, first):
            yield (first,) + rest
