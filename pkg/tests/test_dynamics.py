import math
from fractions import Fraction

import numpy as np
import pytest

from quatdyn import hmat
from quatdyn.dynamics import (
    Direction,
    DynamicalType,
    GrowthOrder,
    analytic_limit,
    backward_growth,
    block_power_entry,
    classify,
    forward_growth,
    least_singular_subspace,
    limit_kernel,
    normalized_dyadic_power,
    normalized_power,
    pseudo_from_matrix,
)
from quatdyn.errors import PowerOverflowGuard, ZeroMatrix
from quatdyn.hmat import HMatrix, direct_sum, jordan_block
from quatdyn.projective import coordinate_subspace, subspace_dist, transform
from quatdyn.samples import GOLDEN_PHASE, phase
from quatdyn.spectral import JordanBlock, JordanData, jordan_from_structure


def jd_of(*blocks):
    n = sum(k for _, k in blocks)
    return JordanData(tuple(JordanBlock(complex(l), k) for l, k in blocks), HMatrix.identity(n, exact=True))


def kernel_indices(W):
    # 0-based coordinate indices of an exact coordinate subspace
    return sorted(int(np.nonzero(np.array([v[i][0] for i in range(v.shape[0])], dtype=float))[0][0]) for v in W.vectors())


@pytest.mark.parametrize("blocks, expected", [
    ([(phase(0.3), 1)], DynamicalType.ELLIPTIC),
    ([(1, 4)], DynamicalType.PARABOLIC),
    ([(2, 1), (0.5, 1)], DynamicalType.LOXODROMIC),
    ([(0.5, 2), (2, 3)], DynamicalType.LOXOPARABOLIC),
    ([(phase(GOLDEN_PHASE), 2), (1j, 1)], DynamicalType.PARABOLIC),
])
def test_classify(blocks, expected):
    assert classify(jd_of(*blocks)) is expected


def test_classify_ignores_block_order():
    assert classify(jd_of((2, 1), (1, 2))) is classify(jd_of((1, 2), (2, 1)))


def test_pseudo_from_corner_unit():
    pm = pseudo_from_matrix(HMatrix.unit(0, 3, 4))
    assert pm.kernel.dim == 2 and pm.image.dim == 0
    assert subspace_dist(pm.kernel, coordinate_subspace(3, [0, 1, 2])) == 0
    assert subspace_dist(pm.image, coordinate_subspace(3, [0])) == 0


@pytest.mark.parametrize("exact", [True, False])
def test_pseudo_from_two_corner_units(exact):
    k = 3
    M = direct_sum(HMatrix.unit(0, k - 1, k), HMatrix.unit(0, k - 1, k))
    M = M if exact else M.to_float()
    pm = pseudo_from_matrix(M)
    assert subspace_dist(pm.kernel, coordinate_subspace(5, [0, 1, 3, 4])) < 1e-14
    assert pm.kernel.dim + pm.image.dim == 5 - 1


def test_pseudo_invertible_and_zero(rng):
    pm = pseudo_from_matrix(HMatrix(rng.normal(size=(3, 3, 4))))
    assert pm.kernel.is_empty and pm.image.dim == 2
    with pytest.raises(ZeroMatrix):
        pseudo_from_matrix(HMatrix.zeros(2, exact=True))
    with pytest.raises(ZeroMatrix):
        pseudo_from_matrix(HMatrix.zeros(2))


def test_normalized_power_examples():
    P = normalized_power(jordan_block(1, 3), 2)
    assert P == HMatrix.from_entries([[Fraction(1, 2), 1, Fraction(1, 2)], [0, Fraction(1, 2), 1], [0, 0, Fraction(1, 2)]])
    assert normalized_power(HMatrix.identity(3), 17) == HMatrix.identity(3)
    # oracle: exact rational power, then divide by its largest entry
    D = HMatrix.diag([2, Fraction(1, 2)])
    exact = hmat.matrix_power(D, 10)
    assert normalized_power(D, 10) == exact.scale(Fraction(1, 1024))
    got = normalized_power(D.to_float(), 10)
    assert np.allclose(got.data[..., 0], np.diag([1.0, 2.0**-20]), rtol=1e-14, atol=0)


def test_normalized_power_far_and_negative():
    g = jordan_block(2.0, 2)
    P = normalized_power(g, 200)
    assert np.isfinite(P.data).all()
    assert hmat.max_entry_norm(P)[0] == pytest.approx(1.0)
    Q = normalized_power(g, -200)
    assert hmat.max_entry_norm(Q)[1] == (0, 1)
    with pytest.raises(ValueError):
        normalized_power(g, 201)


def test_dyadic_power_matches_plain_power():
    g = direct_sum(jordan_block(phase(0.3), 2), jordan_block(1.0, 1))
    assert hmat.max_abs_diff(normalized_dyadic_power(g, 6), normalized_power(g, 64)) < 1e-12


def test_underflow_guard():
    with pytest.raises(PowerOverflowGuard):
        normalized_power(HMatrix.diag([1e-200]), 3)


def test_growth_order_compare():
    assert GrowthOrder(0.0, 2).compare(GrowthOrder(0.0, 1)) == 1
    assert GrowthOrder(math.log(2), 0).compare(GrowthOrder(0.0, 5)) == 1
    assert GrowthOrder(1e-9, 1).compare(GrowthOrder(0.0, 1)) == 0


@pytest.mark.parametrize("blocks, achievers", [
    ([(1, 2), (1, 4)], [1]),
    ([(0.5, 1), (2, 1)], [1]),
    ([(1, 3), (1, 3)], [0, 1]),
])
def test_forward_growth(blocks, achievers):
    best, got = forward_growth(jd_of(*blocks))
    assert got == achievers


def test_backward_growth_flips_moduli():
    best, got = backward_growth(jd_of((0.5, 2), (2, 3)))
    assert got == [0] and best.log_modulus == pytest.approx(math.log(2))


@pytest.mark.parametrize("blocks, direction, kept", [
    ([(1, 4)], "forward", [0, 1, 2]),
    ([(phase(0.3), 1), (1j, 1), (1, 3)], "forward", [0, 1, 2, 3]),
    ([(0.5, 2), (2, 3)], "forward", [0, 1, 2, 3]),
    ([(0.5, 2), (2, 3)], "backward", [0, 2, 3, 4]),
    ([(1, 2), (1, 2)], "backward", [0, 2]),
])
def test_limit_kernel(blocks, direction, kept):
    assert kernel_indices(limit_kernel(jd_of(*blocks), direction)) == kept


def test_limit_kernel_elliptic_is_empty():
    assert limit_kernel(jd_of((1j, 1), (phase(0.3), 1))).is_empty


def test_parabolic_kernels_agree_both_ways():
    jd = jd_of((1, 2), (phase(GOLDEN_PHASE), 3), (1j, 1))
    assert subspace_dist(limit_kernel(jd, "forward"), limit_kernel(jd, "backward")) == 0


@pytest.mark.parametrize("blocks", [
    [(1, 2), (1, 3)],
    [(0.5, 2), (1j, 2)],
    [(phase(GOLDEN_PHASE), 2), (phase(0.25), 1)],
])
def test_normalized_power_kernels_approach_limit(blocks):
    g = direct_sum(*(jordan_block(complex(l), k) for l, k in blocks))
    jd = jordan_from_structure(g)
    K = transform(limit_kernel(jd), jd.S_inv)
    dists = [subspace_dist(least_singular_subspace(normalized_power(g, m), K.count), K) for m in (20, 40, 80)]
    assert dists[0] > dists[1] > dists[2]


def test_rank_of_normalized_power_stabilizes():
    # semisimple: the non-maximal entries decay geometrically, so the rank drops
    g = HMatrix.diag([0.5, 2.0, 2.0])
    K = limit_kernel(jordan_from_structure(g))
    ranks = [hmat.rank(normalized_power(g, m), tol=1e-8) for m in (120, 160, 200)]
    assert ranks == [3 - K.count] * 3 == [2, 2, 2]


def test_analytic_limit_pattern():
    pattern = analytic_limit(jd_of((1, 2), (1, 2)))
    assert pattern[0, 1] == 1 and pattern[2, 3] == 1 and pattern.sum() == 2


@pytest.mark.parametrize("lam", [1, phase(0.3), 2])
@pytest.mark.parametrize("m", [0, 1, 5, 13])
def test_block_power_entry_matches_direct_power(lam, m):
    k = 4
    A = jordan_block(complex(lam), k)
    for sign in (1, -1):
        P = hmat.matrix_power(A, sign * m)
        for i in range(k):
            for j in range(k):
                q = P[i, j]
                got = complex(q.a0, q.a1)
                want = block_power_entry(complex(lam), i, j, sign * m)
                assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
