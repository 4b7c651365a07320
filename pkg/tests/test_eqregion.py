import json

import numpy as np
import pytest

from quatdyn.cli import canonical_dumps
from quatdyn.dynamics import DynamicalType
from quatdyn.eqregion import EqRegionReport, eq_region, eq_region_parabolic, eq_region_two_sided
from quatdyn.errors import Singular, WrongType
from quatdyn.hmat import HMatrix, direct_sum, inverse, jordan_block, matrix_power
from quatdyn.projective import coordinate_subspace, subspace_dist, transform
from quatdyn.samples import GOLDEN_PHASE, phase, random_conditioned
from quatdyn.spectral import jordan_from_structure



def L(n_plus_1, *indices):
    return coordinate_subspace(n_plus_1 - 1, [i - 1 for i in indices])


def test_elliptic_has_empty_complement():
    r = eq_region(HMatrix.diag([phase(0.3), phase(0.7)]))
    assert r.dyn_type is DynamicalType.ELLIPTIC and r.complement == ()


@pytest.mark.parametrize("size", [2, 3, 5])
def test_single_parabolic_block(size):
    r = eq_region(jordan_block(1, size), mode="assume-jordan")
    assert r.dyn_type is DynamicalType.PARABOLIC
    (K,) = r.complement
    assert subspace_dist(K, L(size, *range(1, size))) == 0


def test_loxodromic_diagonal_groups():
    g = HMatrix.diag([0.5, 0.5, 1, 2])
    r = eq_region(g, mode="assume-jordan")
    assert r.dyn_type is DynamicalType.LOXODROMIC
    fwd, bwd = r.complement
    assert subspace_dist(fwd, L(4, 1, 2, 3)) == 0
    assert subspace_dist(bwd, L(4, 3, 4)) == 0


@pytest.mark.parametrize("blocks, kept", [
    ([(1, 2), (1, 2)], [1, 3]),
    ([(1, 2), (1, 3)], [1, 2, 3, 4]),
    ([(phase(0.3), 1), (1j, 1), (1, 2)], [1, 2, 3]),
])
def test_eq_region_parabolic_rule(blocks, kept):
    g = direct_sum(*(jordan_block(complex(l) if isinstance(l, complex) else l, k) for l, k in blocks))
    K = eq_region_parabolic(jordan_from_structure(g))
    assert subspace_dist(K, L(g.rows, *kept)) == 0


def test_two_sided_examples():
    fwd, bwd = eq_region_two_sided(jordan_from_structure(HMatrix.diag([0.5, 2.0])))
    assert subspace_dist(fwd, L(2, 1)) == 0 and subspace_dist(bwd, L(2, 2)) == 0
    fwd, bwd = eq_region_two_sided(jordan_from_structure(HMatrix.diag([1, 1, 3])))
    assert subspace_dist(fwd, L(3, 1, 2)) == 0 and subspace_dist(bwd, L(3, 3)) == 0
    g = direct_sum(jordan_block(1, 2).scale(0.5), jordan_block(1, 3).scale(2.0))
    fwd, bwd = eq_region_two_sided(jordan_from_structure(g))
    assert subspace_dist(fwd, L(5, 1, 2, 3, 4)) == 0 and subspace_dist(bwd, L(5, 1, 3, 4, 5)) == 0


def test_wrong_type_errors():
    with pytest.raises(WrongType):
        eq_region_parabolic(jordan_from_structure(HMatrix.diag([0.5, 2.0])))
    with pytest.raises(WrongType):
        eq_region_two_sided(jordan_from_structure(jordan_block(1, 2)))


def test_singular_input():
    with pytest.raises(Singular):
        eq_region(HMatrix.diag([1, 0]))
    with pytest.raises(Singular):
        eq_region(HMatrix.diag([1.0, 0.0]))


def test_original_coordinates_follow_input_order():
    # blocks listed out of sorted order: the complement is still reported in input coordinates
    g = direct_sum(jordan_block(1, 3), jordan_block(1, 1))
    (K,) = eq_region(g, mode="assume-jordan").complement
    assert subspace_dist(K, L(4, 1, 2, 4)) == 0


def _samples():
    return [
        jordan_block(1, 3),
        direct_sum(jordan_block(1, 2), jordan_block(phase(GOLDEN_PHASE), 2)),
        HMatrix.diag([0.5, 1.0, 2.0]),
        direct_sum(jordan_block(0.5, 2), jordan_block(2.0, 1)),
    ]


@pytest.mark.parametrize("idx", range(4))
def test_equivariance(idx):
    g = _samples()[idx]
    rng = np.random.default_rng(idx)
    T = random_conditioned(g.rows, 50.0, rng)
    base = eq_region(g, mode="assume-jordan")
    conj = eq_region(T @ g @ inverse(T))
    assert conj.dyn_type is base.dyn_type
    for a, b in zip(conj.complement, base.complement):
        assert subspace_dist(a, transform(b, T)) < 1e-6


@pytest.mark.parametrize("idx", range(4))
def test_inverse_swaps_two_sided_complements(idx):
    g = _samples()[idx].to_float()
    r, ri = eq_region(g), eq_region(inverse(g))
    if r.dyn_type in (DynamicalType.LOXODROMIC, DynamicalType.LOXOPARABOLIC):
        pairs = zip(r.complement, reversed(ri.complement))
    else:
        pairs = zip(r.complement, ri.complement)
    for a, b in pairs:
        assert subspace_dist(a, b) < 1e-6


@pytest.mark.parametrize("idx", range(4))
@pytest.mark.parametrize("k", [2, 3])
def test_power_invariance(idx, k):
    g = _samples()[idx].to_float()
    r, rk = eq_region(g), eq_region(matrix_power(g, k))
    assert len(r.complement) == len(rk.complement)
    for a, b in zip(r.complement, rk.complement):
        assert subspace_dist(a, b) < 1e-6


@pytest.mark.parametrize("coords_mode", ["original", "jordan", "both"])
def test_report_json_round_trip_is_byte_identical(coords_mode, rng):
    g = _samples()[3].to_float()
    T = random_conditioned(3, 10.0, rng)
    r = eq_region(T @ g @ inverse(T))
    text = canonical_dumps(r.to_json(coords_mode))
    back = EqRegionReport.from_json(json.loads(text))
    assert canonical_dumps(back.to_json(coords_mode)) == text
