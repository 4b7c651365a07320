from fractions import Fraction

import numpy as np
import pytest

from quatdyn.errors import Unstable
from quatdyn.eqregion import eq_region
from quatdyn.hmat import HMatrix, direct_sum, jordan_block
from quatdyn.oracle import (
    ProbeConfig,
    Verdict,
    crushed_subspace,
    equicontinuity_probe,
    probe_separation,
    verify_region,
)
from quatdyn.projective import coordinate_subspace, subspace_dist
from quatdyn.samples import phase

# a loxodromic pair whose modulus gap only separates singular values near the end of the ladder
SLOW_GAP = HMatrix.diag([1.0, 1.0 + 4.5e-11])


@pytest.mark.parametrize("g, direction, kept", [
    (jordan_block(1, 3), "forward", [0, 1]),
    (jordan_block(1, 3), "backward", [0, 1]),
    (HMatrix.diag([0.5, 1.0, 2.0]), "forward", [0, 1]),
    (HMatrix.diag([0.5, 1.0, 2.0]), "backward", [1, 2]),
])
def test_crushed_subspace_matches_coordinates(g, direction, kept):
    K = crushed_subspace(g, direction)
    assert subspace_dist(K, coordinate_subspace(g.rows - 1, kept)) < 1e-6


def test_crushed_subspace_elliptic_is_empty():
    assert crushed_subspace(HMatrix.diag([phase(0.3), phase(0.7)])).is_empty


def test_crushed_subspace_unstable():
    with pytest.raises(Unstable) as info:
        crushed_subspace(SLOW_GAP)
    assert len(set(info.value.dims[-4:])) > 1


@pytest.mark.parametrize("p, verdict", [
    ([0, 1], Verdict.EQUICONTINUOUS),
    ([1, 0], Verdict.NOT_EQUICONTINUOUS),
])
def test_probe_parabolic_pair(p, verdict):
    assert equicontinuity_probe(jordan_block(1, 2), p) is verdict


def test_probe_elliptic_everywhere(rng):
    g = HMatrix.diag([phase(0.3), 1j, -1])
    for _ in range(3):
        assert equicontinuity_probe(g, rng.normal(size=(3, 4))) is Verdict.EQUICONTINUOUS


def test_probe_sups_shrink_off_complement():
    res = probe_separation(HMatrix.diag([0.5, 2.0]), [1, 1])
    assert res.verdict is Verdict.EQUICONTINUOUS
    assert all(b <= a / 10 for a, b in zip(res.sups, res.sups[1:]))


@pytest.mark.parametrize("g", [
    jordan_block(1, 3),
    direct_sum(jordan_block(1, 2), jordan_block(1, 3)),
    HMatrix.diag([Fraction(1, 2), 1, 2]),
    direct_sum(jordan_block(1, 2).scale(Fraction(1, 2)), jordan_block(1, 3)),
])
def test_verify_region_passes(g):
    s = verify_region(g, eq_region(g, mode="assume-jordan"))
    assert s.passed, [c.to_json() for c in s.checks if not c.passed]


def test_verify_region_rejects_wrong_report():
    g = HMatrix.diag([Fraction(1, 2), 2])
    # report of the inverse element: forward and backward kernels are swapped
    wrong = eq_region(HMatrix.diag([2, Fraction(1, 2)]), mode="assume-jordan")
    s = verify_region(g, wrong)
    assert not s.passed
    assert not any(c.passed for c in s.by_kind("subspace:"))


def test_verify_region_elliptic_uses_five_probes():
    g = HMatrix.diag([phase(0.3), phase(0.7), 1])
    s = verify_region(g, eq_region(g))
    assert s.passed
    assert s.by_kind("subspace:") == [] and len(s.by_kind("probe:off:")) == 5


def test_verify_is_deterministic():
    g = jordan_block(1, 3)
    r = eq_region(g, mode="assume-jordan")
    a = verify_region(g, r, ProbeConfig(seed=7)).to_json()
    b = verify_region(g, r, ProbeConfig(seed=7)).to_json()
    assert a == b


@pytest.mark.parametrize("kwargs", [
    {"eps_ladder": (1e-4, 1e-2)},
    {"separation_threshold": 1.5},
    {"max_power": 0},
    {"tail": 100},
])
def test_probe_config_validation(kwargs):
    with pytest.raises(ValueError):
        ProbeConfig(**kwargs)


def _sweep(seed=11, per_shape=2, max_size=5):
    """Jordan shapes up to size 5 with moduli in {1/2, 1, 2} and phases in {1, i, golden}."""
    from quatdyn.samples import GOLDEN_PHASE, compositions
    rng = np.random.default_rng(seed)
    moduli, phases = (0.5, 1.0, 2.0), (1, 1j, phase(GOLDEN_PHASE))
    for size in range(2, max_size + 1):
        for shape in compositions(size):
            for _ in range(per_shape):
                lams = [moduli[rng.integers(3)] * phases[rng.integers(3)] for _ in shape]
                yield direct_sum(*(jordan_block(l, k) for l, k in zip(lams, shape)))


EXPECTED_COUNT = {"Elliptic": 0, "Parabolic": 1, "Loxodromic": 2, "Loxoparabolic": 2}


def test_sweep_type_cardinality_and_crushed_agreement():
    from quatdyn.dynamics import limit_kernel
    from quatdyn.projective import transform
    bad = []
    for g in _sweep():
        r = eq_region(g, mode="assume-jordan")
        if len(r.complement) != EXPECTED_COUNT[r.dyn_type.value]:
            bad.append((r.dyn_type.value, len(r.complement)))
        for d in ("forward", "backward"):
            K = transform(limit_kernel(r.jordan, d), r.jordan.S_inv)
            dist = subspace_dist(crushed_subspace(g, d), K)
            if not dist < 1e-6:
                bad.append((d, dist))
    assert bad == []


def test_probe_soundness_away_from_complement():
    from quatdyn.projective import point_subspace_dist
    rng = np.random.default_rng(5)
    violations = 0
    for idx, g in enumerate(_sweep(per_shape=1, max_size=4)):
        r = eq_region(g, mode="assume-jordan")
        for _ in range(2):
            p = rng.normal(size=(g.rows, 4))
            if min((point_subspace_dist(p, W) for W in r.complement), default=1.0) > 0.1:
                violations += equicontinuity_probe(g, p, ProbeConfig(seed=idx)) is Verdict.NOT_EQUICONTINUOUS
    assert violations == 0


def test_equicontinuous_sups_drop_with_eps():
    # at least x5 per x100 decrease of eps
    g = direct_sum(jordan_block(1, 2), jordan_block(phase(0.3), 1))
    res = probe_separation(g, [0, 1, 1], ProbeConfig(seed=3))
    assert res.verdict is Verdict.EQUICONTINUOUS
    assert all(b <= a / 5 for a, b in zip(res.sups, res.sups[1:]))
