"""Equicontinuity region of the cyclic group generated by one element.

The region is the complement of the union of the kernels of all limits of
normalized powers.  For a cyclic group the forward limits share one kernel
``K+`` and the backward limits share ``K-``, so the complement is ``K+ u K-``:

* elliptic: empty;
* parabolic: a single subspace (``K+ == K-``);
* loxodromic / loxoparabolic: two distinct subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import hmat
from .dynamics import DEFAULT_UNIT_TOL, Direction, DynamicalType, classify, limit_kernel
from .errors import NonSquare, ParseError, Singular, WrongType
from .hmat import HMatrix
from .projective import ProjectiveSubspace, transform
from .spectral import DEFAULT_TOL, JordanData, jordan_decomposition, jordan_from_structure

MODES = ("general", "assume-jordan")
COORDS = ("original", "jordan", "both")

_NOTES = {
    DynamicalType.ELLIPTIC: "semisimple with unit moduli: powers stay bounded, the region is all of projective space",
    DynamicalType.PARABOLIC: "unit moduli with a nontrivial block: one subspace, all Jordan vectors except the last of each largest block",
    DynamicalType.LOXODROMIC: "semisimple with distinct moduli: forward kernel drops the top modulus, backward kernel drops the bottom one",
    DynamicalType.LOXOPARABOLIC: "distinct moduli and a nontrivial block: forward and backward kernels from the growth order rule",
}


@dataclass(frozen=True, eq=False)
class EqRegionReport:
    """Dynamical type and the complement of the equicontinuity region.

    ``complement`` is in the coordinates of the input matrix and
    ``complement_jordan`` in the Jordan basis; for two-sided types the order is
    ``[forward kernel, backward kernel]``.
    """

    dyn_type: DynamicalType
    complement: tuple[ProjectiveSubspace, ...]
    jordan: JordanData
    complement_jordan: tuple[ProjectiveSubspace, ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self, coords: str = "original") -> dict:
        if coords not in COORDS:
            raise ValueError(f"coords must be one of {COORDS}")
        out = {
            "type": self.dyn_type.value,
            "coords": coords,
            "jordan": self.jordan.to_json(),
            "notes": list(self.notes),
        }
        if coords == "jordan":
            out["complement"] = [W.to_json() for W in self.complement_jordan]
        else:
            out["complement"] = [W.to_json() for W in self.complement]
        if coords == "both":
            out["complement_jordan"] = [W.to_json() for W in self.complement_jordan]
        return out

    @classmethod
    def from_json(cls, obj) -> "EqRegionReport":
        try:
            dyn = DynamicalType(obj["type"])
            coords = obj.get("coords", "original")
            jd = JordanData.from_json(obj["jordan"])
            comp = tuple(ProjectiveSubspace.from_json(w) for w in obj["complement"])
            other = tuple(ProjectiveSubspace.from_json(w) for w in obj.get("complement_jordan", []))
            notes = tuple(obj.get("notes", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad region report: {exc}") from exc
        if coords == "jordan":
            original = tuple(transform(W, jd.S_inv) for W in comp)
            return cls(dyn, original, jd, comp, notes)
        if coords == "original" and not other:
            other = tuple(transform(W, jd.S) for W in comp)
        return cls(dyn, comp, jd, other, notes)


def eq_region_parabolic(J: JordanData, unit_tol: float = DEFAULT_UNIT_TOL) -> ProjectiveSubspace:
    """The single complement subspace of a parabolic element, in Jordan coordinates."""
    t = classify(J, unit_tol)
    if t is not DynamicalType.PARABOLIC:
        raise WrongType(f"expected a parabolic element, got {t.value}")
    return limit_kernel(J, Direction.FORWARD, unit_tol)


def eq_region_two_sided(J: JordanData, unit_tol: float = DEFAULT_UNIT_TOL) -> tuple[ProjectiveSubspace, ProjectiveSubspace]:
    """(forward kernel, backward kernel) of a loxodromic or loxoparabolic element."""
    t = classify(J, unit_tol)
    if t not in (DynamicalType.LOXODROMIC, DynamicalType.LOXOPARABOLIC):
        raise WrongType(f"expected a loxodromic or loxoparabolic element, got {t.value}")
    return limit_kernel(J, Direction.FORWARD, unit_tol), limit_kernel(J, Direction.BACKWARD, unit_tol)


def region_from_jordan(J: JordanData, unit_tol: float = DEFAULT_UNIT_TOL) -> EqRegionReport:
    t = classify(J, unit_tol)
    if t is DynamicalType.ELLIPTIC:
        jordan_side: tuple = ()
    elif t is DynamicalType.PARABOLIC:
        jordan_side = (eq_region_parabolic(J, unit_tol),)
    else:
        jordan_side = eq_region_two_sided(J, unit_tol)
    original = tuple(transform(W, J.S_inv) for W in jordan_side)
    return EqRegionReport(t, original, J, tuple(jordan_side), (_NOTES[t],))


def check_invertible(gamma: HMatrix) -> None:
    if not gamma.is_square:
        raise NonSquare(f"expected a square matrix, got {gamma.rows}x{gamma.cols}")
    if gamma.is_exact:
        if hmat.det_h(gamma) == 0:
            raise Singular("matrix has zero quaternionic determinant")
    elif hmat.rank(gamma) < gamma.rows:
        raise Singular("matrix is singular at the rank tolerance")


def decompose(gamma: HMatrix, tol: float = DEFAULT_TOL, mode: str = "general") -> JordanData:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    check_invertible(gamma)
    if mode == "assume-jordan":
        return jordan_from_structure(gamma)
    return jordan_decomposition(gamma, tol)


def eq_region(gamma: HMatrix, tol: float = DEFAULT_TOL, unit_tol: float = DEFAULT_UNIT_TOL,
              mode: str = "general") -> EqRegionReport:
    """Classify ``gamma`` and describe the complement of its equicontinuity region."""
    return region_from_jordan(decompose(gamma, tol, mode), unit_tol)
