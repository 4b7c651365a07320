"""Dynamics of quaternionic projective transformations.

Classify an invertible quaternionic matrix as elliptic, parabolic, loxodromic
or loxoparabolic, and describe the complement of the equicontinuity region of
the cyclic group it generates as one or two projective subspaces.
"""

from .dynamics import DynamicalType, classify, limit_kernel, normalized_power, pseudo_from_matrix
from .eqregion import EqRegionReport, eq_region
from .errors import (
    DimensionMismatch,
    DivisionByZero,
    IllConditioned,
    NonSquare,
    ParseError,
    PowerOverflowGuard,
    QuatDynError,
    Singular,
    UnknownEigenvalue,
    Unstable,
    WrongType,
    ZeroMatrix,
)
from .hmat import HMatrix, det_h, direct_sum, jordan_block
from .oracle import ProbeConfig, Verdict, crushed_subspace, equicontinuity_probe, verify_region
from .projective import ProjectivePoint, ProjectiveSubspace, contains, point_dist, span, subspace_dist
from .quat import Quaternion
from .spectral import EigenClass, JordanData, jordan_decomposition, right_eigenvalues

__version__ = "0.1.0"
