"""Scalar arithmetic in Hamilton's quaternions.

Components may be floats (the default backend) or exact rationals
(``fractions.Fraction`` / ``int``); the Hamilton product only uses ring
operations, so both backends share one implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .errors import DivisionByZero, ParseError

#: Default absolute tolerance on components for floating comparisons.
DEFAULT_EPS = 1e-10


@dataclass(frozen=True)
class Quaternion:
    """a0 + a1*i + a2*j + a3*k."""

    a0: Real = 0
    a1: Real = 0
    a2: Real = 0
    a3: Real = 0

    @classmethod
    def coerce(cls, x) -> "Quaternion":
        if isinstance(x, Quaternion):
            return x
        if isinstance(x, complex):
            return cls(x.real, x.imag, 0.0, 0.0)
        if isinstance(x, Real):
            return cls(x, 0, 0, 0)
        if hasattr(x, "real") and hasattr(x, "imag"):
            return cls(float(x.real), float(x.imag), 0.0, 0.0)
        raise TypeError(f"cannot interpret {x!r} as a quaternion")

    @property
    def components(self) -> tuple:
        return (self.a0, self.a1, self.a2, self.a3)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.components)

    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(*(x + y for x, y in zip(self.components, o.components)))

    __radd__ = __add__

    def __sub__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(*(x - y for x, y in zip(self.components, o.components)))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, other):
        return mul(self, Quaternion.coerce(other))

    def __rmul__(self, other):
        return mul(Quaternion.coerce(other), self)

    def __truediv__(self, other):
        # right division: p / q = p * q^-1
        return mul(self, inverse(Quaternion.coerce(other)))

    def __abs__(self):
        return norm(self)

    def conj(self) -> "Quaternion":
        return conj(self)

    def norm2(self):
        return self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3

    def inverse(self) -> "Quaternion":
        return inverse(self)

    def to_json(self) -> list:
        return [_num_to_json(c) for c in self.components]

    @classmethod
    def from_json(cls, data) -> "Quaternion":
        if not isinstance(data, (list, tuple)) or len(data) != 4:
            raise ParseError(f"quaternion must be a 4-array, got {data!r}")
        return cls(*(_num_from_json(c) for c in data))


ONE = Quaternion(1, 0, 0, 0)
I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p*q``."""
    p0, p1, p2, p3 = p.components
    q0, q1, q2, q3 = q.components
    return Quaternion(
        p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
        p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
        p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
        p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
    )


def conj(q: Quaternion) -> Quaternion:
    return Quaternion(q.a0, -q.a1, -q.a2, -q.a3)


def norm(q: Quaternion) -> float:
    return math.sqrt(q.norm2())


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.norm2()
    if n2 == 0:
        raise DivisionByZero("inverse of the zero quaternion")
    c = conj(q)
    if q.is_exact:
        n2 = Fraction(n2)
    return Quaternion(c.a0 / n2, c.a1 / n2, c.a2 / n2, c.a3 / n2)


def canonical_rep(q: Quaternion) -> complex:
    """The complex number with non-negative imaginary part similar to ``q``.

    Similarity ``mu^-1 q mu`` preserves the real part and the length of the
    imaginary part, and any two quaternions agreeing on both are similar.
    """
    q = Quaternion.coerce(q)
    return complex(float(q.a0), math.sqrt(float(q.a1 * q.a1 + q.a2 * q.a2 + q.a3 * q.a3)))


def similarity_to_rep(q: Quaternion) -> Quaternion:
    """Unit ``mu`` with ``mu^-1 * q * mu == canonical_rep(q)``."""
    q = Quaternion.coerce(q)
    v = (float(q.a1), float(q.a2), float(q.a3))
    r = math.sqrt(sum(c * c for c in v))
    if r == 0 or (v[1] == 0 and v[2] == 0 and v[0] > 0):
        return ONE
    if v[0] < 0:
        # conjugating by j flips the i and k parts; keeps the rotor below well away from zero
        flipped = Quaternion(q.a0, -q.a1, q.a2, -q.a3)
        return mul(J, similarity_to_rep(flipped))
    u = Quaternion(0.0, v[0] / r, v[1] / r, v[2] / r)
    # rot * u * rot^-1 = i  for  rot ~ 1 - i*u
    rot = ONE - mul(I, u)
    rot = rot * (1.0 / norm(rot))
    return conj(rot)


def isclose(p, q, eps: float = DEFAULT_EPS) -> bool:
    p = Quaternion.coerce(p)
    q = Quaternion.coerce(q)
    return all(abs(x - y) <= eps for x, y in zip(p.components, q.components))


def _num_to_json(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    x = float(x)
    return 0.0 if x == 0 else x


def _num_from_json(x):
    if isinstance(x, bool):
        raise ParseError("booleans are not numbers here")
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise ParseError(f"bad rational literal {x!r}") from exc
    raise ParseError(f"expected a number, got {x!r}")
