"""Points of the circle in the additive (u) and projective (x) coordinates.

The two charts are glued by ``x = tan(pi * u)``, so ``u = 0`` is ``x = 0`` and
``u = 1/2`` is the point at infinity.  Counterclockwise order is increasing
``u``, which on the affine line is increasing ``x``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


class _Infinity:
    """The point at infinity of the real projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(x):
    return x is INF


def u_of_x(x):
    """Additive coordinate in [0, 1) of a projective point."""
    if x is INF:
        return 0.5
    u = math.atan(float(x)) / math.pi
    return u + 1.0 if u < 0 else u


def x_of_u(u):
    """Projective coordinate of ``u``; returns ``INF`` exactly at u = 1/2 (mod 1)."""
    u = u % 1.0
    if u == 0.5:
        return INF
    return math.tan(math.pi * u)


def circle_dist(u1, u2):
    """Distance on R/Z."""
    d = abs(u1 - u2) % 1.0
    return min(d, 1.0 - d)


def as_exact(x):
    """Coerce an int/Fraction/decimal string to Fraction; leave INF alone."""
    if x is INF:
        return INF
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        if x.lower() in ("inf", "infinity", "oo"):
            return INF
        return Fraction(x)
    raise TypeError(f"not an exact projective coordinate: {x!r}")


@dataclass(frozen=True)
class CirclePoint:
    """A point of S^1.

    ``u`` is the canonical coordinate.  ``exact`` optionally carries the exact
    projective coordinate (a Fraction or INF) so rational data survives
    round trips through the numeric layer.
    """

    u: float
    exact: object = None

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u) % 1.0)

    @classmethod
    def from_x(cls, x):
        if x is INF:
            return cls(0.5, INF)
        if isinstance(x, Rational):
            return cls(u_of_x(x), Fraction(x))
        return cls(u_of_x(x))

    @classmethod
    def from_u(cls, u):
        return cls(u)

    @property
    def is_infinite(self):
        return self.exact is INF or (self.exact is None and self.u == 0.5)

    @property
    def x(self):
        if self.exact is INF:
            return INF
        if self.exact is not None:
            return float(self.exact)
        return x_of_u(self.u)

    def dist(self, other):
        return circle_dist(self.u, other.u)

    def __repr__(self):
        if self.exact is not None:
            return f"CirclePoint(x={self.exact})"
        return f"CirclePoint(u={self.u!r})"
