"""BS(1,n) = <a, b | a b a^-1 = b^n>, affine maps of the line, and the
standard representation a -> (x -> n x), b -> (x -> x + 1) on RP^1.

Elements are stored in the normal form x -> n^k x + t with t = m / n^j,
``j >= 0`` minimal.  Products are compositions: ``g1 * g2`` applies ``g2``
first, and a word such as ``"abA"`` means the composition a o b o a^-1.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .circle import INF, CirclePoint
from .errors import MalformedWord, ParameterMismatch


@dataclass(frozen=True)
class BSElement:
    n: int
    k: int
    m: int
    j: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"BS(1,n) needs n >= 2, got {self.n}")
        if self.j < 0:
            raise ValueError("n-adic exponent must be nonnegative")
        m, j = self.m, self.j
        while j > 0 and m % self.n == 0:
            m //= self.n
            j -= 1
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "j", j)

    @classmethod
    def from_kt(cls, n, k, t):
        t = Fraction(t)
        den = t.denominator
        j, pw = 0, 1
        while pw % den:
            j += 1
            pw *= n
            if j > den.bit_length():
                raise ValueError(f"{t} is not in Z[1/{n}]")
        return cls(n, k, t.numerator * (pw // den), j)

    @classmethod
    def identity(cls, n):
        return cls(n, 0, 0, 0)

    @classmethod
    def gen_a(cls, n):
        return cls(n, 1, 0, 0)

    @classmethod
    def gen_b(cls, n):
        return cls(n, 0, 1, 0)

    @property
    def t(self):
        return Fraction(self.m, self.n ** self.j)

    @property
    def slope(self):
        return Fraction(self.n) ** self.k

    def __mul__(self, other):
        return bs_mul(self, other)

    def inverse(self):
        return bs_inv(self)

    def __pow__(self, e):
        base = self if e >= 0 else bs_inv(self)
        out = BSElement.identity(self.n)
        for _ in range(abs(e)):
            out = bs_mul(out, base)
        return out

    def __str__(self):
        return f"(k={self.k}, t={self.t})"

    def to_json(self):
        return {"n": self.n, "k": self.k, "t": str(self.t)}


def bs_mul(g1, g2):
    """Composition g1 o g2: x -> n^(k1+k2) x + n^k1 t2 + t1."""
    if g1.n != g2.n:
        raise ParameterMismatch(f"BS(1,{g1.n}) element times BS(1,{g2.n}) element")
    return BSElement.from_kt(g1.n, g1.k + g2.k, g1.slope * g2.t + g1.t)


def bs_inv(g):
    return BSElement.from_kt(g.n, -g.k, -g.t / g.slope)


_TOKEN = re.compile(r"\s*(?:([abAB])(?:\s*(?:\^-1|⁻¹))?|(\S))")


def parse_word(word):
    """Tokenise a word into letters of {a, A, b, B} (A = a^-1, B = b^-1).

    Accepts the ASCII form ``abAB`` as well as ``a b a^-1`` / ``a b a⁻¹``.
    """
    out = []
    pos = 0
    text = word.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            break
        if mt.group(2) is not None:
            raise MalformedWord(f"unexpected character {mt.group(2)!r} at position {mt.start(2)} in {word!r}")
        letter = mt.group(1)
        inverted = mt.group(0).rstrip().endswith(("^-1", "⁻¹"))
        if inverted:
            if letter.isupper():
                raise MalformedWord(f"double inverse on {letter!r} in {word!r}")
            letter = letter.upper()
        out.append(letter)
        pos = mt.end()
    return out


def word_to_element(word, n):
    if n < 2:
        raise ParameterMismatch(f"BS(1,n) needs n >= 2, got {n}")
    gens = {
        "a": BSElement.gen_a(n),
        "A": bs_inv(BSElement.gen_a(n)),
        "b": BSElement.gen_b(n),
        "B": bs_inv(BSElement.gen_b(n)),
    }
    letters = parse_word(word) if isinstance(word, str) else list(word)
    out = BSElement.identity(n)
    for c in letters:
        if c not in gens:
            raise MalformedWord(f"letter {c!r} not in {{a,A,b,B}}")
        out = bs_mul(out, gens[c])
    return out


@dataclass(frozen=True)
class AffineMap:
    """x -> c x + d on the line, fixing infinity."""

    c: object
    d: object = 0

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("affine map needs nonzero slope")

    @property
    def exact(self):
        return isinstance(self.c, Rational) and isinstance(self.d, Rational)

    @classmethod
    def identity(cls):
        return cls(Fraction(1), Fraction(0))

    def __call__(self, x):
        if x is INF:
            return INF
        return self.c * x + self.d

    def compose(self, other):
        """self o other."""
        return AffineMap(self.c * other.c, self.c * other.d + self.d)

    def inverse(self):
        return AffineMap(1 / Fraction(self.c) if self.exact else 1.0 / self.c, -self.d / self.c)

    def __pow__(self, e):
        base = self if e >= 0 else self.inverse()
        out = AffineMap(type(self.c)(1), type(self.d)(0))
        for _ in range(abs(e)):
            out = base.compose(out)
        return out

    @property
    def orientation(self):
        """The orientation character O: 0 if increasing, 1 if decreasing."""
        return 0 if self.c > 0 else 1

    def fixes(self, p):
        if p is INF:
            return True
        return self.c * p + self.d == p

    def to_json(self):
        return {"c": str(self.c), "d": str(self.d)}


def is_orientation_preserving(f):
    return f.orientation == 0


def affine_of(g):
    return AffineMap(g.slope, g.t)


def std_rep_eval(g, p):
    """Apply rho_n(g) to a circle point; exact when the point carries exact data."""
    f = affine_of(g)
    if not isinstance(p, CirclePoint):
        p = CirclePoint.from_x(p)
    if p.is_infinite:
        return CirclePoint(0.5, INF)
    if p.exact is not None:
        return CirclePoint.from_x(f(p.exact))
    return CirclePoint.from_x(float(f.c) * p.x + float(f.d))
