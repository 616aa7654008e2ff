"""Exact univariate polynomials and rational maps of the projective line.

Coefficients are ``fractions.Fraction``.  Sturm sequences are computed over
the integers with a primitive pseudo-remainder sequence, which keeps the
coefficient growth under control for the large-degree maps produced by the
cover construction.
"""

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational

from .circle import INF
from .errors import DivisionByZeroPolynomial, IndeterminateForm, ZeroPolynomial

ZERO_DEGREE = -1  # degree reported for the zero polynomial


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"polynomial coefficients must be exact, got {c!r}")


class Polynomial:
    """Polynomial with exact rational coefficients, stored in ascending order."""

    __slots__ = ("coeffs", "_fc")

    def __init__(self, coeffs=()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._fc = None

    @classmethod
    def x(cls):
        return cls((0, 1))

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots):
        """Monic polynomial with the given roots, repeated per multiplicity."""
        p = cls((1,))
        for r in roots:
            p = p * cls((-_frac(r), 1))
        return p

    # -- basic structure ----------------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' if mono else ''}{mono}")
        return " + ".join(reversed(terms)).replace("+ -", "- ")

    # -- arithmetic ----------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial((other,))

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _frac(other)
            return Polynomial([c * a for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise DivisionByZeroPolynomial("division by the zero polynomial")
        rem = list(self.coeffs)
        db = other.degree
        if self.degree < db:
            return Polynomial(), self
        quot = [Fraction(0)] * (self.degree - db + 1)
        inv_lc = 1 / other.lc
        bc = other.coeffs
        for k in range(self.degree - db, -1, -1):
            c = rem[k + db] * inv_lc
            quot[k] = c
            if c:
                for j, bj in enumerate(bc):
                    rem[k + j] -= c * bj
        return Polynomial(quot), Polynomial(rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def derivative(self):
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def compose(self, inner):
        """``self(inner(x))`` by Horner's rule."""
        inner = self._coerce(inner)
        out = Polynomial()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def monic(self):
        if self.is_zero():
            return self
        return self * (1 / self.lc)

    def scale_arg(self, c):
        """``self(c * x)``."""
        c = _frac(c)
        return Polynomial([a * c**k for k, a in enumerate(self.coeffs)])

    def reversed_poly(self, m=None):
        """``x^m * self(1/x)``; ``m`` defaults to the degree."""
        m = self.degree if m is None else m
        if m < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        cs = list(self.coeffs) + [Fraction(0)] * (m + 1 - len(self.coeffs))
        return Polynomial(reversed(cs))

    def integral(self, constant=0):
        return Polynomial([_frac(constant)] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    # -- evaluation ----------------------------------------------------------
    def __call__(self, x):
        x = _frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x):
        acc = 0.0
        for c in self._float_coeffs():
            acc = acc * x + c
        return acc

    def _float_coeffs(self):
        # highest degree first
        if self._fc is None:
            self._fc = [float(c) for c in reversed(self.coeffs)]
        return self._fc

    def sign_at(self, x):
        """Sign at an exact point, or at +-infinity (pass ``math.inf`` / ``-math.inf``)."""
        if not self.coeffs:
            return 0
        if x == math.inf:
            return _sgn(self.lc)
        if x == -math.inf:
            return _sgn(self.lc) * (-1 if self.degree % 2 else 1)
        return _sgn(self(x))

    def root_multiplicity(self, r):
        """Multiplicity of the exact rational ``r`` as a root."""
        if self.is_zero():
            raise ZeroPolynomial("multiplicity in the zero polynomial")
        lin = Polynomial((-_frac(r), 1))
        k = 0
        p = self
        while True:
            q, rem = divmod(p, lin)
            if rem:
                return k
            p = q
            k += 1

    # -- gcd and square-free structure --------------------------------------
    def gcd(self, other):
        """Monic gcd; gcd(0, 0) is 0."""
        a, b = _to_int(self), _to_int(self._coerce(other))
        while b:
            a, b = b, _primitive(_prem(a, b))
        if not a:
            return Polynomial()
        return Polynomial(a).monic()

    def squarefree_part(self):
        if self.degree <= 0:
            return Polynomial((1,)) if self else self
        g = self.gcd(self.derivative())
        return (self // g).monic()

    def squarefree_decomposition(self):
        """Yun's algorithm: list of (factor, multiplicity) with monic square-free
        pairwise coprime factors whose product (with multiplicities) is
        ``self`` up to the leading coefficient."""
        if self.degree <= 0:
            return []
        out = []
        f = self.monic()
        fp = f.derivative()
        a = f.gcd(fp)
        b = f // a
        c = fp // a
        d = c - b.derivative()
        i = 1
        while b.degree > 0:
            a = b.gcd(d)
            b = b // a
            c = d // a
            d = c - b.derivative()
            if a.degree > 0:
                out.append((a.monic(), i))
            i += 1
        return out

    # -- real roots ------------------------------------------------------------
    def sturm_sequence(self):
        """Sturm chain of the square-free part, as integer coefficient lists (ascending).

        Members are positive rescalings of the Euclidean chain, so sign
        variation counts are unchanged.  Working with the square-free part
        keeps the chain valid at multiple roots, where every member of the
        unreduced chain would vanish.
        """
        if self.is_zero():
            raise ZeroPolynomial("Sturm sequence of the zero polynomial")
        sf = self.squarefree_part() if self.degree > 0 else self
        p0 = _primitive(_to_int(sf))
        p1 = _primitive(_to_int(sf.derivative()))
        chain = [p0]
        if p1:
            chain.append(p1)
        while len(chain) > 1 and len(chain[-1]) > 1:
            a, b = chain[-2], chain[-1]
            r = _prem(a, b)
            # prem multiplies by lc(b)^(deg a - deg b + 1); undo its sign
            if b[-1] < 0 and (len(a) - len(b) + 1) % 2:
                r = [-c for c in r]
            r = _primitive([-c for c in r])
            if not r:
                break
            chain.append(r)
        return chain

    def sturm_count(self, lo=-math.inf, hi=math.inf):
        """Number of distinct real roots in the half-open interval (lo, hi]."""
        if self.is_zero():
            raise ZeroPolynomial("cannot count roots of the zero polynomial")
        if self.degree == 0:
            return 0
        chain = self.sturm_sequence()
        return _variations(chain, lo) - _variations(chain, hi)

    def real_root_count(self):
        return self.sturm_count()

    def root_bound(self):
        """Cauchy bound: every real root lies in (-B, B)."""
        if self.degree <= 0:
            return Fraction(1)
        lc = abs(self.lc)
        return 1 + max(abs(c) / lc for c in self.coeffs[:-1])

    def isolate_real_roots(self, chain=None):
        """Disjoint intervals (lo, hi] with rational endpoints, one per distinct
        real root, in increasing order."""
        if self.is_zero():
            raise ZeroPolynomial("cannot isolate roots of the zero polynomial")
        if self.degree <= 0:
            return []
        chain = chain or self.sturm_sequence()
        B = self.root_bound()
        out = []
        stack = [(-B, B, _variations(chain, -B), _variations(chain, B))]
        while stack:
            lo, hi, vlo, vhi = stack.pop()
            n = vlo - vhi
            if n == 0:
                continue
            if n == 1:
                out.append((lo, hi))
                continue
            mid = (lo + hi) / 2
            vmid = _variations(chain, mid)
            stack.append((lo, mid, vlo, vmid))
            stack.append((mid, hi, vmid, vhi))
        out.sort()
        return out

    def refine_root(self, lo, hi, width):
        """Shrink an isolating interval (lo, hi] of a square-free factor's root
        below ``width``; returns (lo, hi) or (r, r) if the root is hit exactly."""
        slo = self.sign_at(lo)
        while hi - lo > width:
            mid = (lo + hi) / 2
            sm = self.sign_at(mid)
            if sm == 0:
                return mid, mid
            if slo == 0 or sm == slo:
                lo, slo = mid, sm
            else:
                hi = mid
        if self.sign_at(hi) == 0:
            return hi, hi
        return lo, hi

    def real_roots(self):
        """Distinct real roots with multiplicities as ``RealRoot`` records."""
        roots = []
        for factor, mult in self.squarefree_decomposition():
            for lo, hi in factor.isolate_real_roots():
                roots.append(RealRoot.locate(factor, lo, hi, mult))
        roots.sort(key=lambda r: r.key())
        return roots

    # -- serialization ------------------------------------------------------
    def to_json(self):
        return {"coeffs": [_frac_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj):
        return cls([Fraction(c) for c in obj["coeffs"]])



class RealRoot:
    """A real root given exactly (``value``) or by an isolating interval of a
    square-free factor.  ``mult`` is the multiplicity in the original polynomial."""

    __slots__ = ("factor", "lo", "hi", "mult", "value")

    def __init__(self, factor, lo, hi, mult, value=None):
        self.factor = factor
        self.lo = lo
        self.hi = hi
        self.mult = mult
        self.value = value

    @classmethod
    def locate(cls, factor, lo, hi, mult):
        # rational roots of square-free factors are found exactly by shrinking
        # the interval and testing the best rational approximation
        if factor.degree == 1:
            r = -factor.coeffs[0] / factor.coeffs[1]
            return cls(factor, r, r, mult, r)
        if factor.sign_at(hi) == 0:
            return cls(factor, hi, hi, mult, hi)
        den_bound = abs(_to_int(factor)[-1])
        lo2, hi2 = factor.refine_root(lo, hi, Fraction(1, 4 * den_bound * den_bound + 1))
        if lo2 == hi2:
            return cls(factor, lo2, lo2, mult, lo2)
        mid = (lo2 + hi2) / 2
        cand = mid.limit_denominator(den_bound)
        if lo2 < cand <= hi2 and factor(cand) == 0:
            return cls(factor, cand, cand, mult, cand)
        return cls(factor, lo2, hi2, mult)

    @property
    def is_exact(self):
        return self.value is not None

    def approx(self):
        if self.value is not None:
            return float(self.value)
        lo, hi = self.factor.refine_root(self.lo, self.hi, Fraction(1, 2**60))
        if lo == hi:
            return float(lo)
        return float((lo + hi) / 2)

    def key(self):
        return self.value if self.value is not None else self.lo

    def below(self):
        """A rational strictly below the root (and above any smaller root)."""
        return self.value - Fraction(1, 2**40) if self.value is not None else self.lo

    def to_json(self):
        if self.value is not None:
            return _frac_str(self.value)
        return [_frac_str(self.lo), _frac_str(self.hi)]

    def __repr__(self):
        if self.value is not None:
            return f"RealRoot({self.value}, mult={self.mult})"
        return f"RealRoot(({self.lo}, {self.hi}], mult={self.mult})"


# -- integer coefficient helpers ------------------------------------------------
def _sgn(c):
    return (c > 0) - (c < 0)


def _frac_str(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _to_int(p):
    """Integer coefficient list proportional (positively) to ``p``."""
    if not p.coeffs:
        return []
    den = reduce(math.lcm, (c.denominator for c in p.coeffs), 1)
    return [int(c * den) for c in p.coeffs]


def _primitive(a):
    while a and a[-1] == 0:
        a = a[:-1]
    if not a:
        return []
    g = reduce(math.gcd, a)
    if g > 1:
        a = [c // g for c in a]
    return a


def _prem(a, b):
    """Pseudo-remainder of integer polynomials: lc(b)^(da-db+1) * a mod b."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    if e <= 0:
        return a
    for _ in range(e):
        if len(a) - 1 < db:
            a = [c * lb for c in a]
            continue
        la = a[-1]
        shift = len(a) - 1 - db
        a = [c * lb for c in a]
        for j, bj in enumerate(b):
            a[shift + j] -= la * bj
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def _int_sign_at(a, x):
    if x == math.inf:
        return _sgn(a[-1])
    if x == -math.inf:
        return _sgn(a[-1]) * (-1 if (len(a) - 1) % 2 else 1)
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    # homogeneous Horner: sum a_k n^k d^(m-k), all in integers
    acc = 0
    dp = 1
    for c in reversed(a):
        acc = acc * n + c * dp
        dp *= d
    return _sgn(acc)


def _variations(chain, x):
    signs = [s for s in (_int_sign_at(p, x) for p in chain) if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


# -- rational maps ------------------------------------------------------------
class RationalMap:
    """Reduced rational map ``num/den`` acting on the projective line."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce_=True):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = Polynomial((1,)) if den is None else (den if isinstance(den, Polynomial) else Polynomial(den))
        if den.is_zero():
            raise DivisionByZeroPolynomial("rational map with zero denominator")
        if reduce_:
            g = num.gcd(den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            c = den.lc
            num, den = num * (1 / c), den * (1 / c)
        self.num = num
        self.den = den

    @classmethod
    def identity(cls):
        return cls(Polynomial.x())

    @classmethod
    def moebius(cls, a, b, c, d):
        """x -> (a x + b) / (c x + d)."""
        if Fraction(a) * d - Fraction(b) * c == 0:
            raise ValueError("degenerate Moebius map")
        return cls(Polynomial((b, a)), Polynomial((d, c)))

    @property
    def degree(self):
        return max(self.num.degree, self.den.degree)

    def __eq__(self, other):
        return isinstance(other, RationalMap) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalMap({self.num} / {self.den})"

    def is_reduced(self):
        return self.num.gcd(self.den).degree <= 0

    def value_at_infinity(self):
        dn, dd = self.num.degree, self.den.degree
        if dn > dd:
            return INF
        if dn < dd:
            return Fraction(0)
        return self.num.lc / self.den.lc

    def __call__(self, x):
        """Exact projective evaluation at a rational point or INF."""
        if x is INF:
            return self.value_at_infinity()
        x = _frac(x)
        n, d = self.num(x), self.den(x)
        if d == 0:
            if n == 0:
                raise IndeterminateForm(f"0/0 at x={x}; map is not reduced")
            return INF
        return n / d

    def eval_float(self, x):
        if x is INF:
            v = self.value_at_infinity()
            return v if v is INF else float(v)
        n, d = self.num.eval_float(x), self.den.eval_float(x)
        if d == 0.0:
            return INF
        return n / d

    def derivative_numerator(self):
        """``num' den - num den'``; the derivative is this over ``den^2``."""
        return self.num.derivative() * self.den - self.num * self.den.derivative()

    def derivative(self, x):
        """Derivative in the affine chart at a finite non-pole point; exact for
        rational ``x``."""
        if isinstance(x, Rational):
            x = _frac(x)
            d = self.den(x)
            if d == 0:
                raise ZeroDivisionError(f"pole at x={x}")
            return self.derivative_numerator()(x) / (d * d)
        d = self.den.eval_float(x)
        return self.derivative_numerator().eval_float(x) / (d * d)

    def homogeneous(self):
        """(N, D, m): numerator and denominator homogenized to the common degree m."""
        return self.num, self.den, self.degree

    def compose(self, inner):
        """``self(inner(x))``."""
        m = self.degree
        p, q = inner.num, inner.den
        num = Polynomial()
        den = Polynomial()
        qpow = [Polynomial((1,))]
        for _ in range(m):
            qpow.append(qpow[-1] * q)
        ppow = Polynomial((1,))
        for k in range(m + 1):
            term = ppow * qpow[m - k]
            if k < len(self.num.coeffs):
                num = num + term * self.num.coeffs[k]
            if k < len(self.den.coeffs):
                den = den + term * self.den.coeffs[k]
            ppow = ppow * p
        return RationalMap(num, den)

    def __neg__(self):
        return RationalMap(-self.num, self.den)

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(Polynomial.from_json(obj["num"]), Polynomial.from_json(obj["den"]))
