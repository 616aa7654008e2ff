"""Ramified lifts of affine maps through certified covers, evaluated numerically.

For a cover ``pi`` over the base point ``p`` and an affine map ``f`` fixing
``p``, the lift ``f^ = f^(pi, zeta)`` is the unique homeomorphism with
``pi o f^ = f o pi`` that moves fiber points and edges like ``zeta``.  On an
edge ``e`` the lift is ``(pi restricted to zeta(e))^-1 o f o pi``, so every
evaluation is a one-dimensional monotone root solve on a known arc.

Points are handled in the coordinate ``t = u - 1/2 (mod 1)``, in which
``x = tan(pi (t - 1/2))``: ``t = 0`` is infinity and increasing ``t`` is
increasing ``x``, so the fiber points sit at increasing ``t`` in index order.
Covers over a finite base ``b`` are first composed with ``y -> -1/(y - b)``
so that the base becomes infinity; affine maps fixing ``b`` become linear.
"""

import math
import os
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .bsgroup import AffineMap
from .circle import INF, CirclePoint, circle_dist
from .errors import (
    BracketingFailed,
    ChartUnavailable,
    HomConstraintViolated,
    NotAdmissible,
    OrientationReversing,
    OutOfDomain,
)
from .polynomial import Polynomial, RationalMap
from .covers import signature_of as signature_of_cover
from .signatures import DihedralElement, act_hash, delta

DEFAULT_BITS = 53
PRECISE_BITS = 113
SCHWARZIAN_BITS = PRECISE_BITS
PRECISION_GUARD = 1e-12  # t-error above which a float evaluation is redone at PRECISE_BITS


def precision_bits():
    raw = os.environ.get("RAMLIFT_PRECISION_BITS", str(DEFAULT_BITS))
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(f"RAMLIFT_PRECISION_BITS must be an integer, got {raw!r}") from exc
    if bits < 24:
        raise ValueError("RAMLIFT_PRECISION_BITS must be at least 24")
    return bits


class _Float:
    """Scalar backend over Python floats."""

    bits = 53
    pi = math.pi
    eps = 2.0**-52
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)
    tan = staticmethod(math.tan)
    atan = staticmethod(math.atan)
    atan2 = staticmethod(math.atan2)

    @staticmethod
    def num(q):
        return float(q)

    @staticmethod
    def floor(x):
        return math.floor(x)


class _MP:
    """Scalar backend over mpmath at a fixed working precision."""

    def __init__(self, bits):
        self.ctx = mpmath.MPContext()
        self.ctx.prec = bits
        self.bits = bits
        self.pi = self.ctx.pi
        self.eps = self.ctx.mpf(2) ** (1 - bits)
        self.sin, self.cos, self.tan = self.ctx.sin, self.ctx.cos, self.ctx.tan
        self.atan, self.atan2 = self.ctx.atan, self.ctx.atan2

    def num(self, q):
        if isinstance(q, Fraction):
            return self.ctx.mpf(q.numerator) / q.denominator
        return self.ctx.mpf(q)

    def floor(self, x):
        return int(self.ctx.floor(x))


def _backend(bits):
    return _Float() if bits <= 53 else _MP(bits)


def _horner(coeffs, z):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def t_of_x(x):
    """Exact-ish t-coordinate of a projective point (float)."""
    if x is INF:
        return 0.0
    return 0.5 + math.atan(float(x)) / math.pi


def _point_t(p):
    if isinstance(p, CirclePoint):
        return (p.u - 0.5) % 1.0
    return float(p) % 1.0


def _to_point(t, exact=None):
    if exact is not None:
        return CirclePoint.from_x(exact)
    return CirclePoint((t + 0.5) % 1.0)


class _Chart:
    """One affine chart of the source circle with the cover's numerator and a
    factored denominator ``lead * prod (z - z_q)^s * rest(z)``."""

    def __init__(self, rmap, fiber_coords, bk):
        self.num = [bk.num(c) for c in rmap.num.coeffs]
        den = rmap.den
        roots = []
        for zq, s in fiber_coords:
            lin = Polynomial((-zq, 1)) ** s
            qd, r = divmod(den, lin)
            if r.is_zero():
                den = qd
                roots.append((bk.num(zq), s, zq))
        self.roots = [(z, s) for z, s, _ in roots]
        self.exact_roots = {zq: s for _, s, zq in roots}
        self.rest = [bk.num(c) for c in den.coeffs]
        self.rest_poly = den
        self.rmap = rmap
        W = rmap.derivative_numerator()
        self.dnum = [bk.num(c) for c in W.coeffs]
        self.full_den = [bk.num(c) for c in rmap.den.coeffs]

    def nd(self, z):
        n = _horner(self.num, z)
        d = _horner(self.rest, z)
        for zq, s in self.roots:
            d = d * (z - zq) ** s
        return n, d

    def nd_bound(self, z):
        """Horner running-error scale: the same sums taken over absolute values."""
        az = abs(z)
        nb = _horner([abs(c) for c in self.num], az)
        db = _horner([abs(c) for c in self.rest], az)
        for zq, s in self.roots:
            db = db * abs(z - zq) ** s
        return nb, db

    def dvalue(self, z):
        """d(value)/dz = W / D^2 (callers keep away from poles)."""
        d = _horner(self.full_den, z)
        return _horner(self.dnum, z) / (d * d)


class NumericCover:
    """Floating (or mpmath) evaluation data for a certified cover, normalised to base infinity."""

    def __init__(self, cover, bits=DEFAULT_BITS):
        self.cover = cover
        self.bits = bits
        bk = self.bk = _backend(bits)
        if cover.base is INF:
            self.to_inf = None
            rmap = cover.map
        else:
            b = cover.base
            self.to_inf = RationalMap.moebius(0, -1, 1, -b)
            rmap = self.to_inf.compose(cover.map)
        self.rmap = rmap
        self.d = cover.d
        self.orders = cover.orders
        self.orient = cover.orientations
        fiber_x = []
        for q in cover.fiber:
            fiber_x.append(q.value if q.is_exact else None)
        self.fiber_exact = fiber_x
        ts = []
        for q in cover.fiber:
            if q.is_infinite:
                ts.append(bk.num(1))
            elif q.is_exact:
                ts.append(bk.num(Fraction(1, 2)) + bk.atan(bk.num(q.value)) / bk.pi)
            else:
                ts.append(bk.num(Fraction(1, 2)) + bk.atan(bk.num(Fraction(q.approx()))) / bk.pi)
        self.fiber_t = ts
        # chart A: z = x near 0; chart B: z = w = -1/x = tan(pi t) near infinity
        coords_a = [(q.value, q.order) for q in cover.fiber if q.is_exact and not q.is_infinite]
        coords_b = []
        for q in cover.fiber:
            if q.is_infinite:
                coords_b.append((Fraction(0), q.order))
            elif q.is_exact and q.value != 0:
                coords_b.append((-1 / q.value, q.order))
        self.chart_a = _Chart(rmap, coords_a, bk)
        self.chart_b = _Chart(rmap.compose(RationalMap.moebius(0, -1, 1, 0)), coords_b, bk)
        self._K = [self._pole_constant(i) for i in range(self.d)]

    # -- coordinates -----------------------------------------------------------
    def chart(self, t):
        bk = self.bk
        t = t - bk.floor(t)
        if 0.25 <= t <= 0.75:
            return self.chart_a, bk.tan(bk.pi * (t - 0.5)), t
        return self.chart_b, bk.tan(bk.pi * t), t

    def nd(self, t):
        ch, z, _ = self.chart(t)
        return ch.nd(z)

    def value(self, t):
        n, d = self.nd(t)
        if d == 0:
            return INF
        return n / d

    def value_t(self, t):
        """The value pi(t) in the t-coordinate of the target circle."""
        n, d = self.nd(t)
        bk = self.bk
        # t = 1/2 + atan(v)/pi, computed projectively to survive v = infinity
        if d < 0:
            n, d = -n, -d
        return (bk.num(Fraction(1, 2)) + bk.atan2(n, d) / bk.pi) % 1

    def value_error(self, t):
        """A priori bound on the rounding error of ``value(t)``."""
        ch, z, _ = self.chart(t)
        n, d = ch.nd(z)
        nb, db = ch.nd_bound(z)
        k = 2 * (len(ch.num) + len(ch.rest) + sum(s for _, s in ch.roots)) + 4
        return k * self.bk.eps * (nb + abs(n / d) * db) / abs(d)

    def dvalue_dt(self, t):
        ch, z, _ = self.chart(t)
        return ch.dvalue(z) * self.bk.pi * (1 + z * z)

    def edge_of(self, t):
        """Index of the edge containing the non-fiber point ``t``; None on a fiber point."""
        t = t - self.bk.floor(t)
        if t == 0:
            t = t + 1
        ts = self.fiber_t
        for i, ti in enumerate(ts):
            if t == ti:
                return None
            if t < ti:
                return (i - 1) % self.d
        return self.d - 1

    def fiber_index(self, t):
        t = t - self.bk.floor(t)
        if t == 0:
            t = t + 1
        for i, ti in enumerate(self.fiber_t):
            if t == ti:
                return i
        return None

    def edge_bounds(self, j):
        lo = self.fiber_t[j]
        hi = self.fiber_t[(j + 1) % self.d]
        if j == self.d - 1:
            hi = hi + 1
        return lo, hi

    # -- solving pi(y) = c on an edge ------------------------------------------
    def _g(self, t, c, o):
        n, d = self.nd(t)
        sd = 1 if d > 0 else -1
        return o * (n - c * d) * sd / (abs(n) + (abs(c) + 1) * abs(d))

    def solve_edge(self, j, c, tol=None):
        """The unique t in edge j with pi(t) = c (c finite).

        Safeguarded secant on the bounded residual ``_g``, which tends to -1
        and +1 at the two ends of the edge: secant steps from the last two
        iterates when they land inside the bracket, regula falsi otherwise,
        and bisection whenever three steps fail to halve the bracket.
        """
        bk = self.bk
        lo, hi = self.edge_bounds(j)
        o = self.orient[j]
        a, b = lo, hi
        ga, gb = bk.num(-1), bk.num(1)
        tol = tol if tol is not None else 4 * bk.eps
        hist = []
        widths = [b - a]
        for _ in range(4 * bk.bits + 50):
            if b - a <= tol * max(1, abs(a)):
                break
            x = None
            if len(widths) > 3 and widths[-1] > widths[-4] / 2:
                x = (a + b) / 2
                widths = [b - a]
            elif len(hist) == 2 and hist[0][1] != hist[1][1]:
                (x0, g0), (x1, g1) = hist
                x = x1 - g1 * (x1 - x0) / (g1 - g0)
            if x is None or not a < x < b:
                x = b - gb * (b - a) / (gb - ga)
                if not a < x < b:
                    x = (a + b) / 2
            gx = self._g(x, c, o)
            # a tiny residual alone is not enough: where pi is flat it
            # leaves t far from converged, so only an exact zero stops early
            if gx == 0:
                return x
            if gx < 0:
                a, ga = x, gx
            else:
                b, gb = x, gx
            hist = (hist + [(x, gx)])[-2:]
            widths.append(b - a)
        else:
            raise BracketingFailed(f"no convergence on edge {j} for value {c}")
        return a if abs(ga) < abs(gb) else b

    # -- local data at fiber points ---------------------------------------------
    def _pole_constant(self, i):
        """K with pi ~ K (t - t_i)^-s near fiber point i (value coordinate real line)."""
        q = self.cover.fiber[i]
        s = q.order
        bk = self.bk
        if q.is_infinite:
            ch, zq = self.chart_b, Fraction(0)
        else:
            xq = q.value if q.is_exact else Fraction(q.approx())
            if abs(xq) <= 1:
                ch, zq = self.chart_a, xq
            else:
                ch, zq = self.chart_b, -1 / xq
        den = ch.rmap.den
        deriv = den
        fact = 1
        for k in range(s):
            deriv = deriv.derivative()
            fact *= k + 1
        if q.is_exact:
            A = ch.rmap.num(zq) / (deriv(zq) / fact)
            A = bk.num(A)
        else:
            A = _horner(ch.num, bk.num(zq)) / (_horner([bk.num(c) for c in deriv.coeffs], bk.num(zq)) / fact)
        zqf = bk.num(zq)
        return A / (bk.pi * (1 + zqf * zqf)) ** s

    def pole_constant(self, i):
        return self._K[i]


@lru_cache(maxsize=256)
def numeric_cover(cover, bits=DEFAULT_BITS):
    return NumericCover(cover, bits)


def _normalized_base(cover, f):
    """The affine map conjugated to base infinity as floats-or-exact (c, d)."""
    if cover.base is INF:
        return f.c, f.d
    b = cover.base
    if f.c * b + f.d != b:
        raise NotAdmissible(f"base map {f} does not fix the base point {b}")
    return 1 / Fraction(f.c) if f.exact else 1.0 / f.c, 0


def admissible(zeta, cover, base):
    """True when the lift of ``base`` acting on the fiber like ``zeta`` exists."""
    if zeta.d != cover.d:
        return False
    if cover.base is not INF and base.c * cover.base + base.d != cover.base:
        return False
    s = signature_of_cover(cover)
    if act_hash(zeta, s) != s:
        return False
    return delta(s, zeta) == base.orientation


class LiftedMap:
    """The lift ``f^(pi, zeta)`` of an affine map ``base`` through ``cover``."""

    def __init__(self, cover, base, zeta, bits=None):
        if not isinstance(base, AffineMap):
            base = AffineMap(*base)
        self.cover = cover
        self.base = base
        self.zeta = zeta
        self.bits = precision_bits() if bits is None else bits
        if not admissible(zeta, cover, base):
            raise NotAdmissible(
                f"admissibility fails: no lift of {base.to_json()} acting as {zeta} on {signature_of_cover(cover)}"
            )
        self.num = numeric_cover(cover, self.bits)
        c, d = _normalized_base(cover, base)
        bk = self.num.bk
        self.fc = bk.num(Fraction(c)) if isinstance(c, (int, Fraction)) else bk.num(c)
        self.fd = bk.num(Fraction(d)) if isinstance(d, (int, Fraction)) else bk.num(d)
        self._hi = None

    @property
    def orientation(self):
        """+1 when the lift preserves the circle's orientation."""
        return -1 if self.zeta.flip else 1

    def compose(self, other):
        """self o other, as the lift of the composed base map."""
        return LiftedMap(self.cover, self.base.compose(other.base), self.zeta * other.zeta, self.bits)

    def inverse(self):
        return LiftedMap(self.cover, self.base.inverse(), self.zeta.inverse(), self.bits)

    # -- evaluation in t --------------------------------------------------------
    def eval_t(self, t):
        nc = self.num
        i = nc.fiber_index(t)
        if i is not None:
            return nc.fiber_t[self.zeta.vertex_map(i)] % 1
        n, d = nc.nd(t)
        if d == 0:
            # numerically on a fiber point: snap to the nearest one
            j = min(range(nc.d), key=lambda k: circle_dist(float(nc.fiber_t[k]), float(t)))
            return nc.fiber_t[self.zeta.vertex_map(j)] % 1
        c = self.fc * (n / d) + self.fd
        e = nc.edge_of(t)
        y = nc.solve_edge(self.zeta.edge_map(e), c) % 1
        if self.bits <= 53 and self._ill_conditioned(t, y):
            hi = self._precise()
            return float(hi.eval_t(hi.num.bk.num(t)))
        return y

    def _ill_conditioned(self, t, y):
        """True when rounding in pi, pushed through the flat spots of pi, may move y past the guard."""
        nc = self.num
        try:
            err = abs(self.fc) * nc.value_error(t) + nc.value_error(y)
            slope = abs(nc.dvalue_dt(y))
        except ZeroDivisionError:
            return True
        return not err < PRECISION_GUARD * slope

    def _precise(self):
        if self.bits >= PRECISE_BITS:
            return self
        if self._hi is None:
            self._hi = LiftedMap(self.cover, self.base, self.zeta, PRECISE_BITS)
        return self._hi

    def eval_slope(self, t):
        """(f^(t), |f^'(t)|), the slope taken from the chain rule at no extra solve."""
        nc = self.num
        i = nc.fiber_index(t)
        y = self.eval_t(t)
        if i is not None:
            return y, abs(self.fiber_derivative_t(i))
        try:
            return y, abs(self.fc * nc.dvalue_dt(t) / nc.dvalue_dt(y))
        except ZeroDivisionError:
            return y, math.inf

    def __call__(self, p):
        """Evaluate at a CirclePoint; fiber points map exactly to ``zeta(q_i)``."""
        nc = self.num
        if isinstance(p, CirclePoint) and p.exact is not None:
            for i, xq in enumerate(nc.fiber_exact):
                if xq is not None and (xq is p.exact or (xq is not INF and p.exact is not INF and xq == p.exact)):
                    j = self.zeta.vertex_map(i)
                    q = self.cover.fiber[j]
                    return CirclePoint.from_x(q.value) if q.is_exact else _to_point(float(nc.fiber_t[j]))
        t = _point_t(p)
        return _to_point(float(self.eval_t(nc.bk.num(t))))

    # -- derivatives ------------------------------------------------------------
    def derivative_t(self, t):
        """Derivative in the t (equivalently u) chart."""
        nc = self.num
        i = nc.fiber_index(t)
        if i is not None:
            return self.fiber_derivative_t(i)
        y = self.eval_t(t)
        if nc.fiber_index(y) is not None:
            raise OutOfDomain("image is a fiber point")
        return self.fc * nc.dvalue_dt(t) / nc.dvalue_dt(y)

    def fiber_derivative_t(self, i):
        nc = self.num
        j = self.zeta.vertex_map(i)
        s = nc.orders[i]
        ratio = nc.pole_constant(j) / (self.fc * nc.pole_constant(i))
        # the lift multiplies local pole coordinates: K_j dt'^-s = c K_i dt^-s
        r = abs(ratio) ** (nc.bk.num(1) / s)
        return self.orientation * r

    def derivative(self, p, chart="x"):
        """f^'(p); closed form at fiber points, chain rule elsewhere."""
        nc = self.num
        t = nc.bk.num(_point_t(p)) if isinstance(p, CirclePoint) else nc.bk.num(p)
        if isinstance(p, CirclePoint) and p.exact is not None:
            for i, xq in enumerate(nc.fiber_exact):
                if xq is not None and xq == p.exact:
                    t = nc.fiber_t[i]
        dt = self.derivative_t(t)
        if chart in ("t", "u"):
            return dt
        if chart != "x":
            raise ValueError(f"unknown chart {chart!r}")
        y = self.eval_t(t)
        bk = nc.bk
        x0 = bk.tan(bk.pi * (t - 0.5))
        x1 = bk.tan(bk.pi * (y - 0.5))
        if (t % 1) == 0 or (y % 1) == 0:
            raise OutOfDomain("derivative in the x chart is undefined at infinity")
        return dt * (1 + x1 * x1) / (1 + x0 * x0)


def lift_eval(L, p, tol=None):
    return L(p)


def lift_derivative(L, p, chart="x"):
    return L.derivative(p, chart)


def grid(size=512, seed=None):
    """Sample t-values: a centred uniform grid, or sorted uniform draws when seeded."""
    if size < 16:
        raise ValueError("grid needs at least 16 points")
    if seed is None:
        return [(k + 0.5) / size for k in range(size)]
    rng = np.random.default_rng(seed)
    return sorted(float(v) for v in rng.random(size))


def _tdist(a, b):
    return circle_dist(float(a) % 1.0, float(b) % 1.0)


def square_residual(L, ts=None):
    """sup over the grid of dist(pi(f^(x)), f(pi(x))) in the target's u metric."""
    nc = L.num
    bk = nc.bk
    worst = 0.0
    for t in ts or grid():
        t = bk.num(t)
        y = L.eval_t(t)
        v = nc.value(t)
        fv = INF if v is INF else L.fc * v + L.fd
        lhs = nc.value_t(y)
        rhs = 0.0 if fv is INF else (0.5 + math.atan(float(fv)) / math.pi)
        worst = max(worst, _tdist(lhs, rhs))
    return worst


def eval_chain(lifts, t):
    """Apply ``lifts`` in order starting from t.

    Rounding each intermediate point to a double is harmless unless a later
    map expands strongly there, which happens where a cover is very flat.
    The amplified rounding is tracked through the slopes, and when it could
    exceed PRECISION_GUARD the whole chain is redone at 113 bits.
    """
    if all(L.bits > 53 for L in lifts):
        y = lifts[0].num.bk.num(t)
        for L in lifts:
            y = L.eval_t(y)
        return y
    y, err = t, 0.0
    for L in lifts:
        y, slope = L.eval_slope(y)
        err = float(slope) * (err + 2.0**-53)
    if err < PRECISION_GUARD:
        return y
    hi = [L._precise() for L in lifts]
    y = hi[0].num.bk.num(t)
    for L in hi:
        y = L.eval_t(y)
    return float(y)


def compose_check(L1, L2, ts=None):
    """sup distance between L2 o L1 and the direct lift of (f2 o f1, zeta2 zeta1)."""
    direct = L2.compose(L1)
    bk = L1.num.bk
    worst = 0.0
    for t in ts or grid():
        t = bk.num(t)
        worst = max(worst, _tdist(eval_chain([L1, L2], t), direct.eval_t(t)))
    return worst


class LiftedRep:
    """Lift of the standard representation of BS(1,n) through a cover over infinity."""

    def __init__(self, n, cover, zeta_a, zeta_b, bits=None):
        if n < 2:
            raise ValueError("n must be at least 2")
        d = cover.d
        if zeta_a.d != d or zeta_b.d != d:
            raise HomConstraintViolated("hom images live in the wrong dihedral group")
        if zeta_a * zeta_b * zeta_a.inverse() != zeta_b**n:
            raise HomConstraintViolated(
                f"zeta_a zeta_b zeta_a^-1 = {zeta_a * zeta_b * zeta_a.inverse()} but zeta_b^{n} = {zeta_b ** n}"
            )
        if cover.base is not INF:
            raise NotAdmissible("BS(1,n) lifts need a cover over infinity")
        self.n = n
        self.cover = cover
        self.zeta_a = zeta_a
        self.zeta_b = zeta_b
        self.lift_a = LiftedMap(cover, AffineMap(Fraction(n), Fraction(0)), zeta_a, bits)
        self.lift_b = LiftedMap(cover, AffineMap(Fraction(1), Fraction(1)), zeta_b, bits)

    @classmethod
    def trivial(cls, n, cover, bits=None):
        e = DihedralElement.identity(cover.d)
        return cls(n, cover, e, e, bits)


def relation_residual(R, ts=None):
    """sup over the grid of dist(a^ b^ (x), b^^n a^ (x))."""
    fa, fb = R.lift_a, R.lift_b
    bk = fa.num.bk
    worst = 0.0
    for t in ts or grid():
        t = bk.num(t)
        lhs = eval_chain([fb, fa], t)
        rhs = eval_chain([fa] + [fb] * R.n, t)
        worst = max(worst, _tdist(lhs, rhs))
    return worst


# -- rotation numbers ------------------------------------------------------------
def rotation_number(L, mode="combinatorial", iterations=100_000, t0=0.123456789):
    """Rotation number of an orientation-preserving lift, as a value mod 1.

    The numeric mode averages the ccw displacement ``(f(t) - t) mod 1`` along
    one orbit.  Without fixed points that displacement is a continuous lift of
    ``f`` to the line, and with fixed points the rotation number is 0, which
    the average then represents up to an integer.
    """
    if L.zeta.flip:
        raise OrientationReversing("rotation numbers are defined for orientation-preserving lifts")
    if mode == "combinatorial":
        d = L.cover.d
        return Fraction((-L.zeta.rot) % d, d)
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if iterations < 1:
        raise ValueError("iterations must be positive")
    total = 0.0
    t = L.num.bk.num(t0)
    for _ in range(iterations):
        y = L.eval_t(t)
        total += float(y - t) % 1.0
        t = y
    return (total / iterations) % 1.0


def rotation_distance(a, b):
    """Distance between two rotation numbers on R/Z."""
    return circle_dist(float(a) % 1.0, float(b) % 1.0)


# -- inner spectral radius ----------------------------------------------------------
def sigma_closed_form(R):
    return (1 / R.n) ** (1 / max(R.cover.orders))


def _wrap(x):
    return (x + 0.5) % 1.0 - 0.5


def _iterate(L, t, k):
    for _ in range(k):
        t = L.eval_t(t)
    return t


def _fd_derivative(func, t, h=1e-3):
    """Central difference with one Richardson step, on a circle-valued map."""

    def cd(hh):
        return _wrap(float(func(t + hh)) - float(func(t - hh))) / (2 * hh)

    d1, d2 = cd(h), cd(h / 2)
    return (4 * d2 - d1) / 3


def periodic_points(R, newton_steps=60):
    """Periodic points of a^ found by Newton from fiber and edge seeds, with multipliers."""
    fa = R.lift_a
    nc = fa.num
    k = R.zeta_a.order()
    seeds = [("fiber", float(t) % 1.0) for t in nc.fiber_t]
    # the other periodic points lie over the fixed point 0 of x -> n x
    for j in range(nc.d):
        seeds.append(("edge", float(nc.solve_edge(j, nc.bk.num(0))) % 1.0))
    out = []
    for kind, t in seeds:
        # fiber points are fixed by a^k exactly; edge seeds need Newton on a^k(t) - t
        if kind == "edge":
            for _ in range(newton_steps):
                F = _wrap(float(_iterate(fa, t, k)) - t)
                if abs(F) < 1e-14:
                    break
                dF = _fd_derivative(lambda s: _iterate(fa, s, k), t, 1e-6) - 1
                if dF == 0:
                    break
                t = (t - F / dF) % 1.0
            else:
                continue
        mult = _fd_derivative(lambda s: _iterate(fa, s, k), t)
        out.append({"t": t, "kind": kind, "period_bound": k, "multiplier": mult})
    return out


def inner_spectral_radius(R, numeric=True):
    """Closed form (1/n)^(1/max s) and, optionally, the periodic-point estimate."""
    closed = sigma_closed_form(R)
    if not numeric:
        return closed, None
    k = R.zeta_a.order()
    best = None
    for p in periodic_points(R):
        m = abs(p["multiplier"])
        if m <= 1 + 1e-9:
            val = m ** (1 / k)
            best = val if best is None else max(best, val)
    return closed, best


def fiber_derivative_report(L):
    """Closed-form derivative at each fiber point against (1/lambda)^(1/s) (zeta = id)."""
    nc = L.num
    lam = float(L.base.c) if L.cover.base is INF else float(L.base.c)
    rows = []
    for i, q in enumerate(L.cover.fiber):
        got = float(L.fiber_derivative_t(i))
        expected = (1 / lam) ** (1 / q.order) if L.zeta.is_identity and lam > 0 else None
        rows.append({"q": q.q_json(), "s": q.order, "expected": expected, "got": got})
    return rows


# -- local flow model ----------------------------------------------------------------
def local_flow_eval(t, x, s):
    """G^t(x) = x / (1 + t x^s)^(1/s)."""
    if s < 1 or int(s) != s:
        raise ValueError("s must be a positive integer")
    base = 1 + t * x**s
    if base <= 0:
        raise OutOfDomain(f"1 + t x^s = {base} <= 0 outside the model's domain")
    return x / base ** (1.0 / s)


# -- Schwarzian -----------------------------------------------------------------------
def schwarzian(G, y, h):
    """Finite-difference Schwarzian G'''/G' - 3/2 (G''/G')^2 with 7-point stencils."""
    f = [G(y + k * h) for k in range(-3, 4)]
    d1 = (-f[0] + 9 * f[1] - 45 * f[2] + 45 * f[4] - 9 * f[5] + f[6]) / (60 * h)
    d2 = (2 * f[0] - 27 * f[1] + 270 * f[2] - 490 * f[3] + 270 * f[4] - 27 * f[5] + 2 * f[6]) / (180 * h * h)
    d3 = (f[0] - 8 * f[1] + 13 * f[2] - 13 * f[4] + 8 * f[5] - f[6]) / (8 * h**3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def _rational_derivative(R):
    return RationalMap(R.derivative_numerator(), R.den * R.den)


def exact_schwarzian(R, y):
    """Exact Schwarzian of a rational map at a rational point."""
    d1 = _rational_derivative(R)
    d2 = _rational_derivative(d1)
    d3 = _rational_derivative(d2)
    a, b, c = d1(y), d2(y), d3(y)
    return c / a - Fraction(3, 2) * (b / a) ** 2


def _local_chart_map(L, i):
    """G(y) = -1/pi(f^(x)) where x is the point of edge i near q_i with -1/pi(x) = y."""
    nc = L.num
    o = nc.orient[i]

    def G(y):
        c = -1 / y
        x = nc.solve_edge(i, c)
        xp = L.eval_t(x)
        v = nc.value(xp)
        return -1 / v

    return G, o


def schwarzian_check(L, i, radius=0.05, samples=20):
    """max |S(G)| for the de-ramified local map of a lifted translation at fiber point i."""
    if L.base.c != 1 or L.cover.base is not INF:
        raise ChartUnavailable("the local chart is set up for lifted translations over infinity")
    if not 0 <= i < L.cover.d:
        raise ChartUnavailable(f"no fiber point with index {i}")
    if L.cover.map.degree == 1:
        # Moebius cover: the lift is pi^-1 o f o pi exactly, so G is an exact Moebius map
        pi_map = L.cover.map
        inv = _moebius_inverse(pi_map)
        f = RationalMap(Polynomial((Fraction(L.base.d), Fraction(L.base.c))))
        lift = inv.compose(f).compose(pi_map)
        phi = RationalMap.moebius(0, -1, 1, 0).compose(pi_map)
        G = phi.compose(lift).compose(_moebius_inverse(phi))
        ys = [Fraction(k + 1, samples) * Fraction(radius) for k in range(samples)]
        return float(max(abs(exact_schwarzian(G, y)) for y in ys))
    # the exact answer is 0, so the stencil runs on a 113-bit evaluation where
    # a small step leaves neither truncation nor rounding error visible
    bits = max(L.bits, SCHWARZIAN_BITS)
    Lh = L if L.bits == bits else LiftedMap(L.cover, L.base, L.zeta, bits)
    bk = Lh.num.bk
    G, o = _local_chart_map(Lh, i)
    h = bk.num(radius) * bk.num(Fraction(1, 10**5))
    worst = 0.0
    for k in range(samples):
        y = o * bk.num(radius) * (bk.num(Fraction(1, 2)) + bk.num(Fraction(k + 1, 2 * samples)))
        worst = max(worst, abs(float(schwarzian(G, y, h))))
    return worst


def _moebius_inverse(m):
    b, a = (list(m.num.coeffs) + [Fraction(0)] * 2)[:2]
    d, c = (list(m.den.coeffs) + [Fraction(0)] * 2)[:2]
    return RationalMap.moebius(d, -b, -c, a)


# -- independent evaluation path ------------------------------------------------------
def _chart_roots(num, den, c, in_chart):
    """Near-real roots of num - c den (float coefficient lists, low degree first) inside one chart.

    The expanded polynomial is badly conditioned next to clustered ramified
    poles, where a real root can come back with a small imaginary part, so
    the filter is loose and callers polish the candidates.
    """
    n = max(len(num), len(den))
    p = np.zeros(n)
    p[: len(num)] += num
    p[: len(den)] -= c * np.asarray(den)
    while n and p[n - 1] == 0:
        n -= 1
    if n < 2:
        return []
    p = p[:n]
    out = []
    for z in np.roots(p[::-1]):
        if abs(z.imag) > 1e-3 * (1 + abs(z.real)) or abs(z.real) > 1 + 1e-3:
            continue
        out.append(in_chart(z.real))
    return out


def _polish(nc, y, tc, steps=30):
    """Newton on value_t(y) = tc in the t chart; None unless it converges."""
    for _ in range(steps):
        try:
            v = float(nc.value(y))
            err = _wrap(float(nc.value_t(y)) - tc)
            if abs(err) < 1e-15:
                return y % 1.0
            slope = float(nc.dvalue_dt(y)) / (math.pi * (1 + v * v))
        except (ZeroDivisionError, TypeError):
            # landed on a pole; step off it
            y = (y + 1e-9) % 1.0
            continue
        if slope == 0 or not math.isfinite(slope):
            return None
        y = (y - err / slope) % 1.0
    return y % 1.0 if abs(_wrap(float(nc.value_t(y)) - tc)) < 1e-12 else None


def lift_by_continuation(L, ts):
    """Evaluate a lift by continuation from the seed q_0 -> zeta(q_0).

    Walking ccw from q_0, each image is the first solution of
    pi(y) = f(pi(x)) met from the previous image in the lift's direction of
    motion, and when the source passes a fiber point the image passes the
    next fiber point.  Inside an edge the image stays inside one target edge,
    where pi is injective, so the choice is forced.  Candidate roots come
    from the companion matrix in two charts and are polished by Newton in the
    t chart; no edge indices are used.
    """
    nc = L.num
    sgn = L.orientation
    ra, rb = nc.chart_a.rmap, nc.chart_b.rmap
    na, da = [float(c) for c in ra.num.coeffs], [float(c) for c in ra.den.coeffs]
    nb, db = [float(c) for c in rb.num.coeffs], [float(c) for c in rb.den.coeffs]
    fiber = sorted(float(t) % 1.0 for t in nc.fiber_t)
    fc, fd = float(L.fc), float(L.fd)

    def ahead(a, b):
        return ((b - a) * sgn) % 1.0

    def preimages(c):
        raw = _chart_roots(na, da, c, lambda x: 0.5 + math.atan(x) / math.pi)
        raw += _chart_roots(nb, db, c, lambda w: (math.atan(w) / math.pi) % 1.0)
        tc = 0.5 + math.atan(c) / math.pi
        roots = []
        for r in raw:
            r = _polish(nc, r, tc)
            if r is not None and all(circle_dist(r, k) > 1e-12 for k in roots):
                roots.append(r)
        return roots

    start = float(nc.fiber_t[0]) % 1.0
    y = float(nc.fiber_t[L.zeta.vertex_map(0)]) % 1.0
    events = [((q - start) % 1.0, 0, q) for q in fiber if q != start]
    events += [((float(t) - start) % 1.0, 1, float(t) % 1.0) for t in ts]
    out = {}
    for off, kind, t in sorted(events):
        if off == 0:
            out[t] = y
            continue
        if kind == 0:
            y = min((q for q in fiber if ahead(y, q) > 1e-15), key=lambda q: ahead(y, q))
            continue
        if t in out:
            continue
        if any(abs(t - q) < 1e-15 for q in fiber):
            y = min(fiber, key=lambda q: ahead(y, q))
        else:
            v = float(nc.value(nc.bk.num(t)))
            cands = [r for r in preimages(fc * v + fd) if ahead(y, r) > 1e-15]
            if not cands:
                raise BracketingFailed(f"continuation lost the branch at t = {t}")
            y = min(cands, key=lambda r: ahead(y, r))
        out[t] = y
    return [out[float(t) % 1.0] for t in ts]
