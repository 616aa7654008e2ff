"""Certified rational ramified covers of the circle RP^1.

A rational map ``pi`` is a ramified cover over a base point ``p`` when the
fiber over ``p`` is nonempty and ``pi`` has no critical points off that
fiber.  Then every open arc between consecutive fiber points is carried
bijectively onto RP^1 minus ``p``.  Certification checks exactly this with
exact arithmetic: the derivative numerator, stripped of its fiber factors,
must have no real roots (Sturm count zero) and the local order at infinity
must be one unless infinity lies in the fiber.

Fiber points are listed in counterclockwise order starting just after
``x = infinity``: ascending ``x``, with infinity last when it is a fiber point.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .circle import INF, u_of_x, x_of_u
from .errors import BasePointNotFixed, ConstructionFailed, MalformedInput, UncertifiedCover
from .polynomial import Polynomial, RationalMap
from .signatures import SignatureVector, group_elements

J_MAP = RationalMap.moebius(0, -1, 1, 0)  # x -> -1/x, an orientation-preserving involution
NEGATE = RationalMap.moebius(-1, 0, 0, 1)


@dataclass(frozen=True)
class FiberPoint:
    """A fiber point with its local order.

    Exact points carry ``value`` (a Fraction or INF).  Irrational points are
    the unique root of the square-free ``factor`` in ``(lo, hi]``.
    """

    order: int
    value: object = None
    lo: Fraction = None
    hi: Fraction = None
    factor: Polynomial = None

    @property
    def is_exact(self):
        return self.value is not None

    @property
    def is_infinite(self):
        return self.value is INF

    def lower(self):
        return self.value if self.is_exact else self.lo

    def upper(self):
        return self.value if self.is_exact else self.hi

    def width(self):
        return 0 if self.is_exact else self.hi - self.lo

    def refined(self):
        lo, hi = self.factor.refine_root(self.lo, self.hi, (self.hi - self.lo) / 2)
        if lo == hi:
            return FiberPoint(self.order, lo)
        return FiberPoint(self.order, None, lo, hi, self.factor)

    def approx(self):
        """Float x-coordinate (``math.inf`` never occurs: INF is returned as is)."""
        if self.value is INF:
            return INF
        if self.is_exact:
            return float(self.value)
        lo, hi = self.factor.refine_root(self.lo, self.hi, Fraction(1, 2**64))
        return float((lo + hi) / 2)

    def u(self):
        return u_of_x(self.approx())

    def q_json(self):
        if self.value is INF:
            return "inf"
        if self.is_exact:
            return _fstr(self.value)
        return [_fstr(self.lo), _fstr(self.hi)]

    def __str__(self):
        if self.is_exact:
            return "inf" if self.value is INF else str(self.value)
        return f"root in ({self.lo}, {self.hi}]"


def _fstr(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class RamifiedCover:
    map: RationalMap
    base: object
    fiber: tuple
    orientations: tuple
    certified: bool
    samples: tuple = field(default=(), compare=False, repr=False)

    @property
    def d(self):
        return len(self.fiber)

    @property
    def orders(self):
        return tuple(q.order for q in self.fiber)

    @property
    def ram_points(self):
        return tuple(q.value if q.is_exact else q for q in self.fiber)

    @property
    def signature(self):
        return signature_of(self)

    def edge_sample(self, i):
        """A rational (or INF) point strictly inside edge ``i`` (from q_i to q_i+1)."""
        return self.samples[i]

    def to_json(self):
        return {
            "base": "inf" if self.base is INF else _fstr(self.base),
            "num": self.map.num.to_json(),
            "den": self.map.den.to_json(),
            "ram": [
                {"q": q.q_json(), "s": q.order, "o": o} for q, o in zip(self.fiber, self.orientations)
            ],
            "certified": self.certified,
        }

    @classmethod
    def from_json(cls, obj):
        """Load and re-certify; stored ramification data must agree with the map."""
        try:
            base = INF if obj["base"] in ("inf", "oo", "infinity") else Fraction(obj["base"])
            rmap = RationalMap(Polynomial.from_json(obj["num"]), Polynomial.from_json(obj["den"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedInput(f"bad cover JSON: {exc}") from exc
        cover = certify(rmap, base)
        stored = obj.get("ram")
        if stored is not None:
            got = [(q.order, o) for q, o in zip(cover.fiber, cover.orientations)]
            want = [(int(r["s"]), int(r["o"])) for r in stored]
            if got != want:
                raise UncertifiedCover(f"stored ramification data {want} disagree with the map {got}")
        return cover


# -- certification ---------------------------------------------------------------
def _fiber_polynomial(rmap, base):
    return rmap.den if base is INF else rmap.num - rmap.den * base


def _order_at_infinity(rmap, value):
    """Local order of the map at x = infinity, where it takes ``value``."""
    if value is INF:
        return rmap.num.degree - rmap.den.degree
    return rmap.den.degree - (rmap.num - rmap.den * value).degree


def _separate(points):
    """Refine isolating intervals until consecutive points are strictly separated."""
    points = list(points)
    while True:
        points.sort(key=lambda q: q.lower())
        for i in range(len(points) - 1):
            p, q = points[i], points[i + 1]
            if not p.upper() < q.lower():
                if p.width() >= q.width():
                    points[i] = p.refined()
                else:
                    points[i + 1] = q.refined()
                break
        else:
            return points


def _simple_between(lo, hi):
    """A rational strictly inside (lo, hi) with small denominator."""
    mid = (lo + hi) / 2
    width = hi - lo
    den = 1
    while True:
        cand = mid.limit_denominator(den)
        if lo < cand < hi:
            return cand
        if den > width.denominator * 4 + 4:
            return mid
        den *= 2


def _analyze(rmap, base):
    """Return (cover, None) when ``rmap`` is a ramified cover over ``base``, else (None, reason)."""
    if rmap.degree < 1:
        return None, "constant map"
    F = _fiber_polynomial(rmap, base)
    finite = []
    if not F.is_zero():
        for r in F.real_roots():
            if r.is_exact:
                finite.append(FiberPoint(r.mult, r.value))
            else:
                finite.append(FiberPoint(r.mult, None, r.lo, r.hi, r.factor))
    v_inf = rmap.value_at_infinity()
    at_inf = None
    inf_order = _order_at_infinity(rmap, v_inf)
    if v_inf is INF and base is INF or (v_inf is not INF and base is not INF and v_inf == base):
        at_inf = FiberPoint(inf_order, INF)
    elif inf_order != 1:
        return None, f"critical point of order {inf_order} at infinity off the fiber"
    finite = _separate(finite)
    fiber = finite + ([at_inf] if at_inf else [])
    if not fiber:
        return None, "empty fiber"
    W = rmap.derivative_numerator()
    if W.is_zero():
        return None, "derivative vanishes identically"
    if finite:
        G = F.squarefree_part()
        while True:
            g = W.gcd(G)
            if g.degree <= 0:
                break
            W = W.exact_div(g)
    if W.degree > 0 and W.sturm_count() != 0:
        return None, f"{W.sturm_count()} critical point(s) off the fiber"

    # one sample point per edge; edge i runs counterclockwise from q_i to q_{i+1}
    d = len(fiber)
    samples = []
    for i in range(d):
        p, q = fiber[i], fiber[(i + 1) % d]
        if d == 1:
            samples.append(Fraction(0) if p.is_infinite else p.upper() + 1)
        elif q.is_infinite:
            samples.append(p.upper() + 1)
        elif p.is_infinite:
            samples.append(q.lower() - 1)
        elif i == d - 1:
            samples.append(p.upper() + 1)
        else:
            samples.append(_simple_between(p.upper(), q.lower()))
    dnum = rmap.derivative_numerator()
    orientations = []
    for x in samples:
        sgn = dnum.sign_at(x)
        if sgn == 0:
            return None, f"derivative vanishes at edge sample {x}"
        orientations.append(sgn)
    cover = RamifiedCover(rmap, base, tuple(fiber), tuple(orientations), True, tuple(samples))
    return cover, None


def certify(rmap, base):
    """Certify ``rmap`` as a ramified cover over ``base``; raises UncertifiedCover."""
    base = INF if base is INF else Fraction(base)
    cover, reason = _analyze(rmap, base)
    if cover is None:
        raise UncertifiedCover(f"not a ramified cover over {base}: {reason}")
    return cover


def signature_of(cover):
    if not cover.certified:
        raise UncertifiedCover("signature requested for an uncertified cover")
    return SignatureVector(cover.orders, cover.orientations)


# -- construction ----------------------------------------------------------------
def nodes(d):
    """Node placement a_i = i + 1, i = 0..2d-2; all positive so 0 is never a fiber point."""
    return [Fraction(i + 1) for i in range(2 * d - 1)]


def helper_polynomial(a):
    """Even-degree h with simple critical points exactly at the nodes and min h(a_i) = 1."""
    integrand = Polynomial.from_roots(a)
    h = integrand.integral()
    shift = 1 - min(h(x) for x in a)
    return h + shift


def _candidates(n_cap):
    ns = [0, 1]
    while ns[-1] * 2 <= n_cap:
        ns.append(ns[-1] * 2)
    return [n for n in ns if n <= n_cap]


def build_over_zero(sig, n_cap=64, eps_cap=128, trace=None):
    trace = [] if trace is None else trace
    d = sig.d
    a = nodes(d)
    P = Polynomial.const(1)
    for i in range(d):
        P = P * Polynomial.from_roots([a[2 * i]]) ** sig.s[i]
    Q = Polynomial.from_roots([a[2 * i + 1] for i in range(d - 1)])
    h = helper_polynomial(a)
    for N in _candidates(n_cap):
        num0 = P * h**N
        pole = num0.degree - Q.degree
        m = (pole - 1) // 2
        if m == 0:
            eps_list = [None]
        else:
            eps_list = [Fraction(1, 2**j) for j in range(1, eps_cap + 1)]
        for eps in eps_list:
            den = Q if eps is None else Q * (Polynomial.monomial(2 * m, eps) + 1)
            cover, reason = _analyze(RationalMap(num0, den), Fraction(0))
            tag = {"N": N, "eps": None if eps is None else str(eps)}
            if cover is None:
                trace.append({**tag, "result": reason})
                continue
            got = signature_of(cover)
            if got.s != sig.s:
                trace.append({**tag, "result": f"vertex labels {got.s} != {sig.s}"})
                continue
            if got.o != sig.o:
                cover = adjust_cover(cover, "post_moebius", NEGATE)
            trace.append({**tag, "result": "certified"})
            return cover
    raise ConstructionFailed(f"no certified cover for {sig} with N <= {n_cap}, j <= {eps_cap}", trace)


def build_cover(sig, base=0, n_cap=64, eps_cap=128):
    """Certified rational cover over 0 or infinity whose signature is exactly ``sig``."""
    if n_cap < 0 or eps_cap < 1:
        raise ValueError("search caps must be n_cap >= 0 and eps_cap >= 1")
    trace = []
    cover = build_over_zero(sig, n_cap, eps_cap, trace)
    if base is INF or base in ("inf", "oo"):
        cover = adjust_cover(cover, "conjugate", J_MAP)
    elif Fraction(base) != 0:
        raise ValueError("base point must be 0 or infinity")
    if signature_of(cover) != sig:
        # a rotation of the fiber labels is the only freedom left
        for k in range(1, sig.d):
            alt = rotate_cover(cover, k)
            if signature_of(alt) == sig:
                return alt
        raise ConstructionFailed(f"built cover has signature {signature_of(cover)}, wanted {sig}", trace)
    return cover


# -- adjustments -------------------------------------------------------------------
def _moebius_inverse(m):
    # (a x + b)/(c x + d) -> (d x - b)/(-c x + a)
    b, a = (list(m.num.coeffs) + [Fraction(0)] * 2)[:2]
    d, c = (list(m.den.coeffs) + [Fraction(0)] * 2)[:2]
    return RationalMap.moebius(d, -b, -c, a)


def adjust_cover(cover, move, m=None):
    """Apply a move and re-certify.

    ``pre_negate``: x -> pi(-x).  ``post_moebius``: m o pi with m fixing the
    base.  ``pre_moebius``: pi o m.  ``conjugate``: m o pi o m^-1 over m(base).
    """
    if move == "pre_negate":
        return certify(cover.map.compose(NEGATE), cover.base)
    if m is None or m.degree != 1:
        raise ValueError(f"move {move!r} needs a Moebius map")
    if move == "post_moebius":
        if m(cover.base) != cover.base:
            raise BasePointNotFixed(f"{m} moves the base point {cover.base}")
        return certify(m.compose(cover.map), cover.base)
    if move == "pre_moebius":
        return certify(cover.map.compose(m), cover.base)
    if move == "conjugate":
        return certify(m.compose(cover.map).compose(_moebius_inverse(m)), m(cover.base))
    raise ValueError(f"unknown move {move!r}")


def rotation_moebius(cover, k):
    """Moebius m with pi o m having signature b^k(s): the new first fiber point is q_k."""
    k %= cover.d
    if k == 0:
        return RationalMap.identity()
    t = cover.edge_sample(k - 1)
    # m^-1(x) = -1/(x - t) sends t to infinity and preserves orientation
    return RationalMap.moebius(t, -1, 1, 0)


def rotate_cover(cover, k):
    return adjust_cover(cover, "pre_moebius", rotation_moebius(cover, k))


def induced_element(old, new, point_map):
    """The dihedral element carried by a point map between the fibers of two covers.

    Vertices alone do not pin the element down when d <= 2, so the map's
    effect on the cyclic order of three points of edge 0 decides the flip.
    """
    if old.d != new.d:
        raise ValueError("covers have different degrees")
    d = old.d
    new_u = [q.u() for q in new.fiber]

    def nearest(uy):
        return min(range(d), key=lambda j: min(abs(new_u[j] - uy), 1 - abs(new_u[j] - uy)))

    def exact(q):
        return q.value if q.is_exact else Fraction(q.approx())

    def ccw(a, b, c):
        return (b - a) % 1.0 < (c - a) % 1.0

    perm = [nearest(u_of_x(point_map(exact(q)))) for q in old.fiber]
    # q_0, then two points inside edge 0
    u0 = old.fiber[0].u()
    u1 = u_of_x(old.edge_sample(0))
    u_end = old.fiber[1 % d].u()
    gap = (u_end - u1) % 1.0 or 1.0
    u2 = (u1 + gap / 2) % 1.0
    if x_of_u(u2) is INF:
        u2 = (u1 + gap / 3) % 1.0
    pts = [exact(old.fiber[0]), old.edge_sample(0), Fraction(x_of_u(u2))]
    imgs = [u_of_x(point_map(x)) for x in pts]
    flip = ccw(u0, u1, u2) != ccw(*imgs)
    for z in group_elements(d, "D"):
        if z.flip == flip and all(z.vertex_map(i) == perm[i] for i in range(d)):
            return z
    raise ValueError(f"fiber permutation {perm} (flip={flip}) is not dihedral")


def load_fixture(name="pi2"):
    """Bundled covers shipped with the package."""
    text = resources.files("ramlift.data").joinpath(f"{name}.json").read_text()
    return RamifiedCover.from_json(json.loads(text))


__all__ = [
    "FiberPoint",
    "RamifiedCover",
    "J_MAP",
    "NEGATE",
    "certify",
    "signature_of",
    "build_cover",
    "build_over_zero",
    "adjust_cover",
    "rotate_cover",
    "rotation_moebius",
    "induced_element",
    "load_fixture",
    "helper_polynomial",
    "nodes",
]
