"""Signature vectors of ramified covers and the dihedral actions on them.

A signature of length ``2d`` is ``(s_1..s_d, o_1..o_d)``: vertex labels are
local orders, edge labels are the orientations of the cover on the arcs
between consecutive fiber points.  Indices are 0-based in code; error
messages report 1-based vertex numbers.

The element ``b^k a^f`` of the dihedral group acts on vertex ``i`` by
``i -> (-1)^f i - k`` and on edge ``i`` (from vertex ``i`` to ``i+1``) by
``i -> i - k`` or ``i -> -i - 1 - k``.  Pushing labels forward along this
action reproduces the generator formulas

    b(s_1..s_d, o_1..o_d) = (s_2..s_d, s_1, o_2..o_d, o_1)
    a(s_1..s_d, o_1..o_d) = (s_1, s_d..s_2, -o_d..-o_1)

and gives a left action: ``act(z1 * z2, s) == act(z1, act(z2, s))``.
"""

import itertools
import re
from dataclasses import dataclass
from numbers import Integral

from .errors import (
    DimensionMismatch,
    MalformedInput,
    NotInHashStabilizer,
    PropertyOneViolation,
    PropertyTwoViolation,
)


@dataclass(frozen=True, order=True)
class SignatureVector:
    """Validated signature ``(s_1..s_d, o_1..o_d)``.

    Ordering is lexicographic on ``s + o`` (edge labels compared as the reals
    +-1), which is the order used for canonical orbit representatives.
    """

    s: tuple
    o: tuple

    def __post_init__(self):
        _check(self.s, self.o)

    @property
    def d(self):
        return len(self.s)

    def as_tuple(self):
        return tuple(self.s) + tuple(self.o)

    def negate_edges(self):
        """The sign involution I: flip every edge label."""
        return SignatureVector(self.s, tuple(-x for x in self.o))

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.as_tuple()) + ")"

    def to_json(self):
        return {"d": self.d, "s": list(self.s), "o": list(self.o)}

    @classmethod
    def from_json(cls, obj):
        sig = validate_signature(obj["s"], obj["o"])
        if "d" in obj and obj["d"] != sig.d:
            raise MalformedInput(f"declared d={obj['d']} but {sig.d} vertex labels given")
        return sig

    @classmethod
    def parse(cls, text):
        """Parse the comma-separated literal ``s_1,..,s_d,o_1,..,o_d``."""
        try:
            vals = [int(t) for t in text.replace(" ", "").split(",") if t]
        except ValueError as exc:
            raise MalformedInput(f"signature literal {text!r} is not a list of integers") from exc
        if len(vals) < 2 or len(vals) % 2:
            raise MalformedInput(f"signature literal must have even length 2d >= 2, got {len(vals)}")
        d = len(vals) // 2
        return validate_signature(vals[:d], vals[d:])


def _check(s, o):
    if len(s) != len(o):
        raise MalformedInput(f"{len(s)} vertex labels but {len(o)} edge labels")
    if len(s) < 1:
        raise MalformedInput("a signature needs d >= 1")
    for v in s:
        if isinstance(v, bool) or not isinstance(v, Integral) or v < 1:
            raise MalformedInput(f"vertex label {v!r} is not a positive integer")
    for e in o:
        if isinstance(e, bool) or e not in (1, -1):
            raise MalformedInput(f"edge label {e!r} is not +1 or -1")
    even = sum(1 for v in s if v % 2 == 0)
    if even % 2:
        raise PropertyOneViolation(even)
    d = len(s)
    # walk forward from o_1 as the completion does; vertex 1 closes the cycle last
    for i in list(range(1, d)) + [0]:
        if (-1) ** (s[i] + 1) != o[i - 1] * o[i]:
            raise PropertyTwoViolation(i + 1)


def validate_signature(vertex_labels, edge_labels):
    """Build a SignatureVector from raw lists, naming the first failed property."""
    try:
        s = tuple(int(v) if not isinstance(v, bool) and float(v) == int(v) else v for v in vertex_labels)
        o = tuple(int(e) if not isinstance(e, bool) and float(e) == int(e) else e for e in edge_labels)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"non-numeric signature entries: {exc}") from exc
    return SignatureVector(s, o)


def complete_from_prefix(vertex_labels, o1):
    """The unique signature with these vertex labels and first edge label."""
    s = tuple(int(v) for v in vertex_labels)
    if o1 not in (1, -1):
        raise MalformedInput(f"edge label {o1!r} is not +1 or -1")
    if not s or any(v < 1 for v in s):
        raise MalformedInput("vertex labels must be positive and nonempty")
    even = sum(1 for v in s if v % 2 == 0)
    if even % 2:
        raise PropertyOneViolation(even)
    o = [o1]
    for v in s[1:]:
        o.append(o[-1] * (-1) ** (v + 1))
    return SignatureVector(s, tuple(o))


@dataclass(frozen=True)
class DihedralElement:
    """``b^rot a^flip`` in D_d = <a, b | a^2 = b^d = 1, a b a^-1 = b^-1>."""

    d: int
    rot: int
    flip: bool = False

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dihedral group needs d >= 1")
        object.__setattr__(self, "rot", self.rot % self.d)
        object.__setattr__(self, "flip", bool(self.flip))

    @classmethod
    def identity(cls, d):
        return cls(d, 0, False)

    @classmethod
    def b(cls, d, k=1):
        return cls(d, k, False)

    @classmethod
    def a(cls, d):
        return cls(d, 0, True)

    def key(self):
        """Fixed element order: rotation index first, then flip bit."""
        return (self.rot, self.flip)

    def __lt__(self, other):
        return self.key() < other.key()

    def __mul__(self, other):
        if not isinstance(other, DihedralElement):
            return NotImplemented
        if other.d != self.d:
            raise DimensionMismatch(f"D_{self.d} element times D_{other.d} element")
        k = self.rot - other.rot if self.flip else self.rot + other.rot
        return DihedralElement(self.d, k, self.flip != other.flip)

    def inverse(self):
        if self.flip:
            return self
        return DihedralElement(self.d, -self.rot, False)

    def __pow__(self, e):
        base = self if e >= 0 else self.inverse()
        out = DihedralElement.identity(self.d)
        for _ in range(abs(e)):
            out = out * base
        return out

    @property
    def is_identity(self):
        return self.rot == 0 and not self.flip

    @property
    def is_rotation(self):
        return not self.flip

    def order(self):
        if self.flip:
            return 2
        if self.rot == 0:
            return 1
        from math import gcd

        return self.d // gcd(self.d, self.rot)

    def vertex_map(self, i):
        return ((-i if self.flip else i) - self.rot) % self.d

    def edge_map(self, i):
        return ((-i - 1 if self.flip else i) - self.rot) % self.d

    def __str__(self):
        if self.is_identity:
            return "id"
        rot = "" if self.rot == 0 else ("b" if self.rot == 1 else f"b^{self.rot}")
        if self.flip:
            return (rot + " a").strip()
        return rot

    def to_json(self):
        return {"rot": self.rot, "flip": self.flip}

    @classmethod
    def from_json(cls, obj, d):
        return cls(d, int(obj["rot"]), bool(obj["flip"]))

    @classmethod
    def parse(cls, text, d):
        """Read a word in a, b such as ``id``, ``b^2 a`` or ``ab``, multiplied left to right."""
        word = text.replace(" ", "").replace("*", "")
        if word in ("", "id", "e", "1"):
            return cls.identity(d)
        out = cls.identity(d)
        for letter, exp in re.findall(r"([ab])(?:\^(-?\d+))?", word):
            out = out * (cls.a(d) if letter == "a" else cls.b(d)) ** int(exp or 1)
        if re.sub(r"[ab](\^-?\d+)?", "", word):
            raise MalformedInput(f"cannot read dihedral word {text!r}")
        return out


def group_elements(d, group="D"):
    """All elements of C_d or D_d in the fixed element order."""
    if group not in ("C", "D"):
        raise ValueError(f"group must be 'C' or 'D', got {group!r}")
    flips = (False,) if group == "C" else (False, True)
    return sorted((DihedralElement(d, k, f) for k in range(d) for f in flips), key=DihedralElement.key)


def _require_dim(z, sig):
    if z.d != sig.d:
        raise DimensionMismatch(f"element of D_{z.d} acting on a signature with d={sig.d}")


def act(z, sig):
    """The action permuting vertex and edge labels (reflections flip edge signs)."""
    _require_dim(z, sig)
    d = sig.d
    s = [0] * d
    o = [0] * d
    sign = -1 if z.flip else 1
    for i in range(d):
        s[z.vertex_map(i)] = sig.s[i]
        o[z.edge_map(i)] = sign * sig.o[i]
    return SignatureVector(tuple(s), tuple(o))


def act_hash(z, sig):
    """The action on vertex labels only; edge labels are carried unchanged."""
    _require_dim(z, sig)
    s = [0] * sig.d
    for i in range(sig.d):
        s[z.vertex_map(i)] = sig.s[i]
    # the result need not satisfy property (2), so bypass validation
    out = object.__new__(SignatureVector)
    object.__setattr__(out, "s", tuple(s))
    object.__setattr__(out, "o", tuple(sig.o))
    return out


def stabilizer(sig, group="D", action="plain"):
    """Brute-force stabilizer of ``sig`` in C_d or D_d under either action."""
    fn = {"plain": act, "hash": act_hash}[action]
    return [z for z in group_elements(sig.d, group) if fn(z, sig) == sig]


def delta(sig, z):
    """0 if ``z`` fixes ``sig``, 1 if it sends ``sig`` to I(sig)."""
    if act_hash(z, sig) != sig:
        raise NotInHashStabilizer(f"{z} does not fix the vertex labels of {sig}")
    moved = act(z, sig)
    if moved == sig:
        return 0
    assert moved == sig.negate_edges()
    return 1


@dataclass(frozen=True)
class StabilizerReport:
    signature: SignatureVector
    stab_C: tuple
    stab_D: tuple
    stab_C_hash: tuple
    stab_D_hash: tuple
    delta_image_size: int

    def delta_table(self):
        return [(z, delta(self.signature, z)) for z in self.stab_D_hash]

    def to_json(self):
        def enc(els):
            return {"generators": describe_subgroup(els), "elements": [z.to_json() for z in els]}

        return {
            "signature": self.signature.to_json(),
            "stab_C": enc(self.stab_C),
            "stab_D": enc(self.stab_D),
            "stab_C_hash": enc(self.stab_C_hash),
            "stab_D_hash": enc(self.stab_D_hash),
            "delta": [{"element": z.to_json(), "value": v} for z, v in self.delta_table()],
            "delta_image_size": self.delta_image_size,
        }


def stabilizer_report(sig):
    stab_D_hash = tuple(stabilizer(sig, "D", "hash"))
    return StabilizerReport(
        signature=sig,
        stab_C=tuple(stabilizer(sig, "C", "plain")),
        stab_D=tuple(stabilizer(sig, "D", "plain")),
        stab_C_hash=tuple(stabilizer(sig, "C", "hash")),
        stab_D_hash=stab_D_hash,
        delta_image_size=len({delta(sig, z) for z in stab_D_hash}),
    )


def generated_subgroup(gens, d):
    els = {DihedralElement.identity(d)}
    frontier = list(els)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g
            if y not in els:
                els.add(y)
                frontier.append(y)
    return els


def describe_subgroup(elements):
    """Short generator string such as ``<a, b^4>`` for a subgroup given by its elements."""
    elements = list(elements)
    if not elements:
        raise ValueError("empty subgroup")
    d = elements[0].d
    target = set(elements)
    gens = []
    have = {DihedralElement.identity(d)}
    # rotations by smallest step first, then reflections
    for z in sorted(target, key=lambda z: (z.flip, z.rot)):
        if z not in have:
            gens.append(z)
            have = generated_subgroup(gens, d)
        if have == target:
            break
    if not gens:
        return "{id}"
    gens.sort(key=lambda z: (not z.flip, z.rot))
    return "<" + ", ".join(str(g) for g in gens) + ">"


def orbit(sig, group="D"):
    return {act(z, sig) for z in group_elements(sig.d, group)}


def canonical_rep(sig, group="D"):
    """Lexicographically smallest element of the C_d- or D_d-orbit."""
    return min(orbit(sig, group))


def all_signatures(d, max_s):
    """Every signature of length 2d with all vertex labels <= max_s, sorted."""
    if d < 1 or max_s < 1:
        raise ValueError("need d >= 1 and max_s >= 1")
    out = []
    for s in itertools.product(range(1, max_s + 1), repeat=d):
        if sum(1 for v in s if v % 2 == 0) % 2:
            continue
        for o1 in (-1, 1):
            out.append(complete_from_prefix(s, o1))
    return sorted(out)


def enumerate_canonical(d, max_s, group):
    """One representative per orbit among signatures with labels <= max_s."""
    return [sig for sig in all_signatures(d, max_s) if canonical_rep(sig, group) == sig]
