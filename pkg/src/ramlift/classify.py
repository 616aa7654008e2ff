"""Classification data for lifted BS(1,n) actions: signatures with hom classes.

A class descriptor is a canonical signature ``s`` together with a
homomorphism BS(1,n) -> Stab(s), recorded as the images ``(A, B)`` of the
generators subject to ``A B A^-1 = B^n``, taken up to simultaneous
conjugation inside the stabilizer.  The full classes use D_d and
Stab_D(s); the orientation-preserving ones use C_d and Stab_C(s).
"""

import itertools
from dataclasses import dataclass

from .errors import MismatchDetected, NotAGroup
from .signatures import act, all_signatures, canonical_rep, enumerate_canonical, group_elements, stabilizer

FULL = "full"
PLUS = "orientation_preserving"
_ALIASES = {"full": FULL, "D": FULL, "orientation_preserving": PLUS, "plus": PLUS, "C": PLUS}


def orientation_group(orientation_class):
    """The dihedral family ("D" or "C") behind an orientation class name."""
    try:
        return "D" if _ALIASES[orientation_class] == FULL else "C"
    except KeyError:
        raise ValueError(f"unknown orientation class {orientation_class!r}") from None


def _normal_class(orientation_class):
    orientation_group(orientation_class)
    return _ALIASES[orientation_class]


# -- finite groups given by element lists -----------------------------------------
class FiniteGroup:
    """A finite group given by its elements and a multiplication.

    Elements are ordered as listed; that order is the one used for
    lexicographic minima unless a ``key`` is supplied.
    """

    def __init__(self, elements, mul=None, key=None):
        self.elements = list(elements)
        if not self.elements:
            raise NotAGroup("a group has at least one element")
        self.mul = mul or (lambda x, y: x * y)
        index = {}
        for i, g in enumerate(self.elements):
            if g in index:
                raise NotAGroup(f"element {g} listed twice")
            index[g] = i
        self.index = index
        self.key = key or index.__getitem__
        self._check()

    def _check(self):
        els, mul = self.elements, self.mul
        table = {}
        for x in els:
            for y in els:
                z = mul(x, y)
                if z not in self.index:
                    raise NotAGroup(f"{x} * {y} = {z} leaves the element list")
                table[x, y] = z
        self.table = table
        ids = [e for e in els if all(table[e, x] == x and table[x, e] == x for x in els)]
        if not ids:
            raise NotAGroup("no identity element")
        self.identity = ids[0]
        inv = {}
        for x in els:
            for y in els:
                if table[x, y] == self.identity:
                    inv[x] = y
                    break
            else:
                raise NotAGroup(f"{x} has no inverse")
        self.inv = inv
        # associativity on a deterministic spot-check sample
        triples = itertools.product(els, repeat=3)
        for x, y, z in itertools.islice(triples, 0, None, max(1, len(els) ** 3 // 512)):
            if table[table[x, y], z] != table[x, table[y, z]]:
                raise NotAGroup(f"({x} {y}) {z} != {x} ({y} {z})")

    def __len__(self):
        return len(self.elements)

    def power(self, x, e):
        out = self.identity
        for _ in range(e):
            out = self.table[out, x]
        return out

    def conj(self, g, x):
        return self.table[self.table[g, x], self.inv[g]]


def _as_group(H):
    return H if isinstance(H, FiniteGroup) else FiniteGroup(H)


def enumerate_homs(n, H):
    """All pairs (A, B) in H with A B A^-1 = B^n, in the group's element order."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    G = _as_group(H)
    out = []
    for A in G.elements:
        for B in G.elements:
            if G.conj(A, B) == G.power(B, n):
                out.append((A, B))
    return out


def _hom_key(G, hom):
    return tuple(G.key(x) for x in hom)


def hom_orbits(H, homs):
    """Orbits of homs under simultaneous conjugation, each sorted, keyed by minimum."""
    G = _as_group(H)
    seen = set()
    orbits = []
    for hom in homs:
        if hom in seen:
            continue
        orb = {tuple(G.conj(g, x) for x in hom) for g in G.elements}
        seen |= orb
        orbits.append(sorted(orb, key=lambda h: _hom_key(G, h)))
    orbits.sort(key=lambda orb: _hom_key(G, orb[0]))
    return orbits


def hom_classes(H, homs):
    """One representative per conjugacy orbit: the lexicographic minimum."""
    return [orb[0] for orb in hom_orbits(H, homs)]


# -- class descriptors ----------------------------------------------------------------
@dataclass(frozen=True)
class ClassDescriptor:
    n: int
    signature: object
    hom: tuple
    orientation_class: str
    orbit_size: int = 1

    def to_json(self):
        A, B = self.hom
        return {
            "n": self.n,
            "signature": self.signature.to_json(),
            "hom": {"a": A.to_json(), "b": B.to_json()},
            "hom_str": {"a": str(A), "b": str(B)},
            "orientation_class": self.orientation_class,
            "orbit_size": self.orbit_size,
        }


def _stab_group(sig, group):
    return FiniteGroup(stabilizer(sig, group, "plain"), key=lambda z: z.key())


def enumerate_classes(n, d, max_s, orientation_class=FULL, quotient=True):
    """Class descriptors for canonical signatures with labels <= max_s.

    With ``quotient=False`` every hom is emitted, not one per conjugacy orbit.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if d < 1 or max_s < 1:
        raise ValueError("need d >= 1 and max_s >= 1")
    oc = _normal_class(orientation_class)
    group = orientation_group(oc)
    out = []
    for sig in enumerate_canonical(d, max_s, group):
        G = _stab_group(sig, group)
        homs = enumerate_homs(n, G)
        if quotient:
            for orb in hom_orbits(G, homs):
                out.append(ClassDescriptor(n, sig, orb[0], oc, len(orb)))
        else:
            out.extend(ClassDescriptor(n, sig, h, oc) for h in homs)
    return out


def verify_descriptor(desc):
    """Re-check a descriptor directly: canonical signature, stabilizer membership, relation."""
    group = orientation_group(desc.orientation_class)
    sig = desc.signature
    A, B = desc.hom
    if canonical_rep(sig, group) != sig:
        return False
    for z in (A, B):
        if group == "C" and z.flip:
            return False
        if act(z, sig) != sig:
            return False
    return A * B * A.inverse() == B**desc.n


def class_summary(n, d, max_s, quotient_plus=True):
    """Row (n, d, max_s, #classes_full, #classes_plus)."""
    return {
        "n": n,
        "d": d,
        "max_s": max_s,
        "classes_full": len(enumerate_classes(n, d, max_s, FULL)),
        "classes_plus": len(enumerate_classes(n, d, max_s, PLUS, quotient=quotient_plus)),
    }


# -- brute-force oracle -------------------------------------------------------------
class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass(frozen=True)
class CrossCheck:
    match: bool
    classifier_count: int
    oracle_count: int


def oracle_classes(n, d, max_s, orientation_class=FULL):
    """Classes of (signature, hom) pairs over all signatures, found by union-find.

    Pairs are joined under (s, h) ~ (z s, z h z^-1) for every z in the group;
    homs are found by direct search over the stabilizer without any
    canonical-form machinery.
    """
    group = orientation_group(orientation_class)
    sigs = all_signatures(d, max_s)
    if len(sigs) > 10**4:
        raise ValueError(f"{len(sigs)} signatures is too many for the brute-force oracle")
    zs = group_elements(d, group)
    uf = _UnionFind()
    for sig in sigs:
        stab = [z for z in zs if act(z, sig) == sig]
        for A in stab:
            for B in stab:
                if A * B * A.inverse() == B**n:
                    uf.add((sig, A, B))
    for sig, A, B in list(uf.parent):
        for z in zs:
            zi = z.inverse()
            uf.union((sig, A, B), (act(z, sig), z * A * zi, z * B * zi))
    classes = {}
    for node in uf.parent:
        classes.setdefault(uf.find(node), []).append(node)
    return list(classes.values())


def cross_check(n, d, max_s, orientation_class=FULL, strict=True):
    """Compare enumerate_classes against the union-find oracle."""
    got = enumerate_classes(n, d, max_s, orientation_class)
    oracle = oracle_classes(n, d, max_s, orientation_class)
    result = CrossCheck(len(got) == len(oracle), len(got), len(oracle))
    if not result.match and strict:
        group = orientation_group(orientation_class)
        per_sig = {}
        for cls in oracle:
            rep = canonical_rep(cls[0][0], group)
            per_sig[rep] = per_sig.get(rep, 0) + 1
        mine = {}
        for desc in got:
            mine[desc.signature] = mine.get(desc.signature, 0) + 1
        witness = next((s for s in sorted(set(per_sig) | set(mine)) if per_sig.get(s) != mine.get(s)), None)
        raise MismatchDetected(len(oracle), len(got), str(witness) if witness is not None else None)
    return result
