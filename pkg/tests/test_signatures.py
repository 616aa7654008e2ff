import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ramlift.errors import (
    DimensionMismatch,
    MalformedInput,
    NotInHashStabilizer,
    PropertyOneViolation,
    PropertyTwoViolation,
)
from ramlift.signatures import (
    DihedralElement,
    SignatureVector,
    act,
    act_hash,
    all_signatures,
    canonical_rep,
    complete_from_prefix,
    delta,
    describe_subgroup,
    enumerate_canonical,
    group_elements,
    orbit,
    stabilizer,
    stabilizer_report,
    validate_signature,
)

D = DihedralElement


def sig(text):
    return SignatureVector.parse(text)


# independent oracle: rebuild the action from the displayed generator formulas
def _b_formula(s):
    return SignatureVector(s.s[1:] + s.s[:1], s.o[1:] + s.o[:1])


def _a_formula(s):
    # a(s_1,..,s_d,o_1,..,o_d) = (s_1, s_d, .., s_2, -o_d, .., -o_1)
    return SignatureVector((s.s[0],) + tuple(reversed(s.s[1:])), tuple(-x for x in reversed(s.o)))


def _word_action(z, s):
    out = s
    if z.flip:
        out = _a_formula(out)
    for _ in range(z.rot):
        out = _b_formula(out)
    return out


def _valid_brute(s, o):
    d = len(s)
    if sum(1 for v in s if v % 2 == 0) % 2:
        return False
    return all((-1) ** (s[i] + 1) == o[i - 1] * o[i] for i in range(d))


class TestValidation:
    def test_pi1_signature(self):
        v = validate_signature([2, 2], [1, -1])
        assert v.s == (2, 2) and v.o == (1, -1)

    def test_d1(self):
        assert validate_signature([1], [1]).d == 1

    def test_property_one(self):
        with pytest.raises(PropertyOneViolation):
            validate_signature([2, 1], [1, 1])

    def test_property_two_index(self):
        with pytest.raises(PropertyTwoViolation) as exc:
            validate_signature([2, 2], [1, 1])
        assert exc.value.index == 2

    @pytest.mark.parametrize("s,o", [([], []), ([1, 1], [1]), ([0], [1]), ([1], [2]), ([1.5], [1])])
    def test_malformed(self, s, o):
        with pytest.raises(MalformedInput):
            validate_signature(s, o)

    def test_parse_literal(self):
        assert sig("2,2,-1,1") == SignatureVector((2, 2), (-1, 1))
        with pytest.raises(MalformedInput):
            sig("2,2,1")

    def test_json_round_trip(self):
        s = sig("2,1,4,1,2,1,4,1,1,1,-1,-1,1,1,-1,-1")
        assert SignatureVector.from_json(s.to_json()) == s
        assert s.to_json() == {"d": 8, "s": [2, 1, 4, 1, 2, 1, 4, 1], "o": [1, 1, -1, -1, 1, 1, -1, -1]}

    def test_exhaustive_agrees_with_brute_rule(self):
        for d in (1, 2, 3):
            for s in itertools.product(range(1, 4), repeat=d):
                for o in itertools.product((-1, 1), repeat=d):
                    ok = _valid_brute(s, o)
                    try:
                        validate_signature(list(s), list(o))
                        assert ok
                    except (PropertyOneViolation, PropertyTwoViolation):
                        assert not ok


class TestCompletion:
    def test_pi1(self):
        assert complete_from_prefix([2, 2], 1) == sig("2,2,1,-1")

    def test_odd_singleton(self):
        assert complete_from_prefix([3], 1) == sig("3,1")

    def test_property_one_failure(self):
        with pytest.raises(PropertyOneViolation):
            complete_from_prefix([2, 3], 1)

    def test_round_trip_all(self):
        for d in (1, 2, 3, 4):
            for s in all_signatures(d, 3):
                assert complete_from_prefix(s.s, s.o[0]) == s


class TestDihedral:
    def test_relations(self):
        for d in (1, 2, 3, 5, 8):
            b, a = D.b(d), D.a(d)
            assert b.order() == d
            assert (a * a).is_identity
            assert a * b * a == D.b(d, -1)

    def test_group_law_is_associative(self):
        els = group_elements(4, "D")
        for x, y, z in itertools.product(els, repeat=3):
            assert (x * y) * z == x * (y * z)

    def test_inverse(self):
        for z in group_elements(6, "D"):
            assert (z * z.inverse()).is_identity

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            D.b(3) * D.b(4)
        with pytest.raises(DimensionMismatch):
            act(D.b(3), sig("2,2,1,-1"))

    def test_parse(self):
        assert D.parse("b^2 a", 4) == D(4, 2, True)
        assert D.parse("id", 3).is_identity
        assert D.parse("ab", 4) == D.a(4) * D.b(4)

    def test_element_order_rotation_first(self):
        keys = [z.key() for z in group_elements(3, "D")]
        assert keys == sorted(keys) and keys[1] == (0, True)


class TestActions:
    def test_b_on_s1(self):
        assert act(D.b(2), sig("2,2,1,-1")) == sig("2,2,-1,1")

    def test_a_fixes_s1(self):
        assert act(D.a(2), sig("2,2,1,-1")) == sig("2,2,1,-1")

    def test_identity(self):
        s = sig("2,3,1,2,3,1,-1,-1,-1,1,1,1")
        assert act(D.identity(6), s) == s and act_hash(D.identity(6), s) == s

    def test_hash_a_on_s1(self):
        assert act_hash(D.a(2), sig("2,2,1,-1")) == sig("2,2,1,-1")

    def test_hash_b3_keeps_vertex_labels(self):
        s = sig("2,3,1,2,3,1,-1,-1,-1,1,1,1")
        assert act_hash(D.b(6, 3), s).s == s.s

    def test_matches_generator_formulas(self):
        for d in (1, 2, 3, 4):
            for s in all_signatures(d, 3):
                for z in group_elements(d, "D"):
                    assert act(z, s) == _word_action(z, s)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 6), st.data())
    def test_action_laws_and_closure(self, d, data):
        s_lab = data.draw(st.lists(st.integers(1, 4), min_size=d, max_size=d))
        assume(sum(1 for v in s_lab if v % 2 == 0) % 2 == 0)
        s = complete_from_prefix(s_lab, data.draw(st.sampled_from((-1, 1))))
        z1 = D(d, data.draw(st.integers(0, d - 1)), data.draw(st.booleans()))
        z2 = D(d, data.draw(st.integers(0, d - 1)), data.draw(st.booleans()))
        for fn in (act, act_hash):
            assert fn(z1 * z2, s) == fn(z1, fn(z2, s))
        # both actions land in valid signatures (constructor validates)
        assert _valid_brute(act(z1, s).s, act(z1, s).o)
        assert canonical_rep(act(z1, s), "D") == canonical_rep(s, "D")
        if not z1.flip:
            assert canonical_rep(act(z1, s), "C") == canonical_rep(s, "C")


class TestStabilizers:
    @staticmethod
    def gens(els):
        return describe_subgroup(els)

    def test_s1(self):
        s = sig("2,2,1,-1")
        assert self.gens(stabilizer(s, "D")) == "<a>"
        assert self.gens(stabilizer(s, "C")) == "{id}"

    def test_sixteen_entry_example(self):
        s = sig("2,1,2,1,2,1,2,1,1,1,-1,-1,1,1,-1,-1")
        assert self.gens(stabilizer(s, "C")) == "<b^4>"
        assert self.gens(stabilizer(s, "D")) == "<a, b^4>"
        assert self.gens(stabilizer(s, "C", "hash")) == "<b^2>"
        assert self.gens(stabilizer(s, "D", "hash")) == "<a, b^2>"
        assert delta(s, D.b(8, 2)) == 1

    def test_trivial_delta_example(self):
        s = sig("2,1,4,1,2,1,4,1,1,1,-1,-1,1,1,-1,-1")
        assert self.gens(stabilizer(s, "D")) == self.gens(stabilizer(s, "D", "hash")) == "<a, b^4>"
        assert self.gens(stabilizer(s, "C")) == self.gens(stabilizer(s, "C", "hash")) == "<b^4>"
        assert stabilizer_report(s).delta_image_size == 1

    def test_no_symmetry_example(self):
        s = sig("2,3,1,2,3,1,-1,-1,-1,1,1,1")
        assert stabilizer(s, "D") == [D.identity(6)]
        assert self.gens(stabilizer(s, "C", "hash")) == self.gens(stabilizer(s, "D", "hash")) == "<b^3>"
        assert delta(s, D.b(6, 3)) == 1
        assert stabilizer_report(s).delta_image_size == 2

    def test_d1(self):
        s = sig("1,1")
        assert stabilizer(s, "D") == [D.identity(1)]
        assert set(stabilizer(s, "D", "hash")) == {D.identity(1), D.a(1)}

    def test_delta_rejects_non_hash_element(self):
        with pytest.raises(NotInHashStabilizer):
            delta(sig("2,3,1,2,3,1,-1,-1,-1,1,1,1"), D.b(6))

    def test_report_invariants(self):
        for d in (1, 2, 3, 4):
            for s in all_signatures(d, 3):
                r = stabilizer_report(s)
                assert set(r.stab_C) <= set(r.stab_D)
                assert set(r.stab_C) <= set(r.stab_C_hash) and set(r.stab_D) <= set(r.stab_D_hash)
                assert set(r.stab_D) == {z for z in r.stab_D_hash if delta(s, z) == 0}
                for z1, z2 in itertools.product(r.stab_D_hash, repeat=2):
                    assert delta(s, z1 * z2) == (delta(s, z1) + delta(s, z2)) % 2


class TestCanonical:
    def test_examples(self):
        assert canonical_rep(sig("2,2,1,-1"), "C") == sig("2,2,-1,1")
        assert canonical_rep(sig("1,1"), "D") == sig("1,-1")
        s = sig("1,3,3,-1,-1,-1")
        assert canonical_rep(canonical_rep(s, "D"), "D") == canonical_rep(s, "D")

    def test_enumeration_counts(self):
        assert enumerate_canonical(1, 5, "D") == [sig("1,-1"), sig("3,-1"), sig("5,-1")]
        assert len(enumerate_canonical(2, 2, "D")) == 2
        assert len(enumerate_canonical(2, 2, "C")) == 3

    def test_enumeration_partitions_orbits(self):
        # orbit oracle: union of orbits of the representatives is everything, disjointly
        for d in (1, 2, 3, 4):
            for group in ("C", "D"):
                reps = enumerate_canonical(d, 3, group)
                seen = set()
                for r in reps:
                    o = orbit(r, group)
                    assert not (o & seen)
                    seen |= o
                assert seen == set(all_signatures(d, 3))
                assert reps == sorted(reps)
