import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramlift.bsgroup import (
    AffineMap,
    BSElement,
    affine_of,
    bs_inv,
    bs_mul,
    is_orientation_preserving,
    parse_word,
    std_rep_eval,
    word_to_element,
)
from ramlift.circle import INF, CirclePoint, circle_dist, u_of_x, x_of_u
from ramlift.errors import MalformedWord, ParameterMismatch

words = st.text(alphabet="abAB", max_size=12)


def E(n, k, t):
    return BSElement.from_kt(n, k, Fraction(t))


def britton_trivial(word, n):
    """Reduce with free cancellation and the pinches a b^m A -> b^(mn), A b^(mn) a -> b^m.

    Syllables are ('a', +-1) and ('b', m).  By Britton's lemma a word is trivial
    in the HNN extension exactly when this reaches the empty word.
    """
    syl = []

    def push(item):
        syl.append(item)
        changed = True
        while changed and syl:
            changed = False
            if syl[-1][0] == "b" and syl[-1][1] == 0:
                syl.pop()
                changed = True
                continue
            if len(syl) >= 2 and syl[-1][0] == syl[-2][0] == "b":
                m = syl.pop()[1] + syl.pop()[1]
                syl.append(("b", m))
                changed = True
                continue
            if len(syl) >= 2 and syl[-1][0] == syl[-2][0] == "a" and syl[-1][1] == -syl[-2][1]:
                syl.pop()
                syl.pop()
                changed = True
                continue
            if len(syl) >= 3 and syl[-1][0] == "a" and syl[-2][0] == "b" and syl[-3][0] == "a":
                e1, m, e2 = syl[-3][1], syl[-2][1], syl[-1][1]
                if e1 == 1 and e2 == -1:
                    del syl[-3:]
                    syl.append(("b", m * n))
                    changed = True
                elif e1 == -1 and e2 == 1 and m % n == 0:
                    del syl[-3:]
                    syl.append(("b", m // n))
                    changed = True

    for c in word:
        push({"a": ("a", 1), "A": ("a", -1), "b": ("b", 1), "B": ("b", -1)}[c])
    return not syl


class TestElements:
    def test_relation(self):
        for n in (2, 3, 5):
            assert word_to_element("a b a^-1", n) == E(n, 0, n)
            assert word_to_element("abA", n) == BSElement.gen_b(n) ** n

    def test_empty_word(self):
        assert word_to_element("", 2) == BSElement.identity(2)

    def test_conjugate_by_inverse(self):
        assert word_to_element("a⁻¹ b a", 2) == E(2, 0, Fraction(1, 2))
        assert word_to_element("AbaB", 3).t == Fraction(1, 3) - 1

    def test_products(self):
        n = 2
        ab = bs_mul(E(n, 1, 0), E(n, 0, 1))
        # composition a o b: x -> n (x + 1)
        assert ab == word_to_element("ab", n) == E(n, 1, n)
        assert bs_inv(E(n, 0, 1)) == E(n, 0, -1)
        assert bs_mul(bs_mul(E(n, 1, 0), E(n, 0, 1)), E(n, -1, 0)) == E(n, 0, n)

    def test_normal_form_minimal_exponent(self):
        g = BSElement(3, 0, 9, 2)
        assert (g.m, g.j) == (1, 0) and g.t == 1
        assert E(2, 0, Fraction(3, 8)).j == 3
        with pytest.raises(ValueError):
            E(2, 0, Fraction(1, 3))

    def test_parameter_mismatch(self):
        with pytest.raises(ParameterMismatch):
            bs_mul(BSElement.gen_a(2), BSElement.gen_a(3))
        with pytest.raises(ParameterMismatch):
            word_to_element("ab", 1)

    @pytest.mark.parametrize("bad", ["abc", "a^-1^-1", "A^-1", "a b + a"])
    def test_malformed_words(self, bad):
        with pytest.raises(MalformedWord):
            word_to_element(bad, 2)

    def test_parse_word_forms(self):
        assert parse_word("a b a^-1") == parse_word("aba⁻¹") == parse_word("abA") == ["a", "b", "A"]

    @settings(max_examples=200, deadline=None)
    @given(words, words, st.sampled_from([2, 3, 4]))
    def test_concatenation_is_product(self, w1, w2, n):
        assert word_to_element(w1 + w2, n) == bs_mul(word_to_element(w1, n), word_to_element(w2, n))

    @settings(max_examples=100, deadline=None)
    @given(words, st.sampled_from([2, 3]))
    def test_inverse(self, w, n):
        g = word_to_element(w, n)
        assert bs_mul(g, bs_inv(g)) == BSElement.identity(n)
        assert bs_mul(bs_inv(g), g) == BSElement.identity(n)

    def test_faithful_against_britton_exhaustive(self):
        for n in (2, 3):
            for length in range(7):
                for w in itertools.product("abAB", repeat=length):
                    w = "".join(w)
                    assert (word_to_element(w, n) == BSElement.identity(n)) == britton_trivial(w, n), w

    @settings(max_examples=300, deadline=None)
    @given(st.text(alphabet="abAB", min_size=7, max_size=8), st.sampled_from([2, 3]))
    def test_faithful_against_britton_length8(self, w, n):
        assert (word_to_element(w, n) == BSElement.identity(n)) == britton_trivial(w, n)

    def test_britton_oracle_sees_relators(self):
        assert britton_trivial("abABB", 2)
        assert britton_trivial("AbbabbaBBAbA", 2) is (word_to_element("AbbabbaBBAbA", 2) == BSElement.identity(2))


class TestStandardRep:
    def test_generators(self):
        assert std_rep_eval(BSElement.gen_a(2), 1).exact == 2
        assert std_rep_eval(BSElement.gen_b(2) ** 2, 0).exact == 2
        assert std_rep_eval(word_to_element("ab", 3), INF).is_infinite

    def test_affine_of(self):
        assert affine_of(BSElement.gen_a(5)) == AffineMap(5, 0)
        assert is_orientation_preserving(affine_of(word_to_element("AbBa", 3)))

    def test_orientation(self):
        assert not is_orientation_preserving(AffineMap(-1, 0))
        f = AffineMap(-2, 3)
        assert f.compose(f).c == 4 and is_orientation_preserving(f.compose(f))

    @settings(max_examples=100, deadline=None)
    @given(words, words, st.fractions(min_value=-5, max_value=5, max_denominator=7))
    def test_group_action(self, w1, w2, x):
        n = 2
        g1, g2 = word_to_element(w1, n), word_to_element(w2, n)
        lhs = std_rep_eval(bs_mul(g1, g2), x)
        rhs = std_rep_eval(g1, std_rep_eval(g2, x))
        assert lhs.exact == rhs.exact

    def test_float_points(self):
        p = CirclePoint.from_u(0.3)
        q = std_rep_eval(BSElement.gen_b(2), p)
        assert math.isclose(q.x, p.x + 1, rel_tol=1e-12)


class TestAffineMaps:
    def test_inverse_and_power(self):
        f = AffineMap(Fraction(3), Fraction(-2))
        assert f.compose(f.inverse()) == AffineMap.identity()
        assert f**3 == f.compose(f.compose(f))
        assert f**-2 == f.inverse().compose(f.inverse())

    def test_fixes(self):
        assert AffineMap(2, 0).fixes(0) and AffineMap(2, 0).fixes(INF)
        assert not AffineMap(1, 1).fixes(0)

    def test_zero_slope(self):
        with pytest.raises(ValueError):
            AffineMap(0, 1)


class TestCircleCoordinates:
    def test_round_trip(self):
        rng = random.Random(7)
        worst = 0.0
        for _ in range(10_000):
            u = rng.random()
            if abs(u - 0.5) < 1e-9:
                continue
            worst = max(worst, circle_dist(u, u_of_x(x_of_u(u))))
        assert worst < 1e-12

    def test_infinity(self):
        assert x_of_u(0.5) is INF
        assert u_of_x(INF) == 0.5
        assert CirclePoint.from_x(INF).is_infinite

    def test_orientation(self):
        # increasing x is increasing u on the affine chart
        us = [u_of_x(x) for x in (-1e6, -3.0, -0.5, 0.0, 0.5, 3.0, 1e6)]
        shifted = [(u - 0.5) % 1 for u in us]
        assert shifted == sorted(shifted)
