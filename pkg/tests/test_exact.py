import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_cf.exact import (IntPolynomial, Valuation, centered_residue, default_guard, is_prime,
                            lacunary_product, linear_form_valuation, prefix_integers,
                            prefix_rational, truncated_integer, vp, vp_int)
from padic_cf.words import EventuallyPeriodic, FunctionSequence, ListSequence, thue_morse, thue_morse01

ZERO = EventuallyPeriodic((), (0,))


def vp_naive(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@given(st.integers(-10 ** 60, 10 ** 60).filter(bool), st.sampled_from([2, 3, 5, 7]))
def test_vp_int_matches_naive(n, p):
    assert vp_int(n, p) == vp_naive(n, p)


def test_vp_edge_cases():
    assert vp_int(0, 3) == math.inf
    assert vp_int(3 ** 1000 * 7, 3) == 1000
    assert vp(Fraction(9, 12), 3) == 1 and vp(Fraction(9, 12), 2) == -2


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_z12_identity():
    p = 3
    z12 = prefix_rational(thue_morse(), 12, p)
    rhs = (Fraction(-1, p) + Fraction(1, p ** 2) + Fraction(2, p ** 9) - Fraction(2, p ** 10)
           - Fraction(1, p ** 13) + Fraction(1, p ** 14))
    assert (1 + Fraction(1, p ** 2)) * z12 == rhs


def test_prefix_rational_examples():
    assert prefix_rational(ZERO, 5, 3) == 0
    assert prefix_rational(thue_morse(), 16, 3) == lacunary_product(3, 3) / 3
    with pytest.raises(ValueError):
        prefix_rational(thue_morse(), 0, 3)


def test_truncated_integer_examples():
    assert truncated_integer(thue_morse(), 3, 3) == 1 - 3 - 9
    assert truncated_integer(ZERO, 10, 5) == 0
    assert truncated_integer(thue_morse01(), 4, 2) == 9


def test_horner_split_long_prefix():
    digits = [random.Random(1).randrange(-1, 2) for _ in range(3000)]
    seq = ListSequence(digits)
    assert truncated_integer(seq, 3000, 7) == sum(c * 7 ** k for k, c in enumerate(digits))


def test_prefix_recursion_and_tail():
    p = 3
    t = thue_morse()
    cs = t.prefix(2001)
    xs = {m: Fraction(C, p ** m) for m, C in prefix_integers(t, 2001, p)}
    for m in range(1, 2001):
        assert p * xs[m + 1] - xs[m] == cs[m]
        assert xs[m] * p ** m == truncated_integer(t, m, p) if m % 250 == 0 else True
    # the tail xi - C_m has valuation exactly m for +-1 digits
    C_big = truncated_integer(t, 2200, p)
    for m in range(1, 2001, 37):
        assert vp_int(C_big - truncated_integer(t, m, p), p) == m


def test_linear_form_examples():
    t = thue_morse()
    assert linear_form_valuation(322, 10, t, 3) == Valuation(12)
    assert linear_form_valuation(t.prefix(1)[0], 1, t, 3).value == 1
    a2 = centered_residue(5 * truncated_integer(t, 12, 2), 2 ** 12)
    assert linear_form_valuation(a2, 5, t, 2).value == 13


def test_linear_form_guard():
    eventually_zero = EventuallyPeriodic((1, 2), (0,))
    v = linear_form_valuation(7, 1, eventually_zero, 3, guard=500)
    assert v == Valuation(500, exact=False)
    assert v.to_json() == {"v": 500, "exact": False}
    with pytest.raises(ValueError):
        linear_form_valuation(0, 0, eventually_zero, 3)


def test_guard_from_environment(monkeypatch):
    monkeypatch.setenv("PADIC_CF_GUARD", "77")
    assert default_guard() == 77
    monkeypatch.setenv("PADIC_CF_GUARD", "0")
    with pytest.raises(ValueError):
        default_guard()


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6),
       st.integers(-30, 30).filter(bool), st.sampled_from([2, 3, 5]))
def test_linear_form_homogeneity(a, b, lam, p):
    t = thue_morse()
    base = linear_form_valuation(a, b, t, p)
    scaled = linear_form_valuation(lam * a, lam * b, t, p)
    assert scaled.value == base.value + vp_int(lam, p)


def test_lacunary_product_examples():
    assert lacunary_product(2, 0) == Fraction(1, 2)
    assert lacunary_product(2, 2) == Fraction(45, 128)
    assert lacunary_product(3, 3) == 3 * prefix_rational(thue_morse(), 16, 3)


def test_centered_residue():
    assert centered_residue(8, 9) == -1
    assert centered_residue(4, 9) == 4
    assert all(abs(centered_residue(n, 10)) <= 5 for n in range(-50, 50))


class TestIntPolynomial:
    def test_basic_arithmetic(self):
        a = IntPolynomial([1, 1, -1])
        b = IntPolynomial([1, -1])
        assert (a * b).coeffs == [1, 0, -2, 1]
        assert (a - a).degree == -1 and not (a - a)
        assert a(2) == -1 and a.compose_power(3).coeffs == [1, 0, 0, 1, 0, 0, -1]
        assert IntPolynomial([0, 0, 3]).valuation() == 2
        assert IntPolynomial().valuation() == math.inf
        assert (a * 2).coeffs == [2, 2, -2] and (2 * a) == a * 2
        assert a.truncate(2).coeffs == [1, 1]
        assert IntPolynomial([10 ** 30]).to_json() == [str(10 ** 30)]

    @given(st.lists(st.integers(-9, 9), max_size=8), st.lists(st.integers(-9, 9), max_size=8),
           st.integers(-5, 5))
    def test_ring_homomorphism(self, ca, cb, x):
        a, b = IntPolynomial(ca), IntPolynomial(cb)
        assert (a * b)(x) == a(x) * b(x)
        assert (a + b)(x) == a(x) + b(x)
        assert (a - b)(x) == a(x) - b(x)
