import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_cf.exact import IntPolynomial, prefix_rational
from padic_cf.families import gcd_checks, grandqp_bracket
from padic_cf.pade import (GTILDE0, CoeffSeries, bareiss_det, cofactor_det, gtilde, gtilde_from_word,
                           hankel_det, hankel_matrix, hankel_table, ladder_j_range, largeqp_denominator,
                           pade, pade_ladder, second_largest_pq_bound, tk_poly)
from padic_cf.words import thue_morse

G2 = CoeffSeries.of(gtilde(2), "gtilde_2")
GOLDEN_H = {1: 1, 2: -2, 3: 0, 4: 0, 5: 0, 6: 0, 7: 64, 8: 128, 9: -64, 10: -56, 11: -14, 12: 1}


def test_hankel_golden_table():
    assert hankel_table(G2, 1, 12) == GOLDEN_H


@pytest.mark.parametrize("j", range(1, 7))
def test_hankel_cofactor_oracle(j):
    assert cofactor_det(hankel_matrix(G2, j)) == GOLDEN_H[j]


@settings(max_examples=60)
@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_bareiss_matches_leibniz_on_sign_matrices(n, rng):
    M = [[rng.choice((-1, 1)) for _ in range(n)] for _ in range(n)]
    assert bareiss_det(M) == cofactor_det(M)


@given(st.lists(st.lists(st.fractions(max_denominator=9).filter(lambda x: abs(x) < 9),
                         min_size=3, max_size=3), min_size=3, max_size=3))
def test_bareiss_with_fractions(M):
    assert bareiss_det(M) == cofactor_det(M)


def test_bareiss_edge_cases():
    assert bareiss_det([]) == 1
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[0, 0], [1, 2]]) == 0
    with pytest.raises(ValueError):
        hankel_det(G2, 0)


def test_tk_poly_examples():
    assert tk_poly(0).coeffs == [1]
    assert tk_poly(2).coeffs == [1, -1, -1, 1]
    assert tk_poly(5).coeffs == thue_morse().prefix(32)
    with pytest.raises(ValueError):
        tk_poly(-1)


@pytest.mark.parametrize("k", range(0, 11))
def test_gtilde_two_constructions(k):
    g = gtilde(k)
    assert g == gtilde_from_word(k)
    assert g.degree == 3 * (1 << k) - 1
    if k == 0:
        assert g == GTILDE0


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("k", range(1, 8))
def test_gtilde_evaluation_identity(k, p):
    z = prefix_rational(thue_morse(), 3 << k, p)
    assert gtilde(k)(Fraction(1, p)) == (-1) ** (k + 1) * p * z


def test_pade_k7_error_coefficient():
    pp = pade(G2, 6, 7)
    assert pp.order == 14 and pp.normalized
    assert pp.error_coefficient == 2 == Fraction(GOLDEN_H[8], GOLDEN_H[7])
    assert not pp.rank_deficient


@pytest.mark.parametrize("k", [7, 8, 9, 10, 11])
def test_error_coefficient_is_hankel_ratio(k):
    pp = pade(G2, k - 1, k)
    assert pp.order == 2 * k
    assert pp.error_coefficient == Fraction(GOLDEN_H[k + 1], GOLDEN_H[k])


def test_pade_of_polynomial_is_itself():
    pp = pade(CoeffSeries([1, 2, 3]), 2, 1)
    assert pp.A.coeffs == [1, 2, 3] and pp.B.coeffs == [1] and pp.order == math.inf


def test_pade_geometric_series():
    pp = pade(CoeffSeries([1] * 8), 0, 1)
    assert pp.A.coeffs == [1] and pp.B.coeffs == [1, -1]
    # the finite series ends at z^7, so B f - A = -z^8
    assert pp.order == 8 and pp.leading == -1


def test_pade_rank_deficient_at_zero_hankel():
    pp = pade(G2, 3, 4)
    assert GOLDEN_H[4] == 0 and pp.rank_deficient
    assert pp.order >= 8
    with pytest.raises(ValueError):
        pade(G2, -1, 2)


@settings(max_examples=40)
@given(st.lists(st.integers(-3, 3), min_size=12, max_size=12), st.integers(0, 5), st.integers(0, 5))
def test_pade_order_condition(coeffs, u, v):
    f = CoeffSeries(coeffs)
    pp = pade(f, u, v)
    assert pp.A.degree <= u and pp.B.degree <= v and pp.B
    assert pp.order >= u + v + 1


def test_ladder_range():
    assert list(ladder_j_range(2)) == [7, 8, 9, 10, 11]


def test_ladder_m0_is_plain_pade():
    p = 3
    for rung in pade_ladder(2, 0, p):
        pp = pade(G2, rung.j - 1, rung.j)
        x = Fraction(1, p)
        assert Fraction(rung.p_jm, rung.q_jm) == pp.A(x) / pp.B(x)


@pytest.mark.parametrize("m", range(0, 5))
def test_ladder_error_shape(m):
    p = 3
    for rung in pade_ladder(2, m, p):
        pred = abs(rung.h_j) * Fraction(1, p ** (2 ** (m + 1) * rung.j))
        assert pred / 10 <= rung.error <= 10 * pred
        assert rung.h_j == Fraction(GOLDEN_H[rung.j + 1], GOLDEN_H[rung.j])
        assert rung.c_q > 0 and rung.c_q2 > 0


def test_ladder_constants_settle():
    top = pade_ladder(2, 4, 3)
    assert all(abs(r.ratio_to_h - 0.5852) < 1e-3 for r in top)
    assert [round(r.c_q) for r in top] == [2, 2, 8, 4, 14]


def test_ladder_refuses_singular_hankel():
    with pytest.raises(ValueError, match="degenerate"):
        pade_ladder(2, 1, 3, js=[4])
    with pytest.raises(ValueError):
        pade_ladder(0, 1, 3)


def test_largeqp_denominators():
    assert largeqp_denominator(1, 3) == 2
    assert largeqp_denominator(3, 3) == 41
    assert largeqp_denominator(3, 2) == 17


@pytest.mark.parametrize("p,k", [(3, k) for k in range(3, 7)] + [(5, k) for k in range(3, 6)])
def test_second_largest_quotient_is_small(p, k):
    sm = second_largest_pq_bound(k, p)
    assert sm.ratio <= 10
    assert sm.largest > sm.second
    assert sm.largest >= p ** (1 << k)


def test_second_largest_rejects_small_k():
    with pytest.raises(ValueError):
        second_largest_pq_bound(1, 3)


def test_gcd_identities():
    for p in (2, 3, 5, 7):
        assert all(gcd_checks(p, 6).values())


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("k", range(1, 7))
def test_grandqp_bracket(k, p):
    scaled, bound = grandqp_bracket(k, p)
    assert 0 < scaled <= bound == 2
