"""Hankel determinants, Pade approximants and the lacunary Pade ladder.

``gtilde(k)`` is the reversed, signed Thue-Morse prefix of length ``3 * 2^k``;
evaluated at ``1/p`` it equals ``(-1)^{k+1} p z_{3 2^k}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import gcd, lcm
from typing import Sequence

from .cf import cf_expand, convergents, records_of
from .exact import IntPolynomial, prefix_rational
from .words import thue_morse, tm_digit


class CoeffSeries:
    """Power series coefficients ``c_0, c_1, ...`` stored finitely, zero beyond."""

    def __init__(self, coeffs: Sequence[int | Fraction], name: str = ""):
        self.coeffs = list(coeffs)
        self.name = name

    @classmethod
    def of(cls, poly: IntPolynomial, name: str = "") -> "CoeffSeries":
        return cls(poly.coeffs, name)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)


# --- the polynomials -------------------------------------------------------------

GTILDE0 = IntPolynomial([1, 1, -1])


def tk_poly(k: int) -> IntPolynomial:
    """``prod_{j<k} (1 - X^{2^j})``, whose coefficients are ``t_0 .. t_{2^k - 1}``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = IntPolynomial([1])
    for j in range(k):
        out = out * IntPolynomial.monomial(1 << j, -1).__add__(IntPolynomial([1]))
    return out


def gtilde(k: int) -> IntPolynomial:
    """``(1-z)(1-z^2)...(1-z^{2^{k-1}}) gtilde_0(z^{2^k})``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return tk_poly(k) * GTILDE0.compose_power(1 << k)


def gtilde_from_word(k: int) -> IntPolynomial:
    """``(-1)^{k+1} (t_{3 2^k - 1} + t_{3 2^k - 2} z + ... + t_0 z^{3 2^k - 1})``."""
    n = 3 << k
    sign = -1 if k % 2 == 0 else 1
    return IntPolynomial(sign * tm_digit(n - 1 - i) for i in range(n))


# --- determinants -------------------------------------------------------------------

def hankel_matrix(series: CoeffSeries, k: int) -> list[list]:
    return [[series[i + j] for j in range(k)] for i in range(k)]


def bareiss_det(matrix: Sequence[Sequence[int | Fraction]]) -> int | Fraction:
    """Fraction-free Gaussian elimination; every division is exact."""
    M = [list(row) for row in matrix]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * pivot - M[i][k] * M[k][j]
                M[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
            M[i][k] = 0
        prev = pivot
    return sign * M[n - 1][n - 1]


def cofactor_det(matrix: Sequence[Sequence[int | Fraction]]) -> int | Fraction:
    """Leibniz expansion; an independent check for small matrices."""
    n = len(matrix)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= matrix[i][perm[i]]
            if prod == 0:
                break
        total += -prod if inv % 2 else prod
    return total


def hankel_det(series: CoeffSeries, k: int) -> int | Fraction:
    """``H_k(f) = det (c_{i+j})_{0 <= i, j < k}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return bareiss_det(hankel_matrix(series, k))


def hankel_table(series: CoeffSeries, j0: int, j1: int) -> dict[int, int | Fraction]:
    return {j: hankel_det(series, j) for j in range(j0, j1 + 1)}


# --- Pade -------------------------------------------------------------------------

class PadeNotExists(ArithmeticError):
    """Raised when the linear system admits only ``B = 0``."""


@dataclass(frozen=True)
class PadePair:
    A: IntPolynomial
    B: IntPolynomial
    u: int
    v: int
    order: int | float      # exact vanishing order of B f - A
    leading: Fraction        # coefficient of z^order in B f - A
    rank: int                # rank of the v x (v+1) system for B
    normalized: bool         # B(0) != 0

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.v

    @property
    def error_coefficient(self) -> Fraction:
        """Leading coefficient of ``f - A/B``, i.e. ``leading / B(0)``."""
        if not self.normalized:
            raise ValueError("B(0) = 0: f - A/B does not start at z^order")
        return self.leading / self.B[0]


def _nullspace(rows: list[list[Fraction]], ncols: int) -> tuple[int, list[list[Fraction]]]:
    """Rank and a basis of the right kernel, by exact reduced row echelon form."""
    M = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -M[i][fc]
        basis.append(vec)
    return len(pivots), basis


def _clear(coeffs: Sequence[Fraction]) -> list[int]:
    den = 1
    for c in coeffs:
        den = lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    return [c // g for c in ints] if g > 1 else ints


def pade(series: CoeffSeries, u: int, v: int) -> PadePair:
    """``A/B`` with ``deg A <= u``, ``deg B <= v`` and ``ord(B f - A) >= u + v + 1``.

    ``B(0) = 1`` whenever the system allows it; otherwise the kernel vector of
    smallest degree is used and ``normalized`` is False.  Polynomials are
    returned with integer coefficients (common denominator cleared).
    """
    if u < 0 or v < 0:
        raise ValueError("u, v must be >= 0")
    # unknowns b_0..b_v; equations: coefficient of z^n in B f vanishes, n = u+1..u+v
    rows = [[Fraction(series[n - i]) for i in range(v + 1)] for n in range(u + 1, u + v + 1)]
    rank, basis = _nullspace(rows, v + 1) if rows else (0, [[Fraction(int(i == 0)) for i in range(v + 1)]])
    if not basis:
        raise PadeNotExists(f"only B = 0 solves the [{u}/{v}] system")
    choice = next((vec for vec in basis if vec[0] != 0), None)
    normalized = choice is not None
    if choice is None:
        # prefer the kernel vector whose top nonzero coefficient has smallest degree
        choice = min(basis, key=lambda vec: max(i for i, x in enumerate(vec) if x != 0))
    else:
        choice = [x / choice[0] for x in choice]
    B = IntPolynomial(_clear(choice))
    if not B:
        raise PadeNotExists(f"only B = 0 solves the [{u}/{v}] system")
    Bf = B * IntPolynomial(series.coeffs)
    A = Bf.truncate(u + 1)
    err = Bf - A
    order = err.valuation()
    leading = Fraction(err[order]) if order != math.inf else Fraction(0)
    return PadePair(A, B, u, v, order, leading, rank, normalized)


# --- the ladder ------------------------------------------------------------------------

def ladder_j_range(K: int) -> range:
    return range(3 * (1 << (K - 1)) + 1, 3 * (1 << K))


@dataclass(frozen=True)
class LadderRung:
    j: int
    m: int
    p_jm: int
    q_jm: int
    h_j: Fraction
    error: Fraction           # |gtilde_{K+m}(1/p) - p_jm/q_jm|
    c_q: float                # q / p^{2^m j}         (4.8 constants)
    c_err: float              # error * p^{2^{m+1} j} (4.9 constants)
    c_q2: float               # error * q^2           (4.10 constants)
    ratio_to_h: float         # error * p^{2^{m+1} j} / |h_j|  (4.7 shape)


def _log_ratio_exp(num_log: float) -> float:
    try:
        return math.exp(num_log)
    except OverflowError:
        return math.inf


def _flog(x: Fraction | int) -> float:
    x = abs(Fraction(x))
    if x == 0:
        return -math.inf
    return math.log(x.numerator) - math.log(x.denominator)


def pade_ladder(K: int, m: int, p: int, js: Sequence[int] | None = None) -> list[LadderRung]:
    """``p_{j,m}/q_{j,m}`` from ``[j-1/j]`` of ``gtilde_K`` lifted by ``z -> z^{2^m}``."""
    if K < 1 or m < 0:
        raise ValueError("need K >= 1 and m >= 0")
    js = list(ladder_j_range(K) if js is None else js)
    g = gtilde(K)
    series = CoeffSeries.of(g)
    target = gtilde(K + m)(Fraction(1, p))
    lift = tk_poly(m)
    e = 1 << m
    out = []
    for j in js:
        Hj = hankel_det(series, j)
        if Hj == 0:
            raise ValueError(f"H_{j}(gtilde_{K}) = 0; the [{j - 1}/{j}] approximant is degenerate")
        h_j = Fraction(hankel_det(series, j + 1), Hj)
        pp = pade(series, j - 1, j)
        P = lift * pp.A.compose_power(e)
        Q = pp.B.compose_power(e)
        scale = p ** (e * j)
        # p^{2^m j} P(1/p) is an integer since deg P <= 2^m j - 1
        p_jm = sum(c * p ** (e * j - i) for i, c in enumerate(P.coeffs))
        q_jm = sum(c * p ** (e * j - i) for i, c in enumerate(Q.coeffs))
        if q_jm < 0:
            p_jm, q_jm = -p_jm, -q_jm
        err = abs(target - Fraction(p_jm, q_jm))
        lp = math.log(p)
        le = _flog(err)
        c_q = _log_ratio_exp(math.log(q_jm) - e * j * lp)
        c_err = _log_ratio_exp(le + 2 * e * j * lp)
        c_q2 = _log_ratio_exp(le + 2 * math.log(q_jm))
        ratio = _log_ratio_exp(le + 2 * e * j * lp - _flog(h_j)) if h_j else math.inf
        out.append(LadderRung(j, m, p_jm, q_jm, h_j, err, c_q, c_err, c_q2, ratio))
    return out


# --- second largest partial quotient ----------------------------------------------------------

def largeqp_denominator(k: int, p: int) -> int:
    """Denominator of the convergent carrying the big quotient of ``z_{3 2^k}``."""
    if p == 2:
        return 2 ** (1 << (k - 1)) + 1
    return (p ** (1 << (k - 1)) + 1) // 2


@dataclass(frozen=True)
class SecondMax:
    k: int
    p: int
    largest: int
    largest_j: int
    second: int
    ratio: float              # second / p^{2^{k-1}}
    ratio_k4_shape: float     # second / p^{3 2^k / 24}


def second_largest_pq_bound(k: int, p: int) -> SecondMax:
    """Drop the big quotient of ``z_{3 2^k}`` and measure the largest one left."""
    if k < 2:
        raise ValueError("k must be >= 2")
    m = 3 << k
    recs = records_of(prefix_rational(thue_morse(), m, p), m, p)
    den = largeqp_denominator(k, p)
    marked = [r for r in recs if r.conv_den == den]
    big = max(marked or recs, key=lambda r: r.r)
    others = [r.r for r in recs if r is not big]
    second = max(others, default=0)
    lp = math.log(p)
    ls = math.log(second) if second else -math.inf
    return SecondMax(k, p, big.r, big.j, second,
                     math.exp(ls - (1 << (k - 1)) * lp),
                     math.exp(ls - (3 << k) / 24 * lp))
