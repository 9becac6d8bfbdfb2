"""Explicit approximation families for the Thue-Morse and Fibonacci p-adic numbers.

Throughout, ``xi = sum c_k p^k`` with ``c_k = t_k`` (Thue-Morse) or
``c_k = f_{k+1}`` (Fibonacci).  A pair ``(a, b)`` is scored by its valuation
``v = v_p(b xi - a)`` and ``mu_sample = 2 v log p / log |ab|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .cf import PQRecord, associated_records, cf_expand, convergents, largest_record
from .exact import (IntPolynomial, centered_residue, lacunary_product, linear_form_valuation,
                    prefix_rational, truncated_integer, vp_int)
from .exponents import SMALL_HEIGHT_EXPONENT, prefix_summaries
from .pade import tk_poly
from .words import FIB, DigitSequence, fibonacci_word, thue_morse, tm_digit

GOLDEN = (1 + math.sqrt(5)) / 2


def _log_abs(n: int) -> float:
    n = abs(n)
    # math.log handles big ints, but keep 0 explicit
    return math.log(n) if n else -math.inf


@dataclass(frozen=True)
class FamilyPair:
    tag: str              # tm-main, tm-generalized(j), fib-r, fib-x
    index: int            # k or n
    a: int
    b: int
    v: int | float
    p: int
    predicted_v: int | None = None
    notes: dict = field(default_factory=dict)

    @property
    def log_ab(self) -> float:
        return _log_abs(self.a) + _log_abs(self.b)

    @property
    def mu_sample(self) -> float:
        return 2 * self.v * math.log(self.p) / self.log_ab

    def to_json(self) -> dict:
        return {"tag": self.tag, "index": self.index, "a": str(self.a), "b": str(self.b),
                "v": None if self.v == math.inf else int(self.v), "p": self.p,
                "predicted_v": self.predicted_v, "mu_sample": self.mu_sample}


# --- Thue-Morse ----------------------------------------------------------------------

def tm_coefficients(k: int, n: int) -> list[int]:
    """Coefficients ``s_i = t_i + t_{i - 2^k}`` of ``(1 + X^{2^k}) sum t_i X^i``, ``i < n``."""
    s = 1 << k
    return [tm_digit(i) + (tm_digit(i - s) if i >= s else 0) for i in range(n)]


def balanced_expansion(n: int, p: int, length: int) -> list[int]:
    """Digits ``d_i`` in ``(-p/2, p/2]`` with ``n = sum d_i p^i`` modulo ``p^length``."""
    out = []
    for _ in range(length):
        d = centered_residue(n, p)
        if 2 * d == -p:
            d += p
        out.append(d)
        n = (n - d) // p
    return out


def tm_family_pair(k: int, p: int, guard: int | None = None) -> FamilyPair:
    """``b = 1 + p^{2^k}`` and ``a`` the centered residue of ``b xi`` mod ``p^{3 2^{k+1}}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t = thue_morse()
    b = 1 + p ** (1 << k)
    M = 3 << (k + 1)
    mod = p ** M
    a = centered_residue(b * truncated_integer(t, M, p), mod)
    if 2 * abs(a) > mod or abs(a) > 2 * p ** ((3 << k) + 1):
        raise ArithmeticError(f"residue for k={k}, p={p} breaks the height bound")
    # the same integer, read off the coefficient sequence
    r_k = IntPolynomial(tm_coefficients(k, 3 << k))(p)
    if r_k != a:
        raise ArithmeticError(f"centered residue disagrees with R_k(p) at k={k}, p={p}")
    val = linear_form_valuation(a, b, t, p, guard=guard, start=2 * M)
    predicted = M + (1 if p == 2 else 0)
    ab = abs(a * b)
    # |b xi - a|_p <= 4 p^3 |ab|^{-3/2}  <=>  |ab|^3 <= 16 p^{6 + 2v}
    good = ab ** 3 <= 16 * p ** (6 + 2 * val.value) if val.exact else True
    notes = {"exact": val.exact, "good_bound": good,
             "height_a": abs(a) <= 2 * p ** ((3 << k) + 1), "height_b": b <= p ** ((1 << k) + 1)}
    return FamilyPair("tm-main", k, a, b, val.value, p, predicted, notes)


@dataclass(frozen=True)
class ZeroRun:
    j: int
    run_start: int
    run_length: int
    predicted_start: int
    predicted_end: int       # exclusive
    present: bool            # predicted positions all vanish
    exponent: float          # log_p of 1/|b xi - a|_p over log_p |ab| for the truncated pair
    pair: FamilyPair


def tm_zero_run_scan(k: int, j_max: int, p: int) -> list[ZeroRun]:
    """Locate the zero runs of ``(1 + p^{2^k}) xi`` predicted at ``2^{k-1}(6+16j) .. 2^{k-1}(12+16j)-1``.

    The coefficient sequence ``s_i`` lies in {0, +-1, +-2}; it is cross-checked
    against the balanced base-p expansion of ``b C_N`` (they agree for ``p >= 5``,
    and modulo carries for small ``p``, so only the integer identity is tested).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    h = 1 << (k - 1)
    N = h * (12 + 16 * j_max) + 8
    s = tm_coefficients(k, N)
    b = 1 + p ** (1 << k)
    if IntPolynomial(s)(p) != b * truncated_integer(thue_morse(), N, p) - p ** N * _tail_correction(k, N, p):
        raise ArithmeticError("coefficient sequence does not reproduce b * C_N")
    t = thue_morse()
    out = []
    for j in range(j_max + 1):
        lo, hi = h * (6 + 16 * j), h * (12 + 16 * j)
        present = all(x == 0 for x in s[lo:hi])
        # actual maximal run containing lo (if s[lo] == 0)
        start = lo
        while start > 0 and s[start - 1] == 0:
            start -= 1
        end = lo
        while end < N and s[end] == 0:
            end += 1
        a = IntPolynomial(s[:lo])(p)
        val = linear_form_valuation(a, b, t, p, start=2 * hi + 8)
        pair = FamilyPair(f"tm-generalized({j})", k, a, b, val.value, p, hi + (1 if p == 2 else 0))
        expo = val.value * math.log(p) / pair.log_ab
        out.append(ZeroRun(j, start, end - start, lo, hi, present, expo, pair))
    return out


def _tail_correction(k: int, N: int, p: int) -> int:
    """``sum_{N - 2^k <= i < N} t_i p^{i - N + 2^k}``: the part of ``p^{2^k} C_N`` beyond ``p^N``."""
    s = 1 << k
    return sum(tm_digit(i) * p ** (i - (N - s)) for i in range(N - s, N))


def predicted_generalized_exponent(j: int) -> Fraction:
    """``(3 + 4j)/(2 + 4j)``: ``|b xi - a|_p ~ |ab|^{-this}``."""
    return Fraction(3 + 4 * j, 2 + 4 * j)


# --- identities and gcds -----------------------------------------------------------------

def propmain_identity(k: int, p: int) -> tuple[bool, bool]:
    """``z_{4^k}`` and ``z_{2 4^k}`` against the lacunary products."""
    t = thue_morse()
    first = prefix_rational(t, 4 ** k, p) == lacunary_product(p, 2 * k - 1) / p
    second = prefix_rational(t, 2 * 4 ** k, p) == -lacunary_product(p, 2 * k) / p
    return first, second


def grandqp_bracket(k: int, p: int) -> tuple[Fraction, Fraction]:
    """``|(p^{2^k} + 1) z_{3 2^{k+1}} - T_k(p)|`` scaled by ``p^{3 2^k}``; returns (scaled, upper 2)."""
    z = prefix_rational(thue_morse(), 3 << (k + 1), p)
    err = abs((p ** (1 << k) + 1) * z - tk_poly(k)(p))
    return err * p ** (3 << k), Fraction(2)


def gcd_checks(p: int, k_max: int = 8) -> dict[str, bool]:
    ok_pairs = all(gcd(p ** (1 << h) - 1, p ** (1 << k) + 1) in (1, 2)
                   for k in range(1, k_max + 1) for h in range(k))
    want = 1 if p == 2 else 2
    ok_tk = all(gcd(tk_poly(k)(p), p ** (1 << k) + 1) == want for k in range(2, min(k_max, 6) + 1))
    return {"gcd(p^2^h-1, p^2^k+1) | 2": ok_pairs, f"gcd(T_k(p), p^2^k+1) = {want}": ok_tk}


# --- Fibonacci -----------------------------------------------------------------------------

def fib_lcp_lengths(n: int) -> tuple[int, int]:
    """Longest common prefixes of f with ``U^inf`` and with ``V U^inf``; ``|U| = F_n``, ``|V| = F_{n+1}``."""
    from .words import EventuallyPeriodic, longest_common_prefix
    f = fibonacci_word()
    U = f.prefix(FIB[n])
    V = f.prefix(FIB[n + 1])
    cap = 4 * FIB[n + 2]
    first = longest_common_prefix(f, EventuallyPeriodic((), U), cap)
    second = longest_common_prefix(f, EventuallyPeriodic(V, U), cap)
    return first, second


def fib_family_pairs(n: int, p: int) -> tuple[FamilyPair, FamilyPair]:
    """``(r_n, y_n)`` and ``(x_n, y_n)`` with ``y_n = p^{F_n} - 1``.

    ``U^inf`` as a p-adic number is ``-U/(p^{F_n} - 1)``, so ``r_n = -U``;
    ``V U^inf`` gives ``x_n = (p^{F_n} - 1) V - p^{F_{n+1}} U``.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    f = fibonacci_word()
    Fn, Fn1, Fn2 = FIB[n], FIB[n + 1], FIB[n + 2]
    y = p ** Fn - 1
    U = truncated_integer(f, Fn, p)
    V = truncated_integer(f, Fn1, p)
    r = -U
    x = y * V - p ** Fn1 * U
    lcp_r, lcp_x = fib_lcp_lengths(n)
    vr = linear_form_valuation(r, y, f, p, start=2 * Fn2 + 8)
    vx = linear_form_valuation(x, y, f, p, start=4 * Fn2 + 8)
    fr = FamilyPair("fib-r", n, r, y, vr.value, p, Fn2 - 2, {"lcp": lcp_r})
    fx = FamilyPair("fib-x", n, x, y, vx.value, p, 2 * Fn2 - 2, {"lcp": lcp_x})
    return fr, fx


@dataclass(frozen=True)
class FibWRecords:
    n: int
    p: int
    first: PQRecord           # largest at m = F_{n+2} - 2
    second: PQRecord          # largest at m = 2 F_{n+2} - 2
    first_ratio: float        # r / p^{F_{n-1}}
    second_ratio: float       # r / p^{F_{n+1}}
    first_divides: bool       # convergent denominator divides p^{F_n} - 1
    second_divides: bool


def fib_w_pq_records(n: int, p: int) -> FibWRecords:
    if n < 5:
        raise ValueError("n must be >= 5")
    f = fibonacci_word()
    y = p ** FIB[n] - 1
    m1, m2 = FIB[n + 2] - 2, 2 * FIB[n + 2] - 2
    r1 = largest_record(associated_records(f, p, m1))
    r2 = largest_record(associated_records(f, p, m2))
    lp = math.log(p)
    return FibWRecords(
        n, p, r1, r2,
        math.exp(math.log(r1.r) - FIB[n - 1] * lp),
        math.exp(math.log(r2.r) - FIB[n + 1] * lp),
        y % r1.conv_den == 0, y % r2.conv_den == 0)


def fib_eta_bounds() -> dict[str, float]:
    """Asymptotic comparison values for the Fibonacci prefixes."""
    g = GOLDEN
    return {"lower-first": 1 / (4 * g + 1), "lower-second": g / (3 * g * g + 1),
            "mu_hat_lower": 2 + 1 / (2 * g), "mu_times_lower": 4 * g * g / (1 + g * g),
            "mu": g * g}


# --- Mahler-type product ------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductCertificate:
    base: int
    ell: int
    pqs: tuple[int, ...]
    worst: float              # max over convergents of 1 / (q^2 |x - p/q|)
    worst_q: int
    fitted_K: float           # max of log(worst_j) / (log b sqrt(log q log log q)), q >= 16


def mahler_product_quality(base: int, ell: int) -> ProductCertificate:
    """Continued fraction of ``prod_{h<=ell} (1 - base^{-2^h})`` and how well it is approximable."""
    x = lacunary_product(base, ell)
    cf = cf_expand(x)
    conv = convergents(cf)
    worst, worst_q, K = 0.0, 1, 0.0
    lb = math.log(base)
    for pn, qn in conv[:-1]:
        gap = abs(x - Fraction(pn, qn))
        # 1/(q^2 gap) as a float through logs
        q = math.log(qn)
        score = math.exp(-(2 * q + math.log(gap.numerator) - math.log(gap.denominator)))
        if score > worst:
            worst, worst_q = score, qn
        if qn >= 16:
            K = max(K, math.log(max(score, 1.0)) / (lb * math.sqrt(q * math.log(q))))
    return ProductCertificate(base, ell, cf.pqs, worst, worst_q, K)


# --- conjecture experiment ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaggedSample:
    a: int
    b: int
    v: int
    exponent: float           # v log p / log |ab|
    tag: str


def tag_tm_sample(a: int, b: int, v: int, p: int) -> str:
    """Match ``b`` against ``1 + p^{2^k}`` (possibly halved) and ``v`` against the run ends."""
    b = abs(b)
    for k in range(1, 40):
        B = 1 + p ** (1 << k)
        if B > 4 * b:
            break
        if b in (B, B // 2 if B % 2 == 0 else -1):
            h = 1 << (k - 1)
            for j in range(0, 1 << 16):
                end = h * (12 + 16 * j)
                if end > v + 2:
                    break
                if abs(v - end) <= 1:
                    return "tm-main" if j == 0 else f"tm-generalized({j})"
            return f"b=1+p^{1 << k}"
    return "untagged"


def conjecture_report(p: int, m_max: int, eps: float, jobs: int = 1) -> list[TaggedSample]:
    """Every convergent sample of the Thue-Morse prefixes beating ``|ab|^{-1-eps}``, tagged."""
    sums = prefix_summaries(thue_morse(), p, m_max, jobs=jobs)
    seen = {}
    lp = math.log(p)
    for s in sums:
        for smp in s.samples.values():
            if not smp.exact or smp.log_q <= SMALL_HEIGHT_EXPONENT * lp:
                continue
            # |b xi - a|_p < |ab|^{-1-eps}; log_q is half of log |ab|
            e = smp.v * lp / (2 * smp.log_q)
            if e > 1 + eps:
                seen[(smp.a, smp.b)] = TaggedSample(smp.a, smp.b, smp.v, e,
                                                    tag_tm_sample(smp.a, smp.b, smp.v, p))
    return sorted(seen.values(), key=lambda t: (abs(t.a * t.b), t.a))
