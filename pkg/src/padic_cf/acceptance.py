"""The acceptance criteria, shared by ``padic-cf verify`` and the test suite.

Each criterion returns a :class:`CriterionResult` whose ``line()`` is the
one-line pass/fail summary.  Runtime budgets are checked as part of the
verdict.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .cf import TrichotomyViolation, associated_records, classify_all
from .exponents import (brute_force_best_pairs, best_pair_staircase, best_v_at,
                        convergent_driven_samples, global_pq_bound_scan,
                        legendre_correspondence_check, pq_scan, prefix_summaries)
from .families import (GOLDEN, fib_family_pairs, fib_lcp_lengths, propmain_identity,
                       tm_family_pair)
from .pade import CoeffSeries, gtilde, hankel_det, largeqp_denominator
from .report import Assertion
from .words import FIB, ListSequence, fibonacci_word, thue_morse


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float
    assertions: list[Assertion] = field(default_factory=list)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] criterion {self.number:>2}: {self.title} | {self.detail} "
                f"| {self.seconds:.2f}s (budget {self.budget:g}s)")


class Context:
    """Shared state: the Thue-Morse prefix scan is used by criteria 7 and 8."""

    def __init__(self, p: int = 3, jobs: int = 1, scale: float = 1.0):
        self.p = p
        self.jobs = jobs
        self.scale = scale
        self._tm_summaries = None

    def scaled(self, n: int, floor: int) -> int:
        return max(floor, int(n * self.scale))

    def tm_summaries(self, m_max: int):
        if self._tm_summaries is None or self._tm_summaries[0] < m_max:
            sums = prefix_summaries(thue_morse(), self.p, m_max, jobs=self.jobs)
            self._tm_summaries = (m_max, sums)
        return [s for s in self._tm_summaries[1] if s.m <= m_max]


def _result(number: int, title: str, budget: float, started: float,
            assertions: list[Assertion], detail: str) -> CriterionResult:
    seconds = time.perf_counter() - started
    timing = Assertion("runtime", f"< {budget}s", round(seconds, 3), None, seconds < budget, "runtime budget")
    passed = all(a.passed for a in assertions) and timing.passed
    return CriterionResult(number, title, passed, detail, seconds, budget, assertions + [timing])


# --- criteria ----------------------------------------------------------------------------

HANKEL_G2 = {2: -2, 3: 0, 4: 0, 5: 0, 6: 0, 7: 64, 8: 128, 9: -64, 10: -56, 11: -14, 12: 1}


def criterion_1(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    s = CoeffSeries.of(gtilde(2))
    rows = [Assertion(f"H_{j}(gtilde_2)", want, got, 0, got == want, "THEORY: Hankel table")
            for j, want in HANKEL_G2.items() for got in [hankel_det(s, j)]]
    bad = [a.name for a in rows if not a.passed]
    return _result(1, "Hankel golden table", 1, t0, rows, "all 11 values exact" if not bad else f"mismatch {bad}")


def criterion_2(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    s = CoeffSeries.of(gtilde(4))
    zeros = [j for j in range(25, 49) if hankel_det(s, j) == 0]
    rows = [Assertion("H_j(gtilde_4) != 0, j=25..48", "no zeros", zeros, 0, not zeros, "THEORY: rapid check")]
    return _result(2, "Hankel nonvanishing", 10, t0, rows, "24 determinants nonzero" if not zeros else f"zeros at {zeros}")


def criterion_3(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    for p in (2, 3, 5, 7):
        for k in range(1, 8):
            fp = tm_family_pair(k, p)
            ok = fp.v == fp.predicted_v and fp.notes["exact"] and fp.notes["good_bound"]
            rows.append(Assertion(f"tm-main p={p} k={k}", fp.predicted_v, fp.v, 0, ok, "THEORY: family valuation"))
    bad = [a.name for a in rows if not a.passed]
    return _result(3, "TM family valuations", 30, t0, rows, "28 pairs exact, bound holds" if not bad else f"fails {bad}")


def _marked_quotient(p: int, k: int):
    m = (3 << k) + (1 if p == 2 else 0)
    den = largeqp_denominator(k, p)
    recs = [r for r in associated_records(thue_morse(), p, m) if r.conv_den == den]
    return m, den, recs


def criterion_4(ctx: Context, primes=(2, 3, 5)) -> CriterionResult:
    t0 = time.perf_counter()
    rows, worst = [], {}
    for p in primes:
        for k in range(2, 7):
            m, den, recs = _marked_quotient(p, k)
            P = p ** (1 << k)
            hits = [r for r in recs if P <= p * p * r.r and r.r <= p * p * P]
            ratio = max((r.r / P for r in recs), default=math.nan)
            worst[p] = max(worst.get(p, 0), ratio)
            rows.append(Assertion(f"largeqp p={p} k={k} (m={m}, den={den})", "r/p^(2^k) in [p^-2, p^2]",
                                  round(ratio, 6), f"p^2={p * p}", bool(hits), "THEORY: largeqp"))
    bad = [a.name for a in rows if not a.passed]
    detail = "max r/p^(2^k): " + ", ".join(f"p={p}: {w:.3f}" for p, w in worst.items())
    if bad:
        detail += f"; outside [p^-2, p^2]: {len(bad)} case(s), first {bad[0]}"
    return _result(4, "largeqp structure", 60, t0, rows, detail)


def criterion_5(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    for p in (3, 5):
        for k in range(3, 7):
            m, den, marked = _marked_quotient(p, k)
            big = max(marked, key=lambda r: r.r)
            others = [r.r for r in associated_records(thue_morse(), p, m) if r.j != big.j]
            second = max(others)
            bound = p * p * p ** (1 << (k - 1))
            rows.append(Assertion(f"second max p={p} k={k}", f"<= {bound}", second, "p^2",
                                  second <= bound, "THEORY: boundqp"))
    bad = [a.name for a in rows if not a.passed]
    return _result(5, "boundqp second maximum", 60, t0, rows, "8 cases within p^2 p^(2^(k-1))" if not bad else f"fails {bad}")


def criterion_6(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    for p in (2, 3):
        for k in range(1, 6):
            a, b = propmain_identity(k, p)
            rows.append(Assertion(f"z_4^k p={p} k={k}", True, a, 0, a, "THEORY: product identity"))
            rows.append(Assertion(f"z_2*4^k p={p} k={k}", True, b, 0, b, "THEORY: product identity"))
    bad = [a.name for a in rows if not a.passed]
    return _result(6, "product identities", 5, t0, rows, "20 exact equalities" if not bad else f"fails {bad}")


def criterion_7(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    p, M = ctx.p, ctx.scaled(1500, 96)
    sums = ctx.tm_summaries(M)
    ratio, w = global_pq_bound_scan(thue_morse(), p, M, 1 / 3, summaries=sums)
    ok = ratio <= p ** 3
    rows = [Assertion(f"max r / p^(m/3), m <= {M}", f"<= {p ** 3}", round(ratio, 6), "p^3", ok, "THEORY: main theorem")]
    detail = f"max ratio {ratio:.4f} at m={w.m}, j={w.j}, conv_den={w.conv_den}"
    return _result(7, f"global p^(m/3) scan, p={p}", 600, t0, rows, detail)


def criterion_8(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    p, M = ctx.p, ctx.scaled(1536, 96)
    rep = pq_scan(thue_morse(), p, M, summaries=ctx.tm_summaries(M)).report
    gap = abs(2 / (1 - rep.eta_sup) - 3)
    rows = [Assertion("|2/(1-eta_sup) - 3|", "<= 0.1", round(gap, 6), 0.1, gap <= 0.1, "THEORY: duality"),
            Assertion("eta_inf", "<= 0.05", round(rep.eta_inf, 6), 0.05, rep.eta_inf <= 0.05, "THEORY: duality")]
    detail = (f"eta_sup={rep.eta_sup:.6f} eta_inf={rep.eta_inf:.6f} mu_times_est={rep.mu_times_est:.4f} "
              f"mu_hat_est={rep.mu_hat_est:.4f} window={rep.window}")
    return _result(8, f"duality cross-check, p={p}", 600, t0, rows, detail)


def criterion_9(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    Q = ctx.scaled(300, 40)
    for name, word in (("tm", thue_morse()), ("fib", fibonacci_word())):
        for p in (2, 3):
            bf = brute_force_best_pairs(word, p, Q)
            M = 2 * (2 * Q * Q).bit_length() + 8
            st = best_pair_staircase(convergent_driven_samples(word, p, range(1, M)))
            bad = [q for q in range(1, Q + 1) if best_v_at(bf.staircase, q * q) != best_v_at(st, q * q)]
            rows.append(Assertion(f"brute force = convergents, {name} p={p} Q<={Q}", "no mismatch",
                                  bad[:5], 0, not bad, "DERIVED: exhaustive oracle"))
            leg = legendre_correspondence_check(word, p, 50)
            rows.append(Assertion(f"Legendre correspondence {name} p={p} |a|,|b|<=50", "no counterexample",
                                  leg.counterexamples[:3] or f"{leg.checked} checked", 0, leg.passed,
                                  "DERIVED: Legendre"))
    bad = [a.name for a in rows if not a.passed]
    return _result(9, "oracle equivalence", 300, t0, rows, "8 comparisons agree" if not bad else f"fails {bad}")


def criterion_10(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    p = ctx.p
    g2 = GOLDEN ** 2
    lcp_bad = [n for n in range(4, 21) if fib_lcp_lengths(n) != (FIB[n + 2] - 2, 2 * FIB[n + 2] - 2)]
    rows.append(Assertion("LCP lengths n=4..20", "F_{n+2}-2, 2F_{n+2}-2", lcp_bad or "all exact", 0,
                          not lcp_bad, "THEORY: fiborep"))
    n_top = 20
    r, x = fib_family_pairs(n_top, p)
    rows.append(Assertion(f"fib-r sample exponent n={n_top}", f">= {g2 - 0.05:.6f}", round(r.mu_sample, 6), 0.05,
                          r.mu_sample >= g2 - 0.05, "THEORY: fibobound"))
    lx = 4 * g2 / (1 + g2)
    rows.append(Assertion(f"fib-x sample exponent n={n_top}", f">= {lx - 0.05:.6f}", round(x.mu_sample, 6), 0.05,
                          x.mu_sample >= lx - 0.05, "THEORY: fibobound"))
    M = ctx.scaled(1536, 200)
    rep = pq_scan(fibonacci_word(), p, M, jobs=ctx.jobs).report
    lh = 2 + 1 / (2 * GOLDEN)
    rows.append(Assertion(f"mu_hat_est m<={M}", f">= {lh - 0.1:.6f}", round(rep.mu_hat_est, 6), 0.1,
                          rep.mu_hat_est >= lh - 0.1, "THEORY: fibobound"))
    detail = (f"fib-r {r.mu_sample:.4f}, fib-x {x.mu_sample:.4f}, mu_hat_est {rep.mu_hat_est:.4f}, "
              f"eta_inf {rep.eta_inf:.4f}")
    return _result(10, f"Fibonacci, p={p}", 300, t0, rows, detail)


def criterion_11(ctx: Context, seed: int = 20240601) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    total, errors = 0, []
    counts: dict[str, int] = {}
    n_seq = ctx.scaled(200, 12)
    for i in range(n_seq):
        p = (2, 3, 5)[i % 3]
        seq = ListSequence([rng.randrange(p) for _ in range(202)], alphabet=range(p))
        try:
            for rec, _prop in classify_all(seq, p, 200):
                counts[rec.classification.value] = counts.get(rec.classification.value, 0) + 1
                total += 1
        except TrichotomyViolation as exc:
            errors.append(f"seq {i}, p={p}: {exc}")
    rows = [Assertion(f"trichotomy on {n_seq} random sequences", "0 violations", len(errors), 0,
                      not errors, "THEORY: propagation cases")]
    detail = f"{total} quotients classified " + str(dict(sorted(counts.items())))
    if errors:
        detail += f"; first violation {errors[0]}"
    return _result(11, "propagation trichotomy", 300, t0, rows, detail)


CRITERIA: dict[int, Callable[[Context], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
    11: criterion_11,
}


def run_acceptance(p: int = 3, jobs: int = 1, only=None, scale: float = 1.0,
                   echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    ctx = Context(p=p, jobs=jobs, scale=scale)
    out = []
    for n, fn in CRITERIA.items():
        if only and n not in only:
            continue
        res = fn(ctx)
        if echo:
            echo(res.line())
        out.append(res)
    return out
