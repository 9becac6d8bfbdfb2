"""Both sides of the exponent duality, measured at finite scale.

* partial-quotient side: ``eta_m = log(max pq of x_m) / (m log p)``;
* approximation side: pairs ``(a, b)`` with ``v = v_p(b xi - a)`` and
  ``mu_sample = 2 v log p / log|ab|``.

Every convergent ``T'/b'`` of ``x_m = C_m / p^m`` gives the pair
``a' = b' C_m - p^m T'``, ``b'`` with ``v >= m``; conversely every pair with
``2|ab| < p^v`` arises this way.  :func:`brute_force_best_pairs` is the
independent small-height oracle for that correspondence.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .cf import PQClass, PQRecord, cf_expand, convergents, log_ratio, partial_quotients
from .exact import linear_form_valuation, truncated_integer, vp_int
from .words import DigitSequence

SMALL_HEIGHT_EXPONENT = 10  # samples with |ab| <= p^10 are left out of estimates


@dataclass(frozen=True)
class ApproxSample:
    a: int
    b: int
    v: int | float          # v_p(b xi - a); inf for an exact hit
    m: int = 0              # prefix length the sample came from (0: not from a prefix)
    exact: bool = True      # False: only v >= value is known (guard reached)
    r_next: int | None = None  # partial quotient following the convergent, when known
    p: int = 0

    @property
    def ab(self) -> int:
        return abs(self.a * self.b)

    @property
    def log_q(self) -> float:
        return 0.5 * math.log(self.ab)

    @property
    def Q(self) -> float:
        try:
            return math.sqrt(self.ab)
        except OverflowError:
            return math.inf

    @property
    def mu_sample(self) -> float:
        ab = self.ab
        if ab == 1 or self.v == math.inf:
            return math.inf
        return 2 * self.v * math.log(self.p) / math.log(ab)

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b),
                "v": None if self.v == math.inf else int(self.v), "exact": self.exact,
                "m": self.m, "mu_sample": _finite(self.mu_sample)}


def _finite(x: float):
    return None if x is None or math.isinf(x) or math.isnan(x) else x


@dataclass
class ExponentReport:
    eta_sup: float
    eta_inf: float
    mu_times_est: float
    mu_hat_est: float
    window: tuple[int, int]
    samples: list[ApproxSample] = field(default_factory=list)
    eta_curve: list[tuple[int, float]] = field(default_factory=list)
    degenerate: list[int] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def summary(self) -> dict:
        return {"eta_sup": _finite(self.eta_sup), "eta_inf": _finite(self.eta_inf),
                "mu_times_est": _finite(self.mu_times_est), "mu_hat_est": _finite(self.mu_hat_est),
                "window": list(self.window), "degenerate_count": len(self.degenerate),
                "notes": list(self.notes)}


# --- per-prefix work ------------------------------------------------------------------

def _tail_valuation(b: int, T: int, tail: Sequence[int], p: int) -> tuple[int, bool]:
    """``v_p(b tau + T)`` with ``tau = sum tail[k] p^k``; inexact if the tail runs out."""
    N = 16
    while True:
        N = min(N, len(tail))
        val = b * _horner(tail[:N], p) + T
        v = vp_int(val, p)
        if v < N:
            return int(v), True
        if N == len(tail):
            return N, False
        N *= 2


def _horner(ds: Sequence[int], p: int) -> int:
    acc = 0
    for d in reversed(ds):
        acc = acc * p + d
    return acc


@dataclass
class PrefixSummary:
    m: int
    largest: PQRecord | None
    n_pqs: int
    samples: dict  # v -> ApproxSample with the smallest |ab| among this prefix's samples


def summarize_prefix(C: int, m: int, p: int, tail: Sequence[int], all_samples: bool = True) -> PrefixSummary:
    """Continued fraction of ``C / p^m`` in one pass, with the pair of every convergent.

    ``tail`` holds ``c_m, c_{m+1}, ...`` (used only when the valuation exceeds ``m``).
    ``D_h = q_h C - p_h p^m`` obeys ``D_h = a_h D_{h-1} + D_{h-2}``, so the pair
    ``(a', b') = (D_h, q_h)`` costs no big multiplication.
    """
    d = p ** m
    a0, D = divmod(C, d)
    # (p_h, q_h, D_h) for h = -1 and h = 0
    pp, qq, DD = 1, 0, -d
    pc, qc, Dc = a0, 1, D
    largest = None
    n_pqs = 0
    samples: dict = {}
    c_m = tail[0] if tail else 0
    h = 0
    while Dc:
        a_next = abs(DD) // abs(Dc)
        n_pqs += 1
        if largest is None or a_next > largest.r:
            cls = PQClass.UNCLASSIFIED if a_next >= 2 * p else PQClass.BELOW
            largest = PQRecord(m, h + 1, a_next, pc, qc, log_ratio(a_next, m, p), cls)
        if all_samples or a_next >= 2 * p:
            a_s, b_s = Dc, qc
            if (qc * c_m + pc) % p:
                v, exact = m, True
            else:
                extra, exact = _tail_valuation(qc, pc, tail, p)
                v = m + extra
            g = gcd(a_s, b_s)
            if g > 1:
                a_s //= g
                b_s //= g
                v -= vp_int(g, p)
            s = ApproxSample(a_s, b_s, v, m, exact, a_next, p)
            old = samples.get(v)
            if old is None or s.ab < old.ab:
                samples[v] = s
        pp, qq, DD, pc, qc, Dc = pc, qc, Dc, a_next * pc + pp, a_next * qc + qq, a_next * Dc + DD
        h += 1
    return PrefixSummary(m, largest, n_pqs, samples)


def _summaries_chunk(cs: Sequence[int], p: int, m_lo: int, m_hi: int, tail_len: int,
                     all_samples: bool) -> list[PrefixSummary]:
    out = []
    C, pm = 0, 1
    for k in range(m_hi):
        C += cs[k] * pm
        pm *= p
        m = k + 1
        if m >= m_lo:
            out.append(summarize_prefix(C, m, p, cs[m:m + tail_len], all_samples))
    return out


def prefix_summaries(digits: DigitSequence, p: int, m_max: int, m_min: int = 1,
                     tail_len: int = 256, all_samples: bool = True,
                     jobs: int = 1) -> list[PrefixSummary]:
    """Per-prefix summaries for ``m_min <= m <= m_max``; ``jobs > 1`` splits the range across processes."""
    if m_max < m_min:
        return []
    cs = _digits_with_tail(digits, m_max + tail_len)
    if jobs <= 1:
        return _summaries_chunk(cs, p, m_min, m_max, tail_len, all_samples)
    # balance by cost ~ m^2: split points at equal shares of sum m^2
    bounds = [m_min]
    total = m_max ** 3 - (m_min - 1) ** 3
    for i in range(1, jobs):
        target = ((m_min - 1) ** 3 + total * i / jobs) ** (1 / 3)
        bounds.append(max(bounds[-1] + 1, int(target)))
    bounds.append(m_max + 1)
    chunks = [(lo, hi - 1) for lo, hi in zip(bounds, bounds[1:]) if lo <= hi - 1]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futs = [ex.submit(_summaries_chunk, cs, p, lo, hi, tail_len, all_samples) for lo, hi in chunks]
        out = []
        for f in futs:
            out.extend(f.result())
    return out


def _digits_with_tail(digits: DigitSequence, n: int) -> list[int]:
    # finite (file-backed) sequences simply provide fewer tail digits
    try:
        return digits.prefix(n)
    except IndexError:
        return digits.prefix(len(digits))  # type: ignore[arg-type]


# --- scans ------------------------------------------------------------------------

def window_bounds(m_max: int, window_frac: float = 0.5) -> tuple[int, int]:
    if not 0 < window_frac <= 1:
        raise ValueError("window fraction must be in (0, 1]")
    return max(1, m_max - int(window_frac * m_max) + 1), m_max


def best_pair_staircase(samples: Iterable[ApproxSample]) -> list[ApproxSample]:
    """Best-approximation pairs: the pair with largest ``v`` among ``|ab| <= Q^2``, as ``Q`` grows.

    Ties in ``|ab|`` go to the larger ``v``, then the smaller ``b``.
    """
    best: dict = {}
    for s in samples:
        if s.v < 1:
            continue
        old = best.get(s.v)
        if old is None or (s.ab, s.b) < (old.ab, old.b):
            best[s.v] = s
    out: list[ApproxSample] = []
    cur = None
    for v in sorted(best, reverse=True):
        s = best[v]
        if cur is None or s.ab < cur:
            out.append(s)
            cur = s.ab
    out.reverse()
    return out


def filtered_pairs(staircase: Sequence[ApproxSample]) -> list[ApproxSample]:
    """Subsequence along which ``Q |b xi - a|_p`` strictly decreases, starting at the first pair."""
    if not staircase:
        return []
    out = [staircase[0]]
    for s in staircase[1:]:
        last = out[-1]
        if s.v == math.inf:
            out.append(s)
            break
        # Q_s p^{-v_s} < Q_last p^{-v_last}, squared and cleared of denominators
        p = s.p
        if s.ab * p ** (2 * int(last.v)) < last.ab * p ** (2 * int(s.v)):
            out.append(s)
    return out


def mu_hat_terms(filtered: Sequence[ApproxSample]) -> list[tuple[int, int, float]]:
    """``(v_k, v_{k+1}, (v_k log p + log(Q_{k+1}/Q_k)) / log Q_{k+1})`` for consecutive pairs."""
    out = []
    for s, t in zip(filtered, filtered[1:]):
        if t.v == math.inf or t.ab <= 1:
            continue
        val = (s.v * math.log(s.p) + t.log_q - s.log_q) / t.log_q
        out.append((s.v, t.v, val))
    return out


@dataclass
class PQScan:
    rows: list[PQRecord]          # largest partial quotient of each x_m
    report: ExponentReport
    staircase: list[ApproxSample]


def pq_scan(digits: DigitSequence, p: int, m_max: int, window_frac: float = 0.5,
            jobs: int = 1, summaries: list[PrefixSummary] | None = None) -> PQScan:
    """Largest partial quotient of every ``x_m`` and the exponent estimates on the tail window."""
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    if summaries is None:
        summaries = prefix_summaries(digits, p, m_max, jobs=jobs)
    m_lo, m_hi = window_bounds(m_max, window_frac)
    rows, curve, degenerate = [], [], []
    pooled: list[ApproxSample] = []
    for s in summaries:
        pooled.extend(s.samples.values())
        if s.largest is None:
            degenerate.append(s.m)
            continue
        rows.append(s.largest)
        if s.n_pqs == 1:
            # x_m = a0 + 1/r: the single quotient is the whole denominator
            degenerate.append(s.m)
            continue
        curve.append((s.m, s.largest.eta))
    notes = []
    tail = [e for m, e in curve if m_lo <= m <= m_hi]
    if tail:
        eta_sup, eta_inf = max(tail), min(tail)
    else:
        eta_sup = eta_inf = math.nan
        notes.append("no non-degenerate prefix in the window")
    if degenerate:
        notes.append(f"{len(degenerate)} prefixes with at most one partial quotient excluded from eta")

    staircase = best_pair_staircase(pooled)
    floor_ab = p ** SMALL_HEIGHT_EXPONENT
    in_window = [s for s in staircase + _per_v_best(pooled)
                 if m_lo <= s.v <= m_hi and s.ab > floor_ab and s.v != math.inf]
    mu_times = max((s.mu_sample for s in in_window), default=math.nan)
    terms = [val for vk, vk1, val in mu_hat_terms(filtered_pairs(staircase))
             if vk >= m_lo and vk1 <= m_hi]
    mu_hat = min(terms, default=math.nan)
    if not terms:
        notes.append("fewer than two filtered best pairs in the window; mu_hat_est undefined")
    report = ExponentReport(eta_sup, eta_inf, mu_times, mu_hat, (m_lo, m_hi),
                            samples=[s for s in staircase if m_lo <= s.v <= m_hi],
                            eta_curve=curve, degenerate=degenerate, notes=notes)
    return PQScan(rows, report, staircase)


def _per_v_best(samples: Iterable[ApproxSample]) -> list[ApproxSample]:
    best: dict = {}
    for s in samples:
        old = best.get(s.v)
        if old is None or s.ab < old.ab:
            best[s.v] = s
    return list(best.values())


def convergent_driven_samples(digits: DigitSequence, p: int, m_range: Iterable[int],
                              tail_len: int = 256) -> list[ApproxSample]:
    """Every pair ``(b' C_m - p^m T', b')`` from convergents ``T'/b'`` of ``x_m`` with ``b' < p^m``.

    Pairs are reduced to coprime form and deduplicated.
    """
    ms = sorted(set(m_range))
    if not ms:
        return []
    cs = _digits_with_tail(digits, ms[-1] + tail_len)
    seen: dict = {}
    for m in ms:
        C = _horner(cs[:m], p)
        for s in _all_samples(C, m, p, cs[m:m + tail_len]):
            key = (s.a, s.b)
            if key not in seen:
                seen[key] = s
    return list(seen.values())


def _all_samples(C: int, m: int, p: int, tail: Sequence[int]) -> list[ApproxSample]:
    d = p ** m
    cf = cf_expand(Fraction(C, d))
    conv = convergents(cf)
    c_m = tail[0] if tail else 0
    out = []
    for h, (T, b) in enumerate(conv[:-1]):
        a = b * C - d * T
        if a == 0:
            continue
        if (b * c_m + T) % p:
            v, exact = m, True
        else:
            extra, exact = _tail_valuation(b, T, tail, p)
            v = m + extra
        g = gcd(a, b)
        if g > 1:
            a, b = a // g, b // g
            v -= vp_int(g, p)
        out.append(ApproxSample(a, b, v, m, exact, cf.pqs[h], p))
    return out


@dataclass
class BruteForceResult:
    staircase: list[ApproxSample]
    filtered: list[ApproxSample]
    exact_hit: ApproxSample | None = None


def brute_force_best_pairs(digits: DigitSequence, p: int, Q_max: int, guard: int = 4096) -> BruteForceResult:
    """Enumerate coprime ``(a, b)``, ``b >= 1``, ``0 < |ab| <= Q_max^2`` and keep the best ones.

    Only pairs with ``v >= 1`` can matter, so ``a`` runs over the residue class
    of ``b c_0`` modulo ``p``.  Valuations are exact below ``guard``; a pair
    with ``b xi - a`` vanishing to the guard is reported as an exact hit.
    """
    if Q_max < 1:
        raise ValueError("Q_max must be >= 1")
    bound = Q_max * Q_max
    G = max(64, 4 * bound.bit_length())
    CG = truncated_integer(digits, G, p)
    c0 = digits.prefix(1)[0]
    cands: list[ApproxSample] = []
    exact_hit = None
    for b in range(1, bound + 1):
        A = bound // b
        bC = b * CG
        start = (b * c0) % p
        for a0 in (start, start - p):
            step = p if a0 >= 0 else -p
            a = a0
            while -A <= a <= A:
                if a != 0 and gcd(a, b) == 1:
                    diff = bC - a
                    if diff == 0:
                        v = math.inf
                    else:
                        v = vp_int(diff, p)
                    if v >= G:
                        val = linear_form_valuation(a, b, digits, p, guard=guard)
                        v = val.value if val.exact else math.inf
                        if not val.exact:
                            s = ApproxSample(a, b, v, 0, False, None, p)
                            if exact_hit is None or s.ab < exact_hit.ab:
                                exact_hit = s
                    cands.append(ApproxSample(a, b, v, 0, v != math.inf, None, p))
                a += step
    staircase = best_pair_staircase(cands)
    return BruteForceResult(staircase, filtered_pairs(staircase), exact_hit)


def best_v_at(staircase: Sequence[ApproxSample], ab_bound: int) -> int | float:
    """Largest valuation among staircase pairs with ``|ab| <= ab_bound`` (0 if none)."""
    best = 0
    for s in staircase:
        if s.ab <= ab_bound and s.v > best:
            best = s.v
    return best


# --- duality and diagnostics ---------------------------------------------------------

def eta_to_mu(eta: float) -> float:
    return math.inf if eta >= 1 else 2 / (1 - eta)


@dataclass(frozen=True)
class DualityDiagnostics:
    mu_times_est: float
    mu_from_eta_sup: float
    mu_times_gap: float
    mu_hat_est: float
    mu_from_eta_inf: float
    mu_hat_gap: float

    def to_json(self) -> dict:
        return {k: _finite(v) for k, v in self.__dict__.items()}


def duality_check(report: ExponentReport) -> DualityDiagnostics:
    a = eta_to_mu(report.eta_sup)
    b = eta_to_mu(report.eta_inf)
    return DualityDiagnostics(report.mu_times_est, a, abs(report.mu_times_est - a),
                              report.mu_hat_est, b, abs(report.mu_hat_est - b))


def global_pq_bound_scan(digits: DigitSequence, p: int, m_max: int, exponent: float,
                         summaries: list[PrefixSummary] | None = None,
                         jobs: int = 1) -> tuple[float, PQRecord | None]:
    """``max_m max_pq r / p^{exponent m}`` with the record attaining it."""
    if not 0 < exponent <= 1:
        raise ValueError("exponent must lie in (0, 1]")
    if summaries is None:
        summaries = prefix_summaries(digits, p, m_max, all_samples=False, jobs=jobs)
    best, witness = -math.inf, None
    lp = math.log(p)
    for s in summaries:
        if s.largest is None or s.m > m_max:
            continue
        lr = math.log(s.largest.r) - exponent * s.m * lp
        if lr > best:
            best, witness = lr, s.largest
    return (math.exp(best) if witness else 0.0), witness


def hetabound_diagnostic(report: ExponentReport) -> tuple[float, float]:
    """``(eta_inf, 1 / (2 eta_sup + 1))`` on the report's window; reported, never asserted."""
    return report.eta_inf, 1 / (2 * report.eta_sup + 1)


def recovered_inequalities(mu_times: float, mu_hat: float) -> dict:
    """Report lines for ``mu_hat <= 3 + 2/(mu_times - 2)`` and ``mu_hat <= (5 + sqrt5)/2``."""
    first = math.inf if mu_times <= 2 else 3 + 2 / (mu_times - 2)
    second = (5 + math.sqrt(5)) / 2
    return {"mu_hat_est": mu_hat, "bound_from_mu_times": _finite(first),
            "absolute_bound": second}


# --- bounded partial quotients search -------------------------------------------------

@dataclass
class SearchResult:
    base: int
    cap: int
    depth_limit: int
    best_prefix: list[int]
    nodes: int
    per_depth: list[int]        # surviving prefixes counted at each depth
    exhausted: bool             # whole tree explored (no node limit hit)

    @property
    def depth(self) -> int:
        return len(self.best_prefix)


def bounded_pq_search(b: int, C: int, depth_limit: int, alphabet: Sequence[int] | None = None,
                      nonzero_start: bool = True, max_nodes: int = 1_000_000) -> SearchResult:
    """Depth-first search for digits keeping every partial quotient of ``x_1..x_m`` at most ``C``.

    The first digit is nonzero by default (``c_0 = 0`` would only shift the problem).
    Stops at the first prefix of length ``depth_limit`` or after ``max_nodes`` nodes.
    """
    if C < 1 or b < 2:
        raise ValueError("need C >= 1 and base >= 2")
    letters = list(range(b)) if alphabet is None else list(alphabet)
    per_depth = [0] * (depth_limit + 1)
    best: list[int] = []
    nodes = 0
    stack: list[tuple[int, int, list[int]]] = []  # (numerator over b^m, m, prefix)

    def ok(num: int, m: int) -> bool:
        return all(q <= C for q in partial_quotients(num, b ** m))

    for c in reversed(letters):
        if nonzero_start and c == 0:
            continue
        stack.append((c, 1, [c]))
    done = False
    while stack and not done:
        num, m, pref = stack.pop()
        nodes += 1
        if not ok(num, m):
            continue
        per_depth[m] += 1
        if m > len(best):
            best = pref
        if m >= depth_limit:
            done = True
            break
        if nodes >= max_nodes:
            break
        # x_{m+1} = (x_m + c_m)/b, i.e. numerator over b^{m+1} is num + c b^m
        bm = b ** m
        for c in reversed(letters):
            stack.append((num + c * bm, m + 1, pref + [c]))
    exhausted = not stack and not done
    return SearchResult(b, C, depth_limit, best, nodes, per_depth, exhausted)


# --- Legendre correspondence --------------------------------------------------------------

@dataclass
class LegendreReport:
    passed: bool
    checked: int
    skipped: int
    counterexamples: list[tuple[int, int, str]] = field(default_factory=list)


def legendre_correspondence_check(digits: DigitSequence, p: int, bound: int) -> LegendreReport:
    """For coprime ``0 < |a|, b <= bound`` with ``2|ab| < p^v``: ``T/b`` is a convergent of ``x_v``
    and the partial quotient after it satisfies ``p^v/(3b|a|) <= r <= p^v/(b|a|)``.

    The quotient ``r`` is read from the expansion ending in 1.
    """
    G = max(64, 8 * (2 * bound * bound).bit_length())
    CG = truncated_integer(digits, G, p)
    checked = skipped = 0
    bad: list[tuple[int, int, str]] = []
    cf_cache: dict[int, tuple] = {}
    for b in range(1, bound + 1):
        for a in range(-bound, bound + 1):
            if a == 0 or gcd(a, b) != 1:
                continue
            v = vp_int(b * CG - a, p)
            if v >= G:
                skipped += 1  # exact or beyond the window: nothing to check
                continue
            if 2 * abs(a * b) >= p ** v:
                skipped += 1
                continue
            checked += 1
            m = int(v)
            pm = p ** m
            Cm = _horner(digits.prefix(m), p)
            num = b * Cm - a
            if num % pm:
                bad.append((a, b, "p^m does not divide b C_m - a"))
                continue
            T = num // pm
            if m not in cf_cache:
                cf = cf_expand(Fraction(Cm, pm))
                terms = (cf.a0,) + cf.ending_in_one()
                cf_cache[m] = (terms, convergents(list(terms)))
            terms, conv = cf_cache[m]
            try:
                j = conv.index((T, b))
            except ValueError:
                bad.append((a, b, f"{T}/{b} is not a convergent of x_{m}"))
                continue
            if j + 1 >= len(terms):
                bad.append((a, b, "convergent is x_m itself"))
                continue
            r = terms[j + 1]
            # p^m/(3 b|a|) <= r <= p^m/(b|a|)
            if not (pm <= 3 * b * abs(a) * r and r * b * abs(a) <= pm):
                bad.append((a, b, f"bracket fails: r={r}"))
    return LegendreReport(not bad, checked, skipped, bad)
