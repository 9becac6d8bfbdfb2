"""Continued fractions of rationals and the partial-quotient bookkeeping for ``x_m``.

A partial quotient ``a_j`` (``j >= 1``) is *associated* with the convergent
``[a_0; a_1, ..., a_{j-1}]``.  Going from ``x_m`` to ``x_{m-1}`` or
``x_{m+1}`` a large partial quotient ``r`` reappears divided or multiplied
by about ``p``; :func:`classify_propagation` decides which of the three
possible patterns occurs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .exact import prefix_integers, prefix_rational
from .words import DigitSequence


@dataclass(frozen=True)
class CFExpansion:
    """``a0 + 1/(a_1 + 1/(a_2 + ...))`` with ``a_l >= 2`` when ``l >= 1``."""

    a0: int
    pqs: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.pqs)

    def value(self) -> Fraction:
        p, q = convergents(self)[-1]
        return Fraction(p, q)

    def ending_in_one(self) -> tuple[int, ...]:
        """Partial quotients of the other expansion, ``[..., a_l - 1, 1]``."""
        if not self.pqs:
            return (1,)  # a0 = (a0 - 1) + 1/1
        return self.pqs[:-1] + (self.pqs[-1] - 1, 1)

    def __str__(self) -> str:
        return f"[{self.a0}; {', '.join(map(str, self.pqs))}]"


def cf_expand(x: Fraction | int) -> CFExpansion:
    """Floor-based Euclid; the canonical expansion of ``x``."""
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    a0, n = divmod(n, d)
    pqs = []
    while n:
        q, r = divmod(d, n)
        pqs.append(q)
        d, n = n, r
    return CFExpansion(a0, tuple(pqs))


def partial_quotients(num: int, den: int) -> list[int]:
    """``a_1, a_2, ...`` of ``num/den``; the integer part is dropped."""
    n = num % den
    d = den
    out = []
    while n:
        q, r = divmod(d, n)
        out.append(q)
        d, n = n, r
    return out


def convergents(cf: CFExpansion | Sequence[int]) -> list[tuple[int, int]]:
    """``(p_j, q_j)`` for ``j = 0..l``; accepts an expansion or a raw ``[a0, a1, ...]`` list."""
    if isinstance(cf, CFExpansion):
        terms = (cf.a0,) + cf.pqs
    else:
        terms = tuple(cf)
    out = []
    p0, q0, p1, q1 = 1, 0, terms[0], 1
    out.append((p1, q1))
    for a in terms[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


# --- records -----------------------------------------------------------------

class PQClass(str, Enum):
    MAXIMAL = "maximal"            # case (i): shrinks by ~p on both sides
    CASE_II = "case-ii"
    CASE_III = "case-iii"
    UNCLASSIFIED = "unclassified"  # r >= 2p, neighbours not inspected yet
    BELOW = "below-threshold"      # r < 2p, never classified


@dataclass
class PQRecord:
    m: int
    j: int
    r: int
    conv_num: int
    conv_den: int
    eta: float
    classification: PQClass = PQClass.UNCLASSIFIED

    def row(self) -> dict:
        return {"m": self.m, "j": self.j, "r": self.r, "conv_den": self.conv_den,
                "eta": self.eta, "class": self.classification.value}

    def to_json(self) -> dict:
        d = asdict(self)
        d["r"] = str(self.r)
        d["conv_num"] = str(self.conv_num)
        d["conv_den"] = str(self.conv_den)
        d["classification"] = self.classification.value
        return d


def log_ratio(r: int, m: int, p: int) -> float:
    """``log r / (m log p)``."""
    return math.log(r) / (m * math.log(p))


def records_of(x: Fraction, m: int, p: int) -> list[PQRecord]:
    """One record per partial quotient ``a_j, j >= 1`` of ``x`` (which plays ``x_m``)."""
    cf = cf_expand(x)
    conv = convergents(cf)
    out = []
    for j, r in enumerate(cf.pqs, start=1):
        pn, qn = conv[j - 1]
        cls = PQClass.UNCLASSIFIED if r >= 2 * p else PQClass.BELOW
        out.append(PQRecord(m, j, r, pn, qn, log_ratio(r, m, p), cls))
    return out


def associated_records(digits: DigitSequence, p: int, m: int) -> list[PQRecord]:
    if m < 1:
        raise ValueError("m must be >= 1")
    return records_of(prefix_rational(digits, m, p), m, p)


def largest_record(records: Sequence[PQRecord]) -> PQRecord | None:
    """Largest ``r``; ties go to the smallest ``j``."""
    best = None
    for rec in records:
        if best is None or rec.r > best.r:
            best = rec
    return best


# --- propagation ------------------------------------------------------------------

class TrichotomyViolation(AssertionError):
    """No propagation case matched; this would contradict the continued-fraction analysis."""


@dataclass(frozen=True)
class NeighborMatch:
    m: int
    den: int
    r: int          # partial quotient associated with the matched convergent
    lo: Fraction    # open interval the propagation bounds place r in
    hi: Fraction
    grows: bool     # True for the (pr - 2, p(r + 2)) branch

    @property
    def inside(self) -> bool:
        return self.lo < self.r < self.hi


@dataclass(frozen=True)
class Propagation:
    case: PQClass
    left: NeighborMatch
    right: NeighborMatch


class _Expansion:
    """Continued fraction of one ``x_m`` with its convergents indexed for lookup."""

    __slots__ = ("pqs", "index")

    def __init__(self, x: Fraction):
        cf = cf_expand(x)
        self.pqs = cf.pqs
        self.index = {pq: i for i, pq in enumerate(convergents(cf)[:-1])}


def _match(x: Fraction | _Expansion, target: Fraction, m: int, r: int, p: int,
           grows: bool) -> NeighborMatch:
    exp = x if isinstance(x, _Expansion) else _Expansion(x)
    i = exp.index.get((target.numerator, target.denominator))
    if i is None:
        raise TrichotomyViolation(f"{target} is not a convergent of x_{m}")
    rn = exp.pqs[i]  # a_{i+1}
    if grows:
        lo, hi = Fraction(p * r - 2), Fraction(p * (r + 2))
    else:
        lo, hi = Fraction(r, p) - 2, Fraction(r + 2, p)
    return NeighborMatch(m, target.denominator, rn, lo, hi, grows)


def classify_neighbors(x_prev: Fraction | _Expansion, x_next: Fraction | _Expansion, a: int, b: int, r: int,
                       c_prev: int, c_cur: int, p: int, m: int) -> Propagation:
    """Core of :func:`classify_propagation` on already computed ``x_{m-1}``, ``x_{m+1}``.

    ``a/b`` is the convergent of ``x_m`` associated with ``r``; ``c_prev`` is
    ``c_{m-1}`` and ``c_cur`` is ``c_m``.
    """
    if r < 2 * p:
        raise ValueError("propagation is only analysed for r >= 2p")
    # x_{m-1} = p x_m - c_{m-1}
    left_target = Fraction(p * a - b * c_prev, b)
    left = _match(x_prev, left_target, m - 1, r, p, grows=(b % p == 0))
    # x_{m+1} = (x_m + c_m) / p
    right_target = Fraction(a + b * c_cur, b * p)
    right = _match(x_next, right_target, m + 1, r, p, grows=((a + b * c_cur) % p == 0))
    if not (left.inside and right.inside):
        raise TrichotomyViolation(f"neighbour partial quotient outside its interval at m={m}, r={r}")
    if not left.grows and not right.grows:
        case = PQClass.MAXIMAL
    elif not left.grows and right.grows:
        case = PQClass.CASE_II
    elif left.grows and not right.grows:
        case = PQClass.CASE_III
    else:
        raise TrichotomyViolation("p divides both b and a + b c_m, impossible for coprime a, b")
    return Propagation(case, left, right)


def classify_propagation(digits: DigitSequence, p: int, m: int, j: int) -> Propagation:
    """Classify partial quotient ``a_j`` of ``x_m`` by inspecting ``x_{m-1}`` and ``x_{m+1}``."""
    if m < 2:
        raise ValueError("m must be >= 2")
    recs = associated_records(digits, p, m)
    rec = recs[j - 1]
    cs = digits.prefix(m + 1)
    x_prev = prefix_rational(digits, m - 1, p)
    x_next = prefix_rational(digits, m + 1, p)
    return classify_neighbors(x_prev, x_next, rec.conv_num, rec.conv_den, rec.r,
                              cs[m - 1], cs[m], p, m)


def classify_all(digits: DigitSequence, p: int, m_max: int) -> list[tuple[PQRecord, Propagation]]:
    """Classify every partial quotient ``>= 2p`` of ``x_2 .. x_{m_max}`` (one CF per ``m``)."""
    cs = digits.prefix(m_max + 1)
    xs = {m: Fraction(C, p ** m) for m, C in prefix_integers(digits, m_max + 1, p)}
    exps: dict[int, _Expansion] = {}

    def expansion(m: int) -> _Expansion:
        if m not in exps:
            exps[m] = _Expansion(xs[m])
        return exps[m]

    out = []
    for m in range(2, m_max + 1):
        exps.pop(m - 2, None)
        for rec in records_of(xs[m], m, p):
            if rec.r < 2 * p:
                continue
            prop = classify_neighbors(expansion(m - 1), expansion(m + 1), rec.conv_num,
                                      rec.conv_den, rec.r, cs[m - 1], cs[m], p, m)
            rec.classification = prop.case
            out.append((rec, prop))
    return out


# --- interpolation bounds -------------------------------------------------------------

def etabound_upper(m: int, eta_m: float, n: int, eta_n: float) -> float:
    """Upper bound for ``eta_u``, ``m <= u <= n`` (asymptotic error terms dropped)."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    hi = n * (1 + eta_n)
    lo = m * (1 - eta_m)
    return (hi - lo) / (hi + lo)


def etabound_lower(m: int, teta_m: float, n: int, teta_n: float) -> float:
    """Lower bound for ``eta_u`` from partial quotients ``p^{teta_m m}`` and ``p^{teta_n n}``."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    hi = m * (1 + teta_m)
    lo = n * (1 - teta_n)
    return (hi - lo) / (hi + lo)
