"""Exact integers, rationals, integer polynomials and p-adic valuations.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Nothing in this module rounds.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .words import DigitSequence

DEFAULT_GUARD = 1_000_000


def default_guard() -> int:
    """Valuation guard, overridable through ``PADIC_CF_GUARD``."""
    raw = os.environ.get("PADIC_CF_GUARD")
    if raw is None:
        return DEFAULT_GUARD
    guard = int(raw)
    if guard < 1:
        raise ValueError("PADIC_CF_GUARD must be a positive integer")
    return guard


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp_int(n: int, p: int) -> int | float:
    """p-adic valuation of an integer; ``inf`` for zero."""
    if n == 0:
        return math.inf
    if n % p:
        return 0
    # divide by p, p^2, p^4, ... while possible, then binary search down
    v = 0
    powers = [p]
    while n % powers[-1] == 0:
        n //= powers[-1]
        v += 1 << (len(powers) - 1)
        powers.append(powers[-1] * powers[-1])
    for i in range(len(powers) - 2, -1, -1):
        if n % powers[i] == 0:
            n //= powers[i]
            v += 1 << i
    return v


def vp(x: Fraction | int, p: int) -> int | float:
    x = Fraction(x)
    if x == 0:
        return math.inf
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def centered_residue(n: int, modulus: int) -> int:
    r = n % modulus
    return r - modulus if 2 * r > modulus else r


@dataclass(frozen=True)
class Valuation:
    """``value`` is the valuation when ``exact``; otherwise only ``>= value`` is known."""

    value: int | float
    exact: bool = True

    @property
    def infinite(self) -> bool:
        return self.value == math.inf

    def to_json(self) -> dict:
        return {"v": None if self.infinite else int(self.value), "exact": self.exact}


# --- digit prefixes ------------------------------------------------------------

def _horner_split(digits: Sequence[int], base: int) -> int:
    """sum digits[k] * base**k, by binary splitting."""
    n = len(digits)
    if n <= 64:
        acc = 0
        for d in reversed(digits):
            acc = acc * base + d
        return acc
    h = n // 2
    return _horner_split(digits[:h], base) + base ** h * _horner_split(digits[h:], base)


def truncated_integer(digits: DigitSequence, m: int, p: int) -> int:
    """``C_m = c_0 + c_1 p + ... + c_{m-1} p^{m-1}``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return _horner_split(digits.prefix(m), p)


def prefix_rational(digits: DigitSequence, m: int, b: int) -> Fraction:
    """``x_m = c_0/b^m + c_1/b^{m-1} + ... + c_{m-1}/b`` (equals ``C_m / b^m``)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if b < 2:
        raise ValueError("base must be >= 2")
    return Fraction(truncated_integer(digits, m, b), b ** m)


def prefix_integers(digits: DigitSequence, m_max: int, p: int):
    """Yield ``(m, C_m)`` for ``m = 1..m_max`` incrementally."""
    cs = digits.prefix(m_max)
    C, pm = 0, 1
    for m in range(1, m_max + 1):
        C += cs[m - 1] * pm
        pm *= p
        yield m, C


def linear_form_valuation(a: int, b: int, digits: DigitSequence, p: int,
                          guard: int | None = None, start: int = 64) -> Valuation:
    """``v_p(b xi - a)`` for ``xi = sum c_k p^k``.

    ``b xi - a`` agrees with ``b C_N - a`` modulo ``p^N``, so a valuation
    below ``N`` is exact.  ``N`` doubles up to ``guard``; if the form still
    vanishes to order ``guard`` the result is ``Valuation(guard, exact=False)``
    (a suspiciously good approximation, not an error).
    """
    if a == 0 and b == 0:
        raise ValueError("(a, b) must not be (0, 0)")
    if guard is None:
        guard = default_guard()
    if guard < 1:
        raise ValueError("guard must be >= 1")
    if b == 0:
        return Valuation(vp_int(a, p))
    N = min(max(start, 1), guard)
    while True:
        v = vp_int(b * truncated_integer(digits, N, p) - a, p)
        if v < N:
            return Valuation(v)
        if N >= guard:
            return Valuation(guard, exact=False)
        N = min(2 * N, guard)


def lacunary_product(base: int, ell: int) -> Fraction:
    """``prod_{h=0}^{ell} (1 - base^{-2^h})``."""
    if base < 2 or ell < 0:
        raise ValueError("need base >= 2 and ell >= 0")
    num, den = 1, 1
    for h in range(ell + 1):
        q = base ** (1 << h)
        num *= q - 1
        den *= q
    return Fraction(num, den)


# --- integer polynomials -----------------------------------------------------------

class IntPolynomial:
    """Dense polynomial, ``coeffs[i]`` is the coefficient of ``X^i``; trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int | Fraction] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def monomial(cls, degree: int, c: int = 1) -> "IntPolynomial":
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self) -> str:
        return f"IntPolynomial({self.coeffs})"

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(self[i] + other[i] for i in range(n))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntPolynomial":
        if not isinstance(other, IntPolynomial):
            return IntPolynomial(c * other for c in self.coeffs)
        if not self or not other:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def truncate(self, n: int) -> "IntPolynomial":
        """Keep terms of degree < n."""
        return IntPolynomial(self.coeffs[:n])

    def compose_power(self, e: int) -> "IntPolynomial":
        """``P(X^e)``."""
        if not self:
            return IntPolynomial()
        out = [0] * (e * self.degree + 1)
        for i, c in enumerate(self.coeffs):
            out[i * e] = c
        return IntPolynomial(out)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def valuation(self) -> int | float:
        """Order at X = 0."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return math.inf

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]
