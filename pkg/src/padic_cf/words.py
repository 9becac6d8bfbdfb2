"""Infinite words used as digit sequences: Thue-Morse, Fibonacci, substitution fixed points.

Thue-Morse is 0-indexed (``t_0 = 1``) and the Fibonacci word is 1-indexed
(``f_1 = 0``).  A :class:`DigitSequence` remembers its index origin;
``seq[n]`` uses that origin while ``seq.prefix(m)`` always returns the first
``m`` letters, which is what the p-adic code consumes as ``c_0 ... c_{m-1}``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence


class DigitSequence:
    """Lazily indexable infinite (or file-backed finite) integer sequence."""

    def __init__(self, alphabet: Iterable[int], origin: int = 0, name: str = ""):
        if origin not in (0, 1):
            raise ValueError("index origin must be 0 or 1")
        self.alphabet = frozenset(alphabet)
        self.origin = origin
        self.name = name

    def _letter(self, i: int) -> int:
        """Letter at 0-based offset ``i``."""
        raise NotImplementedError

    def __getitem__(self, n: int) -> int:
        if n < self.origin:
            raise IndexError(f"{self.name or 'sequence'} starts at index {self.origin}")
        return self._letter(n - self.origin)

    def prefix(self, length: int) -> list[int]:
        return [self._letter(i) for i in range(length)]

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name or '?'} origin={self.origin}>"


class FunctionSequence(DigitSequence):
    """Sequence given by an explicit rule ``i -> letter`` on 0-based offsets."""

    def __init__(self, rule: Callable[[int], int], alphabet: Iterable[int],
                 origin: int = 0, name: str = ""):
        super().__init__(alphabet, origin, name)
        self._rule = rule

    def _letter(self, i: int) -> int:
        return self._rule(i)


class ListSequence(DigitSequence):
    """Finite sequence; reading past the end raises ``IndexError``."""

    def __init__(self, values: Sequence[int], origin: int = 0, name: str = "",
                 alphabet: Iterable[int] | None = None):
        values = tuple(int(v) for v in values)
        super().__init__(set(values) if alphabet is None else alphabet, origin, name)
        bad = [v for v in values if v not in self.alphabet]
        if bad:
            raise ValueError(f"digit {bad[0]} outside alphabet {sorted(self.alphabet)}")
        self.values = values

    def __len__(self) -> int:
        return len(self.values)

    def _letter(self, i: int) -> int:
        if i >= len(self.values):
            raise IndexError(f"{self.name or 'sequence'} has only {len(self.values)} digits")
        return self.values[i]

    def prefix(self, length: int) -> list[int]:
        if length > len(self.values):
            raise IndexError(f"{self.name or 'sequence'} has only {len(self.values)} digits")
        return list(self.values[:length])


class SubstitutionSequence(DigitSequence):
    """Fixed point of a substitution, materialized in growing blocks and memoized."""

    def __init__(self, rules: Mapping[int, Sequence[int]], seed: int,
                 origin: int = 0, name: str = ""):
        image = tuple(rules.get(seed, ()))
        if len(image) < 2 or image[0] != seed:
            raise ValueError("the image of the seed must start with the seed and have length >= 2")
        letters = set(rules)
        for a, w in rules.items():
            letters.update(w)
        missing = letters - set(rules)
        if missing:
            raise ValueError(f"no rule for letter(s) {sorted(missing)}")
        super().__init__(letters, origin, name)
        self.rules = {a: tuple(w) for a, w in rules.items()}
        self.seed = seed
        self._buf: list[int] = list(image)
        self._lock = threading.Lock()

    def _grow(self, length: int) -> None:
        with self._lock:
            buf = self._buf
            while len(buf) < length:
                # the image of a prefix of the fixed point is a longer prefix
                nxt: list[int] = []
                for a in buf:
                    nxt.extend(self.rules[a])
                    if len(nxt) >= 2 * length:
                        break
                self._buf = buf = nxt

    def _letter(self, i: int) -> int:
        if i >= len(self._buf):
            self._grow(i + 1)
        return self._buf[i]

    def prefix(self, length: int) -> list[int]:
        if length > len(self._buf):
            self._grow(length)
        return self._buf[:length]


class EventuallyPeriodic(DigitSequence):
    """The word ``head`` followed by ``period`` repeated forever."""

    def __init__(self, head: Sequence[int], period: Sequence[int], origin: int = 0, name: str = ""):
        if not period:
            raise ValueError("period must be nonempty")
        super().__init__(set(head) | set(period), origin, name)
        self.head = tuple(head)
        self.period = tuple(period)

    def _letter(self, i: int) -> int:
        h = len(self.head)
        if i < h:
            return self.head[i]
        return self.period[(i - h) % len(self.period)]


def substitution_fixed_point(rules: Mapping[int, Sequence[int]], seed: int,
                             origin: int = 0, name: str = "") -> SubstitutionSequence:
    return SubstitutionSequence(rules, seed, origin=origin, name=name)


# --- Thue-Morse ------------------------------------------------------------

TAU = {1: (1, -1), -1: (-1, 1)}


def tm_digit(n: int) -> int:
    """Thue-Morse letter ``t_n`` over {-1, 1} by popcount parity."""
    if n < 0:
        raise IndexError("Thue-Morse is indexed from 0")
    return -1 if bin(n).count("1") & 1 else 1


def thue_morse() -> SubstitutionSequence:
    return SubstitutionSequence(TAU, 1, origin=0, name="tm")


def thue_morse01() -> FunctionSequence:
    # {0,1} projection (t_n + 1) / 2, i.e. 1 -1 -1 1 -> 1 0 0 1
    return FunctionSequence(lambda i: (tm_digit(i) + 1) // 2, (0, 1), origin=0, name="tm01")


# --- Fibonacci -------------------------------------------------------------

PHI = {0: (0, 1), 1: (0,)}


class FibonacciNumbers:
    """Cached ``F_0 = 0, F_1 = 1, F_{n+2} = F_{n+1} + F_n``."""

    def __init__(self) -> None:
        self._cache = [0, 1]
        self._lock = threading.Lock()

    def __getitem__(self, n: int) -> int:
        if n < 0:
            raise IndexError("Fibonacci numbers are indexed from 0")
        if n >= len(self._cache):
            with self._lock:
                c = self._cache
                while len(c) <= n:
                    c.append(c[-1] + c[-2])
        return self._cache[n]


FIB = FibonacciNumbers()

_FIB_WORD = SubstitutionSequence(PHI, 0, origin=1, name="fib")


def fibonacci_word() -> SubstitutionSequence:
    return SubstitutionSequence(PHI, 0, origin=1, name="fib")


def fib_digit(n: int) -> int:
    """Letter ``f_n`` (1-indexed) of the Fibonacci word, from the memoized fixed point."""
    if n < 1:
        raise IndexError("the Fibonacci word is indexed from 1")
    return _FIB_WORD[n]


def fib_digit_beatty(n: int) -> int:
    """Independent route: ``f_n = 1 - (floor((n+1)/g) - floor(n/g))`` with g the golden ratio."""
    if n < 1:
        raise IndexError("the Fibonacci word is indexed from 1")

    def floor_over_golden(k: int) -> int:
        # floor(k (sqrt5 - 1) / 2), exact for integers
        return (math.isqrt(5 * k * k) - k) // 2

    return 1 - (floor_over_golden(n + 1) - floor_over_golden(n))


# --- combinatorial checks ---------------------------------------------------

@dataclass(frozen=True)
class BlockIdentityReport:
    k: int
    passed: bool
    checked: int
    counterexample: tuple[str, int, int, int] | None = None  # (identity, j, observed, expected)


def check_tm_block_identities(k: int) -> BlockIdentityReport:
    """Check ``t_j + t_{j+2^k} = 0`` on its range plus the three boundary sums."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = 1 << k
    checks: list[tuple[str, int, int, int]] = []
    for j in range(2 * s, 4 * s + s):
        checks.append(("zero", j, j + s, 0))
    checks.append(("left-edge", 2 * s - 1, 2 * s + s - 1, 2 * (-1) ** (k + 1)))
    checks.append(("right-edge", 4 * s + s, 4 * s + 2 * s, 2))
    checks.append(("right-edge+1", 4 * s + s + 1, 4 * s + 2 * s + 1, -2))
    for name, i, j, expected in checks:
        got = tm_digit(i) + tm_digit(j)
        if got != expected:
            return BlockIdentityReport(k, False, len(checks), (name, i, got, expected))
    return BlockIdentityReport(k, True, len(checks))


def longest_common_prefix(w1: DigitSequence, w2: DigitSequence, cap: int) -> int:
    """Length of the longest common prefix, or ``cap`` if none is found below it."""
    block = 256
    n = 0
    while n < cap:
        hi = min(cap, n + block)
        a = w1.prefix(hi)[n:]
        b = w2.prefix(hi)[n:]
        for i, (x, y) in enumerate(zip(a, b)):
            if x != y:
                return n + i
        n = hi
        block *= 2
    return cap


def is_palindrome_prefix(w: DigitSequence, n: int) -> bool:
    if n < 1:
        raise ValueError("n must be >= 1")
    u = w.prefix(n)
    return u == u[::-1]


# --- named sources -----------------------------------------------------------

def load_digit_file(path: str | Path) -> ListSequence:
    """One integer per line, UTF-8, ``#`` starts a comment."""
    values = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            values.append(int(line))
    return ListSequence(values, origin=0, name=f"file:{path}")


def sequence_from_name(name: str) -> DigitSequence:
    """Resolve ``tm``, ``tm01``, ``fib`` or ``file:PATH``."""
    if name == "tm":
        return thue_morse()
    if name == "tm01":
        return thue_morse01()
    if name == "fib":
        return fibonacci_word()
    if name.startswith("file:"):
        return load_digit_file(name[5:])
    raise ValueError(f"unknown digit source {name!r} (expected tm, tm01, fib or file:PATH)")
