import pytest
from hypothesis import given, strategies as st

from padic_cf.words import (FIB, PHI, TAU, EventuallyPeriodic, FunctionSequence, ListSequence,
                            check_tm_block_identities, fib_digit, fib_digit_beatty,
                            fibonacci_word, is_palindrome_prefix, load_digit_file,
                            longest_common_prefix, sequence_from_name, substitution_fixed_point,
                            thue_morse, thue_morse01, tm_digit)


def tm_recursive(n):
    # unroll t_{2n} = t_n, t_{2n+1} = -t_n
    sign = 1
    while n:
        if n & 1:
            sign = -sign
        n >>= 1
    return sign


def test_tm_first_letters():
    assert [tm_digit(n) for n in range(5)] == [1, -1, -1, 1, -1]
    assert tm_digit(0) == 1
    # t_{2^20} = t_1 by the even-index rule
    assert tm_digit(2 ** 20) == tm_recursive(2 ** 20) == -1


def test_tm_recursion_exhaustive():
    t = thue_morse().prefix(1 << 20)
    assert all(t[2 * n] == t[n] and t[2 * n + 1] == -t[n] for n in range(1 << 19))


def test_tau_fixed_point_matches_popcount():
    t = substitution_fixed_point(TAU, 1)
    assert t.prefix(1 << 16) == [tm_digit(n) for n in range(1 << 16)]


def test_tm01_projection():
    assert thue_morse01().prefix(8) == [1, 0, 0, 1, 0, 1, 1, 0]


def test_fib_word_prefix():
    want = [int(c) for c in "010010100100101001010"]
    assert [fib_digit(n) for n in range(1, 22)] == want
    assert fib_digit(1) == 0


def test_fib_two_routes_agree():
    assert all(fib_digit(n) == fib_digit_beatty(n) for n in range(1, 5000))
    # F_12 = 144 by iterating phi from the seed
    w = [0]
    while len(w) < 144:
        w = [x for a in w for x in PHI[a]]
    assert fib_digit(144) == w[143]


def test_fib_word_origin():
    f = fibonacci_word()
    assert f.origin == 1 and f[1] == 0 and f[2] == 1
    with pytest.raises(IndexError):
        f[0]
    with pytest.raises(IndexError):
        fib_digit(0)


def test_fibonacci_numbers():
    assert [FIB[n] for n in range(10)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
    assert all(FIB[n + 2] == FIB[n + 1] + FIB[n] for n in range(200))


def test_phi_maps_prefixes():
    f = fibonacci_word()
    # F_1 = F_2, so the identity starts at n = 2
    for n in range(2, 26):
        image = [x for a in f.prefix(FIB[n]) for x in PHI[a]]
        assert image == f.prefix(FIB[n + 1])


@pytest.mark.parametrize("n", range(4, 25))
def test_fib_word_suffix_pattern(n):
    f = fibonacci_word()
    tail = [f[FIB[n] - 2], f[FIB[n] - 1], f[FIB[n]]]
    assert tail == ([0, 0, 1] if n % 2 else [0, 1, 0])


def test_substitution_rejects_bad_seed():
    with pytest.raises(ValueError):
        substitution_fixed_point({0: (1, 0), 1: (0,)}, 0)
    with pytest.raises(ValueError):
        substitution_fixed_point({0: (0,)}, 0)
    with pytest.raises(ValueError):
        substitution_fixed_point({0: (0, 2)}, 0)


def test_constant_fixed_point():
    w = substitution_fixed_point({5: (5, 5)}, 5)
    assert set(w.prefix(100)) == {5}


def test_block_identities():
    assert tm_digit(3) + tm_digit(5) == 2
    assert tm_digit(10) + tm_digit(12) == 2
    assert all(tm_digit(j) + tm_digit(j + 2) == 0 for j in range(4, 10))
    for k in range(1, 15):
        assert check_tm_block_identities(k).passed


def test_longest_common_prefix():
    f = fibonacci_word()
    assert longest_common_prefix(f, EventuallyPeriodic((), f.prefix(8)), 1000) == 19
    assert longest_common_prefix(f, EventuallyPeriodic(f.prefix(13), f.prefix(8)), 1000) == 40
    assert longest_common_prefix(f, fibonacci_word(), 5000) == 5000


def test_palindromes_and_sign_swap():
    t = thue_morse()
    assert is_palindrome_prefix(t, 4)
    assert not is_palindrome_prefix(t, 2)
    for k in range(1, 8):
        assert is_palindrome_prefix(t, 4 ** k)
        u = t.prefix(4 ** k)
        assert t.prefix(2 * 4 ** k) == u + [-x for x in u]


def test_file_sequence(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("# digits\n1\n-1  # neg\n\n0\n", encoding="utf-8")
    s = load_digit_file(path)
    assert s.prefix(3) == [1, -1, 0] and len(s) == 3
    with pytest.raises(IndexError):
        s.prefix(4)
    assert sequence_from_name(f"file:{path}").prefix(3) == [1, -1, 0]


def test_named_sources():
    assert sequence_from_name("tm").prefix(4) == [1, -1, -1, 1]
    assert sequence_from_name("fib").prefix(5) == [0, 1, 0, 0, 1]
    with pytest.raises(ValueError):
        sequence_from_name("nope")


def test_list_sequence_alphabet():
    with pytest.raises(ValueError):
        ListSequence([0, 3], alphabet=(0, 1))


@given(st.lists(st.integers(0, 1 << 20), min_size=1, max_size=50))
def test_indexing_is_deterministic(indices):
    t = thue_morse()
    first = [t[i] for i in indices]
    assert first == [t[i] for i in indices] == [tm_digit(i) for i in indices]


@given(st.integers(1, 3000))
def test_digits_in_alphabet(n):
    assert fib_digit(n) in fibonacci_word().alphabet
    f = FunctionSequence(lambda i: tm_digit(i), (-1, 1))
    assert f[n] in f.alphabet
