import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bfreedyn.errors import ExponentialBlowup, LcmOverflow, TailNotEnumerable
from bfreedyn.mirsky import (
    PatternQuery,
    birkhoff_count,
    density,
    empirical_frequency,
    pattern_frequency_exact,
    tail_error,
    word_counts,
)
from bfreedyn.scheme import ModuliSet, Window, validate_moduli

SQUAREFREE = validate_moduli([], "prime-squares")
COPRIME_POOL = [2, 3, 4, 5, 7, 9, 11, 13, 25, 49]


def mobius_upto(n):
    mu = [1] * (n + 1)
    is_comp = [False] * (n + 1)
    for p in range(2, n + 1):
        if not is_comp[p]:
            for k in range(p, n + 1, p):
                is_comp[k] = True if k > p else is_comp[k]
                mu[k] = -mu[k]
            for k in range(p * p, n + 1, p * p):
                mu[k] = 0
    return mu


def squarefree_count(N):
    """#{1 <= n <= N squarefree} = sum_d mu(d) floor(N / d^2)."""
    r = math.isqrt(N)
    mu = mobius_upto(r)
    return sum(mu[d] * (N // (d * d)) for d in range(1, r + 1))


def brute_frequency(q, moduli, window=None):
    """Count n0 in Z/lcm whose window indicator sequence matches q."""
    L = math.lcm(*moduli)
    hits = 0
    for n0 in range(L):
        ok = True
        for n, bit in q.items:
            inside = all(((n0 + n) % b) not in (window.forbidden_for(b) if window else {0}) for b in moduli)
            if inside != bool(bit):
                ok = False
                break
        hits += ok
    return Fraction(hits, L)


def coprime_subset(pool):
    out = []
    for b in pool:
        if all(math.gcd(b, c) == 1 for c in out):
            out.append(b)
    return out


patterns = st.dictionaries(st.integers(-4, 8), st.integers(0, 1), min_size=1, max_size=6).map(PatternQuery.make)


class TestExact:
    def test_examples(self):
        assert pattern_frequency_exact(PatternQuery.make({0: 1}), (2, 3)).exact == Fraction(1, 3)
        assert brute_frequency(PatternQuery.make({0: 1}), (2, 3)) == Fraction(1, 3)
        assert pattern_frequency_exact(PatternQuery.make({0: 1, 1: 1}), (2, 3)).exact == 0
        assert brute_frequency(PatternQuery.make({0: 1, 1: 1}), (2, 3)) == 0
        assert pattern_frequency_exact(PatternQuery.make({0: 1, 1: 0}), (2,)).exact == Fraction(1, 2)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.sampled_from(COPRIME_POOL), min_size=1, max_size=5, unique=True), patterns)
    def test_inclusion_exclusion_equals_enumeration(self, pool, q):
        ms = coprime_subset(pool)
        assert math.lcm(*ms) <= 10**6
        a = pattern_frequency_exact(q, ms, method="inclusion-exclusion").exact
        b = pattern_frequency_exact(q, ms, method="enumerate").exact
        assert a == b

    @settings(max_examples=20, deadline=None)
    @given(st.sampled_from([(2, 3), (4, 9), (2, 4), (6, 10), (4, 6)]), patterns.filter(lambda q: q.span_length <= 6))
    def test_enumeration_against_brute_force(self, ms, q):
        assert pattern_frequency_exact(q, ms).exact == brute_frequency(q, ms)

    def test_general_window(self):
        W = Window.make({3: [0, 1]})
        q = PatternQuery.from_word("1001")
        assert pattern_frequency_exact(q, (2, 3), W, method="inclusion-exclusion").exact == \
            brute_frequency(q, (2, 3), W)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.sampled_from(COPRIME_POOL), min_size=1, max_size=4, unique=True), patterns,
           st.integers(-5, 12))
    def test_additivity(self, pool, q, n):
        ms = coprime_subset(pool)
        base = PatternQuery(tuple((m, b) for m, b in q.items if m != n)) if len(q.items) > 1 or q.items[0][0] != n else None
        if base is None:
            return
        f = lambda qq: pattern_frequency_exact(qq, ms).exact
        assert f(base) == f(base.with_bit(n, 0)) + f(base.with_bit(n, 1))

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.sampled_from(COPRIME_POOL), min_size=1, max_size=4, unique=True), patterns,
           st.integers(-1000, 1000))
    def test_shift_invariance_and_bounds(self, pool, q, g):
        ms = coprime_subset(pool)
        f = pattern_frequency_exact(q, ms).exact
        assert f == pattern_frequency_exact(q.translate(g), ms).exact
        singles = [pattern_frequency_exact(PatternQuery(((n, b),)), ms).exact for n, b in q.items]
        assert 0 <= f <= min(singles)

    def test_blowup_and_overflow(self):
        q = PatternQuery.from_word("0" * 21)
        with pytest.raises(ExponentialBlowup):
            pattern_frequency_exact(q, (2, 3))
        with pytest.raises(LcmOverflow):
            pattern_frequency_exact(PatternQuery.make({0: 1}), (4, 6), bound=10)

    def test_tail_error_attached(self):
        f = pattern_frequency_exact(PatternQuery.make({0: 1}), SQUAREFREE, level=6)
        assert f.level == 6 and f.tail_error > 0
        lo, hi = f.bracket()
        assert lo <= 6 / math.pi**2 <= hi


class TestTailError:
    def test_finite_is_zero(self):
        B = validate_moduli([2, 3, 5])
        assert tail_error(PatternQuery.from_word("1010"), B, 3) == 0

    def test_finite_partial_level(self):
        B = validate_moduli([2, 3, 5])
        assert tail_error(PatternQuery.make({0: 1}), B, 2) == pytest.approx(1 / 5)

    def test_prime_squares_p_le_100(self):
        ps = [p for p in range(2, 101) if all(p % d for d in range(2, p))]
        K = len(ps)
        err = tail_error(PatternQuery.make({0: 1}), SQUAREFREE, K)
        assert err <= 1 / 100

    def test_linear_in_span(self):
        e1 = tail_error(PatternQuery.from_word("1" * 3), SQUAREFREE, 10)
        e2 = tail_error(PatternQuery.from_word("1" * 6), SQUAREFREE, 10)
        assert e2 == pytest.approx(2 * e1)

    def test_primes_divergent(self):
        with pytest.raises(TailNotEnumerable):
            tail_error(PatternQuery.make({0: 1}), validate_moduli([], "primes"), 5)


class TestEmpirical:
    def test_parity(self):
        assert empirical_frequency(PatternQuery.make({0: 1}), validate_moduli([2]), 10**6) == 0.5

    def test_period_six(self):
        N = 6 * 10**5
        assert Fraction(birkhoff_count(PatternQuery.make({0: 1}), validate_moduli([2, 3]), N), N) == Fraction(1, 3)

    def test_squarefree_density(self):
        N = 10**6
        count = birkhoff_count(PatternQuery.make({0: 1}), SQUAREFREE, N)
        assert count == squarefree_count(N)
        assert abs(count / N - 6 / math.pi**2) <= 2e-3

    def test_mobius_oracle_small(self):
        assert squarefree_count(10) == 7
        assert squarefree_count(100) == 61

    @pytest.mark.parametrize("ms", [(2, 3), (4, 9), (2, 3, 5), (4, 6)])
    def test_empirical_close_to_exact(self, ms):
        B = validate_moduli(list(ms))
        L = math.lcm(*ms)
        N = 10_007
        for length in range(1, 5):
            for word in itertools.product("01", repeat=length):
                q = PatternQuery.from_word("".join(word))
                exact = pattern_frequency_exact(q, ms).exact
                assert abs(empirical_frequency(q, B, N) - float(exact)) <= L / N

    def test_workers_and_blocks(self):
        q = PatternQuery.from_word("1101")
        ref = birkhoff_count(q, SQUAREFREE, 300_000)
        assert birkhoff_count(q, SQUAREFREE, 300_000, workers=4) == ref
        assert birkhoff_count(q, SQUAREFREE, 300_000, block=1000) == ref

    def test_word_counts_agree(self):
        counts = word_counts(3, SQUAREFREE, 50_000, block=4096)
        assert sum(counts.values()) == 50_000
        for word in ("101", "111", "000", "011"):
            assert counts[word] == birkhoff_count(PatternQuery.from_word(word), SQUAREFREE, 50_000)

    def test_negative_positions(self):
        q = PatternQuery.make({-2: 1, 0: 1})
        B = validate_moduli([4, 9])
        N = 36 * 100
        assert Fraction(birkhoff_count(q, B, N), N) == pattern_frequency_exact(q, (4, 9)).exact


class TestDensity:
    def test_two_three_five(self):
        rep = density(validate_moduli([2, 3, 5]), N=30_000)
        assert rep.exact == Fraction(4, 15)
        assert brute_frequency(PatternQuery.make({0: 1}), (2, 3, 5)) == Fraction(4, 15)
        assert rep.tail_error == 0
        assert Fraction(rep.empirical_count, 30_000) == Fraction(4, 15)

    def test_empty(self):
        rep = density(ModuliSet(()), Window.empty(), N=100)
        assert rep.exact == 1 and rep.empirical == 1.0

    def test_non_coprime(self):
        rep = density(validate_moduli([4, 6]))
        assert rep.exact == brute_frequency(PatternQuery.make({0: 1}), (4, 6))

    def test_partial_euler_products(self):
        vals = [density(SQUAREFREE, level=K).exact for K in (1, 5, 25, 100, 400)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        target = 6 / math.pi**2
        for K, v in zip((1, 5, 25, 100, 400), vals):
            err = density(SQUAREFREE, level=K).tail_error
            assert float(v) - err <= target <= float(v)
        assert float(vals[-1]) - target < 1e-3
