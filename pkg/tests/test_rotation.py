import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bfreedyn.config import generic_patch, shift
from bfreedyn.errors import BlockExceedsLevel, RationalRotation
from bfreedyn.mirsky import PatternQuery, pattern_frequency_exact
from bfreedyn.rotation import (
    GOLDEN,
    CircleIntervalSet,
    RotationSystem,
    arc_length,
    block_ones_stats,
    build_E,
    code_point,
    convolve_sample,
    injectivity_probe,
    union_measure,
)
from bfreedyn.scheme import DEFAULT_WINDOW, TruncatedInternalPoint

arcs = st.lists(st.tuples(st.floats(-2, 2), st.floats(0, 0.7)), max_size=8).map(
    lambda xs: tuple((lo, lo + w) for lo, w in xs))


def grid_measure(s, n=200_000):
    x = (np.arange(n) + 0.5) / n
    return s.contains(x).mean()


class TestCircleIntervalSet:
    def test_overlap(self):
        assert union_measure(CircleIntervalSet(((0, 0.5), (0.25, 0.75)))) == 0.75

    def test_empty(self):
        assert union_measure(CircleIntervalSet()) == 0

    def test_wraparound(self):
        s = CircleIntervalSet.from_endpoints([(0.9, 0.1), (0.05, 0.2)])
        assert union_measure(s) == pytest.approx(0.3)
        assert s.arcs == ((0.0, 0.2), (0.9, 1.0))

    def test_half_open(self):
        s = CircleIntervalSet(((0.25, 0.5),))
        assert s.contains([0.25, 0.5, 0.49]).tolist() == [True, False, True]

    @settings(max_examples=60, deadline=None)
    @given(arcs)
    def test_normal_form(self, a):
        s = CircleIntervalSet(a)
        assert CircleIntervalSet(s.arcs) == s
        assert all(lo < hi for lo, hi in s.arcs)
        assert all(h1 < l2 for (_, h1), (l2, _) in zip(s.arcs, s.arcs[1:]))
        assert 0 <= union_measure(s) <= 1
        assert abs(union_measure(s) - grid_measure(s)) <= 2 * len(s.arcs) / 200_000 + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(arcs, arcs)
    def test_union_subadditive(self, a, b):
        s, t = CircleIntervalSet(a), CircleIntervalSet(b)
        u = s.union(t)
        assert max(union_measure(s), union_measure(t)) - 1e-12 <= union_measure(u)
        assert union_measure(u) <= union_measure(s) + union_measure(t) + 1e-12


class TestBuildE:
    def test_level_one(self):
        E = build_E(GOLDEN, 1)
        assert len(E.arcs) == 1 and union_measure(E) == 0.25

    def test_arc_lengths(self):
        assert arc_length(1) == 0.25 and arc_length(3) == 1 / 48

    @pytest.mark.parametrize("n_max", [1, 2, 5, 10, 20, 40])
    def test_measure_bound(self, n_max):
        mu = union_measure(build_E(GOLDEN, n_max))
        assert 0 < mu <= 0.5
        assert mu <= math.fsum(2.0 ** (-n - 1) for n in range(1, n_max + 1))

    def test_monotone_in_level(self):
        ms = [union_measure(build_E(GOLDEN, n)) for n in range(1, 25)]
        assert all(a <= b for a, b in zip(ms, ms[1:]))

    def test_placement_seed(self):
        assert build_E(GOLDEN, 8, placement_seed=1) == build_E(GOLDEN, 8, placement_seed=1)
        assert build_E(GOLDEN, 8, placement_seed=1) != build_E(GOLDEN, 8)

    def test_rational_rejected(self):
        with pytest.raises(RationalRotation):
            RotationSystem.make(alpha=0.5)
        with pytest.raises(RationalRotation):
            RotationSystem.make(alpha=3 / 7)
        RotationSystem.make(alpha=math.sqrt(2) - 1)


class TestCoding:
    def test_block_inside_J_m(self):
        sys = RotationSystem.make(n_max=10)
        for m in (1, 3, 6):
            left = (m * math.sqrt(2)) % 1.0
            x = left + arc_length(m) / 2
            assert code_point(sys, x, (0, m - 1)).bits.all()

    def test_degenerate_sets(self):
        full = RotationSystem(GOLDEN, CircleIntervalSet.full(), 1)
        empty = RotationSystem(GOLDEN, CircleIntervalSet(), 1)
        assert code_point(full, 0.3, (-20, 20)).bits.all()
        assert not code_point(empty, 0.3, (-20, 20)).bits.any()
        assert injectivity_probe(empty, 50, 100, seed=1) == 0

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 1, exclude_max=True))
    def test_equivariance(self, x):
        sys = RotationSystem.make(n_max=20)
        left = code_point(sys, (x + sys.alpha) % 1.0, (-300, 300))
        right = shift(code_point(sys, x, (-299, 301)), -1)
        assert np.array_equal(left.bits, right.bits)

    def test_injectivity(self):
        sys = RotationSystem.make(n_max=20)
        assert injectivity_probe(sys, 100, 10_000, seed=3) >= 0.95


class TestConvolution:
    def test_example(self):
        h = TruncatedInternalPoint((2, 3), (1, 2))
        full = RotationSystem(GOLDEN, CircleIntervalSet.full(), 1)
        assert convolve_sample(h, DEFAULT_WINDOW, full, 0.1, (0, 5)).to_text() == "101000"

    def test_absorbing_zero(self):
        h = TruncatedInternalPoint((2,), (0,))
        sys = RotationSystem.make(n_max=10)
        p = convolve_sample(h, DEFAULT_WINDOW, sys, 0.2, (0, 0))
        assert p.to_text() == "0"

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 1000), st.floats(0, 1, exclude_max=True))
    def test_monotone(self, n, x):
        ms = (4, 9, 25)
        h = TruncatedInternalPoint(ms, tuple(n % b for b in ms))
        sys = RotationSystem.make(n_max=12)
        p = convolve_sample(h, DEFAULT_WINDOW, sys, x, (-100, 100))
        assert np.all(p.bits <= generic_patch(h, DEFAULT_WINDOW, (-100, 100)).bits)
        assert np.all(p.bits <= code_point(sys, x, (-100, 100)).bits)


class TestBlockStats:
    def test_m_one_matches_measure(self):
        sys = RotationSystem.make(n_max=20)
        st_ = block_ones_stats(sys, 1, 100_000, seed=7)
        mu = union_measure(sys.E)
        assert abs(st_.estimate - mu) <= 4 * st_.stderr
        assert mu >= 0.25

    def test_m_three_bound(self):
        sys = RotationSystem.make(n_max=20)
        st_ = block_ones_stats(sys, 3, 100_000, seed=7)
        assert st_.lower_bound == 1 / 48
        assert st_.estimate >= 1 / 48 - 3 * st_.stderr

    def test_nonincreasing_in_m(self):
        sys = RotationSystem.make(n_max=20)
        ests = [block_ones_stats(sys, m, 50_000, seed=1).estimate for m in range(1, 8)]
        # same seed, same samples: hits for block m+1 are a subset of hits for m
        assert all(a >= b for a, b in zip(ests, ests[1:]))

    def test_block_exceeds_level(self):
        with pytest.raises(BlockExceedsLevel):
            block_ones_stats(RotationSystem.make(n_max=4), 5, 100, seed=0)

    def test_worker_independent(self):
        sys = RotationSystem.make(n_max=20)
        a = block_ones_stats(sys, 2, 70_000, seed=42, workers=1)
        b = block_ones_stats(sys, 2, 70_000, seed=42, workers=4)
        assert a == b


def test_product_realizes_admissible_words():
    # every word with positive frequency at level 3 shows up in one long product sample
    ms = (4, 9, 25)
    admissible = {"".join(w) for w in product("01", repeat=4)
                  if pattern_frequency_exact(PatternQuery.from_word("".join(w)), ms).exact > 0}
    h = TruncatedInternalPoint(ms, (1, 1, 1))
    text = convolve_sample(h, DEFAULT_WINDOW, RotationSystem.make(n_max=20), 0.123, (0, 200_000)).to_text()
    seen = {text[i:i + 4] for i in range(len(text) - 3)}
    assert admissible <= seen
    assert "1111" not in admissible
