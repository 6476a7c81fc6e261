"""Reduced-budget oracle and acceptance checks, run by `bfreedyn selftest`.

Output is a deterministic list of PASS/FAIL lines (no timings), so two
runs with the same seed can be compared byte for byte.
"""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np

from .config import exact_patch, generic_patch, shift
from .megf import joint_determining_radius, reconstruct
from .mirsky import PatternQuery, birkhoff_count, pattern_frequency_exact
from .proximal import disagreement_count, exact_disagreement_density, find_agreement_window
from .rotation import RotationSystem, block_ones_stats, code_point, union_measure
from .scheme import (
    DEFAULT_WINDOW,
    Window,
    delta_embed,
    haar_sample,
    validate_moduli,
    window_period_group,
)

SQUAREFREE = validate_moduli([], "prime-squares")


def _trial_division_squarefree(n: int) -> bool:
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def check_sieve_oracle(seed: int, workers: int):
    bits = exact_patch(0, (1, 10_000), SQUAREFREE).bits
    want = np.array([_trial_division_squarefree(n) for n in range(1, 10_001)], dtype=np.uint8)
    return bool(np.array_equal(bits, want)), f"{int(bits.sum())} square-free in [1, 10^4]"


def check_squarefree_density(seed: int, workers: int):
    N = 100_000
    emp = birkhoff_count(PatternQuery(((0, 1),)), SQUAREFREE, N, workers=workers) / N
    return abs(emp - 6 / math.pi**2) <= 5e-3, f"empirical={emp:.6f}"


def check_oracle_equivalence(seed: int, workers: int):
    checked = 0
    for ms in [(2, 3), (2, 3, 5), (2, 3, 5, 7), (3, 4, 5)]:
        for L in range(1, 5):
            for word in itertools.product("01", repeat=L):
                q = PatternQuery.from_word("".join(word))
                a = pattern_frequency_exact(q, ms, method="inclusion-exclusion").exact
                b = pattern_frequency_exact(q, ms, method="enumerate").exact
                if a != b:
                    return False, f"mismatch at {ms} {q}"
                checked += 1
    return True, f"{checked} patterns"


def check_empirical_periodic(seed: int, workers: int):
    B = validate_moduli([2, 3, 5])
    N = 30_000
    for L in range(1, 5):
        for word in itertools.product("01", repeat=L):
            q = PatternQuery.from_word("".join(word))
            if Fraction(birkhoff_count(q, B, N, workers=workers), N) != pattern_frequency_exact(q, B.explicit).exact:
                return False, f"pattern {q}"
    return True, "30 patterns exact at N=30000"


def check_round_trip(seed: int, workers: int):
    ms = SQUAREFREE.prefix(5)
    rng = random.Random(seed)
    for _ in range(10):
        h = haar_sample(ms, rng.randrange(2**32))
        R = joint_determining_radius(h)
        if reconstruct(generic_patch(h, DEFAULT_WINDOW, (-R, R)), ms).point != h:
            return False, f"round trip failed for {h.residues}"
        base = generic_patch(h, DEFAULT_WINDOW, (-R, R))
        for g in range(-10, 11):
            if reconstruct(shift(base, g), ms).point != h.translate(-g):
                return False, f"equivariance failed at g={g}"
    return True, "10 points, g in [-10, 10]"


def check_separation(seed: int, workers: int):
    ms = SQUAREFREE.prefix(5)
    pts = {g: delta_embed(g, ms) for g in range(-3, 4)}
    for g1, g2 in itertools.combinations(pts, 2):
        R = max(joint_determining_radius(pts[g1]), joint_determining_radius(pts[g2]))
        if find_agreement_window(pts[g1], pts[g2], DEFAULT_WINDOW, R, R + 2000) is not None:
            return False, f"agreement window for g={g1},{g2}"
    # new moduli must be coprime to the base, so stop below 7^2
    base = delta_embed(0, SQUAREFREE.prefix(3))
    for b in (7, 11, 13):
        L = (b - 2) // 2
        for r in range(b):
            if find_agreement_window(base, base.extend(b, r), DEFAULT_WINDOW, L, max(L, b)) is None:
                return False, f"no witness for b'={b}, r={r}"
    return True, "separated pairs; tail witnesses found"


def check_disagreement(seed: int, workers: int):
    ms = (2, 3, 5)
    rng = random.Random(seed)
    for _ in range(5):
        h1, h2 = (delta_embed(rng.randrange(30), ms) for _ in range(2))
        if Fraction(disagreement_count(h1, h2, DEFAULT_WINDOW, -15, 15), 30) != exact_disagreement_density(h1, h2):
            return False, f"{h1.residues} vs {h2.residues}"
    return True, "5 pairs"


def check_rotation(seed: int, workers: int):
    sys = RotationSystem.make(n_max=20)
    mu = union_measure(sys.E)
    stats = block_ones_stats(sys, 3, 20_000, seed, workers=workers)
    x = 0.1234567
    left = code_point(sys, (x + sys.alpha) % 1.0, (-200, 200))
    right = shift(code_point(sys, x, (-199, 201)), -1)
    ok = 0 < mu <= 0.5 and stats.estimate >= 1 / 48 - 3 * stats.stderr and np.array_equal(left.bits, right.bits)
    return ok, f"measure={mu:.6f} block3={stats.estimate:.5f}"


def check_aperiodicity(seed: int, workers: int):
    trivial = window_period_group(DEFAULT_WINDOW, (2, 3, 5))
    six = window_period_group(Window.make({6: [0, 3]}), (6,))
    ok = [h.residues for h in trivial] == [(0, 0, 0)] and [h.residues for h in six] == [(0,), (3,)]
    return ok, f"periods {[h.residues for h in six]}"


CHECKS = [
    ("sieve oracle", check_sieve_oracle),
    ("square-free density", check_squarefree_density),
    ("inclusion-exclusion vs enumeration", check_oracle_equivalence),
    ("empirical equals exact on periodic orbit", check_empirical_periodic),
    ("reconstruction round trip and equivariance", check_round_trip),
    ("separation and tail witnesses", check_separation),
    ("disagreement density exactness", check_disagreement),
    ("rotation coding", check_rotation),
    ("window periods", check_aperiodicity),
]


def run(seed: int, workers: int = 1) -> tuple[list[str], bool]:
    lines, all_ok = [], True
    for name, fn in CHECKS:
        ok, detail = fn(seed, workers)
        all_ok &= bool(ok)
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    passed = sum(line.startswith("PASS") for line in lines)
    lines.append(f"selftest seed={seed}: {passed}/{len(CHECKS)} passed")
    return lines, all_ok
