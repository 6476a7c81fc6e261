"""Cylinder frequencies of the Mirsky measure.

Exact values are rational Haar measures computed either by
inclusion-exclusion over the zero positions (coprime moduli) or by direct
enumeration of Z/lcm.  Empirical values are Birkhoff counts along the
orbit of the integer point, computed with a streaming sieve.
"""
from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .config import SIEVE_BLOCK, _zero_killed_by_tail, sieve_block, sieve_plan
from .errors import ExponentialBlowup, LcmOverflow, TailNotEnumerable
from .scheme import (
    DEFAULT_WINDOW,
    ENUMERATION_BOUND,
    ModuliSet,
    Window,
    family_tail_sum,
    is_pairwise_coprime,
    lcm_of,
    resolve_moduli,
)

ZERO_CAP = 20


@dataclass(frozen=True)
class PatternQuery:
    """Required bits at finitely many positions, sorted by position."""

    items: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("a pattern query needs at least one position")
        pos = [n for n, _ in self.items]
        if len(set(pos)) != len(pos):
            raise ValueError("pattern positions must be distinct")
        if any(bit not in (0, 1) for _, bit in self.items):
            raise ValueError("pattern bits must be 0 or 1")
        object.__setattr__(self, "items", tuple(sorted(self.items)))

    @classmethod
    def make(cls, mapping: Mapping[int, int]) -> "PatternQuery":
        return cls(tuple((int(n), int(b)) for n, b in mapping.items()))

    @classmethod
    def from_word(cls, word: str, start: int = 0) -> "PatternQuery":
        return cls(tuple((start + i, int(ch)) for i, ch in enumerate(word)))

    @classmethod
    def parse(cls, text: str) -> "PatternQuery":
        """Either a 0/1 word ("101") or "pos:bit" pairs ("0:1,3:0")."""
        text = text.strip()
        if ":" not in text:
            return cls.from_word(text)
        pairs = (item.split(":") for item in text.split(","))
        return cls(tuple((int(n), int(b)) for n, b in pairs))

    @property
    def ones(self) -> tuple[int, ...]:
        return tuple(n for n, b in self.items if b)

    @property
    def zeros(self) -> tuple[int, ...]:
        return tuple(n for n, b in self.items if not b)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.items)

    @property
    def span(self) -> tuple[int, int]:
        return self.items[0][0], self.items[-1][0]

    @property
    def span_length(self) -> int:
        a, b = self.span
        return b - a + 1

    def translate(self, g: int) -> "PatternQuery":
        return PatternQuery(tuple((n + g, b) for n, b in self.items))

    def with_bit(self, n: int, bit: int) -> "PatternQuery":
        return PatternQuery(tuple((m, b) for m, b in self.items if m != n) + ((n, bit),))

    def __str__(self) -> str:
        a, b = self.span
        if self.positions == tuple(range(a, b + 1)) and a == 0:
            return "".join(str(bit) for _, bit in self.items)
        return ",".join(f"{n}:{bit}" for n, bit in self.items)


@dataclass(frozen=True)
class CylinderFrequency:
    exact: Fraction
    tail_error: float | None
    level: int
    moduli: tuple[int, ...] = ()

    def bracket(self) -> tuple[float, float]:
        """Interval guaranteed to contain the untruncated frequency."""
        err = self.tail_error or 0.0
        return max(0.0, float(self.exact) - err), min(1.0, float(self.exact) + err)


# --------------------------------------------------------------------------
# exact frequencies


@functools.lru_cache(maxsize=65536)
def _surviving_residues(b: int, forbidden: frozenset, shifts: frozenset) -> int:
    """#{r in Z/b : (r + n) mod b not in F_b for every n in shifts}."""
    allowed = np.ones(b, dtype=bool)
    allowed[list(forbidden)] = False
    r = np.arange(b)
    ok = np.ones(b, dtype=bool)
    for n in shifts:
        ok &= allowed[(r + n) % b]
    return int(np.count_nonzero(ok))


def _inclusion_exclusion(q: PatternQuery, ms: Sequence[int], window: Window, zero_cap: int) -> Fraction:
    zeros = q.zeros
    if len(zeros) > zero_cap:
        raise ExponentialBlowup(f"{len(zeros)} zero positions exceed the cap of {zero_cap}")
    denom = math.prod(ms)
    total = 0
    for k in range(len(zeros) + 1):
        sign = -1 if k % 2 else 1
        for subset in itertools.combinations(zeros, k):
            shifts = q.ones + subset
            term = 1
            for b in ms:
                term *= _surviving_residues(b, window.forbidden_for(b), frozenset(n % b for n in shifts))
                if term == 0:
                    break
            total += sign * term
    return Fraction(total, denom)


def _enumerate(q: PatternQuery, ms: Sequence[int], window: Window, bound: int) -> Fraction:
    L = lcm_of(ms)
    if L > bound:
        raise LcmOverflow(f"lcm {L} exceeds enumeration bound {bound}")
    masks = [window.allowed_mask(b) for b in ms]
    hits = 0
    for lo in range(0, L, 1 << 18):
        n0 = np.arange(lo, min(lo + (1 << 18), L), dtype=np.int64)
        match = np.ones(n0.size, dtype=bool)
        for n, bit in q.items:
            inside = np.ones(n0.size, dtype=bool)
            for b, mask in zip(ms, masks):
                inside &= mask[(n0 + n) % b]
            match &= inside == bool(bit)
        hits += int(np.count_nonzero(match))
    return Fraction(hits, L)


def pattern_frequency_exact(q: PatternQuery, moduli: ModuliSet | Sequence[int], window: Window = DEFAULT_WINDOW,
                            *, level: int | None = None, method: str = "auto", zero_cap: int = ZERO_CAP,
                            bound: int = ENUMERATION_BOUND) -> CylinderFrequency:
    """Haar measure of the points whose generic patch matches q.

    method is "inclusion-exclusion" (coprime moduli), "enumerate" or "auto".
    When `moduli` is a ModuliSet, the tail bound for the omitted moduli is
    attached to the result.
    """
    ms = resolve_moduli(moduli, level)
    window.check_level(ms)
    if method == "auto":
        method = "inclusion-exclusion" if is_pairwise_coprime(ms) else "enumerate"
    if method == "inclusion-exclusion":
        if not is_pairwise_coprime(ms):
            raise ValueError("inclusion-exclusion needs pairwise coprime moduli")
        exact = _inclusion_exclusion(q, ms, window, zero_cap)
    elif method == "enumerate":
        exact = _enumerate(q, ms, window, bound)
    else:
        raise ValueError(f"unknown method {method!r}")
    err = None
    if isinstance(moduli, ModuliSet):
        err = tail_error(q, moduli, len(ms), window)
    return CylinderFrequency(exact, err, len(ms), ms)


def tail_error(q: PatternQuery, B: ModuliSet, level: int, window: Window = DEFAULT_WINDOW) -> float:
    """Upper bound on the chance that a modulus beyond level K touches q.

    Each omitted modulus b forbids |F_b| residues, so it hits some queried
    position with probability at most |F_b| * span / b.
    """
    ms = B.prefix(level)
    top = max(ms, default=0)
    weight = sum(len(window.forbidden_for(b)) / b for b in B.explicit if b not in ms)
    if B.tail is not None and window.default:
        fam = family_tail_sum(B.tail, top)
        if math.isinf(fam):
            raise TailNotEnumerable(f"tail {B.tail!r} has a divergent reciprocal sum")
        weight += len(window.default) * fam
    return weight * q.span_length


# --------------------------------------------------------------------------
# empirical frequencies along the integer orbit


def _block_ranges(N: int, block: int) -> list[tuple[int, int]]:
    return [(m0, min(m0 + block, N + 1)) for m0 in range(1, N + 1, block)]


def _orbit_setup(q_lo: int, q_hi: int, B: ModuliSet, N: int, window: Window):
    vmax = max(abs(1 + q_lo), abs(N + q_hi), 1)
    return sieve_plan(B, vmax, window), _zero_killed_by_tail(B, window)


def _run_blocks(fn, ranges, workers: int):
    if workers <= 1:
        return [fn(r) for r in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, ranges))


def birkhoff_count(q: PatternQuery, B: ModuliSet, N: int, window: Window = DEFAULT_WINDOW, *,
                   workers: int = 1, block: int = SIEVE_BLOCK) -> int:
    """#{1 <= m <= N : the orbit patch at m matches q}."""
    if N < 1:
        raise ValueError("N must be >= 1")
    q_lo, q_hi = q.span
    plan, kill = _orbit_setup(q_lo, q_hi, B, N, window)

    def count(rng):
        m0, m1 = rng
        bits = sieve_block(m0 + q_lo, m1 + q_hi, plan, kill)
        width = m1 - m0
        match = np.ones(width, dtype=bool)
        for n, bit in q.items:
            off = n - q_lo
            match &= bits[off : off + width] == bit
        return int(np.count_nonzero(match))

    return sum(_run_blocks(count, _block_ranges(N, block), workers))


def empirical_frequency(q: PatternQuery, B: ModuliSet, N: int, window: Window = DEFAULT_WINDOW, *,
                        workers: int = 1, block: int = SIEVE_BLOCK) -> float:
    return birkhoff_count(q, B, N, window, workers=workers, block=block) / N


def word_counts(length: int, B: ModuliSet, N: int, window: Window = DEFAULT_WINDOW, *,
                workers: int = 1, block: int = SIEVE_BLOCK) -> dict[str, int]:
    """Orbit counts of every 0/1 word on positions 0..length-1, m in [1, N]."""
    plan, kill = _orbit_setup(0, length - 1, B, N, window)

    def count(rng):
        m0, m1 = rng
        bits = sieve_block(m0, m1 + length - 1, plan, kill).astype(np.int64)
        width = m1 - m0
        code = np.zeros(width, dtype=np.int64)
        for i in range(length):
            code = (code << 1) | bits[i : i + width]
        return np.bincount(code, minlength=1 << length)

    total = sum(_run_blocks(count, _block_ranges(N, block), workers))
    return {format(c, f"0{length}b"): int(total[c]) for c in range(1 << length)}


# --------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityReport:
    exact: Fraction
    tail_error: float
    empirical: float | None
    empirical_count: int | None
    N: int | None
    level: int
    moduli: tuple[int, ...]

    def to_dict(self) -> dict:
        from .scheme import rational_to_json

        return {
            "exact": rational_to_json(self.exact),
            "exact_float": float(self.exact),
            "tail_error": self.tail_error,
            "empirical": self.empirical,
            "empirical_count": self.empirical_count,
            "N": self.N,
            "level": self.level,
            "moduli": list(self.moduli),
        }


def density(B: ModuliSet, window: Window = DEFAULT_WINDOW, level: int | None = None, N: int | None = None,
            *, workers: int = 1) -> DensityReport:
    """Truncated exact density of the B-free set, its tail bound and a Birkhoff estimate."""
    ms = resolve_moduli(B, level)
    q = PatternQuery(((0, 1),))
    if is_pairwise_coprime(ms):
        exact = Fraction(1)
        for b in ms:
            exact *= 1 - Fraction(len(window.forbidden_for(b)), b)
    else:
        exact = pattern_frequency_exact(q, ms, window, method="enumerate").exact
    err = tail_error(q, B, len(ms), window)
    count = emp = None
    if N:
        count = birkhoff_count(q, B, N, window, workers=workers)
        emp = count / N
    return DensityReport(exact, err, emp, count, N, len(ms), ms)
