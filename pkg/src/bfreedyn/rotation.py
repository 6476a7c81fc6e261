"""Irrational rotation coded by an open dense set E, and its product with a B-free patch.

E is the union of the arcs J_n + k*alpha (0 <= k < n) with |J_n| = 1/(2n 2^n).
A point of J_m codes to a block of m ones starting at position 0, which
gives every block of ones positive probability.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .config import Patch, generic_patch
from .errors import BlockExceedsLevel, RationalRotation
from .scheme import TruncatedInternalPoint, Window

GOLDEN = (math.sqrt(5) - 1) / 2
MC_CHUNK = 1 << 14


def _normalize(arcs: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    pieces = []
    for lo, hi in arcs:
        length = hi - lo
        if length <= 0:
            continue
        if length >= 1:
            return ((0.0, 1.0),)
        lo = lo % 1.0
        if lo >= 1.0:  # (-tiny) % 1.0 rounds up to 1.0
            lo = 0.0
        hi = lo + length
        if hi > 1.0:
            pieces.append((lo, 1.0))
            if hi - 1.0 > 0:
                pieces.append((0.0, hi - 1.0))
        else:
            pieces.append((lo, hi))
    pieces.sort()
    merged: list[list[float]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class CircleIntervalSet:
    """Finite union of half-open arcs [lo, hi) of R/Z in normal form."""

    arcs: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arcs", _normalize(self.arcs))

    @classmethod
    def from_endpoints(cls, arcs: Iterable[tuple[float, float]]) -> "CircleIntervalSet":
        """Arcs given by circle endpoints; lo > hi wraps through 0."""
        out = []
        for lo, hi in arcs:
            lo, hi = lo % 1.0, (hi % 1.0 if hi != 1.0 else 1.0)
            if hi != lo:
                out.append((lo, hi if hi > lo else hi + 1.0))
        return cls(tuple(out))

    @classmethod
    def from_starts(cls, starts: Sequence[float], lengths: Sequence[float]) -> "CircleIntervalSet":
        return cls(tuple((s, s + l) for s, l in zip(starts, lengths)))

    @classmethod
    def full(cls) -> "CircleIntervalSet":
        return cls(((0.0, 1.0),))

    def union(self, other: "CircleIntervalSet") -> "CircleIntervalSet":
        return CircleIntervalSet(self.arcs + other.arcs)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.arcs:
            return np.zeros(x.shape, dtype=bool)
        lo = np.array([a for a, _ in self.arcs])
        hi = np.array([b for _, b in self.arcs])
        i = np.searchsorted(lo, x, side="right") - 1
        return (i >= 0) & (x < hi[np.maximum(i, 0)])

    def to_csv(self) -> str:
        return "lo,hi\n" + "".join(f"{lo!r},{hi!r}\n" for lo, hi in self.arcs)


def union_measure(s: CircleIntervalSet) -> float:
    return math.fsum(hi - lo for lo, hi in s.arcs)


def check_irrational(alpha: float, max_den: int = 10**6) -> None:
    if not 0 < alpha <= 1:
        raise RationalRotation(f"alpha must lie in (0, 1], got {alpha}")
    q = Fraction(alpha).limit_denominator(max_den)
    if float(q) == alpha:
        raise RationalRotation(f"alpha = {q} is rational with denominator <= {max_den}")


def arc_length(n: int) -> float:
    """|J_n| = 1 / (2 n 2^n)."""
    return 1.0 / (2 * n * 2**n)


def placements(n_max: int, placement_seed: int | None = None) -> np.ndarray:
    """Left endpoints of J_1..J_{n_max}: frac(n sqrt 2), or uniform draws when seeded."""
    if placement_seed is None:
        return np.array([(n * math.sqrt(2)) % 1.0 for n in range(1, n_max + 1)])
    return np.random.default_rng(placement_seed).random(n_max)


def build_E(alpha: float, n_max: int, placement_seed: int | None = None) -> CircleIntervalSet:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lefts = placements(n_max, placement_seed)
    starts, lengths = [], []
    for n in range(1, n_max + 1):
        for k in range(n):
            starts.append((lefts[n - 1] + k * alpha) % 1.0)
            lengths.append(arc_length(n))
    return CircleIntervalSet.from_starts(starts, lengths)


@dataclass(frozen=True)
class RotationSystem:
    alpha: float
    E: CircleIntervalSet
    n_max: int
    placement: dict = field(default_factory=dict)

    def __post_init__(self):
        check_irrational(self.alpha)

    @classmethod
    def make(cls, alpha: float = GOLDEN, n_max: int = 20, placement_seed: int | None = None) -> "RotationSystem":
        placement = {"rule": "frac(n*sqrt2)"} if placement_seed is None else {"rule": "uniform", "seed": placement_seed}
        return cls(alpha, build_E(alpha, n_max, placement_seed), n_max, placement)

    def orbit(self, x: float, ks: np.ndarray) -> np.ndarray:
        return (x + ks * self.alpha) % 1.0

    def metadata(self) -> dict:
        return {"alpha": self.alpha, "n_max": self.n_max, "placement": self.placement,
                "arcs": len(self.E.arcs), "measure": union_measure(self.E)}


def code_point(sys: RotationSystem, x: float, interval: Sequence[int]) -> Patch:
    """Bit k is 1 iff x + k*alpha lies in E."""
    a, b = int(interval[0]), int(interval[1])
    ks = np.arange(a, b + 1, dtype=np.int64)
    bits = sys.E.contains(sys.orbit(x, ks)).astype(np.uint8)
    return Patch(a, bits, {"kind": "rotation", "x": x, "alpha": sys.alpha})


def convolve_sample(h: TruncatedInternalPoint, window: Window, sys: RotationSystem, x: float,
                    interval: Sequence[int]) -> Patch:
    """Coordinate-wise product of the B-free patch of h and the coding of x."""
    p = generic_patch(h, window, interval)
    c = code_point(sys, x, interval)
    prov = {"kind": "product", "factors": [p.provenance, c.provenance]}
    return Patch(p.start, p.bits & c.bits, prov)


def _chunks(total: int) -> list[tuple[int, int]]:
    return [(i, min(MC_CHUNK, total - i * MC_CHUNK)) for i in range((total + MC_CHUNK - 1) // MC_CHUNK)]


def _uniforms(seed: int, chunk: int, size: int, dim: int = 1) -> np.ndarray:
    # one independent stream per chunk index, so worker count cannot matter
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    return rng.random((size, dim)) if dim > 1 else rng.random(size)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class BlockStats:
    m: int
    samples: int
    hits: int
    estimate: float
    stderr: float
    lower_bound: float
    seed: int

    def to_dict(self) -> dict:
        return {"block": self.m, "samples": self.samples, "hits": self.hits, "estimate": self.estimate,
                "stderr": self.stderr, "lower_bound": self.lower_bound, "seed": self.seed}


def block_ones_stats(sys: RotationSystem, m: int, samples: int, seed: int, workers: int = 1) -> BlockStats:
    """Monte Carlo estimate of lambda{x : coding of x is 1 on 0..m-1}."""
    if m < 1:
        raise ValueError("block length must be >= 1")
    if m > sys.n_max:
        raise BlockExceedsLevel(f"block {m} exceeds construction level {sys.n_max}")
    ks = np.arange(m, dtype=np.int64)

    def hits(chunk):
        i, size = chunk
        x = _uniforms(seed, i, size)
        inside = sys.E.contains((x[:, None] + ks[None, :] * sys.alpha) % 1.0)
        return int(np.count_nonzero(inside.all(axis=1)))

    h = sum(_map(hits, _chunks(samples), workers))
    p = h / samples
    return BlockStats(m, samples, h, p, math.sqrt(p * (1 - p) / samples), arc_length(m), seed)


def codings_differ(sys: RotationSystem, x: float, y: float, L: int) -> bool:
    ks = np.arange(-L, L + 1, dtype=np.int64)
    return bool(np.any(sys.E.contains(sys.orbit(x, ks)) != sys.E.contains(sys.orbit(y, ks))))


def injectivity_probe(sys: RotationSystem, pair_count: int, L: int, seed: int) -> float:
    """Fraction of random pairs (x, y) whose codings differ somewhere in [-L, L]."""
    if L < 1:
        raise ValueError("L must be >= 1")
    xy = np.random.default_rng(np.random.SeedSequence([seed, 0x1A])).random((pair_count, 2))
    return sum(codings_differ(sys, x, y, L) for x, y in xy) / pair_count
