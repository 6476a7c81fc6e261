"""Finite-scale probe of regional proximality between two generic points.

Base points are not perturbed: we look directly for a translate on which
the two configurations agree over a long window, and measure how often
they disagree at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import generic_bits
from .errors import LcmOverflow
from .scheme import DEFAULT_WINDOW, ENUMERATION_BOUND, TruncatedInternalPoint, Window, lcm_of, rational_to_json


def _diff(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint, window: Window, pos: np.ndarray) -> np.ndarray:
    return generic_bits(h1, window, pos) != generic_bits(h2, window, pos)


def _search_order(centers: np.ndarray) -> np.ndarray:
    # increasing |c|, ties toward positive
    return np.lexsort((centers < 0, np.abs(centers)))


def find_agreement_window(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint, window: Window,
                          L: int, R: int) -> int | None:
    """First center c in [-R, R] with both patches equal on [c-L, c+L], or None."""
    if L < 0 or R < L:
        raise ValueError(f"need 0 <= L <= R, got L={L}, R={R}")
    window.check_level(h1.moduli)
    window.check_level(h2.moduli)
    pos = np.arange(-R - L, R + L + 1, dtype=np.int64)
    cs = np.concatenate(([0], np.cumsum(_diff(h1, h2, window, pos))))
    centers = np.arange(-R, R + 1, dtype=np.int64)
    i = centers + R  # index of c - L in pos
    clean = cs[i + 2 * L + 1] - cs[i] == 0
    hits = centers[clean]
    if hits.size == 0:
        return None
    return int(hits[_search_order(hits)[0]])


def best_agreement(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint, window: Window,
                   R: int) -> tuple[int, int | None]:
    """Longest agreement half-length (capped at R) centred in [-R, R], and its center."""
    pos = np.arange(-2 * R, 2 * R + 1, dtype=np.int64)
    d = pos[_diff(h1, h2, window, pos)]
    centers = np.arange(-R, R + 1, dtype=np.int64)
    if d.size == 0:
        return R, 0
    k = np.searchsorted(d, centers)
    left = np.where(k > 0, centers - d[np.maximum(k - 1, 0)], 2 * R + 1)
    right = np.where(k < d.size, d[np.minimum(k, d.size - 1)] - centers, 2 * R + 1)
    length = np.minimum(np.minimum(left, right) - 1, R)
    best = int(length.max())
    if best < 0:
        return -1, None
    winners = centers[length == best]
    return best, int(winners[_search_order(winners)[0]])


def exact_disagreement_density(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint,
                               window: Window = DEFAULT_WINDOW, bound: int = ENUMERATION_BOUND) -> Fraction:
    """Density of {n : bits differ}; the pair is jointly periodic mod lcm."""
    L = lcm_of(sorted(set(h1.moduli) | set(h2.moduli)))
    if L > bound:
        raise LcmOverflow(f"joint period {L} exceeds enumeration bound {bound}")
    return Fraction(int(np.count_nonzero(_diff(h1, h2, window, np.arange(L, dtype=np.int64)))), L)


def disagreement_count(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint, window: Window,
                       lo: int, hi: int) -> int:
    """Number of positions in [lo, hi) where the bits differ."""
    return int(np.count_nonzero(_diff(h1, h2, window, np.arange(lo, hi, dtype=np.int64))))


def empirical_disagreement_density(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint,
                                   window: Window, N: int) -> float:
    """Fraction of positions in [-N, N) where the bits differ."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return disagreement_count(h1, h2, window, -N, N) / (2 * N)


@dataclass(frozen=True)
class ProximalReport:
    best_agreement: int
    witness: int | None
    search_radius: int
    exact_density: Fraction | None
    empirical_density: float | None
    N: int | None

    def to_dict(self) -> dict:
        return {
            "best_agreement": self.best_agreement,
            "witness": self.witness,
            "search_radius": self.search_radius,
            "exact_density": None if self.exact_density is None else rational_to_json(self.exact_density),
            "empirical_density": self.empirical_density,
            "N": self.N,
        }


def disagreement_density(h1: TruncatedInternalPoint, h2: TruncatedInternalPoint, window: Window = DEFAULT_WINDOW,
                         N: int | None = None, R: int = 0, bound: int = ENUMERATION_BOUND) -> ProximalReport:
    """Exact and empirical disagreement density, plus the best agreement window within radius R."""
    exact = exact_disagreement_density(h1, h2, window, bound)
    emp = empirical_disagreement_density(h1, h2, window, N) if N else None
    best, witness = best_agreement(h1, h2, window, R)
    return ProximalReport(best, witness, R, exact, emp, N)
