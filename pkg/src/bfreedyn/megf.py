"""Recovering the internal point from a configuration patch.

On generic configurations the factor map onto the internal group is
injective, so a long enough patch pins down every residue.  Only 1-bits
give per-modulus information: a 1 at position n says h + n avoids F_b for
every b at once, whereas a 0 only says that *some* modulus forbids it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import Patch, generic_patch, shift
from .errors import IncompatibleResidues, LevelMismatch
from .scheme import DEFAULT_WINDOW, ModuliSet, TruncatedInternalPoint, Window, lcm_of, resolve_moduli

DETERMINED = "determined"
AMBIGUOUS = "ambiguous"
INCONSISTENT = "inconsistent"

UNBOUNDED = math.inf
RADIUS_CAP = 10**6

_NEVER = np.iinfo(np.int64).max


@dataclass(frozen=True)
class ModulusOutcome:
    modulus: int
    status: str
    candidates: tuple[int, ...]
    # smallest R such that [center-R, center+R] already determines the residue
    radius: int | None = None

    @property
    def residue(self) -> int | None:
        return self.candidates[0] if self.status == DETERMINED else None

    def to_dict(self) -> dict:
        if self.status == DETERMINED:
            return {"status": DETERMINED, "residue": self.residue, "radius": self.radius}
        return {"status": self.status, "candidates": list(self.candidates)}


@dataclass(frozen=True)
class ReconstructionResult:
    outcomes: tuple[ModulusOutcome, ...]
    status: str
    point: TruncatedInternalPoint | None = None
    reason: str | None = None

    def outcome(self, b: int) -> ModulusOutcome:
        for o in self.outcomes:
            if o.modulus == b:
                return o
        raise KeyError(b)

    def to_dict(self) -> dict:
        out = {str(o.modulus): o.to_dict() for o in self.outcomes}
        out["status"] = self.status
        if self.reason:
            out["reason"] = self.reason
        return out


def _exclusion_times(b: int, forbidden: Iterable[int], ones: np.ndarray, center: int) -> np.ndarray:
    """For each residue r, the distance from center of the nearest 1-bit ruling r out."""
    times = np.full(b, _NEVER, dtype=np.int64)
    dist = np.abs(ones - center)
    for f in forbidden:
        np.minimum.at(times, (f - ones) % b, dist)
    return times


def _outcome(b: int, times: np.ndarray) -> ModulusOutcome:
    cand = np.flatnonzero(times == _NEVER)
    if cand.size == 0:
        return ModulusOutcome(b, INCONSISTENT, ())
    if cand.size > 1:
        return ModulusOutcome(b, AMBIGUOUS, tuple(int(r) for r in cand))
    others = times[times != _NEVER]
    return ModulusOutcome(b, DETERMINED, (int(cand[0]),), int(others.max()) if others.size else 0)


def reconstruct(p: Patch, moduli: ModuliSet | Sequence[int], window: Window = DEFAULT_WINDOW,
                level: int | None = None) -> ReconstructionResult:
    ms = resolve_moduli(moduli, level)
    window.check_level(ms)
    ones = p.ones()
    center = (p.start + p.stop) // 2
    outcomes = tuple(_outcome(b, _exclusion_times(b, window.forbidden_for(b), ones, center)) for b in ms)
    if any(o.status == INCONSISTENT for o in outcomes):
        return ReconstructionResult(outcomes, INCONSISTENT, reason="empty candidate set")
    if any(o.status == AMBIGUOUS for o in outcomes):
        return ReconstructionResult(outcomes, AMBIGUOUS)
    try:
        h = TruncatedInternalPoint(ms, tuple(o.residue for o in outcomes))
    except IncompatibleResidues as exc:
        return ReconstructionResult(outcomes, INCONSISTENT, reason=f"residues not compatible: {exc}")
    if generic_patch(h, window, p.interval) != p:
        return ReconstructionResult(outcomes, INCONSISTENT, h, reason="zero bits not reproduced")
    return ReconstructionResult(outcomes, DETERMINED, h)


def default_radius_cap(moduli: Sequence[int]) -> int:
    return min(16 * lcm_of(moduli), RADIUS_CAP)


def determining_radius(h: TruncatedInternalPoint, window: Window, b: int, cap: int | None = None) -> int | float:
    """Smallest R with reconstruct(generic_patch(h, W, [-R, R])) determined at b.

    Returns UNBOUNDED (math.inf) if no R <= cap works.
    """
    if b not in h.moduli:
        raise LevelMismatch(f"modulus {b} not among {list(h.moduli)}")
    cap = default_radius_cap(h.moduli) if cap is None else cap
    forb = window.forbidden_for(b)
    if not forb:
        return UNBOUNDED
    R = min(64, cap)
    while True:
        ones = generic_patch(h, window, (-R, R)).ones()
        times = _exclusion_times(b, forb, ones, 0)
        times[h.residue(b)] = 0
        if np.all(times != _NEVER):
            return int(times.max())
        if R >= cap:
            return UNBOUNDED
        R = min(4 * R, cap)


def joint_determining_radius(h: TruncatedInternalPoint, window: Window = DEFAULT_WINDOW,
                             cap: int | None = None) -> int | float:
    return max((determining_radius(h, window, b, cap) for b in h.moduli), default=0)


@dataclass(frozen=True)
class EquivarianceReport:
    passed: bool
    checked: int
    failures: tuple[int, ...]
    radius: int | float

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "failures": list(self.failures),
                "radius": self.radius}


def equivariance_check(h: TruncatedInternalPoint, window: Window, g_range: Iterable[int],
                       interval: Sequence[int] | None = None) -> EquivarianceReport:
    """Check reconstruct(shift(patch, g)) == h - Delta(g) for every g.

    Translating a configuration by g moves its internal point by -Delta(g).
    """
    if interval is None:
        R = joint_determining_radius(h, window)
        if math.isinf(R):
            return EquivarianceReport(False, 0, (), R)
        interval = (-R, R)
    else:
        R = (interval[1] - interval[0]) // 2
    base = generic_patch(h, window, interval)
    if reconstruct(base, h.moduli, window).point != h:
        return EquivarianceReport(False, 0, (), R)
    failures, checked = [], 0
    for g in g_range:
        checked += 1
        if reconstruct(shift(base, g), h.moduli, window).point != h.translate(-g):
            failures.append(g)
    return EquivarianceReport(not failures, checked, tuple(failures), R)
