"""Finite patches of configurations: exact integer orbits and generic points."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import CenterOutOfRange, TailNotEnumerable
from .scheme import (
    DEFAULT_WINDOW,
    ModuliSet,
    TruncatedInternalPoint,
    Window,
    family_upto,
)

SIEVE_BLOCK = 1 << 16
# primes needed by a tail family are sieved up to this bound at most
TAIL_SIEVE_LIMIT = 10**8


@dataclass(frozen=True, eq=False)
class Patch:
    """A 0/1 word on the integer interval [start, start + len - 1]."""

    start: int
    bits: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("a patch needs a nonempty 1-d bit array")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def stop(self) -> int:
        """Inclusive right end."""
        return self.start + self.bits.size - 1

    @property
    def interval(self) -> tuple[int, int]:
        return (self.start, self.stop)

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, Patch):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.start, self.bits.tobytes()))

    def __contains__(self, n: int) -> bool:
        return self.start <= n <= self.stop

    def bit(self, n: int) -> int:
        if n not in self:
            raise IndexError(f"position {n} outside {self.interval}")
        return int(self.bits[n - self.start])

    def restrict(self, a: int, b: int) -> "Patch":
        if a < self.start or b > self.stop or a > b:
            raise IndexError(f"[{a}, {b}] not inside {self.interval}")
        return Patch(a, self.bits[a - self.start : b - self.start + 1], self.provenance)

    def positions(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1, dtype=np.int64)

    def ones(self) -> np.ndarray:
        return self.start + np.flatnonzero(self.bits).astype(np.int64)

    def to_text(self) -> str:
        return "".join("1" if x else "0" for x in self.bits)

    def to_dict(self) -> dict:
        return {"interval": [self.start, self.stop], "bits": self.to_text(), "provenance": self.provenance}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def patch_from_text(text: str, start: int = 0, provenance: Mapping | None = None) -> Patch:
    word = "".join(ch for ch in text if ch in "01")
    return Patch(start, np.frombuffer(word.encode(), dtype=np.uint8) - ord("0"), dict(provenance or {}))


def patch_from_dict(data: Mapping) -> Patch:
    a, b = data["interval"]
    p = patch_from_text(data["bits"], a, data.get("provenance"))
    if p.stop != b:
        raise ValueError(f"interval {[a, b]} does not match {len(p)} bits")
    return p


# --------------------------------------------------------------------------
# exact orbit of the integer point


def _tail_moduli(B: ModuliSet, vmax: int) -> tuple[int, ...]:
    if B.tail is None:
        return ()
    need = math.isqrt(vmax) if B.tail == "prime-squares" else vmax
    if need > TAIL_SIEVE_LIMIT:
        raise TailNotEnumerable(
            f"tail {B.tail!r} up to {vmax} needs primes beyond {TAIL_SIEVE_LIMIT}"
        )
    return family_upto(B.tail, vmax)


def sieve_plan(B: ModuliSet, vmax: int, window: Window = DEFAULT_WINDOW) -> list[tuple[int, tuple[int, ...]]]:
    """(modulus, forbidden residues) pairs that can act on values |v| <= vmax."""
    moduli = set(B.explicit) | set(_tail_moduli(B, vmax))
    return [(b, tuple(sorted(window.forbidden_for(b)))) for b in sorted(moduli)]


def _zero_killed_by_tail(B: ModuliSet, window: Window) -> bool:
    # tail members beyond the sieved range still divide 0
    return B.tail is not None and 0 in window.default


def sieve_block(lo: int, hi: int, plan, kill_zero: bool) -> np.ndarray:
    """Bits for values v in [lo, hi): 1 iff v mod b avoids F_b for every planned b."""
    bits = np.ones(hi - lo, dtype=np.uint8)
    for b, forb in plan:
        for f in forb:
            i0 = (f - lo) % b
            if i0 < bits.size:
                bits[i0::b] = 0
    if kill_zero and lo <= 0 < hi:
        bits[-lo] = 0
    return bits


def sieve_values(lo: int, hi: int, B: ModuliSet, window: Window = DEFAULT_WINDOW,
                 block: int = SIEVE_BLOCK) -> Iterator[tuple[int, np.ndarray]]:
    """Stream (block_start, bits) over the value range [lo, hi)."""
    vmax = max(abs(lo), abs(hi - 1), 1)
    plan = sieve_plan(B, vmax, window)
    kill = _zero_killed_by_tail(B, window)
    for a in range(lo, hi, block):
        yield a, sieve_block(a, min(a + block, hi), plan, kill)


def exact_patch(m: int, interval: Sequence[int], B: ModuliSet, window: Window = DEFAULT_WINDOW,
                block: int | None = None) -> Patch:
    """Restriction of the orbit point eta shifted by m: bit n is 1 iff m+n is B-free."""
    a, b = int(interval[0]), int(interval[1])
    if b < a:
        raise ValueError(f"empty interval [{a}, {b}]")
    lo, hi = m + a, m + b + 1
    size = hi - lo
    parts = [bits for _, bits in sieve_values(lo, hi, B, window, block or size)]
    prov = {"kind": "exact", "m": m, "scheme": B.to_dict()}
    if window.forbidden or window.default != DEFAULT_WINDOW.default:
        prov["window"] = window.to_dict()
    return Patch(a, np.concatenate(parts), prov)


# --------------------------------------------------------------------------
# generic points


def generic_bits(h: TruncatedInternalPoint, window: Window, positions: np.ndarray) -> np.ndarray:
    bits = np.ones(positions.size, dtype=bool)
    for b, r in zip(h.moduli, h.residues):
        bits &= window.allowed_mask(b)[(positions + r) % b]
    return bits.astype(np.uint8)


def generic_patch(h: TruncatedInternalPoint, window: Window, interval: Sequence[int]) -> Patch:
    """Bit n is 1 iff h + Delta(n) lies in the window."""
    window.check_level(h.moduli)
    a, b = int(interval[0]), int(interval[1])
    if b < a:
        raise ValueError(f"empty interval [{a}, {b}]")
    pos = np.arange(a, b + 1, dtype=np.int64)
    prov = {"kind": "generic", "level": h.level, "moduli": list(h.moduli), "residues": list(h.residues)}
    return Patch(a, generic_bits(h, window, pos), prov)


def point_from_provenance(p: Patch) -> TruncatedInternalPoint | None:
    prov = p.provenance
    if prov.get("kind") != "generic":
        return None
    return TruncatedInternalPoint(tuple(prov["moduli"]), tuple(prov["residues"]))


def shift(p: Patch, g: int) -> Patch:
    """Translate the configuration by g: bit n of p becomes bit n+g.

    For a generic patch of h this is the patch of h - Delta(g); for the
    orbit patch at m it is the orbit patch at m - g.
    """
    prov = dict(p.provenance)
    kind = prov.get("kind")
    if kind == "exact":
        prov["m"] = prov["m"] - g
    elif kind == "generic":
        prov["residues"] = [(r - g) % b for b, r in zip(prov["moduli"], prov["residues"])]
    elif kind:
        prov["offset"] = prov.get("offset", 0) + g
    return Patch(p.start + g, p.bits, prov)


def agreement_length(p1: Patch, p2: Patch, center: int) -> int:
    """Largest L with p1 == p2 on [center-L, center+L]; -1 if they differ at center."""
    if center not in p1 or center not in p2:
        raise CenterOutOfRange(f"center {center} not in {p1.interval} and {p2.interval}")
    lo = max(p1.start, p2.start)
    hi = min(p1.stop, p2.stop)
    a = p1.bits[lo - p1.start : hi - p1.start + 1]
    b = p2.bits[lo - p2.start : hi - p2.start + 1]
    diff = np.flatnonzero(a != b) + lo
    if diff.size and np.any(diff == center):
        return -1
    reach = min(center - lo, hi - center)
    if diff.size:
        reach = min(reach, int(np.min(np.abs(diff - center))) - 1)
    return reach

