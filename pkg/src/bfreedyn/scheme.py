"""Moduli, windows and truncated points of the profinite internal group.

The internal group is the closure of the diagonally embedded integers in
the product of the cyclic groups Z/bZ.  Everything here works at a finite
truncation level K, i.e. on the first K moduli, where that closure is the
finite cyclic group Z/lcm(B_K).
"""
from __future__ import annotations

import functools
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateModulus,
    IncompatibleResidues,
    InvalidWindow,
    LcmOverflow,
    LevelMismatch,
    ModulusTooSmall,
    UnknownTail,
)

TAIL_FAMILIES = ("prime-squares", "primes")

# Largest Z/lcm enumerated explicitly before giving up.
ENUMERATION_BOUND = 10**7
_CHUNK = 1 << 20


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def family_upto(tail: str | None, bound: int) -> tuple[int, ...]:
    """Members of a named infinite family that are <= bound."""
    if tail is None or bound < 2:
        return ()
    if tail == "prime-squares":
        return tuple(int(p) * int(p) for p in primes_upto(math.isqrt(bound)))
    if tail == "primes":
        return tuple(int(p) for p in primes_upto(bound))
    raise UnknownTail(f"unknown tail family {tail!r}; expected one of {TAIL_FAMILIES}")


def family_tail_sum(tail: str | None, above: int) -> float:
    """Upper bound on the sum of 1/b over family members b > above."""
    if tail is None:
        return 0.0
    if tail == "prime-squares":
        p = math.isqrt(max(above, 0))
        if p < 2:
            return 0.25 + 1 / 9 + 1 / 6
        # primes > p are odd: sum over odd n >= n0 of 1/n^2 <= 1/n0^2 + 1/(2 n0)
        n0 = p + 1 if p % 2 == 0 else p + 2
        return 1.0 / n0**2 + 1.0 / (2 * n0)
    if tail == "primes":
        return math.inf
    raise UnknownTail(f"unknown tail family {tail!r}")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _divides_family_member(b: int, tail: str) -> bool:
    ps = _prime_factors(b)
    if len(ps) != 1:
        return False
    p = ps[0]
    if tail == "primes":
        return b == p
    return b in (p, p * p)


def _has_family_divisor(b: int, tail: str) -> bool:
    if tail == "primes":
        return True
    return any(b % (p * p) == 0 for p in _prime_factors(b))


@dataclass(frozen=True)
class ModuliSet:
    """Explicit moduli plus an optional infinite tail family."""

    explicit: tuple[int, ...]
    tail: str | None = None
    pairwise_coprime: bool = field(init=False)
    primitive: bool = field(init=False)

    def __post_init__(self):
        ex = self.explicit
        coprime = all(math.gcd(a, b) == 1 for a, b in itertools.combinations(ex, 2))
        primitive = not any(b % a == 0 for a, b in itertools.combinations(ex, 2))
        if self.tail is not None:
            fam = self.tail
            # every b >= 2 shares a prime with some p or p^2
            coprime = coprime and not ex
            for b in ex:
                member = b in family_upto(fam, b)
                if member:
                    continue
                if _divides_family_member(b, fam) or _has_family_divisor(b, fam):
                    primitive = False
        object.__setattr__(self, "pairwise_coprime", coprime)
        object.__setattr__(self, "primitive", primitive)

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    def upto(self, bound: int) -> tuple[int, ...]:
        """All moduli (explicit and tail) that are <= bound."""
        members = {b for b in self.explicit if b <= bound}
        members.update(family_upto(self.tail, bound))
        return tuple(sorted(members))

    def prefix(self, level: int) -> tuple[int, ...]:
        """The first `level` moduli of the merged ascending sequence."""
        if level < 0:
            raise LevelMismatch(f"level must be >= 0, got {level}")
        if self.tail is None:
            if level > len(self.explicit):
                raise LevelMismatch(
                    f"level {level} exceeds the {len(self.explicit)} available moduli"
                )
            return self.explicit[:level]
        bound = max(self.explicit, default=4) * 2
        while True:
            seq = self.upto(bound)
            # all members <= bound are known, so a prefix inside it is final
            if len(seq) >= level:
                return seq[:level]
            bound *= 4

    def default_level(self) -> int:
        return len(self.explicit) if self.tail is None else max(len(self.explicit), 25)

    def to_dict(self) -> dict:
        return {"moduli": list(self.explicit), "tail": self.tail}


def validate_moduli(raw: Iterable[int], tail_generator: str | None = None) -> ModuliSet:
    values = [int(b) for b in raw]
    if not values and tail_generator is None:
        raise ModulusTooSmall("need at least one modulus or a tail family")
    if tail_generator is not None and tail_generator not in TAIL_FAMILIES:
        raise UnknownTail(f"unknown tail family {tail_generator!r}")
    small = [b for b in values if b < 2]
    if small:
        raise ModulusTooSmall(f"moduli must be >= 2, got {small}")
    if len(set(values)) != len(values):
        dup = sorted({b for b in values if values.count(b) > 1})
        raise DuplicateModulus(f"duplicate moduli {dup}")
    return ModuliSet(tuple(sorted(values)), tail_generator)


def resolve_moduli(moduli: ModuliSet | Sequence[int], level: int | None = None) -> tuple[int, ...]:
    """Turn a ModuliSet plus level, or a plain sequence, into B_K."""
    if isinstance(moduli, ModuliSet):
        return moduli.prefix(moduli.default_level() if level is None else level)
    out = tuple(int(b) for b in moduli)
    if level is not None:
        if level > len(out):
            raise LevelMismatch(f"level {level} exceeds {len(out)} moduli")
        out = out[:level]
    return out


def lcm_of(moduli: Iterable[int]) -> int:
    return math.lcm(*moduli) if moduli else 1


def is_pairwise_coprime(moduli: Sequence[int]) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(moduli, 2))


# --------------------------------------------------------------------------
# windows


@functools.lru_cache(maxsize=4096)
def _allowed_mask(b: int, forbidden: frozenset) -> np.ndarray:
    mask = np.ones(b, dtype=bool)
    mask[list(forbidden)] = False
    mask.setflags(write=False)
    return mask


@dataclass(frozen=True)
class Window:
    """Per-modulus forbidden residue sets; unlisted moduli use `default`.

    `scope`, when set, lists the moduli this window was declared for;
    points carrying other moduli are rejected with LevelMismatch.
    """

    forbidden: tuple[tuple[int, frozenset], ...] = ()
    default: frozenset = frozenset({0})
    scope: tuple[int, ...] | None = None

    @classmethod
    def make(
        cls,
        forbidden: Mapping[int, Iterable[int]] | None = None,
        default: Iterable[int] = (0,),
        scope: Sequence[int] | None = None,
    ) -> "Window":
        default = frozenset(int(f) for f in default)
        if not default <= {0}:
            raise InvalidWindow("default forbidden set must be {0} or empty")
        items = []
        for b, fs in sorted((forbidden or {}).items()):
            b = int(b)
            fs = frozenset(int(f) for f in fs)
            if b < 2:
                raise InvalidWindow(f"modulus {b} < 2 in window")
            bad = [f for f in fs if not 0 <= f < b]
            if bad:
                raise InvalidWindow(f"residues {sorted(bad)} out of range for modulus {b}")
            if len(fs) >= b:
                raise InvalidWindow(f"forbidden set for {b} is all of Z/{b}Z")
            items.append((b, fs))
        return cls(tuple(items), default, None if scope is None else tuple(scope))

    @classmethod
    def empty(cls) -> "Window":
        """The window forbidding nothing."""
        return cls(default=frozenset())

    def forbidden_for(self, b: int) -> frozenset:
        for m, fs in self.forbidden:
            if m == b:
                return fs
        return self.default

    def allowed_mask(self, b: int) -> np.ndarray:
        return _allowed_mask(b, self.forbidden_for(b))

    def check_level(self, moduli: Sequence[int]) -> None:
        if self.scope is None:
            return
        extra = [b for b in moduli if b not in self.scope]
        if extra:
            raise LevelMismatch(f"moduli {extra} are outside the window's scope {list(self.scope)}")

    def to_dict(self) -> dict:
        return {str(b): sorted(fs) for b, fs in self.forbidden}


DEFAULT_WINDOW = Window()


# --------------------------------------------------------------------------
# truncated internal points


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    """Solve x = r_i mod m_i for arbitrary (not necessarily coprime) moduli.

    Returns (x, lcm) with 0 <= x < lcm.
    """
    x, m = 0, 1
    for r, b in zip(residues, moduli):
        g = math.gcd(m, b)
        if (r - x) % g:
            raise IncompatibleResidues(f"residue {r} mod {b} contradicts {x} mod {m}")
        step = m // g
        # x + m*t = r (mod b)  ->  t = (r-x)/g * inv(m/g) mod b/g
        t = ((r - x) // g) * pow(step, -1, b // g) % (b // g) if b // g > 1 else 0
        x += m * t
        m = m * b // g
        x %= m
    return x, m


@dataclass(frozen=True)
class TruncatedInternalPoint:
    moduli: tuple[int, ...]
    residues: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) != len(self.residues):
            raise LevelMismatch("moduli and residues differ in length")
        for b, r in zip(self.moduli, self.residues):
            if not 0 <= r < b:
                raise IncompatibleResidues(f"residue {r} not in [0, {b})")
        for (b1, r1), (b2, r2) in itertools.combinations(zip(self.moduli, self.residues), 2):
            g = math.gcd(b1, b2)
            if (r1 - r2) % g:
                raise IncompatibleResidues(
                    f"r_{b1}={r1} and r_{b2}={r2} disagree modulo {g}"
                )

    @property
    def level(self) -> int:
        return len(self.moduli)

    def residue(self, b: int) -> int:
        return self.residues[self.moduli.index(b)]

    def translate(self, g: int) -> "TruncatedInternalPoint":
        """h + Delta(g)."""
        return TruncatedInternalPoint(
            self.moduli, tuple((r + g) % b for b, r in zip(self.moduli, self.residues))
        )

    def extend(self, b: int, r: int) -> "TruncatedInternalPoint":
        """Append one modulus with residue r."""
        pairs = sorted(zip(self.moduli + (b,), self.residues + (r % b,)))
        return TruncatedInternalPoint(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def restrict(self, moduli: Sequence[int]) -> "TruncatedInternalPoint":
        return TruncatedInternalPoint(tuple(moduli), tuple(self.residue(b) for b in moduli))

    def to_integer(self) -> int:
        """The unique n in [0, lcm) with Delta(n) equal to this point."""
        return crt(self.residues, self.moduli)[0]

    def to_dict(self) -> dict:
        return {str(b): r for b, r in zip(self.moduli, self.residues)}


def delta_embed(n: int, moduli: ModuliSet | Sequence[int], level: int | None = None) -> TruncatedInternalPoint:
    ms = resolve_moduli(moduli, level)
    return TruncatedInternalPoint(ms, tuple(n % b for b in ms))


def haar_sample(moduli: ModuliSet | Sequence[int], seed: int, level: int | None = None) -> TruncatedInternalPoint:
    """Exact Haar sample of the truncated closure of Delta(Z)."""
    ms = resolve_moduli(moduli, level)
    n = random.Random(seed).randrange(lcm_of(ms))
    return delta_embed(n, ms)


def window_contains(h: TruncatedInternalPoint, window: Window = DEFAULT_WINDOW) -> bool:
    window.check_level(h.moduli)
    return all(r not in window.forbidden_for(b) for b, r in zip(h.moduli, h.residues))


# --------------------------------------------------------------------------
# Haar measure of cylinder sets


@dataclass(frozen=True)
class CylinderConstraint:
    """Allowed residue set S_b for each modulus b."""

    moduli: tuple[int, ...]
    allowed: tuple[frozenset, ...]

    @classmethod
    def make(cls, allowed: Mapping[int, Iterable[int]]) -> "CylinderConstraint":
        ms = tuple(sorted(int(b) for b in allowed))
        return cls(ms, tuple(frozenset(int(r) % b for r in allowed[b]) for b in ms))

    @property
    def is_empty(self) -> bool:
        return any(not s for s in self.allowed)


def count_residue_hits(moduli: Sequence[int], masks: Sequence[np.ndarray], offsets: Sequence[int] = None,
                       bound: int = ENUMERATION_BOUND) -> tuple[int, int]:
    """Count n in [0, lcm) with masks[i][(n + offsets[i]) % moduli[i]] true for all i."""
    L = lcm_of(moduli)
    if L > bound:
        raise LcmOverflow(f"lcm {L} exceeds enumeration bound {bound}")
    offsets = offsets or [0] * len(moduli)
    total = 0
    for lo in range(0, L, _CHUNK):
        n = np.arange(lo, min(lo + _CHUNK, L), dtype=np.int64)
        ok = np.ones(n.size, dtype=bool)
        for b, mask, off in zip(moduli, masks, offsets):
            ok &= mask[(n + off) % b]
        total += int(np.count_nonzero(ok))
    return total, L


def cylinder_measure(constraint: CylinderConstraint, method: str = "auto",
                     bound: int = ENUMERATION_BOUND) -> Fraction:
    """Exact Haar measure of {h : r_b in S_b for all b}.

    method: "product" (coprime moduli only), "enumerate", or "auto".
    """
    ms = constraint.moduli
    if constraint.is_empty:
        return Fraction(0)
    coprime = is_pairwise_coprime(ms)
    if method == "auto":
        method = "product" if coprime else "enumerate"
    if method == "product":
        if not coprime:
            raise ValueError("product path needs pairwise coprime moduli")
        out = Fraction(1)
        for b, s in zip(ms, constraint.allowed):
            out *= Fraction(len(s), b)
        return out
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    masks = [_allowed_mask(b, frozenset(range(b)) - s) for b, s in zip(ms, constraint.allowed)]
    hits, L = count_residue_hits(ms, masks, bound=bound)
    return Fraction(hits, L)


# --------------------------------------------------------------------------
# window periods


def _cyclic_period(mask: np.ndarray) -> int:
    """Smallest d | len(mask) such that mask is invariant under rotation by d."""
    L = mask.size
    for d in range(1, L + 1):
        if L % d == 0 and np.array_equal(np.roll(mask, -d), mask):
            return d
    return L


def window_period_group(window: Window, moduli: ModuliSet | Sequence[int], level: int | None = None,
                        bound: int = ENUMERATION_BOUND) -> list[TruncatedInternalPoint]:
    """All h at level K with (h + W_K) == W_K, sorted by integer representative.

    Coprime moduli are handled per modulus (a product window is invariant
    exactly when every factor is).  Otherwise the window is laid out on
    Z/lcm and its rotation period is found directly.
    """
    ms = resolve_moduli(moduli, level)
    window.check_level(ms)
    if is_pairwise_coprime(ms):
        per_mod = []
        for b in ms:
            d = _cyclic_period(window.allowed_mask(b))
            per_mod.append(range(0, b, d))
        pts = [TruncatedInternalPoint(ms, tuple(rs)) for rs in itertools.product(*per_mod)]
        return sorted(pts, key=lambda h: h.to_integer())
    L = lcm_of(ms)
    if L > bound:
        raise LcmOverflow(f"lcm {L} exceeds enumeration bound {bound}")
    n = np.arange(L, dtype=np.int64)
    inside = np.ones(L, dtype=bool)
    for b in ms:
        inside &= window.allowed_mask(b)[n % b]
    d = _cyclic_period(inside)
    return [delta_embed(t, ms) for t in range(0, L, d)]


def is_haar_aperiodic(window: Window, moduli: ModuliSet | Sequence[int], level: int | None = None) -> bool:
    return len(window_period_group(window, moduli, level)) == 1


# --------------------------------------------------------------------------
# scheme files


@dataclass(frozen=True)
class Scheme:
    moduli: ModuliSet
    window: Window = DEFAULT_WINDOW

    def to_dict(self) -> dict:
        d = self.moduli.to_dict()
        if self.window.forbidden:
            d["window"] = self.window.to_dict()
        return d


def scheme_from_dict(data: Mapping) -> Scheme:
    moduli = validate_moduli(data.get("moduli", []), data.get("tail"))
    window = Window.make({int(b): fs for b, fs in (data.get("window") or {}).items()})
    return Scheme(moduli, window)


def load_scheme(path: str | Path) -> Scheme:
    with open(path) as fh:
        return scheme_from_dict(json.load(fh))


def rational_to_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rational_from_json(d: Mapping) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))
