# Square-free integers as a B-free system.
#
# Run: python3 demos/01_squarefree_statistics.py

import math
from fractions import Fraction

import numpy as np

from bfreedyn import PatternQuery, birkhoff_count, density, exact_patch, pattern_frequency_exact, validate_moduli

# %% The moduli are the prime squares 4, 9, 25, 49, ...
B = validate_moduli([], "prime-squares")
print("first moduli:", B.prefix(8))

# %% A patch of the configuration: bit n is 1 iff n is square-free
p = exact_patch(0, (1, 40), B)
print("1..40     :", p.to_text())
print("positions :", p.positions()[p.bits == 1][:15], "...")

# %% Truncating B gives exact rational densities that decrease toward 6/pi^2
for K in (1, 2, 5, 25, 100):
    rep = density(B, level=K)
    print(f"K={K:4d}  density={float(rep.exact):.6f}  tail<={rep.tail_error:.2e}")
print("6/pi^2 =", 6 / math.pi**2)

# %% The empirical count over [1, 10^6]
N = 10**6
count = birkhoff_count(PatternQuery.make({0: 1}), B, N)
print(f"square-free in [1, {N}]: {count}  ->  {count / N:.6f}")

# %% Frequencies of short words: exact at level 6 against the orbit average
level = 6
rows = []
for w in ("11", "101", "111", "0000"):
    q = PatternQuery.from_word(w)
    f = pattern_frequency_exact(q, B, level=level)
    emp = birkhoff_count(q, B, N) / N
    rows.append((w, float(f.exact), f.tail_error, emp))
for w, ex, err, emp in rows:
    print(f"{w:>5}  exact(K={level})={ex:.5f}  tail<={err:.4f}  empirical={emp:.5f}")

# %% "1111" never occurs: one of any four consecutive integers is divisible by 4
print("1111 exact:", pattern_frequency_exact(PatternQuery.from_word("1111"), B, level=level).exact)

# %% A periodic case is exact on full periods
B235 = validate_moduli([2, 3, 5])
q = PatternQuery.from_word("101")
print("B={2,3,5}, word 101:", pattern_frequency_exact(q, B235.explicit).exact,
      "=", Fraction(birkhoff_count(q, B235, 30_000), 30_000))
print("nonzero mask of 1..30:", np.flatnonzero(exact_patch(0, (1, 30), B235).bits) + 1)
