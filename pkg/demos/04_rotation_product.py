# An irrational rotation coded by a small open set, multiplied into a B-free patch.
#
# Run: python3 demos/04_rotation_product.py

import numpy as np

from bfreedyn import (
    DEFAULT_WINDOW,
    RotationSystem,
    arc_length,
    block_ones_stats,
    code_point,
    convolve_sample,
    delta_embed,
    injectivity_probe,
    union_measure,
    validate_moduli,
)

# %% Build E from 20 arc families and measure it
sys_ = RotationSystem.make(n_max=20)
print("alpha =", sys_.alpha, " arcs:", len(sys_.E.arcs), " measure:", round(union_measure(sys_.E), 6))
for n in (1, 2, 3, 4):
    print(f"  |J_{n}| = {arc_length(n)}")

# %% Coding of one orbit
x = 0.3141592653
c = code_point(sys_, x, (0, 79))
print("coding:", c.to_text())

# %% Blocks of ones at the start have positive probability
for m in (1, 2, 3, 4, 5):
    st = block_ones_stats(sys_, m, 200_000, seed=1)
    print(f"m={m}  estimate={st.estimate:.5f} +- {st.stderr:.5f}   lower bound {st.lower_bound:.5f}")

# %% The product with a square-free patch keeps only positions where both are 1
B = validate_moduli([], "prime-squares")
h = delta_embed(0, B.prefix(6))
prod = convolve_sample(h, DEFAULT_WINDOW, sys_, x, (0, 79))
print("product:", prod.to_text())
print("ones kept:", int(prod.bits.sum()), "of", int(c.bits.sum()))
assert np.all(prod.bits <= c.bits)

# %% Random pairs of points are told apart by their codings
print("distinguished pairs:", injectivity_probe(sys_, 100, 10_000, seed=2))
