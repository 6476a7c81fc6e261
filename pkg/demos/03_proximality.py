# How closely two configurations can agree.
#
# Run: python3 demos/03_proximality.py

import itertools

from bfreedyn import (
    DEFAULT_WINDOW,
    TruncatedInternalPoint,
    best_agreement,
    delta_embed,
    disagreement_density,
    find_agreement_window,
    joint_determining_radius,
    validate_moduli,
)

B = validate_moduli([], "prime-squares")

# %% Distinct integer translates never agree on a long window
ms = B.prefix(8)
pts = {g: delta_embed(g, ms) for g in range(-3, 4)}
for g1, g2 in itertools.combinations(pts, 2):
    R = max(joint_determining_radius(pts[g1]), joint_determining_radius(pts[g2]))
    longest, center = best_agreement(pts[g1], pts[g2], DEFAULT_WINDOW, 2000)
    print(f"g={g1:+d},{g2:+d}  longest agreement {longest:3d} at {center}   R*={R}")

# %% A new modulus only removes one residue class, so long agreement windows exist
base = delta_embed(0, B.prefix(3))
for b in (7, 11, 13, 101):
    L = (b - 2) // 2
    hits = [find_agreement_window(base, base.extend(b, r), DEFAULT_WINDOW, L, b) for r in range(b)]
    print(f"b'={b:3d}  half-length {L:2d}: witness for {sum(c is not None for c in hits)}/{b} residues")

# %% Disagreement density is an exact rational over the joint period
h1 = TruncatedInternalPoint((2, 3), (1, 2))
h2 = TruncatedInternalPoint((2, 3), (1, 1))
rep = disagreement_density(h1, h2, N=600, R=10)
print("exact:", rep.exact_density, " empirical on [-600, 600):", rep.empirical_density)
