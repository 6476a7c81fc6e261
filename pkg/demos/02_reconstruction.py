# Reading the internal point back off a configuration patch.
#
# Run: python3 demos/02_reconstruction.py

import random

from bfreedyn import (
    DEFAULT_WINDOW,
    TruncatedInternalPoint,
    determining_radius,
    generic_patch,
    haar_sample,
    joint_determining_radius,
    patch_from_text,
    reconstruct,
    shift,
    validate_moduli,
)

# %% Two moduli: the point h = (1 mod 2, 2 mod 3)
h = TruncatedInternalPoint((2, 3), (1, 2))
p = generic_patch(h, DEFAULT_WINDOW, (0, 5))
print("patch on [0, 5]:", p.to_text())
res = reconstruct(p, (2, 3))
print("status:", res.status, " residues:", res.point.residues)
for b in (2, 3):
    print(f"  b={b}: determined within radius {determining_radius(h, DEFAULT_WINDOW, b)}")

# %% Zeros alone say nothing about an individual modulus
print("all zeros ->", reconstruct(generic_patch(h, DEFAULT_WINDOW, (1, 1)), (2, 3)).status)

# %% Shifting the configuration moves the internal point
q = shift(generic_patch(h, DEFAULT_WINDOW, (-12, 12)), 1)
print("after shift by 1:", reconstruct(q, (2, 3)).point.residues)

# %% Eight prime squares, random points from Haar measure
B = validate_moduli([], "prime-squares")
ms = B.prefix(8)
rng = random.Random(7)
radii, ok = [], 0
for _ in range(25):
    pt = haar_sample(ms, rng.randrange(2**32))
    R = joint_determining_radius(pt)
    radii.append(R)
    ok += reconstruct(generic_patch(pt, DEFAULT_WINDOW, (-R, R)), ms).point == pt
print(f"recovered {ok}/25 points; joint radius min={min(radii)} max={max(radii)}")

# %% A single wrong bit is caught by the cross-check on zero positions
pt = haar_sample(ms, 1)
R = joint_determining_radius(pt)
good = generic_patch(pt, DEFAULT_WINDOW, (-R, R))
bits = good.bits.copy()
bits[R + 3] ^= 1
bad = reconstruct(patch_from_text("".join(map(str, bits)), -R), ms)
print("flipped bit ->", bad.status, "|", bad.reason)
