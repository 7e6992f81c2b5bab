#!/usr/bin/env python3
"""Open/closed labelling and per-region helicity for a three-dome field.

Three buried dipoles under a uniform background create three closed domes in
an open background.  Every grid sample is classified by tracing its field
line both ways; closed cells are split into connected components.  Adding an
azimuthal twist inside one dome injects self helicity of the matching sign
into that region and leaves the others alone.
"""

import warnings

import numpy as np

from windhel import (DomeSpec, Grid3, add_fields, azimuthal_twist, decompose,
                     dome_field, label_open_closed)

warnings.filterwarnings("ignore")

n = 40
grid = Grid3(n, n, n, 2 / (n - 1), 2 / (n - 1), 1 / (n - 1), (-1.0, -1.0, 0.0))
centers = 0.45 * np.array([[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]])
domes = [DomeSpec((c[0], c[1]), depth=0.55 * 0.32, sphere_radius=0.32) for c in centers]
base = dome_field(grid, 1.0, domes)

mask = label_open_closed(base)
print(f"regions found: {mask.num_regions} (open background + 3 domes)")
for k in range(mask.num_regions):
    cells = int((mask.labels == k).sum())
    kind = "open" if k == 0 else "closed dome"
    print(f"  label {k}: {cells:6d} cells  ({kind})")
print(f"undetermined fraction: {mask.undetermined_fraction:.4f}")

# which label is the dome at (0.45, 0)?
ix = round((centers[0][0] - grid.origin[0]) / grid.dx)
iy = round((0.0 - grid.origin[1]) / grid.dy)
dome1 = int(mask.labels[1, iy, ix])

print(f"\ntwisting dome {dome1} (azimuthal bump about its axis):")
for amp in (-2.0, 0.0, 2.0):
    field = base if amp == 0 else add_fields(
        base, azimuthal_twist(grid, tuple(centers[0]), amp, 0.16, 0.1))
    rep = decompose(field, mask)
    others = [f"{rep.self_[k]:+.1e}" for k in range(1, mask.num_regions) if k != dome1]
    print(f"  twist {amp:+.1f}: self[{dome1}] = {rep.self_[dome1]:+.3e}   "
          f"other domes: {', '.join(others)}")
print("positive azimuthal amplitude drives the dome's self helicity negative:")
print("the bump sits mainly on the descending inner legs of the dome field lines.")
