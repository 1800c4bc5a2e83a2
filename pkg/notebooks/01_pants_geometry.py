"""
One pair of pants
=================

Seam lengths, the support bounds and distances between boundary points.
"""

import math

import numpy as np

from pantsurf.pants import (BoundaryPoint, PantsShape, collar_width, pants_bounds, point_distance,
                            seam_length)

# three cuff half-lengths; seam i-j is the common perpendicular of cuffs i and j
shape = PantsShape((1.0, 1.0, 1.0))
for i, j in ((1, 2), (2, 3), (3, 1)):
    print(f"seam {i}-{j}: {seam_length(shape, i, j):.10f}")

# at half-length ln(2 + sqrt 3) the seams equal the cuff half-lengths
c = math.log(2 + math.sqrt(3))
print("fixed point:", seam_length(PantsShape((c, c, c)), 1, 2) - c)

# bounds over all pants with half-lengths in [0.5, 2]
b = pants_bounds(0.5, 2.0)
print(f"delta_- = {b.delta_minus:.4f}  delta_+ = {b.delta_plus:.4f}  Delta_+ = {b.Delta_plus:.4f}")

# distance from a point of cuff 1 to points around cuff 2
shape = PantsShape((0.8, 1.2, 1.5))
L = shape.cuff_length(2)
p = BoundaryPoint(1, 0.0)
for t in np.linspace(0, L, 7):
    d, exact = point_distance(shape, p, BoundaryPoint(2, float(t)))
    print(f"t = {t:5.3f}  d = {d:.6f}  certified = {exact}")

# short cuffs have wide collars
for L in (2.0, 0.5, 0.01):
    print(f"collar half-width of a cuff of length {L}: {collar_width(L):.4f}")
