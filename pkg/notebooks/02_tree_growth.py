"""
Growth on tree surfaces
=======================

Balls around the root cuff of a binary tree of pants, and the growth rate.
"""

import numpy as np

from pantsurf.surface import WeightLaw
from pantsurf.tree import TreeSurface, check_snapshot, estimate_alpha, grow_ball

law = WeightLaw.point_mass(4.0)      # every cuff has length 4, twists uniform
tree = TreeSurface(law, seed=1)

# the sphere S_R: pants within R whose children are not both within R
for R in (2, 4, 6, 8, 10):
    snap = grow_ball(tree, R)
    print(f"R = {R:2d}  ball = {snap.ball_size:5d}  N_R = {snap.N_R:5d}  "
          f"ln N_R / R = {np.log(snap.N_R) / R:.3f}  checks ok = {all(check_snapshot(snap, law).values())}")

# alpha_hat = ln(mean N_R) / R at the largest radius, for longer and longer cuffs
for l in (0.5, 1.0, 2.0, 4.0):
    est = estimate_alpha(WeightLaw.point_mass(2 * l), [4.0, 8.0, 12.0], 30, seed=7)
    print(f"l = {l}: alpha_hat = {est.alpha_hat:.3f}  bootstrap CI = [{est.ci_low:.3f}, {est.ci_high:.3f}]")
