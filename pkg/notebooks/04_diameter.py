"""
Diameter of random surfaces
===========================

Certified diameter brackets across genera, and a surface with a thin collar.
"""

from pantsurf.experiments import collar_experiment, diameter_experiment
from pantsurf.pants import collar_width
from pantsurf.surface import WeightLaw

law = WeightLaw.point_mass(2.0)
_, summary, info = diameter_experiment([12, 22, 42], law, trials=5, seed=11, m=8)
for g, n, disc, lo, up, *_ in summary.rows:
    print(f"g = {g:3d}  mean diameter in [{lo:.2f}, {up:.2f}]  ({n} surfaces, {disc} disconnected draws)")
print(f"slope vs ln g: upper {info['slope_upper']:.2f}, lower {info['slope_lower']:.2f}")

# a separating cuff of length 0.01 forces a long collar across the surface
t = collar_experiment(3, seed=0)
for row in t.rows:
    print(f"instance {row[0]}: diameter >= {row[3]:.2f}  (twice the collar width {2 * collar_width(0.01):.2f})")
