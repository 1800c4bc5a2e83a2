"""
Exploring a random surface
==========================

Reveal a configuration-model surface one gluing at a time from a root pants.
"""

import math

from pantsurf.exploration import (VertexQuota, explore, merge_experiment, sqrt_log_quota,
                                  subcritical_quota, trace_rows)
from pantsurf.surface import WeightLaw

law = WeightLaw.point_mass(2.0)
g = 82

state, report = explore(g, law, VertexQuota(math.ceil(sqrt_log_quota(g))), seed=3, m=4)
print("stop:", report.stop_reason, " steps:", report.n_steps, " bad:", report.n_bad)
print("radius bracket:", report.radius)
for row in trace_rows(report)[:8]:
    print("step {} pairs {} -> {} bad={} d_plus={:.3f} discovered={}".format(*row))
print("checkpoints:", report.checkpoints)

# two explorations sharing one matching meet once they are large enough
hi = merge_experiment(g, law, sqrt_log_quota(g), 40, seed=1)
lo = merge_experiment(g, law, subcritical_quota(g), 40, seed=2)
print(f"merge fraction at sqrt(g) ln g = {hi['merge_fraction']:.2f}, "
      f"at the subcritical quota = {lo['merge_fraction']:.2f}")
