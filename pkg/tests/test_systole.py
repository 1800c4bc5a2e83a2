import math
import warnings

import pytest

from pantsurf.pants import half_pants_crossing_bound
from pantsurf.surface import WeightLaw
from pantsurf.systole import full_tree_complex, mid_seam_probe, systole_probe
from pantsurf.tree import TreeSurface


@pytest.mark.parametrize("l, seed", [(1.0, 0), (1.0, 1), (1.5, 2)])
def test_cuffs_are_the_shortest_loops(l, seed):
    law = WeightLaw.point_mass(2 * l)
    tree = TreeSurface(law, seed, "full")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = systole_probe(tree, 3 * law.bounds().Delta_plus)
    assert abs(rep.cuff_loop - 2 * l) <= 2 * rep.h
    assert rep.shortest >= 2 * l - 4 * rep.h
    assert rep.shortest_class == pytest.approx(2 * l, abs=1e-6)


def test_truncation_radius_must_cover_three_Delta_plus():
    law = WeightLaw.point_mass(2.0)
    with pytest.raises(ValueError):
        systole_probe(TreeSurface(law, 0, "full"), 2 * law.bounds().Delta_plus)
    with pytest.raises(ValueError):
        systole_probe(TreeSurface(WeightLaw("uniform", 1.0, 2.0), 0, "full"), 100.0)


def test_mid_seam_loops_are_long():
    l = 1.0
    rep = mid_seam_probe(l, 0.3, m=16)
    bound = 2 * half_pants_crossing_bound(l) - 4 * rep.h
    assert math.isfinite(rep.shortest_other)
    assert rep.shortest_other >= bound
    assert rep.other_class <= rep.shortest_other + 1e-9
    assert rep.cuff_loop == pytest.approx(2 * l, abs=2 * rep.h)


def test_full_tree_complex_depths():
    tree = TreeSurface(WeightLaw.point_mass(2.0), 0, "full")
    cx, depth = full_tree_complex(tree, 2)
    # root, three children, six grandchildren
    assert cx.n_pants == 10
    assert sorted(depth.tolist()) == [0] + [1] * 3 + [2] * 6
    assert len(cx.gluings) == 9
