import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse.csgraph import dijkstra

from pantsurf.errors import ResourceError
from pantsurf.metric import (GLUE, MetricGraph, PantsComplex, build_metric_graph, diameter_estimate,
                             distance, gluing_arcs, Gluing, sample_params)
from pantsurf.pants import BoundaryPoint, PantsShape, point_distance
from pantsurf.surface import WeightLaw, connectivity, random_surface


def _surface(genus, seed, law=WeightLaw.point_mass(2.0)):
    s = seed
    while True:
        surf = random_surface(genus, law, s)
        if connectivity(surf)[0]:
            return surf
        s += 1


def test_single_pants_graph_matches_point_distance():
    cx = PantsComplex()
    cx.add_pants((0.8, 1.0, 1.3))
    mg = MetricGraph(cx, m=6)
    shape = cx.shapes[0]
    params = sample_params(shape, 6)
    dist, _ = mg.shortest([mg.node(0, 1, 2)])
    for slot in (1, 2, 3):
        for k in range(6):
            ref, _ = point_distance(shape, BoundaryPoint(1, params[0, 2]), BoundaryPoint(slot, params[slot - 1, k]))
            assert dist[mg.node(0, slot, k)] == pytest.approx(ref, abs=1e-9)


def test_glued_samples_coincide_without_twist():
    cx = PantsComplex()
    p = cx.add_pants((1.0, 1.0, 1.0))
    q = cx.add_pants((1.0, 1.0, 1.0))
    cx.glue(p, 2, q, 1, 2.0, 0.0)
    mg = MetricGraph(cx, m=8)
    for k in range(8):
        r = distance(mg, [mg.node(p, 2, k)], mg.cuff_nodes(q, 1))
        assert r.upper == 0.0


@given(st.floats(0.5, 4.0), st.floats(0, 2 * math.pi * 0.999), st.sampled_from([(1, 2), (2, 3), (1, 1)]),
       st.integers(4, 20))
def test_gluing_residuals_are_below_spacing(L, twist, slots, m):
    g = Gluing(0, slots[0], 1, slots[1], L, twist)
    ka, jb, c = gluing_arcs(g, m)
    assert np.all(c >= 0) and np.all(c <= L / m + 1e-12)
    assert np.all((0 <= ka) & (ka < m)) and np.all((0 <= jb) & (jb < m))
    # every sample on each side has an outgoing arc
    assert set(ka.tolist()) == set(range(m)) and set(jb.tolist()) == set(range(m))


@given(st.integers(2, 6), st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_bounds_are_ordered_and_symmetric(genus, seed):
    surf = _surface(genus, seed, WeightLaw("uniform", 1.0, 3.0, "uniform"))
    mg = build_metric_graph(surf, m=6)
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, mg.n_nodes, 2)
    r1 = distance(mg, [a], b)
    r2 = distance(mg, [b], a)
    assert 0 <= r1.lower <= r1.upper
    assert r1.upper == pytest.approx(r2.upper, abs=1e-9)
    assert r1.lower >= r1.upper - 2 * r1.hops * mg.h - 1e-12


def test_hop_counts_match_predecessor_walk():
    mg = build_metric_graph(_surface(4, 3), m=6)
    dist, pred = dijkstra(mg.csr, directed=False, indices=0, return_predecessors=True)
    hops = mg._hops(dist, pred)
    for v in range(0, mg.n_nodes, 7):
        count, u = 0, v
        while pred[u] >= 0:
            count += int(mg.arc_kind_of(pred[u], u) == GLUE)
            u = pred[u]
        assert hops[v] == count


def test_bounding_diameter_equals_exhaustive():
    for seed in range(3):
        mg = build_metric_graph(_surface(4, 10 * seed), m=6)
        lo_ex, up_ex = diameter_estimate(mg)
        lo_bd, up_bd = diameter_estimate(mg, exhaustive_limit=0)
        assert up_bd == pytest.approx(up_ex, abs=1e-9)
        assert 0 < lo_bd <= lo_ex <= up_ex


def test_disconnected_diameter_raises():
    cx = PantsComplex()
    cx.add_pants((1.0, 1.0, 1.0))
    cx.add_pants((1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        diameter_estimate(MetricGraph(cx, m=4))


def test_glue_validation():
    cx = PantsComplex()
    p = cx.add_pants((1.0, 1.0, 1.0))
    q = cx.add_pants((1.0, 2.0, 1.0))
    with pytest.raises(ValueError):
        cx.glue(p, 1, q, 2, 2.0, 0.0)
    cx.glue(p, 1, q, 1, 2.0, 0.0)
    with pytest.raises(ValueError):
        cx.glue(p, 1, q, 3, 2.0, 0.0)
    with pytest.raises(ValueError):
        cx.glue(p, 2, p, 2, 2.0, 0.0)


def test_node_budget():
    surf = _surface(6, 0)
    with pytest.raises(ResourceError):
        build_metric_graph(surf, m=16, node_budget=100)


def test_node_numbering():
    mg = build_metric_graph(_surface(3, 0), m=5)
    nid = mg.node(2, 3, 4)
    assert tuple(int(x) for x in mg.node_parts(nid)) == (2, 3, 4)
    assert len(mg.dump().splitlines()) == len(mg.arc_w)
