import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from oracles import all_matchings, double_factorial_odd
from pantsurf import _rng
from pantsurf.errors import ParseError
from pantsurf.surface import (Pairing, WeightLaw, WeightedSurfaceGraph, connectivity, deserialize,
                              half_edge, half_edge_parts, random_surface, sample_configuration,
                              serialize)

laws = st.one_of(
    st.floats(0.1, 8.0).map(lambda x: WeightLaw.point_mass(x, "uniform")),
    st.tuples(st.floats(0.1, 4.0), st.floats(0.0, 4.0), st.sampled_from(["uniform", "log_uniform"]),
              st.sampled_from(["zero", "uniform"])).map(
        lambda t: WeightLaw(t[2], t[0], t[0] + t[1], t[3])),
)


def test_half_edge_ids_round_trip():
    for v in range(5):
        for s in (1, 2, 3):
            assert half_edge_parts(half_edge(v, s)) == (v, s)


def test_matching_counts():
    for n in (2, 4):
        assert len(set(all_matchings(range(3 * n)))) == double_factorial_odd(3 * n - 1)


@pytest.mark.parametrize("n_vertices, samples", [(2, 30_000), (4, 104_000)])
def test_pairing_is_uniform(n_vertices, samples):
    total = double_factorial_odd(3 * n_vertices - 1)
    rng = _rng.generator(7, n_vertices)
    seen = {}
    for _ in range(samples):
        key = sample_configuration(n_vertices, rng).canonical()
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) <= total
    counts = np.zeros(total)
    counts[:len(seen)] = list(seen.values())
    p = stats.chisquare(counts).pvalue
    assert p > 1e-3


def test_pairing_rejects_bad_input():
    with pytest.raises(ValueError):
        Pairing(2, np.array([[0, 1], [2, 3], [4, 4]]))
    with pytest.raises(ValueError):
        sample_configuration(3, _rng.generator(0))


@given(laws, st.integers(0, 2**63 - 1), st.integers(2, 12))
@settings(max_examples=60, deadline=None)
def test_serialization_round_trip(law, seed, genus):
    surf = random_surface(genus, law, seed)
    back = deserialize(serialize(surf))
    assert back == surf
    assert serialize(back) == serialize(surf)


@given(laws)
def test_law_descriptor_round_trip(law):
    assert WeightLaw.parse(law.descriptor()) == law


def test_weights_respect_law():
    law = WeightLaw("uniform", 1.0, 3.0, "uniform")
    surf = random_surface(40, law, 3)
    assert np.all((surf.lengths >= 1.0) & (surf.lengths <= 3.0))
    assert np.all((surf.twists >= 0) & (surf.twists < 2 * math.pi))
    assert stats.kstest((surf.lengths - 1) / 2, "uniform").pvalue > 1e-3
    fixed = random_surface(10, WeightLaw.point_mass(2.0, "zero"), 3)
    assert np.all(fixed.lengths == 2.0) and np.all(fixed.twists == 0.0)


def test_surface_basics():
    surf = random_surface(5, WeightLaw.point_mass(2.0), 11)
    assert surf.n_vertices == 8 and surf.n_edges == 12
    assert surf.genus == 5 and surf.euler_characteristic == -8
    assert np.all(surf.degrees() == 3)
    assert surf.half_lengths.shape == (8, 3)
    assert random_surface(5, WeightLaw.point_mass(2.0), 11) == surf
    assert random_surface(5, WeightLaw.point_mass(2.0), 12) != surf


def test_surface_rejects_bad_weights():
    p = Pairing(2, np.array([[0, 1], [2, 3], [4, 5]]))
    with pytest.raises(ValueError):
        WeightedSurfaceGraph(p, np.array([1.0, -1.0, 1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        WeightedSurfaceGraph(p, np.ones(3), np.array([0.0, 7.0, 0.0]))
    with pytest.raises(ValueError):
        WeightLaw("uniform", 3.0, 1.0)
    with pytest.raises(ValueError):
        WeightLaw("gamma", 1.0, 2.0)
    with pytest.raises(ValueError):
        random_surface(1, WeightLaw(), 0)


def test_connectivity():
    # two vertices each with a self loop, joined by one edge
    p = Pairing(2, np.array([[0, 1], [2, 5], [3, 4]]))
    assert connectivity(WeightedSurfaceGraph(p, np.ones(3), np.zeros(3))) == (True, 1)
    # vertices 0,1 form a theta graph, and so do vertices 2,3
    p = Pairing(4, np.array([[0, 3], [1, 4], [2, 5], [6, 9], [7, 10], [8, 11]]))
    ok, n = connectivity(WeightedSurfaceGraph(p, np.ones(6), np.zeros(6)))
    assert not ok and n == 2


def _record():
    return serialize(random_surface(3, WeightLaw.point_mass(2.0), 5)).splitlines()


@pytest.mark.parametrize("line, text, field", [
    (1, "version 9", "version"),
    (2, "genus x", "genus"),
    (2, "genus 1", "genus"),
    (4, "law gamma:1/zero", "law"),
    (5, "edges 4", "edges"),
    (6, "edge 0 1 abc 0", "length"),
    (6, "edge 0 1 2", "edge"),
])
def test_parse_errors_point_at_line_and_field(line, text, field):
    lines = _record()
    lines[line - 1] = text
    with pytest.raises(ParseError) as exc:
        deserialize("\n".join(lines))
    assert exc.value.line == line
    assert exc.value.field == field


def test_parse_error_on_missing_edges():
    lines = _record()[:-1]
    with pytest.raises(ParseError):
        deserialize("\n".join(lines))


def test_parse_ignores_comments():
    lines = _record()
    text = "# a comment\n" + "\n".join(lines)
    assert deserialize(text) == deserialize("\n".join(lines))
