"""Discretized surface metric with certified upper and lower distance bounds.

Every cuff of every pants carries ``m`` evenly spaced sample points.  Arcs
between samples are realized paths on the surface:

* intra arcs join two samples of one pants with their exact pants distance
  (see :func:`pantsurf.pants.lift_distances`); arcs between neighbouring
  samples of one cuff are tagged as along-cuff arcs;
* gluing arcs join a sample to the two samples nearest to its image across a
  glued edge, at the cost of the residual arc length along the cuff.

Shortest paths in this graph are therefore upper bounds for the surface
distance.  A path that crosses ``hops`` glued cuffs is trusted to within
``2 * hops * h`` where ``h`` is the largest sample spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra, connected_components

from .errors import ResourceError
from .pants import (HexagonChart, PantsShape, lift_distances, certified_cap, boost,
                    isometry_inverse, FLIP_NORMAL, HALF_TURN, DEFAULT_WORD_CAP)

DEFAULT_M = 16
DEFAULT_NODE_BUDGET = 2_000_000

INTRA, CUFF, GLUE = 0, 1, 2


@dataclass(frozen=True)
class Gluing:
    """Cuff ``sa`` of pants ``a`` glued to cuff ``sb`` of pants ``b``."""

    a: int
    sa: int
    b: int
    sb: int
    length: float
    twist: float

    @property
    def arc_twist(self):
        return self.twist / (2.0 * math.pi) * self.length

    def param_map(self):
        """(sign, shift) with ``s_b = sign * t_a + shift`` for glued points.

        An exit cuff (slot 2 or 3) at parameter t meets an entry cuff (slot 1)
        at t - arc_twist.  Two cuffs of the same kind meet at s = -t - arc_twist.
        """
        tau = self.arc_twist
        if (self.sa == 1) != (self.sb == 1):
            return (1.0, -tau) if self.sa != 1 else (1.0, tau)
        return -1.0, -tau


@dataclass(frozen=True)
class DistanceResult:
    upper: float
    lower: float
    hops: int

    @property
    def reachable(self):
        return math.isfinite(self.upper)


class PantsComplex:
    """A collection of pants and the gluings between their cuffs.

    Unglued cuffs are boundary: paths may touch them but cannot cross.
    """

    def __init__(self):
        self.shapes = []
        self.gluings = []
        self._glued = {}

    def add_pants(self, half_lengths) -> int:
        self.shapes.append(PantsShape(tuple(half_lengths)))
        return len(self.shapes) - 1

    def glue(self, a, sa, b, sb, length, twist) -> Gluing:
        for key in ((a, sa), (b, sb)):
            if key in self._glued:
                raise ValueError(f"cuff {key} is already glued")
        if (a, sa) == (b, sb):
            raise ValueError("cannot glue a cuff to itself")
        for p, s in ((a, sa), (b, sb)):
            if abs(self.shapes[p].cuff_length(s) - length) > 1e-9 * max(1.0, length):
                raise ValueError("glued cuffs must have the edge length")
        g = Gluing(a, sa, b, sb, float(length), float(twist))
        self._glued[(a, sa)] = len(self.gluings)
        self._glued[(b, sb)] = len(self.gluings)
        self.gluings.append(g)
        return g

    def is_glued(self, p, s):
        return (p, s) in self._glued

    @property
    def n_pants(self):
        return len(self.shapes)

    @classmethod
    def from_surface(cls, graph):
        cx = cls()
        for v in range(graph.n_vertices):
            cx.add_pants(graph.half_lengths[v])
        for e, (ha, hb) in enumerate(graph.pairs.tolist()):
            cx.glue(ha // 3, ha % 3 + 1, hb // 3, hb % 3 + 1, graph.lengths[e], graph.twists[e])
        return cx


def sample_params(shape: PantsShape, m: int):
    """Parameters of the m samples on each cuff, slot by slot: (3, m)."""
    k = np.arange(m)
    return np.array([k * shape.cuff_length(c) / m for c in (1, 2, 3)])


@lru_cache(maxsize=256)
def _chart(half_lengths):
    return HexagonChart(PantsShape(half_lengths))


def chart_for(shape: PantsShape) -> HexagonChart:
    return _chart(shape.half_lengths)


@lru_cache(maxsize=256)
def pants_arc_table(half_lengths, m, word_cap):
    """All sample-to-sample distances inside one pants.

    Returns (i, j, w, word, kind, exact) over pairs i < j of local node
    indices ``(slot - 1) * m + k``.
    """
    shape = PantsShape(half_lengths)
    chart = _chart(half_lengths)
    params = sample_params(shape, m)
    pts, par = [], []
    for c in (1, 2, 3):
        x, p = chart.base_points(c, params[c - 1])
        pts.append(x)
        par.append(p)
    pts = np.concatenate(pts)
    par = np.concatenate(par)
    d, used, words = lift_distances(chart, pts, par, pts, par, word_cap, return_words=True)
    iu, ju = np.triu_indices(3 * m, k=1)
    w = d[iu, ju]
    exact = used < word_cap or word_cap >= certified_cap(float(w.max()), shape)
    same = iu // m == ju // m
    step = (ju - iu) % m
    kind = np.where(same & ((step == 1) | (step == m - 1)), CUFF, INTRA)
    return iu, ju, w, words[iu, ju], kind, bool(exact)


def gluing_arcs(g: Gluing, m: int):
    """Arcs across one gluing: (k on side a, j on side b, residual cost).

    Each sample is joined to the two samples nearest to its image on the
    other side, in both directions.
    """
    L = g.length
    h = L / m
    sign, shift = g.param_map()
    ks = np.arange(m)
    out = []
    # a -> b
    s = sign * ks * h + shift
    base = np.floor(s / h)
    for off in (0, 1):
        j = base + off
        cost = np.abs(j * h - s)
        out.append((ks, np.mod(j, m).astype(np.int64), cost))
    # b -> a
    t = sign * (ks * h - shift)
    base = np.floor(t / h)
    for off in (0, 1):
        kk = base + off
        cost = np.abs(kk * h - t)
        out.append((np.mod(kk, m).astype(np.int64), ks, cost))
    ka = np.concatenate([o[0] for o in out])
    jb = np.concatenate([o[1] for o in out])
    c = np.concatenate([o[2] for o in out])
    return ka, jb, c


def gluing_transform(cx: PantsComplex, g: Gluing):
    """Isometry from the chart of pants b to the chart of pants a.

    It maps the developed cuff line of b onto that of a so that glued
    parameters match, and sends the inside of b to the outside of a.
    """
    ca = chart_for(cx.shapes[g.a]).cuff_frame(g.sa)
    cb = chart_for(cx.shapes[g.b]).cuff_frame(g.sb)
    sign, shift = g.param_map()
    if sign > 0:
        return ca @ FLIP_NORMAL @ boost(-shift) @ isometry_inverse(cb)
    return ca @ boost(shift) @ HALF_TURN @ isometry_inverse(cb)


class MetricGraph:
    """Sample graph of a pants complex.  Node id = (3 * pants + slot - 1) * m + k."""

    def __init__(self, cx: PantsComplex, m: int = DEFAULT_M, word_cap: int = DEFAULT_WORD_CAP,
                 node_budget: int = DEFAULT_NODE_BUDGET):
        if m < 4:
            raise ValueError("need at least 4 samples per cuff")
        n = 3 * m * cx.n_pants
        if n > node_budget:
            raise ResourceError(f"{n} metric nodes exceed the budget {node_budget}")
        self.complex = cx
        self.m = m
        self.word_cap = word_cap
        self.n_nodes = n
        lengths = [s.cuff_length(c) for s in cx.shapes for c in (1, 2, 3)]
        self.h = max(lengths) / m if lengths else 0.0
        us, vs, ws, kinds, aux = [], [], [], [], []
        self.intra_exact = True
        for p, shape in enumerate(cx.shapes):
            i, j, w, word, kind, exact = pants_arc_table(shape.half_lengths, m, word_cap)
            self.intra_exact &= exact
            off = 3 * m * p
            us.append(i + off)
            vs.append(j + off)
            ws.append(w)
            kinds.append(kind)
            aux.append(word)
        for gi, g in enumerate(cx.gluings):
            ka, jb, c = gluing_arcs(g, m)
            us.append((3 * g.a + g.sa - 1) * m + ka)
            vs.append((3 * g.b + g.sb - 1) * m + jb)
            ws.append(c)
            kinds.append(np.full(len(c), GLUE))
            aux.append(np.full(len(c), gi))
        if us:
            u = np.concatenate(us)
            v = np.concatenate(vs)
            w = np.concatenate(ws)
            kind = np.concatenate(kinds)
            ax = np.concatenate(aux)
        else:
            u = v = ax = kind = np.zeros(0, dtype=np.int64)
            w = np.zeros(0)
        # orient u < v and keep the cheapest copy of each arc
        swap = u > v
        u, v = np.where(swap, v, u), np.where(swap, u, v)
        keep = u != v
        u, v, w, kind, ax = u[keep], v[keep], w[keep], kind[keep], ax[keep]
        order = np.lexsort((w, v, u))
        u, v, w, kind, ax = u[order], v[order], w[order], kind[order], ax[order]
        first = np.ones(len(u), dtype=bool)
        first[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
        self.arc_u, self.arc_v, self.arc_w = u[first], v[first], w[first]
        self.arc_kind, self.arc_aux = kind[first], ax[first]
        self._key = self.arc_u * n + self.arc_v
        self.csr = csr_matrix((self.arc_w, (self.arc_u, self.arc_v)), shape=(n, n))

    # --- node helpers -----------------------------------------------------
    def node(self, pants, slot, k):
        return (3 * pants + slot - 1) * self.m + k

    def node_parts(self, nid):
        nid = np.asarray(nid)
        return nid // (3 * self.m), (nid // self.m) % 3 + 1, nid % self.m

    def cuff_nodes(self, pants, slot):
        start = self.node(pants, slot, 0)
        return np.arange(start, start + self.m)

    def pants_nodes(self, pants):
        start = 3 * self.m * pants
        return np.arange(start, start + 3 * self.m)

    def arc_kind_of(self, a, b):
        """Kind of the stored arc between node arrays a and b."""
        a = np.asarray(a)
        b = np.asarray(b)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        idx = np.searchsorted(self._key, lo * self.n_nodes + hi)
        idx = np.minimum(idx, len(self._key) - 1)
        return self.arc_kind[idx]

    # --- shortest paths ---------------------------------------------------
    def shortest(self, sources):
        """Distances and glue-hop counts from a set of sources."""
        sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
        if sources.size == 0:
            raise ValueError("need at least one source")
        dist, pred, _ = dijkstra(self.csr, directed=False, indices=np.unique(sources),
                                 min_only=True, return_predecessors=True)
        return dist, self._hops(dist, pred)

    def _hops(self, dist, pred):
        """Glue arcs on each witness path, by pointer doubling over predecessors."""
        pred = np.asarray(pred, dtype=np.int64)
        has = pred >= 0
        acc = np.zeros(self.n_nodes, dtype=np.int64)
        nodes = np.flatnonzero(has)
        acc[nodes] = self.arc_kind_of(pred[nodes], nodes) == GLUE
        up = np.where(has, pred, -1)
        while np.any(up >= 0):
            j = np.flatnonzero(up >= 0)
            acc[j] += acc[up[j]]
            up[j] = up[up[j]]
        return acc

    def lower_from(self, dist, hops):
        return np.maximum(dist - 2.0 * hops * self.h, 0.0)

    def dump(self) -> str:
        """Text edge list: 'pants slot k pants slot k weight' per arc."""
        pu, su, ku = self.node_parts(self.arc_u)
        pv, sv, kv = self.node_parts(self.arc_v)
        rows = zip(pu.tolist(), su.tolist(), ku.tolist(), pv.tolist(), sv.tolist(), kv.tolist(),
                   self.arc_w.tolist())
        return "".join(f"{a} {b} {c} {d} {e} {f} {w:.17g}\n" for a, b, c, d, e, f, w in rows)


def build_metric_graph(surface, m: int = DEFAULT_M, word_cap: int = DEFAULT_WORD_CAP,
                       node_budget: int = DEFAULT_NODE_BUDGET) -> MetricGraph:
    cx = surface if isinstance(surface, PantsComplex) else PantsComplex.from_surface(surface)
    return MetricGraph(cx, m=m, word_cap=word_cap, node_budget=node_budget)


def distance(metric: MetricGraph, sources, target) -> DistanceResult:
    """Distance from a node set to a node (or the nearest of a node set)."""
    dist, hops = metric.shortest(sources)
    target = np.atleast_1d(np.asarray(target, dtype=np.int64))
    i = target[np.argmin(dist[target])]
    up = float(dist[i])
    if not math.isfinite(up):
        return DistanceResult(math.inf, math.inf, 0)
    lo = float(metric.lower_from(dist[i], hops[i]))
    return DistanceResult(up, lo, int(hops[i]))


def diameter_estimate(metric: MetricGraph, exhaustive_limit: int = 2500):
    """(lower, upper) bracket on the largest pairwise sample distance.

    Small graphs are solved from every source.  Larger ones use eccentricity
    bounds: each Dijkstra run from v gives, for every w,
    max(d(v,w), ecc(v) - d(v,w)) <= ecc(w) <= ecc(v) + d(v,w), and the loop
    stops once the largest lower eccentricity bound meets the largest upper
    one.  ``upper`` is then the exact graph diameter; ``lower`` is the best
    hop-corrected lower bound among the pairs examined.
    """
    n = metric.n_nodes
    ncomp, _ = connected_components(metric.csr, directed=False)
    if ncomp != 1:
        raise ValueError("metric graph is disconnected; filter components first")
    if n <= exhaustive_limit:
        dist, pred = dijkstra(metric.csr, directed=False, return_predecessors=True)
        upper = float(dist.max())
        lower = 0.0
        for s in range(n):
            hops = metric._hops(dist[s], pred[s])
            lower = max(lower, float(metric.lower_from(dist[s], hops).max()))
        return lower, upper
    ecc_lo = np.zeros(n)
    ecc_hi = np.full(n, np.inf)
    active = np.ones(n, dtype=bool)
    lower = 0.0
    pick_high = True
    while True:
        cand = np.flatnonzero(active)
        if cand.size == 0:
            break
        if pick_high:
            v = cand[np.argmax(ecc_hi[cand])]
        else:
            v = cand[np.argmin(ecc_lo[cand])]
        pick_high = not pick_high
        dist, pred = dijkstra(metric.csr, directed=False, indices=v, return_predecessors=True)
        ecc = dist.max()
        hops = metric._hops(dist, pred)
        lower = max(lower, float(metric.lower_from(dist, hops).max()))
        ecc_lo = np.maximum(ecc_lo, np.maximum(dist, ecc - dist))
        ecc_hi = np.minimum(ecc_hi, ecc + dist)
        ecc_lo[v] = ecc_hi[v] = ecc
        active[v] = False
        d_lo = ecc_lo.max()
        d_hi = ecc_hi.max()
        # a node whose upper eccentricity cannot beat d_lo is settled
        active &= (ecc_hi > d_lo) & (ecc_lo < ecc_hi)
        if d_hi - d_lo <= 1e-12:
            break
    return lower, float(ecc_lo.max())
