"""Shortest noncontractible loops on truncated tree surfaces.

Every arc of the metric graph carries the isometry that carries the chart of
its target pants into the chart of its source pants.  Developing a shortest
path tree from a basepoint gives each node a position in the basepoint's
chart; a non-tree arc closes a noncontractible loop exactly when the two
developed positions of its endpoint disagree.  The loop's holonomy also
gives the length of the closed geodesic in its free homotopy class.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra

from . import _rng
from .metric import MetricGraph, PantsComplex, GLUE, chart_for, gluing_transform
from .pants import (END_SEAM, DEFAULT_WORD_CAP, boost, isometry_inverse, hyp_distance,
                    half_pants_crossing_bound)

# developed positions agree to ~1e-9; nontrivial holonomies move points by
# at least the systole
TRIVIAL_TOL = 1e-6


@dataclass
class SystoleReport:
    shortest: float              # shortest noncontractible graph loop found
    shortest_class: float        # geodesic length of that loop's class
    cuff_loop: float             # shortest loop whose class is a single cuff
    shortest_other: float        # shortest loop whose class is not a cuff power
    h: float
    n_pants: int
    truncated: bool = False
    other_class: float = math.inf  # geodesic length of the shortest such class


def _node_geometry(mg: MetricGraph):
    """Canonical chart position and parity reflection of every node."""
    cx = mg.complex
    m = mg.m
    pos = np.empty((mg.n_nodes, 3))
    refl = np.empty((mg.n_nodes, 3, 3))
    params = np.empty(mg.n_nodes)
    for p, shape in enumerate(cx.shapes):
        chart = chart_for(shape)
        for c in (1, 2, 3):
            L = shape.cuff_length(c)
            t = np.arange(m) * L / m
            ids = mg.cuff_nodes(p, c)
            pos[ids] = chart.cuff_points(c, t)
            params[ids] = t
            r = chart.reflections[END_SEAM[c]]
            par = t > shape.half(c)
            refl[ids] = np.where(par[:, None, None], r, np.eye(3))
    return pos, refl, params


def arc_isometries(mg: MetricGraph):
    """Isometry A for every stored arc (u < v): the developed image of v
    reached along the arc is A @ pos[v], in u's pants chart."""
    cx = mg.complex
    pos, refl, params = _node_geometry(mg)
    u, v = mg.arc_u, mg.arc_v
    A = np.empty((len(u), 3, 3))
    pu, su, _ = mg.node_parts(u)
    pv, sv, _ = mg.node_parts(v)
    glue = mg.arc_kind == GLUE
    intra = np.flatnonzero(~glue)
    for p in np.unique(pu[intra]):
        sel = intra[pu[intra] == p]
        mats, _ = chart_for(cx.shapes[p]).words(mg.word_cap)
        W = mats[mg.arc_aux[sel]]
        A[sel] = refl[u[sel]] @ W @ refl[v[sel]]
    for gi, g in enumerate(cx.gluings):
        sel = np.flatnonzero(glue & (mg.arc_aux == gi))
        if sel.size == 0:
            continue
        T = gluing_transform(cx, g)
        L = g.length
        sign, shift = g.param_map()
        ca = chart_for(cx.shapes[g.a]).cuff_frame(g.sa)
        trans = ca @ boost(L) @ isometry_inverse(ca)
        tinv = isometry_inverse(trans)
        for idx in sel:
            a_side = (pu[idx], su[idx]) == (g.a, g.sa) and not (
                (pv[idx], sv[idx]) == (g.a, g.sa))
            na, nb = (u[idx], v[idx]) if a_side else (v[idx], u[idx])
            t_star = (params[nb] - shift) / sign
            n = int(round((t_star - params[na]) / L))
            M = np.linalg.matrix_power(tinv, n) if n >= 0 else np.linalg.matrix_power(trans, -n)
            Ab = M @ T
            A[idx] = Ab if a_side else isometry_inverse(Ab)
    return A, pos


def _develop(mg, A, dist, pred):
    """Position map H(v) of every reached node in the source's chart."""
    n = mg.n_nodes
    H = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    has = pred >= 0
    nodes = np.flatnonzero(has)
    pr = pred[nodes]
    lo = np.minimum(pr, nodes)
    hi = np.maximum(pr, nodes)
    idx = np.searchsorted(mg._key, lo * n + hi)
    step = A[idx]
    flip = pr > nodes
    step[flip] = np.einsum("ij,njk,kl->nil", np.diag([1.0, 1.0, -1.0]),
                           np.transpose(step[flip], (0, 2, 1)), np.diag([1.0, 1.0, -1.0]))
    H[nodes] = step
    up = np.where(has, pred, -1)
    while np.any(up >= 0):
        j = np.flatnonzero(up >= 0)
        H[j] = H[up[j]] @ H[j]
        up[j] = up[up[j]]
    return H


def loops_from(mg, A, pos, source, limit):
    """Noncontractible loops through ``source`` no longer than ``limit``.

    Returns arrays (graph length, class length) of the candidate loops.
    """
    dist, pred = dijkstra(mg.csr, directed=False, indices=int(source), return_predecessors=True,
                          limit=limit / 2.0 + 1e-9)
    H = _develop(mg, A, dist, pred)
    u, v, w = mg.arc_u, mg.arc_v, mg.arc_w
    ok = np.isfinite(dist[u]) & np.isfinite(dist[v])
    ok &= (pred[v] != u) & (pred[u] != v)
    total = dist[u] + w + dist[v]
    ok &= total <= limit + 1e-9
    sel = np.flatnonzero(ok)
    if sel.size == 0:
        return np.zeros(0), np.zeros(0)
    y1 = np.einsum("nij,njk,nk->ni", H[u[sel]], A[sel], pos[v[sel]])
    y2 = np.einsum("nij,nj->ni", H[v[sel]], pos[v[sel]])
    gap = hyp_distance(y1, y2)
    nontriv = gap > TRIVIAL_TOL
    sel = sel[nontriv]
    if sel.size == 0:
        return np.zeros(0), np.zeros(0)
    Jm = np.diag([1.0, 1.0, -1.0])
    hv_inv = Jm @ np.transpose(H[v[sel]], (0, 2, 1)) @ Jm
    gamma = H[u[sel]] @ A[sel] @ hv_inv
    tr = np.trace(gamma, axis1=1, axis2=2)
    cls = np.arccosh(np.maximum((tr - 1.0) / 2.0, 1.0))
    return total[sel], cls


def _classify(lengths, classes, cuff_length):
    k = np.rint(classes / cuff_length)
    periph = (k >= 1) & (np.abs(classes - k * cuff_length) < 1e-6 * max(1.0, cuff_length))
    single = periph & (k == 1)
    return periph, single


def full_tree_complex(tree, depth: int):
    """The 3-regular tree surface around rho, down to ``depth`` tree steps.

    Pants 0 is rho.  Node u of branch b (heap numbering inside the branch)
    uses the edge key u*4 + b, matching :meth:`TreeSurface.branch_view`.
    Returns the complex and the tree depth of each pants.
    """
    law, seed = tree.law, tree.seed

    def weight(key):
        k = np.array([key], dtype=np.int64)
        ln = law.lengths_from_uniforms(_rng.uniform(seed, 1, k))[0]
        tw = law.twists_from_uniforms(_rng.uniform(seed, 2, k))[0]
        return ln, tw

    cx = PantsComplex()
    rho = cx.add_pants([weight(4 + b)[0] / 2 for b in (1, 2, 3)])
    depth_of = [0]
    ids = {}
    frontier = []
    if depth >= 1:
        for b in (1, 2, 3):
            ln, tw = weight(4 + b)
            kids = [weight((2 + s) * 4 + b)[0] for s in (0, 1)]
            ids[(b, 1)] = cx.add_pants([ln / 2, kids[0] / 2, kids[1] / 2])
            depth_of.append(1)
            cx.glue(rho, b, ids[(b, 1)], 1, ln, tw)
            frontier.append((b, 1, 1))
    while frontier:
        b, u, d = frontier.pop(0)
        if d >= depth:
            continue
        for s in (0, 1):
            c = 2 * u + s
            ln, tw = weight(c * 4 + b)
            kids = [weight((2 * c + t) * 4 + b)[0] for t in (0, 1)]
            ids[(b, c)] = cx.add_pants([ln / 2, kids[0] / 2, kids[1] / 2])
            depth_of.append(d + 1)
            cx.glue(ids[(b, u)], 2 + s, ids[(b, c)], 1, ln, tw)
            frontier.append((b, c, d + 1))
    return cx, np.array(depth_of)


def systole_probe(tree, R_trunc: float, m: int = 32, word_cap: int = DEFAULT_WORD_CAP,
                  search_length: float | None = None) -> SystoleReport:
    """Shortest noncontractible loop through the root pants of a full tree surface.

    Loops of length <= ``search_length`` (default three cuff half-lengths)
    through the root pants stay within search_length/2 of it, so only the
    pants that close can be reached are built; ``R_trunc`` is the radius of
    the truncated surface the probe stands for and must be >= 3 Delta_+.
    """
    law = tree.law
    if law.length_kind != "point_mass":
        raise ValueError("systole_probe needs a fixed cuff length")
    b = law.bounds()
    if R_trunc < 3 * b.Delta_plus:
        raise ValueError(f"truncation radius {R_trunc} is below 3*Delta_+ = {3 * b.Delta_plus:.4g}")
    l = law.length_lo / 2
    if search_length is None:
        search_length = 3 * l
    depth = int(math.floor(search_length / 2 / b.delta_minus)) + 1
    # pants below the built depth lie at least depth * delta_- away
    truncated = depth * b.delta_minus <= min(R_trunc, search_length / 2)
    if truncated:
        warnings.warn("search radius reaches the truncation frontier")
    cx, _ = full_tree_complex(tree, depth)
    mg = MetricGraph(cx, m=m, word_cap=word_cap)
    A, pos = arc_isometries(mg)
    lengths, classes = [], []
    for src in mg.pants_nodes(0):
        ln, cl = loops_from(mg, A, pos, src, search_length)
        lengths.append(ln)
        classes.append(cl)
    lengths = np.concatenate(lengths)
    classes = np.concatenate(classes)
    return _report(lengths, classes, 2 * l, mg.h, cx.n_pants, truncated)


def _report(lengths, classes, cuff_length, h, n_pants, truncated):
    if lengths.size == 0:
        return SystoleReport(math.inf, math.inf, math.inf, math.inf, h=h, n_pants=n_pants,
                             truncated=truncated)
    i = int(np.argmin(lengths))
    periph, single = _classify(lengths, classes, cuff_length)
    cuff = float(lengths[single].min()) if single.any() else math.inf
    other = float(lengths[~periph].min()) if (~periph).any() else math.inf
    other_cls = float(classes[~periph].min()) if (~periph).any() else math.inf
    return SystoleReport(float(lengths[i]), float(classes[i]), cuff, other, h, n_pants,
                         truncated, other_cls)


def mid_seam_probe(l: float, twist: float, m: int = 32, word_cap: int = DEFAULT_WORD_CAP,
                   search_length: float | None = None) -> SystoleReport:
    """Loops in two pants (l, l, l) glued along one cuff, other cuffs free.

    ``shortest_other`` is the shortest loop not freely homotopic to a power
    of a cuff; such a loop has to cross a seam in each pants.
    """
    cx = PantsComplex()
    p = cx.add_pants((l, l, l))
    q = cx.add_pants((l, l, l))
    cx.glue(p, 2, q, 1, 2 * l, twist)
    if search_length is None:
        search_length = 4 * (half_pants_crossing_bound(l) + l)
    mg = MetricGraph(cx, m=m, word_cap=word_cap)
    A, pos = arc_isometries(mg)
    lengths, classes = [], []
    # a single shortest path tree only closes some classes, so every node
    # serves as a basepoint
    for src in range(mg.n_nodes):
        ln, cl = loops_from(mg, A, pos, src, search_length)
        lengths.append(ln)
        classes.append(cl)
    return _report(np.concatenate(lengths), np.concatenate(classes), 2 * l, mg.h, 2, False)
