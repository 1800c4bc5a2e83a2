"""Independent reference computations used by the tests."""

import math

import mpmath
import numpy as np
from scipy.sparse.csgraph import dijkstra

from pantsurf.pants import SEAM_SIDE, hyp_distance


def seam_mp(lk, li, lj, dps=50):
    """Seam opposite cuff k from the right-angled hexagon law, in high precision."""
    with mpmath.workdps(dps):
        lk, li, lj = mpmath.mpf(lk), mpmath.mpf(li), mpmath.mpf(lj)
        c = (mpmath.cosh(lk) + mpmath.cosh(li) * mpmath.cosh(lj)) / (mpmath.sinh(li) * mpmath.sinh(lj))
        return float(mpmath.acosh(c))


def seam_points(chart, n):
    """n evenly spaced points on each of the three seam sides; returns (points, spacing)."""
    pts, spacing = [], 0.0
    for side in SEAM_SIDE:
        L = chart.side_lengths[side]
        u = np.linspace(0.0, L, n)
        local = np.stack([np.sinh(u), np.zeros_like(u), np.cosh(u)], axis=-1)
        pts.append(local @ chart.frames[side].T)
        spacing = max(spacing, L / (n - 1))
    return np.concatenate(pts), spacing


def doubled_hexagon_distance(chart, p, q, n=300):
    """Pants distance between boundary points by Dijkstra on the doubled hexagon.

    Each copy of the hexagon is convex, so inside one copy the shortest path
    is the straight segment.  A path changes copy only on a seam, so the
    graph has one node per (seam sample, copy about to be traversed) plus
    the two endpoints.  Returns (distance, seam spacing).
    """
    S, spacing = seam_points(chart, n)
    N = len(S)
    xa, pa = chart.base_points(p.cuff_index, [p.arc_param])
    xb, pb = chart.base_points(q.cuff_index, [q.arc_param])
    pa, pb = int(pa[0]), int(pb[0])
    D = hyp_distance(S[:, None, :], S[None, :, :])
    da = hyp_distance(xa, S)
    db = hyp_distance(S, xb)
    size = 2 * N + 2
    a, b = 2 * N, 2 * N + 1
    W = np.full((size, size), np.inf)
    # (s, c) travels in copy c to s' and crosses into copy 1 - c
    W[0:N, N:2 * N] = D
    W[N:2 * N, 0:N] = D
    W[a, (1 - pa) * N:(2 - pa) * N] = da
    W[pb * N:(pb + 1) * N, b] = db
    if pa == pb:
        W[a, b] = float(hyp_distance(xa[0], xb[0]))
    np.fill_diagonal(W, np.inf)
    W[W == 0.0] = 1e-300      # dense input: zero means no arc
    W[~np.isfinite(W)] = 0.0
    dist = dijkstra(W, directed=True, indices=a)
    return float(dist[b]), spacing


def all_matchings(items):
    """Every perfect matching of a list, as tuples of sorted pairs."""
    items = list(items)
    if not items:
        yield ()
        return
    a = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for m in all_matchings(rest):
            yield tuple(sorted(((a, items[i]),) + m))


def double_factorial_odd(n):
    return math.prod(range(n, 0, -2))

