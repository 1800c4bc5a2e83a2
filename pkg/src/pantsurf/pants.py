"""Hyperbolic trigonometry of a single pair of pants.

A pair of pants with cuff lengths 2*l1, 2*l2, 2*l3 is the double of a
right-angled hexagon whose alternate sides are l1, l2, l3.  Everything here
works in the hyperboloid model: points are vectors x with <x, x> = -1 for the
bilinear form <a, b> = a0*b0 + a1*b1 - a2*b2, and cosh d(x, y) = -<x, y>.

The hexagon is traced counter-clockwise with sides in the order
l1, s3, l2, s1, l3, s2 (s_k is the seam opposite cuff k) and vertices
A, B, C, D, E, F.  Boundary points are parametrized as follows:

* cuff 1: parameter 0 sits at B (foot of the 1-2 seam) and increases towards A;
* cuff 2: parameter 0 sits at C (foot of the 1-2 seam) and increases towards D;
* cuff 3: parameter 0 sits at E (foot of the 2-3 seam) and increases towards F.

Parameters in [l, 2l) lie on the mirror copy of the hexagon.  With this
convention the exit cuffs 2, 3 and the entry cuff 1 of a pants are glued by
``exit(t) = entry(t - tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GeometryError, ResourceError

TOL = 1e-9
DEFAULT_WORD_CAP = 8
DEFAULT_NODE_BUDGET = 200_000

J = np.diag([1.0, 1.0, -1.0])
ORIGIN = np.array([0.0, 0.0, 1.0])
FLIP_NORMAL = np.diag([1.0, -1.0, 1.0])
HALF_TURN = np.diag([-1.0, -1.0, 1.0])
FLIP_TANGENT = np.diag([-1.0, 1.0, 1.0])

# side index of each cuff in the hexagon walk, and of each seam
CUFF_SIDE = {1: 0, 2: 2, 3: 4}
# seam generators: 0 = seam between cuffs 1,2 ; 1 = cuffs 2,3 ; 2 = cuffs 3,1
SEAM_SIDE = (1, 3, 5)
# seam generator met at parameter l of each cuff (where the mirror copy starts)
END_SEAM = {1: 2, 2: 1, 3: 2}


def _arccosh(x):
    """arccosh that tolerates round-off just below 1."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0 - 1e-9) or np.any(~np.isfinite(x)):
        raise GeometryError(f"arccosh argument out of range: {np.min(x)!r}")
    return np.arccosh(np.maximum(x, 1.0))


def boost(a):
    """Translation by a along the x axis through the base point."""
    c, s = math.cosh(a), math.sinh(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def minkowski(a, b):
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


def hyp_distance(a, b):
    """Hyperbolic distance between hyperboloid points (broadcasting).

    Short distances use 2 asinh(|a - b| / 2), which keeps full precision
    where arccosh near 1 would lose half the digits.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = -minkowski(a, b)
    diff = a - b
    chord = np.sqrt(np.maximum(minkowski(diff, diff), 0.0))
    return np.where(c < 2.0, 2.0 * np.arcsinh(chord / 2.0), np.arccosh(np.maximum(c, 1.0)))


def isometry_inverse(m):
    """Inverse of an isometry of the form: J M^T J."""
    return J @ m.T @ J


@dataclass(frozen=True)
class PantsShape:
    """Three cuff half-lengths (l1, l2, l3)."""

    half_lengths: tuple

    def __post_init__(self):
        hl = tuple(float(x) for x in self.half_lengths)
        if len(hl) != 3:
            raise ValueError("a pants shape needs exactly three half-lengths")
        for x in hl:
            if not (math.isfinite(x) and x > 0):
                raise ValueError(f"half-lengths must be positive and finite, got {hl}")
        object.__setattr__(self, "half_lengths", hl)

    def half(self, cuff: int) -> float:
        _check_cuff(cuff)
        return self.half_lengths[cuff - 1]

    def cuff_length(self, cuff: int) -> float:
        return 2.0 * self.half(cuff)

    def permuted(self, perm):
        """Relabel cuffs: new cuff i+1 is old cuff perm[i]."""
        return PantsShape(tuple(self.half_lengths[p - 1] for p in perm))


@dataclass(frozen=True)
class PantsBounds:
    l_minus: float
    l_plus: float
    delta_minus: float
    delta_plus: float
    Delta_plus: float


@dataclass(frozen=True)
class BoundaryPoint:
    """A point on cuff ``cuff_index`` at arc length ``arc_param`` from the foot point."""

    cuff_index: int
    arc_param: float

    def __post_init__(self):
        _check_cuff(self.cuff_index)
        if not math.isfinite(self.arc_param):
            raise ValueError("arc_param must be finite")

    def reduced(self, shape: PantsShape) -> "BoundaryPoint":
        return BoundaryPoint(self.cuff_index, self.arc_param % shape.cuff_length(self.cuff_index))


def _check_cuff(c):
    if c not in (1, 2, 3):
        raise ValueError(f"cuff index must be 1, 2 or 3, got {c!r}")


def _third(i, j):
    _check_cuff(i)
    _check_cuff(j)
    if i == j:
        raise ValueError("seam needs two distinct cuffs")
    return 6 - i - j


def _seam_from_halves(lk, li, lj):
    num = math.cosh(lk) + math.cosh(li) * math.cosh(lj)
    den = math.sinh(li) * math.sinh(lj)
    return float(_arccosh(num / den))


def seam_length(shape: PantsShape, i: int, j: int) -> float:
    """Length of the common perpendicular between cuffs i and j."""
    k = _third(i, j)
    return _seam_from_halves(shape.half(k), shape.half(i), shape.half(j))


def pants_bounds(l_minus: float, l_plus: float) -> PantsBounds:
    """Seam and diameter bounds valid for every pants with half-lengths in [l_minus, l_plus]."""
    if not (l_minus > 0 and math.isfinite(l_plus) and l_plus >= l_minus):
        raise ValueError(f"need 0 < l_minus <= l_plus, got {l_minus}, {l_plus}")
    dm = float(_arccosh((math.cosh(l_minus) + math.cosh(l_plus) ** 2) / math.sinh(l_plus) ** 2))
    dp = float(_arccosh((math.cosh(l_plus) + math.cosh(l_minus) ** 2) / math.sinh(l_minus) ** 2))
    return PantsBounds(l_minus, l_plus, dm, dp, 2.0 * l_plus + 2.0 * dp)


def collar_width(cuff_length: float) -> float:
    """Half-width of the embedded collar around a closed geodesic."""
    if not cuff_length > 0:
        raise ValueError("cuff length must be positive")
    return math.asinh(1.0 / math.sinh(cuff_length / 2.0))


def half_pants_crossing_bound(l: float) -> float:
    """Lower bound for a cuff-to-cuff arc that crosses the mid-seam of a half pants."""
    if not (l > 0 and math.isfinite(l)):
        raise ValueError("l must be positive")
    return 2.0 * math.acosh(math.sqrt(2.0) * math.cosh(l / 2.0))


class HexagonChart:
    """The right-angled hexagon of a pants shape, with its reflection group.

    Attributes
    ----------
    vertices : (6, 3) array, A..F on the hyperboloid
    side_lengths : (6,) array, (l1, s3, l2, s1, l3, s2)
    frames : (6, 3, 3) array; frame k has origin at vertex k, first column
        along side k and second column pointing into the hexagon
    reflections : (3, 3, 3) array of seam reflections (generators 0, 1, 2)
    """

    def __init__(self, shape: PantsShape):
        self.shape = shape
        l1, l2, l3 = shape.half_lengths
        s3 = seam_length(shape, 1, 2)
        s1 = seam_length(shape, 2, 3)
        s2 = seam_length(shape, 3, 1)
        self.side_lengths = np.array([l1, s3, l2, s1, l3, s2])
        frames = []
        f = np.eye(3)
        for a in self.side_lengths:
            frames.append(f)
            f = f @ boost(a) @ rotation(math.pi / 2)
        self.closure_error = float(np.max(np.abs(f - np.eye(3))))
        if not np.all(np.isfinite(f)) or self.closure_error > 1e-6 * max(1.0, float(np.max(np.abs(f)))):
            raise GeometryError("hexagon does not close")
        self.frames = np.array(frames)
        self.vertices = self.frames @ ORIGIN
        refl = []
        for side in SEAM_SIDE:
            n = self.frames[side][:, 1]
            refl.append(np.eye(3) - 2.0 * np.outer(n, n) @ J)
        self.reflections = np.array(refl)
        self._words = {}

    # --- boundary parametrization -------------------------------------
    def cuff_frame(self, cuff: int) -> np.ndarray:
        """Frame whose x axis is the cuff line, parameter increasing along +x,
        and whose second column points into the pants."""
        _check_cuff(cuff)
        if cuff == 1:
            return self.frames[0] @ boost(self.shape.half(1)) @ FLIP_TANGENT
        return self.frames[CUFF_SIDE[cuff]]

    def cuff_points(self, cuff: int, t) -> np.ndarray:
        """Developed positions on the cuff line (no reduction into the hexagon)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pts = np.stack([np.sinh(t), np.zeros_like(t), np.cosh(t)], axis=-1)
        return pts @ self.cuff_frame(cuff).T

    def base_points(self, cuff: int, t):
        """Fold parameters into the hexagon.

        Returns (points in the hexagon, parity) where parity 1 marks points
        on the mirror copy.
        """
        length = self.shape.cuff_length(cuff)
        l = self.shape.half(cuff)
        t = np.mod(np.atleast_1d(np.asarray(t, dtype=float)), length)
        parity = (t > l).astype(np.int64)
        folded = np.where(parity == 1, length - t, t)
        return self.cuff_points(cuff, folded), parity

    def seam_side_length(self, i: int, j: int) -> float:
        k = _third(i, j)
        return float(self.side_lengths[{3: 1, 1: 3, 2: 5}[k]])

    # --- reflection group ---------------------------------------------
    def words(self, cap: int):
        """Reduced reflection words up to length ``cap``.

        Returns (matrices (N, 3, 3), lengths (N,)).  Words are ordered by
        length; ``matrices[i] @ x`` applies the word to a point.
        """
        if cap not in self._words:
            seqs = reflection_words(cap)
            mats = np.empty((len(seqs), 3, 3))
            mats[0] = np.eye(3)
            index = {(): 0}
            for n, w in enumerate(seqs[1:], start=1):
                mats[n] = mats[index[w[:-1]]] @ self.reflections[w[-1]]
                index[w] = n
            lengths = np.array([len(w) for w in seqs])
            self._words[cap] = (mats, lengths)
        return self._words[cap]


def build_hexagon_chart(shape: PantsShape) -> HexagonChart:
    return HexagonChart(shape)


@lru_cache(maxsize=None)
def _words_cached(cap):
    out = [()]
    frontier = [()]
    for _ in range(cap):
        nxt = []
        for w in frontier:
            for g in range(3):
                if w and w[-1] == g:
                    continue
                nxt.append(w + (g,))
        out.extend(nxt)
        frontier = nxt
    return tuple(out)


def reflection_words(cap: int):
    """All reduced words in three involutions, by increasing length."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    return _words_cached(int(cap))


def word_count(cap: int) -> int:
    return 1 + 3 * (2 ** cap - 1)


def certified_cap(upper: float, shape: PantsShape) -> int:
    """Smallest word length that is certain to cover every lift within ``upper``.

    A path into a tile at word length k crosses k seam lines; between two
    crossings it spans a hexagon from one seam to another, which costs at
    least the shortest cuff side.
    """
    lmin = min(shape.half_lengths)
    return int(math.floor(upper / lmin + 1e-12)) + 1


def lift_distances(chart: HexagonChart, xa, pa, xb, pb, word_cap, *, return_words=False):
    """Minimum over parity-compatible reflection words of d(xa, W xb).

    xa (n, 3), xb (k, 3) are folded base points with parities pa, pb.
    Returns the (n, k) distance matrix, the largest word length used, and,
    if asked, the index of the minimizing word.
    """
    mats, lengths = chart.words(word_cap)
    xa = np.asarray(xa)
    xb = np.asarray(xb)
    pa = np.asarray(pa)
    pb = np.asarray(pb)
    want = (pa[:, None] + pb[None, :]) % 2
    best = np.full(want.shape, np.inf)
    arg = np.zeros(want.shape, dtype=np.int64)
    xaj = xa @ J
    lmin = min(chart.shape.half_lengths)
    start = 0
    used = 0
    for k in range(word_cap + 1):
        stop = start + (1 if k == 0 else 3 * 2 ** (k - 1))
        finite = best[np.isfinite(best)]
        if k >= 2 and want.size and np.all(np.isfinite(best)) and (k - 1) * lmin > finite.max() + 1e-12:
            break
        used = k
        # -<xa, W xb> for every word of this length
        c = -np.einsum("nj,wjk,mk->wnm", xaj, mats[start:stop], xb, optimize=True)
        mask = want != (k % 2)
        c[:, mask] = np.inf
        i = np.argmin(c, axis=0)
        cmin = np.take_along_axis(c, i[None], axis=0)[0]
        d = np.arccosh(np.maximum(cmin, 1.0))
        better = d < best
        best = np.where(better, d, best)
        arg = np.where(better, i + start, arg)
        start = stop
    # arccosh loses half the digits near 1; redo short distances with the chord form
    ii, jj = np.nonzero(best < 1.5)
    if ii.size:
        y = np.einsum("njk,nk->nj", mats[arg[ii, jj]], xb[jj])
        best[ii, jj] = hyp_distance(xa[ii], y)
    if return_words:
        return best, used, arg
    return best, used


def point_distance(shape: PantsShape, p: BoundaryPoint, q: BoundaryPoint,
                   word_cap: int = DEFAULT_WORD_CAP, node_budget: int = DEFAULT_NODE_BUDGET,
                   chart: HexagonChart | None = None):
    """Distance inside the pants between two boundary points.

    Returns ``(upper, exact)``.  ``upper`` is always the length of a real
    path; ``exact`` is True when the enumerated words provably include the
    shortest one.
    """
    if word_cap < 1:
        raise ValueError("word_cap must be >= 1")
    chart = chart or HexagonChart(shape)
    cap = word_cap
    while word_count(cap) > node_budget and cap > 1:
        cap -= 1
    xa, pa = chart.base_points(p.cuff_index, [p.arc_param])
    xb, pb = chart.base_points(q.cuff_index, [q.arc_param])
    d, _ = lift_distances(chart, xa, pa, xb, pb, cap)
    upper = float(d[0, 0])
    if cap < word_cap:
        raise ResourceError(
            f"{word_count(word_cap)} words exceed the node budget {node_budget}", best=upper)
    exact = word_cap >= certified_cap(upper, shape)
    return upper, exact
