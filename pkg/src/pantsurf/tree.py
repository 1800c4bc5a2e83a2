"""Tree-like surfaces and their growth.

The binary tree surface is glued along the rooted binary tree: node ``v``
(heap numbering, root 1) is a pants whose entry cuff (slot 1) is glued to
cuff ``2 + (v & 1)`` of its parent, and whose exit cuffs 2 and 3 lead to the
children ``2v`` and ``2v + 1``.  The weight of the edge above ``v`` is a pure
function of (seed, key(v)), so growing a ball in any order, to any radius,
always sees the same surface.

Distances from the root's free cuff are computed exactly as a shortest path
problem restricted to ancestries: a geodesic from the root cuff to the entry
cuff of ``v`` crosses each cuff separating them exactly once, so the
distance to every sample of ``v``'s entry cuff is a min-plus product of
per-pants distance tables along the ancestry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import stats

from . import _rng
from .errors import ResourceError
from .pants import PantsShape, HexagonChart, lift_distances, DEFAULT_WORD_CAP
from .surface import WeightLaw

DEFAULT_M = 16
DEFAULT_OFFSETS = 32
DEFAULT_BUDGET = 2_000_000
MAX_DEPTH = 62
TWO_PI = 2.0 * math.pi

_LENGTH_STREAM = 1
_TWIST_STREAM = 2


class TreeSurface:
    """Lazily generated tree-like surface.

    ``kind="binary"`` is the binary tree surface with a free root cuff.
    ``kind="full"`` is the 3-regular tree surface; its growth is measured
    through the three binary views returned by :meth:`branch_view`.
    """

    def __init__(self, law: WeightLaw, seed: int, kind: str = "binary", _entry=None):
        if kind not in ("binary", "full"):
            raise ValueError("kind must be 'binary' or 'full'")
        self.law = law
        self.seed = int(seed)
        self.kind = kind
        self._entry = _entry

    def branch_view(self, i: int) -> "TreeSurface":
        """Binary view of a full tree whose root enters through cuff ``i``."""
        if self.kind != "full":
            raise ValueError("only full trees have branch views")
        if i not in (1, 2, 3):
            raise ValueError("cuff index must be 1, 2 or 3")
        return TreeSurface(self.law, self.seed, "binary", _entry=i)

    def keys(self, v, depth: int):
        """Stable integer keys of the edges above heap nodes ``v`` at ``depth``."""
        v = np.asarray(v, dtype=np.int64)
        if self._entry is None:
            return v
        i = self._entry
        exits = [c for c in (1, 2, 3) if c != i]
        if depth == 0:
            return np.full(v.shape, 4 + i, dtype=np.int64)
        top = v >> (depth - 1)
        branch = np.where(top == 2, exits[0], exits[1])
        low = v & ((1 << (depth - 1)) - 1)
        u = (1 << (depth - 1)) | low
        return u * 4 + branch

    def edge_weights(self, v, depth: int):
        """(cuff lengths, twists) of the edges above nodes ``v``."""
        k = self.keys(v, depth)
        lengths = self.law.lengths_from_uniforms(_rng.uniform(self.seed, _LENGTH_STREAM, k))
        twists = self.law.twists_from_uniforms(_rng.uniform(self.seed, _TWIST_STREAM, k))
        return lengths, twists

    @property
    def bounds(self):
        return self.law.bounds()


@dataclass
class GrowthSnapshot:
    """Ball, sphere and related sets at radius R (arrays of heap indices)."""

    R: float
    ball: np.ndarray
    sphere: np.ndarray
    N_R: int
    U_R: np.ndarray
    U_prime_R: np.ndarray
    dist: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    entry_f: np.ndarray = field(repr=False)
    entry_offset: np.ndarray = field(repr=False)
    has_child_in_ball: np.ndarray = field(repr=False)
    sphere_chain_max: int = 0
    h: float = 0.0

    @property
    def ball_size(self):
        return len(self.ball)

    def lookup(self, v):
        """Row index of heap node ``v`` in the ball arrays, or -1."""
        i = np.searchsorted(self._order_keys, v)
        ok = (i < len(self._order_keys)) & (self._order_keys[np.minimum(i, len(self._order_keys) - 1)] == v)
        return np.where(ok, self._order[np.minimum(i, len(self._order) - 1)], -1)

    def __post_init__(self):
        self._order = np.argsort(self.ball, kind="stable")
        self._order_keys = self.ball[self._order]


# --- per-pants distance tables ------------------------------------------------

def _entry_exit_points(chart, shape, m, offsets):
    he = shape.cuff_length(1) / m
    k = np.arange(m)
    t_in = (k[None, :] * he + np.asarray(offsets)[:, None]).ravel()
    xa, pa = chart.base_points(1, t_in)
    xs, ps = [], []
    for c in (2, 3):
        x, p = chart.base_points(c, k * shape.cuff_length(c) / m)
        xs.append(x)
        ps.append(p)
    return xa, pa, np.concatenate(xs), np.concatenate(ps)


@lru_cache(maxsize=64)
def offset_tables(half_lengths, m, n_offsets, word_cap):
    """Entry-to-exit distance tables for quantized entry offsets.

    Entry samples sit at k*h + q*h/n_offsets on cuff 1; exit samples at j*h
    on cuffs 2 and 3.  Returns an array (n_offsets, m, 2m).
    """
    shape = PantsShape(half_lengths)
    chart = HexagonChart(shape)
    he = shape.cuff_length(1) / m
    offs = np.arange(n_offsets) * he / n_offsets
    xa, pa, xb, pb = _entry_exit_points(chart, shape, m, offs)
    d, _ = lift_distances(chart, xa, pa, xb, pb, word_cap)
    return d.reshape(n_offsets, m, 2 * m)


def exact_table(half_lengths, m, offset, word_cap):
    shape = PantsShape(tuple(half_lengths))
    chart = HexagonChart(shape)
    xa, pa, xb, pb = _entry_exit_points(chart, shape, m, [offset])
    d, _ = lift_distances(chart, xa, pa, xb, pb, word_cap)
    return d


class _Engine:
    """Layer-by-layer distance propagation on a binary tree surface."""

    def __init__(self, tree: TreeSurface, m, word_cap, n_offsets, budget, chunk=2048):
        self.tree = tree
        self.m = m
        self.word_cap = word_cap
        self.n_offsets = n_offsets
        self.budget = budget
        self.chunk = chunk
        self.fixed = tree.law.length_kind == "point_mass"
        if self.fixed:
            l = tree.law.length_lo / 2.0
            self.tables = offset_tables((l, l, l), m, n_offsets, word_cap)
        lo, hi = tree.law.half_range
        self.h = 2.0 * hi / m

    def exit_values(self, f, lengths, offsets):
        """f: (n, m) entry values.  Returns (n, 2m) exit values."""
        n, m = f.shape
        out = np.empty((n, 2 * m))
        if self.fixed:
            q = offsets.astype(np.int64)
            for s in range(0, n, self.chunk):
                e = slice(s, s + self.chunk)
                out[e] = (f[e, :, None] + self.tables[q[e]]).min(axis=1)
            return out
        for i in range(n):
            t = exact_table(lengths[i], m, offsets[i], self.word_cap)
            out[i] = (f[i, :, None] + t).min(axis=0)
        return out

    def child_entries(self, g, child_len, child_twist):
        """Shift exit values onto the child's entry samples.

        Returns (entry values, offset code) where the offset code is a
        quantized index (fixed lengths) or the exact offset.
        """
        m = self.m
        h = child_len / m
        u = np.mod(-child_twist / TWO_PI * child_len, child_len)
        a = np.floor(u / h)
        r = u - a * h
        if self.fixed:
            qf = r / h * self.n_offsets
            q = np.rint(qf)
            resid = np.abs(qf - q) * h / self.n_offsets
            carry = q >= self.n_offsets
            q = np.where(carry, 0, q)
            a = a + carry
            code = q
        else:
            resid = np.zeros_like(r)
            code = r
        a = a.astype(np.int64) % m
        idx = (np.arange(m)[None, :] - a[:, None]) % m
        return np.take_along_axis(g, idx, axis=1) + resid[:, None], code

    def grow(self, R, root=1, root_depth=0, root_offset=0.0, root_f=None):
        """Ball of radius R around the entry cuff of node ``root``."""
        m = self.m
        tree = self.tree
        keys = np.array([root], dtype=np.int64)
        depth = root_depth
        f = np.zeros((1, m)) if root_f is None else np.asarray(root_f, dtype=float).reshape(1, m)
        off = np.array([root_offset], dtype=float)
        root_len, _ = tree.edge_weights(keys, depth)
        entry_len = root_len
        anc_sphere = np.zeros(1, dtype=np.int64)   # sphere members among strict ancestors
        out = {k: [] for k in ("key", "dist", "depth", "f", "off", "sphere", "inner", "anc", "U")}
        total = 0
        while keys.size:
            if depth > MAX_DEPTH:
                raise ResourceError("tree depth exceeds the heap index range")
            total += keys.size
            if total > self.budget:
                raise ResourceError(f"ball exceeds the budget of {self.budget} pants", best=total)
            children = np.concatenate([2 * keys, 2 * keys + 1])
            c_len, c_tw = tree.edge_weights(children, depth + 1)
            n = keys.size
            shapes = np.stack([entry_len / 2.0, c_len[:n] / 2.0, c_len[n:] / 2.0], axis=1)
            g = self.exit_values(f, shapes, off)
            fc0, o0 = self.child_entries(g[:, :m], c_len[:n], c_tw[:n])
            fc1, o1 = self.child_entries(g[:, m:], c_len[n:], c_tw[n:])
            fc = np.concatenate([fc0, fc1])
            oc = np.concatenate([o0, o1])
            dc = fc.min(axis=1)
            inball = dc <= R
            in0, in1 = inball[:n], inball[n:]
            sphere = ~(in0 & in1)
            inner = in0 | in1
            out["key"].append(keys)
            out["dist"].append(f.min(axis=1))
            out["depth"].append(np.full(n, depth))
            out["f"].append(f)
            out["off"].append(off)
            out["sphere"].append(sphere)
            out["inner"].append(inner)
            out["anc"].append(anc_sphere + sphere)
            out["U"].append(sphere & (anc_sphere == 0))
            nxt = anc_sphere + sphere
            keys = children[inball]
            f = fc[inball]
            off = oc[inball]
            entry_len = c_len[inball]
            anc_sphere = np.concatenate([nxt, nxt])[inball]
            depth += 1
        cat = {k: np.concatenate(v) for k, v in out.items()}
        ball = cat["key"]
        sph = cat["sphere"]
        sphere_keys = ball[sph]
        snap = GrowthSnapshot(
            R=float(R), ball=ball, sphere=sphere_keys, N_R=int(sph.sum()),
            U_R=ball[cat["U"]],
            U_prime_R=np.sort(np.concatenate([2 * sphere_keys, 2 * sphere_keys + 1])),
            dist=cat["dist"], depth=cat["depth"], entry_f=cat["f"], entry_offset=cat["off"],
            has_child_in_ball=cat["inner"], sphere_chain_max=int(cat["anc"].max()), h=self.h)
        snap.in_sphere = sph
        return snap

    def regrow_at(self, snap: GrowthSnapshot, v, r):
        """N_r around node ``v`` of a snapshot (which must contain v)."""
        i = int(snap.lookup(v))
        if i < 0:
            raise ValueError(f"node {v} is not in the snapshot ball")
        return self.grow(r, root=int(v), root_depth=int(snap.depth[i]),
                         root_offset=float(snap.entry_offset[i]))

    def grow_from(self, v, depth, offset, r):
        return self.grow(r, root=int(v), root_depth=int(depth), root_offset=float(offset))


def _engine(tree, m, word_cap, n_offsets=DEFAULT_OFFSETS, budget=DEFAULT_BUDGET):
    return _Engine(tree, m, word_cap, n_offsets, budget)


def grow_ball(tree: TreeSurface, R: float, m: int = DEFAULT_M, word_cap: int = DEFAULT_WORD_CAP,
              budget: int = DEFAULT_BUDGET, n_offsets: int = DEFAULT_OFFSETS) -> GrowthSnapshot:
    """Ball B_R and sphere S_R around the root's free cuff.

    A pants is in the ball when the upper bound on its distance is <= R;
    expansion stops below every pants outside the ball, which is exact since
    distances only grow along ancestries.
    """
    if R < 0:
        raise ValueError("R must be non-negative")
    if tree.kind != "binary":
        raise ValueError("grow_ball needs a binary tree; use full_tree_growth for full trees")
    return _engine(tree, m, word_cap, n_offsets, budget).grow(R)


def deterministic_bounds(law: WeightLaw, R: float):
    """(lower, upper) bracket for ln(N_R)/R from the pants bounds."""
    b = law.bounds()
    lo = math.log(2) / b.Delta_plus - 4 * math.log(2) / R
    hi = 1 + 3 * b.Delta_plus / R
    return lo, hi


def check_snapshot(snap: GrowthSnapshot, law: WeightLaw):
    """Combinatorial identities every snapshot must satisfy.  Returns a dict of flags."""
    b = law.bounds()
    nb = snap.ball_size
    res = {
        "sphere_ball": snap.N_R <= nb <= 2 * snap.N_R,
        "sphere_subset": bool(np.all(np.isin(snap.sphere, snap.ball))),
        "antichain": _is_antichain(snap.U_R),
        "U_in_sphere": bool(np.all(np.isin(snap.U_R, snap.sphere))),
        "ancestor_chain": snap.sphere_chain_max <= b.Delta_plus / b.delta_minus + 1,
    }
    if snap.R > 0 and snap.N_R > 0:
        lo, hi = deterministic_bounds(law, snap.R)
        val = math.log(snap.N_R) / snap.R
        res["deterministic"] = lo <= val <= hi
    else:
        res["deterministic"] = snap.N_R >= 1
    return res


def _is_antichain(nodes):
    s = set(int(x) for x in nodes)
    for v in s:
        a = v >> 1
        while a >= 1:
            if a in s:
                return False
            a >>= 1
    return True


def is_ancestor(a, v):
    """True when heap node a is a strict ancestor of v."""
    v >>= 1
    while v >= 1:
        if v == a:
            return True
        v >>= 1
    return False


# --- multiplicativity --------------------------------------------------------

@dataclass
class MultiplicativityReport:
    R: float
    r: float
    N_total: int
    sum_U: int
    sum_U_prime: int
    upper_rhs: float
    lower_rhs: float
    sub_ok: bool
    super_ok: bool
    chain_ok: bool


def check_multiplicativity(tree: TreeSurface, R: float, r: float, m: int = DEFAULT_M,
                           word_cap: int = DEFAULT_WORD_CAP, budget: int = DEFAULT_BUDGET):
    """Compare N_{R+r} with the sums of N_r over U_R and U'_R."""
    eng = _engine(tree, m, word_cap, budget=budget)
    b = tree.bounds
    big = eng.grow(R + r)
    snap = eng.grow(R)
    sum_u = 0
    for v in snap.U_R:
        sum_u += eng.regrow_at(snap, int(v), r).N_R
    # U'_R: children of sphere members; their entry data come from the bigger ball
    # when present, otherwise from one extra propagation step.
    sum_up = 0
    kids = snap.U_prime_R
    for v in kids:
        i = int(big.lookup(int(v)))
        if i >= 0:
            sum_up += eng.grow_from(int(v), int(big.depth[i]), float(big.entry_offset[i]), r).N_R
        else:
            sum_up += _child_growth(eng, snap, int(v), r)
    upper_rhs = 2 * math.exp(4 * b.Delta_plus) * sum_u
    lower_rhs = math.exp(-4 * b.Delta_plus) / 2 / (b.Delta_plus / b.delta_minus + 1) * sum_up
    return MultiplicativityReport(
        R, r, big.N_R, sum_u, sum_up, upper_rhs, lower_rhs,
        sub_ok=big.N_R <= upper_rhs, super_ok=big.N_R >= lower_rhs,
        chain_ok=snap.sphere_chain_max <= b.Delta_plus / b.delta_minus + 1)


def _child_growth(eng, snap, v, r):
    """N_r for a child whose parent is in the snapshot but which is not itself."""
    parent = v >> 1
    i = int(snap.lookup(parent))
    depth = int(snap.depth[i]) + 1
    # the entry offset of v is fixed by the edge weight above v
    lengths, twists = eng.tree.edge_weights(np.array([v]), depth)
    g = np.zeros((1, eng.m))
    _, code = eng.child_entries(g, lengths, twists)
    return eng.grow_from(v, depth, float(code[0]), r).N_R


# --- alpha estimation -------------------------------------------------------

@dataclass
class AlphaEstimate:
    law: WeightLaw
    R_grid: np.ndarray
    mean_N: np.ndarray
    sigma: np.ndarray
    mean_log: np.ndarray
    alpha_hat: float
    band: float
    ci_low: float
    ci_high: float
    counts: np.ndarray = field(repr=False)
    truncated: bool = False

    @property
    def bracket(self):
        """[ln2/Delta_+ - band, min(1, ln2/delta_-) + band]."""
        b = self.law.bounds()
        return (math.log(2) / b.Delta_plus - self.band,
                min(1.0, math.log(2) / b.delta_minus) + self.band)


def sphere_counts(law: WeightLaw, R_grid, trials: int, seed: int, m: int = DEFAULT_M,
                  word_cap: int = DEFAULT_WORD_CAP, budget: int = DEFAULT_BUDGET):
    """N_R for every trial tree (rows) and grid radius (columns).

    One growth to the largest radius serves all smaller radii: the sphere at
    radius R only needs each ball member's distance and its children's.
    """
    R_grid = np.asarray(R_grid, dtype=float)
    out = np.zeros((trials, len(R_grid)), dtype=np.int64)
    for t in range(trials):
        tree = TreeSurface(law, _rng.derive_seed(seed, t))
        eng = _engine(tree, m, word_cap, budget=budget)
        out[t] = _counts_on_grid(eng, R_grid)
    return out


def _counts_on_grid(eng, R_grid):
    """Sphere sizes at each radius from a single growth to max(R_grid)."""
    Rmax = float(np.max(R_grid))
    snap = eng.grow(Rmax)
    d = snap.dist
    # distance of each child; children outside the big ball are > Rmax
    kids = np.concatenate([2 * snap.ball, 2 * snap.ball + 1])
    idx = snap.lookup(kids)
    dk = np.where(idx >= 0, d[np.maximum(idx, 0)], np.inf)
    n = len(snap.ball)
    dmax_child = np.maximum(dk[:n], dk[n:])
    res = []
    for R in R_grid:
        res.append(int(np.sum((d <= R) & (dmax_child > R))))
    return np.array(res)


def estimate_alpha(law: WeightLaw, R_grid, trials: int, seed: int, m: int = DEFAULT_M,
                   word_cap: int = DEFAULT_WORD_CAP, budget: int = DEFAULT_BUDGET,
                   n_boot: int = 400) -> AlphaEstimate:
    """Sigma_R = ln(mean N_R)/R over independent trees; alpha_hat is its last value."""
    if trials < 30:
        raise ValueError("need at least 30 trials")
    R_grid = np.asarray(R_grid, dtype=float)
    if np.any(np.diff(R_grid) <= 0) or R_grid[0] <= 0:
        raise ValueError("R grid must be positive and increasing")
    truncated = False
    grid = R_grid
    while True:
        try:
            counts = sphere_counts(law, grid, trials, seed, m, word_cap, budget)
            break
        except ResourceError:
            if len(grid) == 1:
                raise
            grid = grid[:-1]
            truncated = True
            warnings.warn(f"ball budget exceeded; grid truncated at R = {grid[-1]}")
    mean_n = counts.mean(axis=0)
    sigma = np.log(mean_n) / grid
    mean_log = np.log(counts).mean(axis=0) / grid
    Rmax = grid[-1]
    rng = _rng.generator(seed, 0xB007)
    boot = rng.integers(0, trials, size=(n_boot, trials))
    bs = np.log(counts[boot, -1].mean(axis=1)) / Rmax
    band = 15 * law.bounds().Delta_plus / Rmax
    return AlphaEstimate(law, grid, mean_n, sigma, mean_log, float(sigma[-1]), band,
                         float(np.quantile(bs, 0.025)), float(np.quantile(bs, 0.975)),
                         counts, truncated)


# --- full tree ---------------------------------------------------------------

@dataclass
class FullGrowth:
    R: float
    N_hat: int
    branch_N: tuple
    identity_residual: int


def full_tree_growth(tree: TreeSurface, R: float, m: int = DEFAULT_M,
                     word_cap: int = DEFAULT_WORD_CAP, budget: int = DEFAULT_BUDGET) -> FullGrowth:
    """Sphere count of the 3-regular tree surface from its three binary views.

    View i roots the binary tree at rho entering through cuff i.  N_hat is
    the number of distinct pants in the union of the three spheres;
    ``identity_residual`` is 2*N_hat minus the sum of the three counts.
    """
    if tree.kind != "full":
        raise ValueError("full_tree_growth needs a full tree")
    members = set()
    counts = []
    for i in (1, 2, 3):
        view = tree.branch_view(i)
        snap = _engine(view, m, word_cap, budget=budget).grow(R)
        counts.append(snap.N_R)
        for v, dep in zip(snap.sphere.tolist(), snap.depth[snap.in_sphere].tolist()):
            members.add(int(view.keys(np.array([v]), dep)[0]) if dep > 0 else 0)
    n_hat = len(members)
    return FullGrowth(float(R), n_hat, tuple(counts), 2 * n_hat - sum(counts))


# --- good pants -------------------------------------------------------------

def good_count(tree: TreeSurface, R: float, m: int = DEFAULT_M, word_cap: int = DEFAULT_WORD_CAP,
               budget: int = DEFAULT_BUDGET, n_offsets: int = DEFAULT_OFFSETS):
    """(#Good_R, N_R) for a fixed-length tree.

    A sphere pants is good when none of its children is in the ball, or when
    some entry sample with parameter in [l/2 - 1, l/2 + 1] (read on the
    circle of length 2l) is within R of the root cuff.
    """
    law = tree.law
    if law.length_kind != "point_mass":
        raise ValueError("good_count needs a fixed cuff length")
    l = law.length_lo / 2.0
    L = 2 * l
    eng = _engine(tree, m, word_cap, n_offsets, budget)
    snap = eng.grow(R)
    h = L / m
    k = np.arange(m)
    params = k[None, :] * h + snap.entry_offset[:, None] * h / n_offsets
    lo = l / 2 - 1
    rel = np.mod(params - lo, L)
    in_window = rel <= 2.0 + 1e-12
    close = np.any(in_window & (snap.entry_f <= R), axis=1)
    leaf = ~snap.has_child_in_ball
    good = snap.in_sphere & (leaf | close)
    return int(good.sum()), snap.N_R


# --- Markov property ---------------------------------------------------------

@dataclass
class MarkovReport:
    trials_used: int
    skipped: int
    chi2_p: float
    ks_p: float
    pairs: np.ndarray = field(repr=False)
    fresh: np.ndarray = field(repr=False)
    note: str = ""


def markov_independence_test(law: WeightLaw, R: float, r: float, trials: int, seed: int,
                             m: int = DEFAULT_M, word_cap: int = DEFAULT_WORD_CAP,
                             budget: int = DEFAULT_BUDGET) -> MarkovReport:
    """Independence of N_r below two grandchildren of a U_R member.

    For each trial, grow B_R, pick the first member P of U_R and its
    grandchildren 4P (via child 2P) and 4P + 2 (via child 2P + 1), and record
    N_r below each.  The pairs are tested for independence by a chi-square
    test on the median split, and the first coordinate is compared with N_r
    of fresh, independent trees by a two-sample KS test.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if r == 0:
        return MarkovReport(0, trials, float("nan"), float("nan"), np.zeros((0, 2)), np.zeros(0),
                            note="r = 0: every N_r is 1, test skipped")
    pairs, fresh = [], []
    skipped = 0
    for t in range(trials):
        tree = TreeSurface(law, _rng.derive_seed(seed, t))
        eng = _engine(tree, m, word_cap, budget=budget)
        snap = eng.grow(R)
        if snap.U_R.size == 0:
            skipped += 1
            continue
        p = int(snap.U_R.min())
        vals = []
        for gc in (4 * p, 4 * p + 2):
            vals.append(_grandchild_growth(eng, snap, gc, r))
        pairs.append(vals)
        ftree = TreeSurface(law, _rng.derive_seed(seed, 10_000_019 + t))
        fresh.append(_engine(ftree, m, word_cap, budget=budget).grow(r).N_R)
    pairs = np.array(pairs, dtype=float)
    fresh = np.array(fresh, dtype=float)
    chi2_p = _median_split_pvalue(pairs)
    ks_p = float(stats.ks_2samp(pairs[:, 0], fresh).pvalue) if len(pairs) else float("nan")
    return MarkovReport(len(pairs), skipped, chi2_p, ks_p, pairs, fresh)


def _grandchild_growth(eng, snap, gc, r):
    """N_r below grandchild ``gc``; its entry offset comes from the edge above it."""
    i = int(snap.lookup(gc >> 1))
    if i >= 0:
        depth = int(snap.depth[i]) + 1
    else:
        depth = int(snap.depth[int(snap.lookup(gc >> 2))]) + 2
    lengths, twists = eng.tree.edge_weights(np.array([gc]), depth)
    _, code = eng.child_entries(np.zeros((1, eng.m)), lengths, twists)
    return eng.grow_from(gc, depth, float(code[0]), r).N_R


def _median_split_pvalue(pairs):
    if len(pairs) < 10:
        return float("nan")
    a = pairs[:, 0] > np.median(pairs[:, 0])
    b = pairs[:, 1] > np.median(pairs[:, 1])
    table = np.array([[np.sum(~a & ~b), np.sum(~a & b)], [np.sum(a & ~b), np.sum(a & b)]])
    if np.any(table.sum(axis=0) == 0) or np.any(table.sum(axis=1) == 0):
        return 1.0
    return float(stats.chi2_contingency(table).pvalue)


from .systole import systole_probe, mid_seam_probe, SystoleReport  # noqa: E402,F401
