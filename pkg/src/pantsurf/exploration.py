"""Metric exploration of random surfaces from a root pants.

The surface is revealed one gluing at a time.  At each step the unpaired
cuff that is certainly closest to the root (smallest upper bound d_+) is
paired with a uniformly chosen unpaired half-edge of the configuration
model, and the new edge weight is drawn.  When the partner belongs to an
already discovered pants the step is a bad step.

d_+ of a cuff is the largest root distance over all completions of the
partial surface.  Completing can only add shortcuts, so the largest value
is the distance inside the partial surface with its unpaired cuffs as
walls, which is what the sample graph computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import _rng
from .metric import (DistanceResult, Gluing, MetricGraph, PantsComplex, diameter_estimate,
                     gluing_arcs, pants_arc_table)
from .pants import DEFAULT_WORD_CAP, PantsShape
from .surface import (WeightedSurfaceGraph, WeightLaw, Pairing, connectivity, half_edge,
                      half_edge_parts, random_surface)

EXPLORE_M = 8
NORMAL, BAD, MERGE = 0, 1, 2


# --- stop rules ---------------------------------------------------------------

@dataclass(frozen=True)
class VertexQuota:
    """Stop once ``n`` vertices are discovered."""
    n: float


@dataclass(frozen=True)
class RadiusQuota:
    """Stop once every unpaired cuff has d_+ above ``R``."""
    R: float


# --- checkpoint thresholds -------------------------------------------------------

def sqrt_log_quota(g: int) -> float:
    """sqrt(g) ln g vertices."""
    return math.sqrt(g) * math.log(g)


def subcritical_quota(g: int) -> float:
    """g^(1/2 - 1/ln^(3/4) g) vertices."""
    return g ** (0.5 - 1.0 / math.log(g) ** 0.75)


# --- configuration-model pool ----------------------------------------------------

class HalfEdgePool:
    """Unpaired half-edges of a configuration model, revealed lazily.

    With ``surface`` given, partners and weights are read from it; otherwise
    a partner is uniform among the remaining unpaired half-edges and the
    weight is drawn from ``law``.  Explorations sharing a pool share one
    matching.
    """

    def __init__(self, n_vertices: int, law: WeightLaw, seed: int,
                 surface: WeightedSurfaceGraph | None = None):
        if surface is None and law.length_kind != "point_mass":
            raise ValueError("lazy pairing needs a fixed cuff length; pass a surface instead")
        self.n_vertices = n_vertices
        self.law = law
        self.surface = surface
        self.items = list(range(3 * n_vertices))
        self.pos = np.arange(3 * n_vertices)
        self.owner = np.full(n_vertices, -1, dtype=np.int64)
        self.pair_rng = _rng.generator(seed, 0)
        self.weight_rng = _rng.generator(seed, 1)
        self.pairs = []
        self.weights = []
        if surface is not None:
            self._partner = surface.pairing.partner()
            edge_of = np.empty(3 * n_vertices, dtype=np.int64)
            edge_of[surface.pairs[:, 0]] = np.arange(surface.n_edges)
            edge_of[surface.pairs[:, 1]] = np.arange(surface.n_edges)
            self._edge_of = edge_of

    def is_free(self, h: int) -> bool:
        return self.pos[h] >= 0

    def _remove(self, h: int):
        i = self.pos[h]
        last = self.items[-1]
        self.items[i] = last
        self.pos[last] = i
        self.items.pop()
        self.pos[h] = -1

    def pair(self, e: int):
        """Pair unpaired half-edge ``e``; returns (partner, length, twist)."""
        if not self.is_free(e):
            raise ValueError(f"half-edge {e} is already paired")
        self._remove(e)
        if self.surface is None:
            f = self.items[int(self.pair_rng.integers(len(self.items)))]
            u = self.weight_rng.random(2)
            length = float(self.law.lengths_from_uniforms(u[0]))
            twist = float(self.law.twists_from_uniforms(u[1]))
        else:
            f = int(self._partner[e])
            k = self._edge_of[e]
            length, twist = float(self.surface.lengths[k]), float(self.surface.twists[k])
        self._remove(f)
        self.pairs.append((min(e, f), max(e, f)))
        self.weights.append((length, twist))
        return f, length, twist

    def complete(self) -> WeightedSurfaceGraph:
        """Finish the matching and weights; the surface the exploration lives in."""
        if self.surface is not None:
            return self.surface
        while self.items:
            self.pair(self.items[-1])
        lengths = np.array([w[0] for w in self.weights])
        twists = np.array([w[1] for w in self.weights])
        order = np.lexsort((np.array(self.pairs)[:, 1], np.array(self.pairs)[:, 0]))
        pairing = Pairing(self.n_vertices, np.array(self.pairs)[order])
        return WeightedSurfaceGraph(pairing, lengths[order], twists[order], law=self.law)


# --- partial surface metric ----------------------------------------------------------

class PartialMetric:
    """Sample graph of the discovered pants with exactly monotone root distances.

    Each update runs Dijkstra from a super source joined to every node at
    its previous distance, so a value can only stay or decrease.
    """

    def __init__(self, m: int, word_cap: int):
        self.m = m
        self.word_cap = word_cap
        self.shapes = []
        self._u, self._v, self._w, self._glue = [], [], [], []
        self.dist = np.zeros(0)
        self.hops = np.zeros(0, dtype=np.int64)
        self.h = 0.0

    @property
    def n_nodes(self):
        return 3 * self.m * len(self.shapes)

    def nodes(self, p: int, slot: int):
        start = (3 * p + slot - 1) * self.m
        return np.arange(start, start + self.m)

    def add_pants(self, half_lengths) -> int:
        shape = PantsShape(tuple(half_lengths))
        p = len(self.shapes)
        self.shapes.append(shape)
        i, j, w, _, _, _ = pants_arc_table(shape.half_lengths, self.m, self.word_cap)
        off = 3 * self.m * p
        self._u.append(i + off)
        self._v.append(j + off)
        self._w.append(w)
        self._glue.append(np.zeros(len(w), dtype=bool))
        self.dist = np.concatenate([self.dist, np.full(3 * self.m, np.inf)])
        self.hops = np.concatenate([self.hops, np.zeros(3 * self.m, dtype=np.int64)])
        self.h = max(self.h, 2 * max(shape.half_lengths) / self.m)
        return p

    def glue(self, pa, sa, pb, sb, length, twist):
        g = Gluing(pa, sa, pb, sb, length, twist)
        ka, jb, c = gluing_arcs(g, self.m)
        self._u.append((3 * pa + sa - 1) * self.m + ka)
        self._v.append((3 * pb + sb - 1) * self.m + jb)
        self._w.append(c)
        self._glue.append(np.ones(len(c), dtype=bool))

    def set_root(self, p: int):
        ids = np.arange(3 * self.m * p, 3 * self.m * (p + 1))
        self.dist[ids] = 0.0

    def update(self):
        n = self.n_nodes
        u = np.concatenate(self._u)
        v = np.concatenate(self._v)
        w = np.concatenate(self._w)
        gl = np.concatenate(self._glue)
        u, v = np.minimum(u, v), np.maximum(u, v)
        keep = u != v
        u, v, w, gl = u[keep], v[keep], w[keep], gl[keep]
        order = np.lexsort((w, v, u))
        u, v, w, gl = u[order], v[order], w[order], gl[order]
        first = np.ones(len(u), dtype=bool)
        first[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
        u, v, w, gl = u[first], v[first], w[first], gl[first]
        self._u, self._v, self._w, self._glue = [u], [v], [w], [gl]
        reached = np.flatnonzero(np.isfinite(self.dist))
        src = np.full(len(reached), n)
        rows = np.concatenate([u, v, src])
        cols = np.concatenate([v, u, reached])
        data = np.concatenate([w, w, self.dist[reached]])
        csr = csr_matrix((data, (rows, cols)), shape=(n + 1, n + 1))
        dist, pred = dijkstra(csr, directed=True, indices=n, return_predecessors=True)
        new = dist[:n]
        # hop counts along the witness paths
        pred = pred[:n]
        key = u * n + v
        hop = np.zeros(n, dtype=np.int64)
        up = np.full(n, -1, dtype=np.int64)
        from_src = pred == n
        hop[from_src] = self.hops[from_src]
        inner = np.flatnonzero((pred >= 0) & ~from_src)
        if inner.size:
            p = pred[inner]
            idx = np.searchsorted(key, np.minimum(p, inner) * n + np.maximum(p, inner))
            hop[inner] = gl[idx]
            up[inner] = p
        while np.any(up >= 0):
            j = np.flatnonzero(up >= 0)
            hop[j] += hop[up[j]]
            up[j] = up[up[j]]
        self.dist = new
        self.hops = hop

    def bracket(self, p: int, slot: int) -> DistanceResult:
        ids = self.nodes(p, slot)
        d = self.dist[ids]
        i = int(np.argmin(d))
        up = float(d[i])
        if not math.isfinite(up):
            return DistanceResult(math.inf, math.inf, 0)
        lo = float(np.maximum(d - 2.0 * self.hops[ids] * self.h, 0.0).min())
        return DistanceResult(up, lo, int(self.hops[ids][i]))


# --- exploration -----------------------------------------------------------------------

@dataclass
class StepRecord:
    step: int
    selected: int
    partner: int
    kind: int
    d_plus: float
    discovered: int       # discovered vertices before the step
    radius_lower: float   # smallest lower bound over unpaired cuffs before the step


@dataclass
class ExplorationState:
    """Discovered neighbourhood of the root and its unpaired cuffs."""

    genus: int
    law: WeightLaw
    root: int
    pool: HalfEdgePool | None
    metric: PartialMetric
    tag: int = 0
    local: dict = field(default_factory=dict)     # vertex -> pants index
    vertices: list = field(default_factory=list)  # pants index -> vertex
    unpaired: set = field(default_factory=set)
    steps: list = field(default_factory=list)
    n_bad: int = 0
    n_normal: int = 0
    tree: bool = False
    _next_virtual: int = 0

    @property
    def discovered(self):
        return len(self.vertices)

    @property
    def n_steps(self):
        return len(self.steps)

    @property
    def bad_steps(self):
        return [s.step for s in self.steps if s.kind == BAD]

    def _discover(self, vertex, half_lengths):
        p = self.metric.add_pants(half_lengths)
        self.local[vertex] = p
        self.vertices.append(vertex)
        for s in (1, 2, 3):
            self.unpaired.add(half_edge(vertex, s))
        if self.pool is not None and vertex < self.pool.n_vertices:
            self.pool.owner[vertex] = self.tag
        return p

    def frontier(self):
        """{half-edge: DistanceResult} over the unpaired cuffs."""
        return {e: frontier_distance(self, e) for e in sorted(self.unpaired)}

    def radius(self):
        """(lower, upper) root distance of the nearest unpaired cuff."""
        if not self.unpaired:
            return math.inf, math.inf
        fr = [frontier_distance(self, e) for e in self.unpaired]
        return min(r.lower for r in fr), min(r.upper for r in fr)

    def select(self):
        best, best_e = math.inf, None
        for e in sorted(self.unpaired):
            d = frontier_distance(self, e).upper
            if d < best:
                best, best_e = d, e
        return best_e, best

    def step(self):
        """One pairing step; returns its record."""
        e, dplus = self.select()
        lo = self.radius()[0]
        before = self.discovered
        v, s = half_edge_parts(e)
        if self.tree:
            length, twist = self._tree_weight()
            f = half_edge(self._new_virtual(), 1)
        else:
            f, length, twist = self.pool.pair(e)
        w, t = half_edge_parts(f)
        self.unpaired.discard(e)
        if self.tree or (w not in self.local and self.pool.owner[w] < 0):
            kind = NORMAL
            shape = (length / 2.0,) * 3 if self.tree else self._shape_of(w)
            self._discover(w, shape)
            self.n_normal += 1
        elif w in self.local:
            kind = BAD
            self.n_bad += 1
        else:
            kind = MERGE
        if kind != MERGE:
            self.unpaired.discard(f)
            a, b = (e, f) if e < f else (f, e)
            (va, sa), (vb, sb) = half_edge_parts(a), half_edge_parts(b)
            self.metric.glue(self.local[va], sa, self.local[vb], sb, length, twist)
            self.metric.update()
        rec = StepRecord(self.n_steps, e, f, kind, dplus, before, lo)
        self.steps.append(rec)
        return rec

    def _shape_of(self, w):
        if self.pool.surface is not None:
            return tuple(self.pool.surface.half_lengths[w])
        return (self.law.length_lo / 2.0,) * 3

    def _tree_weight(self):
        u = self.pool.weight_rng.random(2)
        return float(self.law.lengths_from_uniforms(u[0])), float(self.law.twists_from_uniforms(u[1]))

    def _new_virtual(self):
        self._next_virtual += 1
        return self.root + self._next_virtual

    def check_ledger(self) -> bool:
        """Unpaired count = 3 + normal steps - 2 bad steps."""
        return len(self.unpaired) == 3 + self.n_normal - 2 * self.n_bad


@dataclass
class ExplorationReport:
    stop_reason: str                 # vertex quota | radius quota | premature | exhausted | merged
    radius: tuple                    # (lower, upper) of the nearest unpaired cuff at stop
    n_steps: int
    n_bad: int
    discovered: int
    checkpoints: dict                # name -> (bad steps, step at which the window closes)
    violations: dict                 # name -> bool
    trace: list


def frontier_distance(state: ExplorationState, boundary: int) -> DistanceResult:
    """d_+ bracket from the root pants to an unpaired cuff."""
    if boundary not in state.unpaired:
        raise ValueError(f"half-edge {boundary} is not an unpaired cuff of the explored part")
    v, s = half_edge_parts(boundary)
    return state.metric.bracket(state.local[v], s)


def start(genus: int, law: WeightLaw, seed: int, root: int = 0, m: int = EXPLORE_M,
          word_cap: int = DEFAULT_WORD_CAP, surface: WeightedSurfaceGraph | None = None,
          pool: HalfEdgePool | None = None, tag: int = 0, tree: bool = False) -> ExplorationState:
    """Exploration state holding only the root pants."""
    n = 2 * genus - 2
    if not 0 <= root < n:
        raise ValueError(f"root {root} outside 0..{n - 1}")
    if pool is None:
        pool = HalfEdgePool(n, law, seed, surface)
    st = ExplorationState(genus, law, root, pool, PartialMetric(m, word_cap), tag=tag, tree=tree)
    if tree:
        st._next_virtual = n
    p = st._discover(root, st._shape_of(root))
    st.metric.set_root(p)
    return st


def _should_stop(st: ExplorationState, stop_rule):
    if isinstance(stop_rule, VertexQuota) and st.discovered >= stop_rule.n:
        return "vertex quota"
    if not st.unpaired:
        return "exhausted" if st.discovered == 2 * st.genus - 2 else "premature"
    if isinstance(stop_rule, RadiusQuota) and st.select()[1] > stop_rule.R:
        return "radius quota"
    return None


def checkpoints(state: ExplorationState, beta: float = 0.4, k: int = 11):
    """Bad steps in the three windows of the bad-step bounds.

    Windows: the first floor(g^beta) steps; steps taken before
    g^(1/2 - 1/ln^(3/4) g) vertices are found; steps taken before
    sqrt(g) ln g vertices are found.  Each entry is (count, closing step).
    """
    g = state.genus
    lg = math.log(g)
    first = int(math.floor(g ** beta))
    windows = {
        "first_steps": lambda r: r.step < first,
        "before_subcritical": lambda r: r.discovered < subcritical_quota(g),
        "before_sqrt_log": lambda r: r.discovered < sqrt_log_quota(g),
    }
    limits = {"first_steps": k, "before_subcritical": lg ** 0.75, "before_sqrt_log": lg ** 3}
    counts, violations = {}, {}
    for name, inside in windows.items():
        members = [r for r in state.steps if inside(r)]
        closing = max((r.step for r in members), default=-1) + 1
        c = sum(r.kind == BAD for r in members)
        counts[name] = (c, closing)
        violations[name] = c >= limits[name]
    return counts, violations


def explore(genus: int, law: WeightLaw, stop_rule=None, seed: int = 0, root: int = 0,
            m: int = EXPLORE_M, word_cap: int = DEFAULT_WORD_CAP,
            surface: WeightedSurfaceGraph | None = None, beta: float = 0.4, k: int = 11,
            tree: bool = False):
    """Run the exploration until the stop rule fires or nothing is left to pair.

    ``stop_rule`` is a :class:`VertexQuota`, a :class:`RadiusQuota` or None
    (explore everything reachable).  ``tree=True`` pairs every cuff with a
    fresh pants, which explores the tree surface with the same weights.
    Returns (state, report).
    """
    st = start(genus, law, seed, root=root, m=m, word_cap=word_cap, surface=surface, tree=tree)
    if tree and stop_rule is None:
        raise ValueError("the tree exploration needs a stop rule")
    while True:
        reason = _should_stop(st, stop_rule)
        if reason:
            break
        st.step()
    counts, viol = checkpoints(st, beta, k)
    report = ExplorationReport(reason, st.radius(), st.n_steps, st.n_bad, st.discovered,
                               counts, viol, st.steps)
    return st, report


def trace_rows(report: ExplorationReport):
    """Rows of the step trace: step, selected, partner, bad, d_plus, discovered."""
    return [(r.step, r.selected, r.partner, int(r.kind == BAD), r.d_plus, r.discovered)
            for r in report.trace]


# --- experiments ---------------------------------------------------------------------

def badstep_stats(genus_list, law: WeightLaw, trials: int, beta: float, k: int, seed: int,
                  m: int = 4):
    """Per genus, the fraction of runs violating each bad-step bound.

    Each run explores until sqrt(g) ln g vertices are found.  Returns a list
    of dicts with the three violation fractions, the mean counts, the
    number of premature stops and the empirical rate of a bad first step.
    """
    if not 0 < beta < 0.5:
        raise ValueError("beta must lie in (0, 1/2)")
    if not k > 2.0 / (1 - 2 * beta):
        raise ValueError("k must exceed 2 / (1 - 2 beta)")
    rows = []
    for g in genus_list:
        viol = {"first_steps": 0, "before_subcritical": 0, "before_sqrt_log": 0}
        total = dict.fromkeys(viol, 0)
        premature = 0
        first_bad = 0
        quota = VertexQuota(math.ceil(sqrt_log_quota(g)))
        for t in range(trials):
            _, rep = explore(g, law, quota, seed=_rng.derive_seed(seed, g, t), m=m, beta=beta, k=k)
            premature += rep.stop_reason == "premature"
            first_bad += bool(rep.trace) and rep.trace[0].kind == BAD
            for name in viol:
                viol[name] += rep.violations[name]
                total[name] += rep.checkpoints[name][0]
        row = {"genus": g, "trials": trials, "beta": beta, "k": k, "premature": premature,
               "first_step_bad_rate": first_bad / trials,
               "first_step_bad_expected": 2.0 / (6 * g - 7)}
        for name in viol:
            row[f"violation_{name}"] = viol[name] / trials
            row[f"mean_{name}"] = total[name] / trials
        rows.append(row)
    return rows


@dataclass
class MergeRun:
    merged: bool
    merge_step: int          # interleaved step count at the merge, -1 if none
    discovered: tuple        # vertices found by each exploration
    roots: tuple


def merge_run(genus: int, law: WeightLaw, quota: float, seed: int, roots=None,
              m: int = 4, word_cap: int = DEFAULT_WORD_CAP) -> MergeRun:
    """Two explorations sharing one half-edge pool, stepped alternately.

    Each stops at ``quota`` vertices; they merge when one pairs a cuff with
    a half-edge of a pants discovered by the other.
    """
    n = 2 * genus - 2
    rng = _rng.generator(seed, 2)
    if roots is None:
        roots = tuple(int(r) for r in rng.choice(n, size=2, replace=False))
    a_root, b_root = roots
    if a_root == b_root:
        return MergeRun(True, 0, (1, 1), roots)
    pool = HalfEdgePool(n, law, seed)
    a = start(genus, law, seed, root=a_root, m=m, word_cap=word_cap, pool=pool, tag=0)
    b = start(genus, law, seed, root=b_root, m=m, word_cap=word_cap, pool=pool, tag=1)
    active = [a, b]
    count = 0
    while True:
        moved = False
        for st in active:
            if st.discovered >= quota or not st.unpaired:
                continue
            rec = st.step()
            count += 1
            moved = True
            if rec.kind == MERGE:
                return MergeRun(True, count, (a.discovered, b.discovered), roots)
        if not moved:
            return MergeRun(False, -1, (a.discovered, b.discovered), roots)


def merge_experiment(genus: int, law: WeightLaw, quota: float, trials: int, seed: int, m: int = 4):
    """Merge fraction of two explorations from random distinct roots."""
    runs = [merge_run(genus, law, quota, _rng.derive_seed(seed, t), m=m) for t in range(trials)]
    merged = sum(r.merged for r in runs)
    return {"genus": genus, "quota": quota, "trials": trials, "merged": merged,
            "merge_fraction": merged / trials,
            "mean_merge_step": float(np.mean([r.merge_step for r in runs if r.merged]))
            if merged else math.nan,
            "runs": runs}


@dataclass
class DiameterTrial:
    trial: int
    seed: int
    connected: bool
    diam_lower: float = math.nan     # metric-engine bracket
    diam_upper: float = math.nan
    expl_lower: float = math.nan     # exploration bracket
    expl_upper: float = math.nan

    @property
    def contained(self):
        return self.expl_lower <= self.diam_upper <= self.expl_upper


def exploration_bracket(surface: WeightedSurfaceGraph, m: int = EXPLORE_M,
                        word_cap: int = DEFAULT_WORD_CAP):
    """Diameter bracket of the sample graph from explorations at every root.

    Lower: from each root, the last frontier distance before the final pants
    is found bounds the distance to that pants from below.  Upper: two
    explorations that have each found more than half of the pants share a
    pants, so any two samples are within 2 Delta_+ plus the two largest
    discovered distances at that stage.
    """
    n = surface.n_vertices
    g = surface.genus
    bounds = _surface_bounds(surface)
    lower, rad = 0.0, 0.0
    for v in range(n):
        st = start(g, surface.law, 0, root=v, m=m, word_cap=word_cap, surface=surface)
        half_rad = None
        while st.unpaired and st.discovered < n:
            lower = max(lower, st.select()[1])
            st.step()
            if half_rad is None and 2 * st.discovered > n:
                d = st.metric.dist
                half_rad = float(d[np.isfinite(d)].max())
        if half_rad is None:
            d = st.metric.dist
            half_rad = float(d[np.isfinite(d)].max())
        rad = max(rad, half_rad)
    return lower, 2 * bounds.Delta_plus + 2 * rad


def audit(genus: int, law: WeightLaw, seed: int, stop_rule=None, m: int = EXPLORE_M,
          word_cap: int = DEFAULT_WORD_CAP):
    """Run one exploration and check its invariants against the final surface.

    Counts violations of: monotone d_+ at every sample (exact); the
    unpaired-count identity after every step (exact); final-surface
    distance <= d_+ at every stage; and the breadth property, which says a
    cuff paired at or after a stage whose nearest unpaired cuff has d_+ = R
    has final lower bound >= R - 2 Delta_+ - (its bracket slack).
    """
    st = start(genus, law, seed, m=m, word_cap=word_cap)
    snaps = [st.metric.dist.copy()]
    viol = {"monotone": 0, "ledger": 0, "final_below_dplus": 0, "breadth": 0}
    radii = []
    while not _should_stop(st, stop_rule):
        radii.append(st.select()[1])
        st.step()
        d = st.metric.dist
        prev = snaps[-1]
        viol["monotone"] += int(np.count_nonzero(d[:len(prev)] > prev))
        viol["ledger"] += not st.check_ledger()
        snaps.append(d.copy())
    surf = st.pool.complete()
    cx = PantsComplex.from_surface(surf)
    mg = MetricGraph(cx, m=m, word_cap=word_cap)
    dist, hops = mg.shortest(mg.pants_nodes(st.root))
    lower = mg.lower_from(dist, hops)
    # partial node -> final node
    p_loc = np.repeat(np.array(st.vertices), 3 * m)
    rest = np.tile(np.arange(3 * m), len(st.vertices))
    to_final = 3 * m * p_loc + rest
    for snap in snaps:
        k = len(snap)
        viol["final_below_dplus"] += int(np.count_nonzero(dist[to_final[:k]] > snap + 1e-9))
    Delta = law.bounds().Delta_plus

    def cuff_bracket(h):
        v, s = half_edge_parts(h)
        ids = mg.cuff_nodes(v, s)
        return float(dist[ids].min()), float(lower[ids].min())

    later = math.inf
    for rec, R in zip(reversed(st.steps), reversed(radii)):
        for h in (rec.selected, rec.partner):
            up, lo = cuff_bracket(h)
            later = min(later, lo + (up - lo))
        viol["breadth"] += later < R - 2 * Delta - 1e-9
    return st, viol


def coupling_gap(genus: int, law: WeightLaw, seed: int, quota: float, m: int = EXPLORE_M,
                 word_cap: int = DEFAULT_WORD_CAP):
    """Exploration radius against the tree-surface radius at the same pants count.

    Both runs use the same weight stream.  Returns (radius of the graph
    exploration, radius of the tree exploration, bad steps, allowed excess
    5 Delta_+ * bad steps).
    """
    rule = VertexQuota(quota)
    a, ra = explore(genus, law, rule, seed=seed, m=m, word_cap=word_cap)
    b, rb = explore(genus, law, rule, seed=seed, m=m, word_cap=word_cap, tree=True)
    slack = (ra.radius[1] - ra.radius[0]) + (rb.radius[1] - rb.radius[0])
    allowed = 5 * law.bounds().Delta_plus * ra.n_bad + slack
    return ra.radius[1], rb.radius[1], ra.n_bad, allowed


def _surface_bounds(surface):
    from .pants import pants_bounds
    hl = surface.half_lengths
    return pants_bounds(float(hl.min()), float(hl.max()))


def diameter_by_exploration(genus: int, law: WeightLaw, trials: int, seed: int,
                            m: int = EXPLORE_M, word_cap: int = DEFAULT_WORD_CAP):
    """Per trial: metric-engine diameter bracket and exploration bracket."""
    out = []
    for t in range(trials):
        s = _rng.derive_seed(seed, t)
        surf = random_surface(genus, law, s)
        ok, _ = connectivity(surf)
        row = DiameterTrial(t, s, ok)
        if ok:
            mg = MetricGraph(PantsComplex.from_surface(surf), m=m, word_cap=word_cap)
            row.diam_lower, row.diam_upper = diameter_estimate(mg)
            row.expl_lower, row.expl_upper = exploration_bracket(surf, m=m, word_cap=word_cap)
        out.append(row)
    return out
