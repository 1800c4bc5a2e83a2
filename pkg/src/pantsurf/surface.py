"""Configuration-model surfaces: pairings, Fenchel-Nielsen weights, records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _rng
from .errors import ParseError
from .pants import PantsShape, pants_bounds

FORMAT_VERSION = 1
LENGTH_KINDS = ("point_mass", "uniform", "log_uniform")
TWIST_KINDS = ("zero", "uniform")
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WeightLaw:
    """Law of one edge weight: a cuff length and an independent twist.

    ``length_lo``/``length_hi`` bound the full cuff length 2l (not the half).
    """

    length_kind: str = "point_mass"
    length_lo: float = 2.0
    length_hi: float = 2.0
    twist_kind: str = "uniform"

    def __post_init__(self):
        if self.length_kind not in LENGTH_KINDS:
            raise ValueError(f"unknown length law {self.length_kind!r}")
        if self.twist_kind not in TWIST_KINDS:
            raise ValueError(f"unknown twist law {self.twist_kind!r}")
        lo, hi = float(self.length_lo), float(self.length_hi)
        if self.length_kind == "point_mass":
            hi = lo
        if not (lo > 0 and math.isfinite(hi) and lo <= hi):
            raise ValueError(f"length support must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "length_lo", lo)
        object.__setattr__(self, "length_hi", hi)

    @classmethod
    def point_mass(cls, length, twist="uniform"):
        return cls("point_mass", length, length, twist)

    @property
    def half_range(self):
        return self.length_lo / 2.0, self.length_hi / 2.0

    def bounds(self):
        return pants_bounds(*self.half_range)

    def lengths_from_uniforms(self, u):
        u = np.asarray(u, dtype=float)
        lo, hi = self.length_lo, self.length_hi
        if self.length_kind == "point_mass":
            return np.full(u.shape, lo)
        if self.length_kind == "uniform":
            return lo + (hi - lo) * u
        return np.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * u)

    def twists_from_uniforms(self, u):
        u = np.asarray(u, dtype=float)
        if self.twist_kind == "zero":
            return np.zeros(u.shape)
        return np.mod(TWO_PI * u, TWO_PI)

    def descriptor(self) -> str:
        if self.length_kind == "point_mass":
            lp = f"point_mass:{self.length_lo!r}"
        else:
            lp = f"{self.length_kind}:{self.length_lo!r},{self.length_hi!r}"
        return f"{lp}/{self.twist_kind}"

    @classmethod
    def parse(cls, text: str) -> "WeightLaw":
        """Inverse of :meth:`descriptor`, e.g. ``uniform:1,3/zero``."""
        try:
            lpart, tpart = text.strip().split("/")
            kind, nums = lpart.split(":")
            vals = [float(x) for x in nums.split(",")]
        except ValueError as exc:
            raise ParseError(f"bad weight law descriptor {text!r}") from exc
        if kind == "point_mass":
            if len(vals) != 1:
                raise ParseError(f"point_mass takes one length: {text!r}")
            return cls.point_mass(vals[0], tpart)
        if len(vals) != 2:
            raise ParseError(f"{kind} takes two lengths: {text!r}")
        try:
            return cls(kind, vals[0], vals[1], tpart)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc


@dataclass(frozen=True)
class EdgeWeight:
    length: float
    twist: float

    @property
    def arc_twist(self) -> float:
        return self.twist / TWO_PI * self.length


def half_edge(vertex: int, slot: int) -> int:
    """Integer id of half-edge ``slot`` (1..3) of ``vertex``."""
    return 3 * vertex + slot - 1


def half_edge_parts(h: int):
    return h // 3, h % 3 + 1


@dataclass(frozen=True, eq=False)
class Pairing:
    """A perfect matching of the 3n half-edges of n trivalent vertices."""

    n_vertices: int
    pairs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        p = np.sort(p, axis=1)
        object.__setattr__(self, "pairs", p)
        flat = np.sort(p.ravel())
        if not np.array_equal(flat, np.arange(3 * self.n_vertices)):
            raise ValueError("pairing must use every half-edge exactly once")

    @property
    def n_edges(self):
        return len(self.pairs)

    def partner(self) -> np.ndarray:
        out = np.empty(3 * self.n_vertices, dtype=np.int64)
        out[self.pairs[:, 0]] = self.pairs[:, 1]
        out[self.pairs[:, 1]] = self.pairs[:, 0]
        return out

    def canonical(self):
        """Sorted tuple of pairs; equal for equal matchings."""
        return tuple(sorted(map(tuple, self.pairs.tolist())))

    def __eq__(self, other):
        return isinstance(other, Pairing) and self.n_vertices == other.n_vertices and \
            self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.n_vertices, self.canonical()))


def sample_configuration(n_vertices: int, rng) -> Pairing:
    """Uniform random perfect matching, built one pair at a time.

    Repeatedly take an unpaired half-edge and match it with a uniformly
    chosen other unpaired half-edge.
    """
    if n_vertices < 2 or n_vertices % 2:
        raise ValueError("n_vertices must be even and at least 2")
    free = list(range(3 * n_vertices))
    pairs = []
    while free:
        a = free.pop()
        j = int(rng.integers(len(free)))
        free[j], free[-1] = free[-1], free[j]
        b = free.pop()
        pairs.append((a, b))
    return Pairing(n_vertices, np.array(pairs))


@dataclass(frozen=True, eq=False)
class WeightedSurfaceGraph:
    """Trivalent multigraph with (length, twist) on every edge."""

    pairing: Pairing
    lengths: np.ndarray
    twists: np.ndarray
    law: WeightLaw | None = None
    seed: int | None = None
    _shapes: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float)
        twists = np.asarray(self.twists, dtype=float)
        if lengths.shape != (self.pairing.n_edges,) or twists.shape != lengths.shape:
            raise ValueError("need one (length, twist) per edge")
        if np.any(~(lengths > 0)) or np.any(~np.isfinite(lengths)):
            raise ValueError("edge lengths must be positive and finite")
        if np.any(twists < 0) or np.any(twists >= TWO_PI):
            raise ValueError("twists must lie in [0, 2*pi)")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "twists", twists)
        edge_of = np.empty(3 * self.pairing.n_vertices, dtype=np.int64)
        idx = np.arange(self.pairing.n_edges)
        edge_of[self.pairing.pairs[:, 0]] = idx
        edge_of[self.pairing.pairs[:, 1]] = idx
        object.__setattr__(self, "_shapes", (lengths[edge_of] / 2.0).reshape(-1, 3))

    @property
    def n_vertices(self):
        return self.pairing.n_vertices

    @property
    def pairs(self):
        return self.pairing.pairs

    @property
    def n_edges(self):
        return self.pairing.n_edges

    @property
    def genus(self):
        return self.n_vertices // 2 + 1

    @property
    def euler_characteristic(self):
        return -self.n_vertices

    @property
    def half_lengths(self) -> np.ndarray:
        """(n_vertices, 3) cuff half-lengths, slot order."""
        return self._shapes

    def shape(self, v: int) -> PantsShape:
        return PantsShape(tuple(self._shapes[v]))

    def weight(self, e: int) -> EdgeWeight:
        return EdgeWeight(float(self.lengths[e]), float(self.twists[e]))

    @property
    def arc_twists(self) -> np.ndarray:
        return self.twists / TWO_PI * self.lengths

    def degrees(self) -> np.ndarray:
        return np.bincount(self.pairs.ravel() // 3, minlength=self.n_vertices)

    def __eq__(self, other):
        return isinstance(other, WeightedSurfaceGraph) and self.pairing.n_vertices == other.pairing.n_vertices \
            and np.array_equal(self.pairs, other.pairs) \
            and np.array_equal(self.lengths, other.lengths) \
            and np.array_equal(self.twists, other.twists) \
            and self.law == other.law and self.seed == other.seed

    __hash__ = None


def assign_weights(pairing: Pairing, law: WeightLaw, rng, seed=None) -> WeightedSurfaceGraph:
    """Draw one iid (length, twist) per edge from ``law``."""
    n = pairing.n_edges
    lengths = law.lengths_from_uniforms(rng.random(n))
    twists = law.twists_from_uniforms(rng.random(n))
    return WeightedSurfaceGraph(pairing, lengths, twists, law=law, seed=seed)


def random_surface(genus: int, law: WeightLaw, seed: int) -> WeightedSurfaceGraph:
    """Pairing and weights from two independent streams of ``seed``."""
    if genus < 2:
        raise ValueError("genus must be at least 2")
    pairing = sample_configuration(2 * genus - 2, _rng.generator(seed, 0))
    return assign_weights(pairing, law, _rng.generator(seed, 1), seed=seed)


def connectivity(graph) -> tuple:
    """(is_connected, number of components) of the underlying multigraph."""
    n = graph.n_vertices
    p = graph.pairs // 3
    adj = coo_matrix((np.ones(len(p)), (p[:, 0], p[:, 1])), shape=(n, n))
    count, _ = connected_components(adj, directed=False)
    return count == 1, int(count)


# --- text records -----------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def serialize(graph: WeightedSurfaceGraph) -> str:
    """Line-oriented record; floats carry 17 significant digits."""
    lines = [
        f"version {FORMAT_VERSION}",
        f"genus {graph.genus}",
        f"seed {'none' if graph.seed is None else int(graph.seed)}",
        f"law {'none' if graph.law is None else graph.law.descriptor()}",
        f"edges {graph.n_edges}",
    ]
    for (a, b), ln, tw in zip(graph.pairs.tolist(), graph.lengths, graph.twists):
        lines.append(f"edge {a} {b} {_fmt(ln)} {_fmt(tw)}")
    return "\n".join(lines) + "\n"


def _expect(lines, i, key, nfields):
    if i >= len(lines):
        raise ParseError(f"missing {key!r} line", line=i + 1)
    parts = lines[i].split()
    if not parts or parts[0] != key:
        raise ParseError(f"expected {key!r}", line=i + 1, field=key)
    if len(parts) != nfields + 1:
        raise ParseError(f"{key!r} needs {nfields} value(s)", line=i + 1, field=key)
    return parts[1:]


def _num(text, conv, line, fieldname):
    try:
        return conv(text)
    except ValueError:
        raise ParseError(f"cannot read {text!r}", line=line, field=fieldname) from None


def deserialize(text: str) -> WeightedSurfaceGraph:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    (ver,) = _expect(lines, 0, "version", 1)
    if _num(ver, int, 1, "version") != FORMAT_VERSION:
        raise ParseError(f"unsupported version {ver}", line=1, field="version")
    (genus,) = _expect(lines, 1, "genus", 1)
    genus = _num(genus, int, 2, "genus")
    if genus < 2:
        raise ParseError("genus must be at least 2", line=2, field="genus")
    (seed,) = _expect(lines, 2, "seed", 1)
    seed = None if seed == "none" else _num(seed, int, 3, "seed")
    (law,) = _expect(lines, 3, "law", 1)
    if law == "none":
        law = None
    else:
        try:
            law = WeightLaw.parse(law)
        except ParseError as exc:
            raise ParseError(str(exc), line=4, field="law") from None
    (n_edges,) = _expect(lines, 4, "edges", 1)
    n_edges = _num(n_edges, int, 5, "edges")
    if n_edges != 3 * genus - 3:
        raise ParseError(f"genus {genus} needs {3 * genus - 3} edges", line=5, field="edges")
    if len(lines) != 5 + n_edges:
        raise ParseError(f"expected {n_edges} edge lines, found {len(lines) - 5}", line=len(lines))
    pairs, lengths, twists = [], [], []
    for i in range(5, 5 + n_edges):
        a, b, ln, tw = _expect(lines, i, "edge", 4)
        pairs.append((_num(a, int, i + 1, "half_edge_a"), _num(b, int, i + 1, "half_edge_b")))
        lengths.append(_num(ln, float, i + 1, "length"))
        twists.append(_num(tw, float, i + 1, "twist"))
    try:
        pairing = Pairing(2 * genus - 2, np.array(pairs))
        return WeightedSurfaceGraph(pairing, np.array(lengths), np.array(twists), law=law, seed=seed)
    except ValueError as exc:
        raise ParseError(f"invalid surface: {exc}", line=6) from None
