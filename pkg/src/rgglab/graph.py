"""Hard and Rayleigh-fading random geometric graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .errors import InvalidInputError
from .pointprocess import PointSet
from .rng import pair_uniforms, resolve_rng


@dataclass(frozen=True)
class Hard:
    """Unit-disk rule: edge iff distance < r0."""

    r0: float

    def __post_init__(self):
        if not (math.isfinite(self.r0) and self.r0 > 0.0):
            raise InvalidInputError(f"r0 must be positive, got {self.r0}")

    @property
    def cutoff(self) -> float:
        return self.r0

    def probability(self, dist):
        return np.where(np.asarray(dist) < self.r0, 1.0, 0.0)


@dataclass(frozen=True)
class Rayleigh:
    """Soft rule H(r) = exp(-beta r^eta); pairs beyond 3 r0 are dropped."""

    beta: float
    eta: float = 2.0

    def __post_init__(self):
        for name in ("beta", "eta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidInputError(f"{name} must be positive, got {v}")

    @property
    def r0(self) -> float:
        return self.beta ** (-1.0 / self.eta)

    @property
    def cutoff(self) -> float:
        return 3.0 * self.r0

    def probability(self, dist):
        return np.exp(-self.beta * np.asarray(dist, dtype=float) ** self.eta)


ConnectionModel = Hard | Rayleigh


def connection_probability(model: ConnectionModel, dist: float) -> float:
    if not dist >= 0.0:
        raise InvalidInputError(f"distance must be non-negative, got {dist}")
    return float(model.probability(dist))


@dataclass(frozen=True)
class GraphInstance:
    n: int
    edges: np.ndarray
    points: PointSet | None = None
    model: ConnectionModel | None = None
    adjacency: sparse.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if len(e):
            if np.any(e[:, 0] == e[:, 1]):
                raise InvalidInputError("self-loops are not allowed")
            if e.min() < 0 or e.max() >= self.n:
                raise InvalidInputError("edge endpoint out of range")
            e = np.unique(np.sort(e, axis=1), axis=0)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)
        data = np.ones(2 * len(e), dtype=np.int8)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        adj = sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        adj.sort_indices()
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges) -> "GraphInstance":
        return cls(int(n), np.asarray(list(edges), dtype=np.int64).reshape(-1, 2))

    @property
    def indptr(self) -> np.ndarray:
        return self.adjacency.indptr

    @property
    def indices(self) -> np.ndarray:
        return self.adjacency.indices

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges_to_csv(self) -> str:
        return "i,j\n" + "".join(f"{i},{j}\n" for i, j in self.edges)


def pairs_within(pts: np.ndarray, cutoff: float, box: np.ndarray | None = None) -> np.ndarray:
    """Index pairs i < j no further apart than ``cutoff``, in lexicographic
    order. ``box`` switches on periodic wrapping with those side lengths."""
    pts = np.asarray(pts, dtype=float)
    if len(pts) < 2:
        return np.empty((0, 2), dtype=np.int64)
    if box is not None and cutoff >= float(np.min(box)) / 2:
        pairs = np.array(np.triu_indices(len(pts), 1)).T
    elif box is not None:
        pairs = cKDTree(np.mod(pts, box), boxsize=box).query_pairs(cutoff, output_type="ndarray")
    else:
        pairs = cKDTree(pts).query_pairs(cutoff, output_type="ndarray")
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def candidate_pairs(points: PointSet, cutoff: float) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs i < j within ``cutoff`` and their (minimum-image) distances."""
    pts = np.asarray(points.points)
    dom = points.domain
    if dom.periodic:
        lo, hi = dom.bounds()
        pairs = pairs_within(pts - lo, cutoff, hi - lo)
    else:
        pairs = pairs_within(pts, cutoff)
    dist = dom.distance(pts[pairs[:, 0]], pts[pairs[:, 1]])
    return pairs, dist


def build_graph(points: PointSet, model: ConnectionModel, respect_visibility: bool = True,
                rng=None) -> GraphInstance:
    """Sample a random geometric graph on ``points``.

    Soft edges use one counter-based uniform per pair, keyed by a single draw
    from ``rng``; with the same key, raising beta can only remove edges.
    """
    pairs, dist = candidate_pairs(points, model.cutoff)
    if isinstance(model, Hard):
        keep = dist < model.r0
    else:
        if rng is None:
            raise InvalidInputError("a soft connection model needs an rng")
        gen, _ = resolve_rng(rng)
        key = int(gen.integers(0, 2**63, dtype=np.int64))
        keep = pair_uniforms(key, pairs[:, 0], pairs[:, 1]) < model.probability(dist)
    pairs = pairs[keep]
    dom = points.domain
    if respect_visibility and len(pairs) and not (dom.convex or dom.periodic):
        pts = points.points
        pairs = pairs[~dom.blocked(pts[pairs[:, 0]], pts[pairs[:, 1]])]
    return GraphInstance(len(points), pairs, points, model)


def connected_components(g: GraphInstance) -> list[list[int]]:
    if g.n == 0:
        return []
    _, labels = csgraph.connected_components(g.adjacency, directed=False)
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    comps = [c.tolist() for c in np.split(order, splits)]
    comps.sort(key=lambda c: c[0])
    return comps


def is_connected(g: GraphInstance) -> bool:
    """Graphs with at most one vertex count as connected."""
    if g.n <= 1:
        return True
    return csgraph.connected_components(g.adjacency, directed=False)[0] == 1


def isolated_count(g: GraphInstance) -> int:
    return int(np.count_nonzero(g.degrees() == 0))


def component_euclidean_diameter(g: GraphInstance, component) -> float:
    idx = np.asarray(component, dtype=np.int64)
    if idx.size == 0:
        raise InvalidInputError("component must be non-empty")
    if g.points is None:
        raise InvalidInputError("graph has no coordinates")
    pts = g.points.points[idx]
    best = 0.0
    for k in range(len(pts) - 1):
        best = max(best, float(np.max(g.points.domain.distance(pts[k], pts[k + 1:]))))
    return best
