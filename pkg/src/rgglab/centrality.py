"""Shortest-path and current-flow betweenness, geodesic counting."""

from __future__ import annotations

import io
import warnings
from collections import deque
from dataclasses import dataclass

import numba
import numpy as np
from scipy import linalg

from .errors import InvalidInputError
from .graph import GraphInstance, connected_components

MAX_FLOW_VERTICES = 2000


@dataclass(frozen=True)
class CentralityVector:
    values: np.ndarray
    normalized: bool
    kind: str
    restricted: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("vertex,value\n")
        for k, val in enumerate(self.values):
            buf.write(f"{k},{format(float(val), '.17g')}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class GeodesicCount:
    length_hops: int | None
    count: int

    @property
    def reachable(self) -> bool:
        return self.length_hops is not None


@numba.njit(cache=True)
def _brandes_csr(indptr, indices, n):
    bc = np.zeros(n)
    sigma = np.zeros(n)
    dist = np.empty(n, dtype=np.int64)
    delta = np.zeros(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for idx in range(tail - 1, 0, -1):
            w = order[idx]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            bc[w] += delta[w]
    return bc / 2.0


def brandes_betweenness(g: GraphInstance, normalized: bool = False) -> CentralityVector:
    """Shortest-path betweenness, each unordered pair counted once.

    Normalised values are divided by (n-1)(n-2)/2, the number of pairs that
    exclude the vertex itself.
    """
    n = g.n
    if n == 0:
        return CentralityVector(np.empty(0), normalized, "shortest_path")
    bc = _brandes_csr(g.indptr.astype(np.int64), g.indices.astype(np.int64), n)
    if normalized and n > 2:
        bc = bc / ((n - 1) * (n - 2) / 2)
    return CentralityVector(bc, normalized, "shortest_path")


def _check_vertex(g: GraphInstance, v) -> int:
    if int(v) != v or not 0 <= v < g.n:
        raise InvalidInputError(f"vertex {v} out of range for a graph on {g.n} vertices")
    return int(v)


def _bfs_counts(g: GraphInstance, source: int) -> tuple[list[int], list[int]]:
    dist = [-1] * g.n
    count = [0] * g.n
    dist[source] = 0
    count[source] = 1
    queue = deque([source])
    indptr, indices = g.indptr, g.indices
    while queue:
        v = queue.popleft()
        for w in indices[indptr[v]:indptr[v + 1]]:
            w = int(w)
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                count[w] += count[v]
    return dist, count


def geodesic_count(g: GraphInstance, i: int, j: int) -> GeodesicCount:
    """Hop length and exact number of shortest paths between ``i`` and ``j``."""
    i, j = _check_vertex(g, i), _check_vertex(g, j)
    if i == j:
        raise InvalidInputError("endpoints must differ")
    dist, count = _bfs_counts(g, i)
    if dist[j] < 0:
        return GeodesicCount(None, 0)
    return GeodesicCount(dist[j], count[j])


def pair_dependency(g: GraphInstance, i: int, j: int, z: int) -> float:
    """Fraction of the i-j shortest paths that pass through z."""
    i, j, z = (_check_vertex(g, v) for v in (i, j, z))
    if len({i, j, z}) < 3:
        raise InvalidInputError("i, j and z must be distinct")
    di, ci = _bfs_counts(g, i)
    if di[j] < 0 or di[z] < 0:
        return 0.0
    dz, cz = _bfs_counts(g, z)
    if di[z] + dz[j] != di[j]:
        return 0.0
    return ci[z] * cz[j] / ci[j]


def _laplacian(n: int, edges: np.ndarray) -> np.ndarray:
    lap = np.zeros((n, n))
    i, j = edges[:, 0], edges[:, 1]
    np.add.at(lap, (i, j), -1.0)
    np.add.at(lap, (j, i), -1.0)
    np.add.at(lap, (i, i), 1.0)
    np.add.at(lap, (j, j), 1.0)
    return lap


def _grounded_potentials(n: int, edges: np.ndarray) -> np.ndarray:
    """Matrix P with P[:, s] the node potentials for unit injection at s and
    extraction at the grounded vertex 0."""
    pot = np.zeros((n, n))
    if n > 1:
        lap = _laplacian(n, edges)[1:, 1:]
        pot[1:, 1:] = linalg.inv(lap, check_finite=False)
    return pot


def kirchhoff_currents(g: GraphInstance, s: int, t: int) -> np.ndarray:
    """Edge currents for 1 A injected at ``s`` and withdrawn at ``t`` through
    unit resistors; positive values flow from edges[k, 0] to edges[k, 1]."""
    s, t = _check_vertex(g, s), _check_vertex(g, t)
    if s == t:
        raise InvalidInputError("source and sink must differ")
    if g.n > MAX_FLOW_VERTICES:
        raise InvalidInputError(f"current flow is limited to {MAX_FLOW_VERTICES} vertices")
    comp = next(c for c in connected_components(g) if s in c)
    if t not in comp:
        raise InvalidInputError("source and sink lie in different components")
    idx = np.asarray(comp)
    local = -np.ones(g.n, dtype=np.int64)
    local[idx] = np.arange(len(idx))
    mask = local[g.edges[:, 0]] >= 0
    sub = local[g.edges[mask]]
    lap = _laplacian(len(idx), sub)
    rhs = np.zeros(len(idx))
    rhs[local[s]] += 1.0
    rhs[local[t]] -= 1.0
    # Ground the sink.
    keep = np.arange(len(idx)) != local[t]
    volt = np.zeros(len(idx))
    volt[keep] = linalg.solve(lap[np.ix_(keep, keep)], rhs[keep], assume_a="pos")
    currents = np.zeros(len(g.edges))
    currents[mask] = volt[sub[:, 0]] - volt[sub[:, 1]]
    return currents


def dissipated_energy(g: GraphInstance, edge_currents) -> float:
    cur = np.asarray(edge_currents, dtype=float)
    if cur.shape != (len(g.edges),):
        raise InvalidInputError("need exactly one current per edge")
    return float(np.sum(cur * cur))


def current_flow_betweenness(g: GraphInstance) -> CentralityVector:
    """Average throughput of each vertex over all source-sink pairs that
    exclude it, with unit resistors and 1 A per pair.

    Disconnected input is reduced to its largest component, with a warning;
    other vertices get zero.
    """
    n = g.n
    if n > MAX_FLOW_VERTICES:
        raise InvalidInputError(f"current flow is limited to {MAX_FLOW_VERTICES} vertices")
    values = np.zeros(n)
    if n < 3:
        return CentralityVector(values, True, "current_flow")
    comps = connected_components(g)
    restricted = len(comps) > 1
    comp = np.asarray(max(comps, key=len))
    if restricted:
        warnings.warn("graph is disconnected; current flow restricted to the largest component",
                      RuntimeWarning, stacklevel=2)
    k = len(comp)
    if k < 3:
        return CentralityVector(values, True, "current_flow", restricted)
    local = -np.ones(n, dtype=np.int64)
    local[comp] = np.arange(k)
    sub = local[g.edges[local[g.edges[:, 0]] >= 0]]
    pot = _grounded_potentials(k, sub)
    u, v = sub[:, 0], sub[:, 1]
    through = np.zeros(k)
    for s in range(k - 1):
        volt = pot[:, [s]] - pot[:, s + 1:]          # column t-s-1: pair (s, t)
        cur = np.abs(volt[u] - volt[v])
        load = np.zeros((k, cur.shape[1]))
        np.add.at(load, u, cur)
        np.add.at(load, v, cur)
        load *= 0.5
        load[s, :] = 0.0
        load[np.arange(s + 1, k), np.arange(cur.shape[1])] = 0.0
        through += load.sum(axis=1)
    values[comp] = through / ((k - 1) * (k - 2) / 2)
    return CentralityVector(values, True, "current_flow", restricted)
