"""Bond percolation on the L x L square lattice."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .rng import resolve_rng
from .trials import Estimate, csv_text, run_trials


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.merges = 0

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> int:
        """Merge the sets of a and b and return the surviving root."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.merges += 1
        return ra


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"p must lie in [0, 1], got {p}")
    return p


def _check_side(L: int) -> int:
    if int(L) != L or L < 2:
        raise InvalidInputError(f"lattice side must be an integer >= 2, got {L}")
    return int(L)


@dataclass(frozen=True)
class LatticeConfig:
    """Bond uniforms for an L x L lattice; a bond is open when its uniform is
    below p. ``horizontal[r, c]`` joins (r, c)-(r, c+1); ``vertical[r, c]``
    joins (r, c)-(r+1, c)."""

    L: int
    p: float
    horizontal: np.ndarray
    vertical: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.horizontal.shape != (self.L, self.L - 1) or self.vertical.shape != (self.L - 1, self.L):
            raise InvalidInputError("bond arrays do not match the lattice side")

    @property
    def open_horizontal(self) -> np.ndarray:
        return self.horizontal < self.p

    @property
    def open_vertical(self) -> np.ndarray:
        return self.vertical < self.p

    def open_count(self) -> int:
        return int(self.open_horizontal.sum() + self.open_vertical.sum())

    def at(self, p: float) -> "LatticeConfig":
        """Same bonds, new threshold: open sets grow with p."""
        return LatticeConfig(self.L, _check_p(p), self.horizontal, self.vertical, self.seed)


def sample_bonds(L: int, p: float, rng) -> LatticeConfig:
    L = _check_side(L)
    p = _check_p(p)
    gen, seed = resolve_rng(rng)
    horizontal = gen.random((L, L - 1))
    vertical = gen.random((L - 1, L))
    return LatticeConfig(L, p, horizontal, vertical, seed)


@dataclass(frozen=True)
class ClusterStats:
    sizes: tuple[int, ...]
    largest: int
    spanning: bool
    center_size: int
    center_touches_boundary: bool


def _bond_list(L: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(L * L).reshape(L, L)
    a = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    b = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return a, b


def _boundary_mask(L: int) -> np.ndarray:
    edge = np.zeros((L, L), dtype=bool)
    edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
    return edge.ravel()


def cluster_stats(c: LatticeConfig) -> ClusterStats:
    L = c.L
    uf = UnionFind(L * L)
    a, b = _bond_list(L)
    open_ = np.concatenate([c.open_horizontal.ravel(), c.open_vertical.ravel()])
    for u, v in zip(a[open_].tolist(), b[open_].tolist()):
        uf.union(u, v)
    roots = np.array([uf.find(k) for k in range(L * L)])
    _, sizes = np.unique(roots, return_counts=True)
    grid = roots.reshape(L, L)
    spanning = bool(np.intersect1d(grid[:, 0], grid[:, -1]).size)
    center = roots[(L // 2) * L + L // 2]
    touches = bool(np.any(roots[_boundary_mask(L)] == center))
    return ClusterStats(tuple(sorted(sizes.tolist(), reverse=True)), int(sizes.max()), spanning,
                        int(uf.size[center]), touches)


def pc_lower_bound(d: int) -> float:
    """Lower bound 1/(2d - 1) on the bond percolation threshold of Z^d."""
    if int(d) != d or d < 2:
        raise InvalidInputError(f"d must be an integer >= 2, got {d}")
    return 1.0 / (2 * d - 1)


def _sweep_trial(seed: int, L: int, p_grid: tuple[float, ...]) -> np.ndarray:
    """Newman-Ziff style: add bonds in order of their uniforms and read the
    observables off at each grid threshold. Columns: center reaches the
    boundary, center cluster size, largest fraction, spanning."""
    gen, _ = resolve_rng(seed)
    n = L * L
    a, b = _bond_list(L)
    u = np.concatenate([gen.random((L, L - 1)).ravel(), gen.random((L - 1, L)).ravel()])
    order = np.argsort(u, kind="stable")
    u_sorted = u[order].tolist()
    a_sorted, b_sorted = a[order].tolist(), b[order].tolist()

    uf = UnionFind(n)
    boundary = _boundary_mask(L).tolist()
    left = [k % L == 0 for k in range(n)]
    right = [k % L == L - 1 for k in range(n)]
    center = (L // 2) * L + L // 2
    largest = 1
    spanning = False
    out = np.zeros((len(p_grid), 4))
    k = 0
    for row, p in enumerate(p_grid):
        while k < len(u_sorted) and u_sorted[k] < p:
            ra, rb = uf.find(a_sorted[k]), uf.find(b_sorted[k])
            if ra != rb:
                r = uf.union(ra, rb)
                boundary[r] = boundary[ra] or boundary[rb]
                left[r] = left[ra] or left[rb]
                right[r] = right[ra] or right[rb]
                largest = max(largest, uf.size[r])
                spanning = spanning or (left[r] and right[r])
            k += 1
        rc = uf.find(center)
        out[row] = (boundary[rc], uf.size[rc], largest / n, spanning)
    return out


@dataclass(frozen=True)
class SweepRow:
    p: float
    theta_hat: Estimate
    mean_cluster: Estimate
    largest_fraction: float
    spanning_prob: Estimate


def sweep(L: int, p_grid, trials: int, seed: int, jobs: int = 1) -> list[SweepRow]:
    """Coupled sweep: every trial reuses one set of bond uniforms across
    the whole p grid."""
    L = _check_side(L)
    grid = tuple(_check_p(p) for p in p_grid)
    if list(grid) != sorted(grid):
        raise InvalidInputError("p grid must be non-decreasing")
    res = np.stack(run_trials(_sweep_trial, seed, trials, jobs, (L, grid)))
    rows = []
    for i, p in enumerate(grid):
        col = res[:, i, :]
        rows.append(SweepRow(
            p,
            Estimate.binomial(int(col[:, 0].sum()), trials),
            Estimate.from_samples(col[:, 1]),
            float(col[:, 2].mean()),
            Estimate.binomial(int(col[:, 3].sum()), trials),
        ))
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    return csv_text(
        "p,theta_hat,se,mean_cluster,largest_fraction,spanning_prob",
        [(r.p, r.theta_hat.mean, r.theta_hat.std_error, r.mean_cluster.mean,
          r.largest_fraction, r.spanning_prob.mean) for r in rows],
    )


def theta_hat(L: int, p: float, trials: int, rng) -> Estimate:
    """Fraction of trials in which the centre's cluster reaches the boundary."""
    rows = _observe(L, p, trials, rng)
    return Estimate.binomial(int(rows[:, 0].sum()), len(rows))


def mean_cluster_size(L: int, p: float, trials: int, rng) -> Estimate:
    """Average size of the centre vertex's cluster."""
    rows = _observe(L, p, trials, rng)
    return Estimate.from_samples(rows[:, 1])


def _observe(L, p, trials, rng) -> np.ndarray:
    L = _check_side(L)
    p = _check_p(p)
    if int(trials) != trials or trials < 1:
        raise InvalidInputError(f"trials must be a positive integer, got {trials}")
    gen, _ = resolve_rng(rng)
    seeds = gen.integers(0, 2**63, size=int(trials))
    return np.stack([_sweep_trial(int(s), L, (p,))[0] for s in seeds])
