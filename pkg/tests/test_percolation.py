import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rgglab.errors import InvalidInputError
from rgglab.percolation import (UnionFind, _sweep_trial, cluster_stats, mean_cluster_size, pc_lower_bound,
                                sample_bonds, sweep, sweep_csv, theta_hat)


def lattice_graph(c):
    g = nx.Graph()
    L = c.L
    g.add_nodes_from(range(L * L))
    for r, col in zip(*np.nonzero(c.open_horizontal)):
        g.add_edge(r * L + col, r * L + col + 1)
    for r, col in zip(*np.nonzero(c.open_vertical)):
        g.add_edge(r * L + col, (r + 1) * L + col)
    return g


def test_union_find():
    uf = UnionFind(5)
    uf.union(0, 1)
    uf.union(3, 4)
    root = uf.union(1, 4)
    assert uf.find(0) == uf.find(3) == root
    assert uf.find(2) == 2 and uf.merges == 3
    assert uf.union(0, 4) == root and uf.merges == 3


def test_bond_extremes():
    assert sample_bonds(10, 0.0, 1).open_count() == 0
    assert sample_bonds(10, 1.0, 1).open_count() == 2 * 10 * 9


def test_open_fraction():
    c = sample_bonds(50, 0.5, 2)
    n = 2 * 50 * 49
    assert abs(c.open_count() / n - 0.5) < 3 * math.sqrt(0.25 / n)


def test_cluster_extremes():
    full = cluster_stats(sample_bonds(8, 1.0, 0))
    assert full.sizes == (64,) and full.spanning and full.center_touches_boundary
    empty = cluster_stats(sample_bonds(8, 0.0, 0))
    assert empty.sizes == (1,) * 64 and not empty.spanning and empty.largest == 1


@given(st.integers(2, 12), st.floats(0.0, 1.0), st.integers(0, 2**32))
def test_clusters_match_networkx(L, p, seed):
    c = sample_bonds(L, p, seed)
    st_ = cluster_stats(c)
    comps = sorted((len(x) for x in nx.connected_components(lattice_graph(c))), reverse=True)
    assert list(st_.sizes) == comps
    assert sum(st_.sizes) == L * L


@given(st.integers(3, 12), st.integers(0, 2**32), st.lists(st.floats(0, 1), min_size=1, max_size=5))
def test_sweep_trial_matches_direct_stats(L, seed, grid):
    grid = tuple(sorted(grid))
    rows = _sweep_trial(seed, L, grid)
    for p, row in zip(grid, rows):
        st_ = cluster_stats(sample_bonds(L, p, seed))
        assert row[0] == st_.center_touches_boundary
        assert row[1] == st_.center_size
        assert row[2] == st_.largest / (L * L)
        assert row[3] == st_.spanning


def test_coupling_is_monotone():
    c = sample_bonds(20, 0.3, 5)
    lo, hi = c.open_horizontal, c.at(0.6).open_horizontal
    assert np.all(hi[lo])


def test_pc_lower_bound():
    assert pc_lower_bound(2) == 1 / 3
    assert pc_lower_bound(3) == 1 / 5
    assert pc_lower_bound(2) < 0.5
    with pytest.raises(InvalidInputError):
        pc_lower_bound(1)


def test_theta_and_cluster_extremes():
    assert theta_hat(9, 0.0, 20, 1).mean == 0.0
    assert theta_hat(9, 1.0, 20, 1).mean == 1.0
    assert mean_cluster_size(9, 0.0, 20, 1).mean == 1.0
    assert mean_cluster_size(9, 1.0, 20, 1).mean == 81.0


def test_sweep_monotone_and_ordered():
    rows = sweep(50, [0.3, 0.4, 0.5, 0.6, 0.7, 0.8], 200, 9)
    theta = [r.theta_hat.mean for r in rows]
    clusters = [r.mean_cluster.mean for r in rows]
    spans = [r.spanning_prob.mean for r in rows]
    for seq in (theta, clusters, spans):
        assert all(a <= b for a, b in zip(seq, seq[1:]))
    assert theta[3] > theta[1]
    text = sweep_csv(rows)
    assert text.splitlines()[0] == "p,theta_hat,se,mean_cluster,largest_fraction,spanning_prob"
    assert len(text.splitlines()) == 7


def test_sweep_rejects():
    with pytest.raises(InvalidInputError):
        sweep(10, [0.5, 0.2], 5, 1)
    with pytest.raises(InvalidInputError):
        sweep(10, [1.5], 5, 1)
    with pytest.raises(InvalidInputError):
        sample_bonds(1, 0.5, 1)
