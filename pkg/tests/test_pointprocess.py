import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from rgglab.errors import InvalidInputError
from rgglab.geometry import (Annulus, Disk, Interval, ObstacleSpec, Sphere, SphericalShell, Square,
                             Torus)
from rgglab.pointprocess import (PointSet, StraussParams, nearest_neighbor_distances, sample_binomial,
                                 sample_poisson, strauss_acceptance, strauss_mcmc)
from rgglab.rng import make_rng

DOMAINS = [
    Disk(1.5), Annulus(0.5, 1.0), Sphere(1.0), SphericalShell(0.4, 1.0), Torus(2.0), Interval(3.0),
    Square(4.0, (ObstacleSpec((1.0, 1.0), 0.5), ObstacleSpec((3.0, 2.5), 0.8))),
]


def test_poisson_zero_intensity():
    assert len(sample_poisson(Disk(1.0), 0.0, 1)) == 0


def test_poisson_negative_rejected():
    with pytest.raises(InvalidInputError):
        sample_poisson(Disk(1.0), -1.0, 1)


@pytest.mark.parametrize("domain,mean", [(Disk(1.0), 10 * math.pi), (Annulus(0.5, 1.0), 10 * math.pi * 0.75)])
def test_poisson_counts(domain, mean):
    gen = make_rng(5)
    counts = np.array([len(sample_poisson(domain, 10.0, gen)) for _ in range(10_000)])
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - mean) < 3 * se
    assert 0.95 <= counts.var(ddof=1) / counts.mean() <= 1.05


@pytest.mark.parametrize("domain", DOMAINS, ids=lambda d: type(d).__name__)
def test_points_inside(domain):
    for seed in range(5):
        ps = sample_poisson(domain, 40.0, seed)
        assert domain.contains(ps.points).all()
        assert domain.contains(sample_binomial(domain, 50, seed).points).all()


@given(st.integers(0, 2**64 - 1))
def test_same_seed_same_points(seed):
    a = sample_poisson(Annulus(0.3, 1.0), 20.0, seed)
    b = sample_poisson(Annulus(0.3, 1.0), 20.0, seed)
    assert a.seed == seed
    assert np.array_equal(a.points, b.points)


def test_points_read_only():
    ps = sample_binomial(Disk(1.0), 3, 0)
    with pytest.raises(ValueError):
        ps.points[0, 0] = 5.0


def test_binomial_examples():
    assert len(sample_binomial(Disk(1.0), 0, 1)) == 0
    ps = sample_binomial(Disk(1.0), 100, 1)
    assert len(ps) == 100 and np.all(np.linalg.norm(ps.points, axis=1) <= 1.0)
    x = sample_binomial(Square(1.0), 10_000, 2).points[:, 0]
    assert abs(x.mean() - 0.5) < 3 * x.std(ddof=1) / 100


def test_csv_round_trip():
    ps = sample_poisson(SphericalShell(0.5, 1.0), 15.0, 3)
    text = ps.to_csv()
    assert text.splitlines()[0] == "x0,x1,x2"
    assert np.array_equal(PointSet.from_csv(text, ps.domain).points, ps.points)


@pytest.mark.parametrize("omega,n_new,n_old,expected", [
    (1.0, 5.0, 0.0, 1.0), (0.5, 2.0, 0.0, 0.25), (0.5, 0.0, 1.0, 1.0), (0.0, 1.0, 0.0, 0.0), (0.0, 0.0, 2.0, 1.0),
])
def test_strauss_acceptance(omega, n_new, n_old, expected):
    assert strauss_acceptance(omega, n_new, n_old) == pytest.approx(expected)


@given(st.floats(0.0, 1.0), st.floats(0, 50), st.floats(0, 50))
def test_strauss_acceptance_is_probability(omega, a, b):
    assert 0.0 <= strauss_acceptance(omega, a, b) <= 1.0


@pytest.mark.parametrize("omega", [-0.1, 1.5])
def test_strauss_rejects_omega(omega):
    with pytest.raises(InvalidInputError):
        strauss_acceptance(omega, 1.0, 0.0)
    with pytest.raises(InvalidInputError):
        StraussParams(omega, 0.07, 10)


def test_strauss_zero_steps_is_binomial():
    dom = Square(1.0)
    ps = strauss_mcmc(dom, 40, StraussParams(0.1, 0.07, 0), 9)
    assert np.array_equal(ps.points, sample_binomial(dom, 40, 9).points)


def _mean_nn(runs, make):
    vals = np.array([nearest_neighbor_distances(make(s)).mean() for s in range(runs)])
    return vals.mean(), vals.std(ddof=1) / math.sqrt(runs)


def test_strauss_repels():
    dom = Square(1.0)
    m_s, se_s = _mean_nn(8, lambda s: strauss_mcmc(dom, 250, StraussParams(0.1, 0.07, 5000), s))
    m_b, se_b = _mean_nn(8, lambda s: sample_binomial(dom, 250, 100 + s))
    assert m_s - m_b > 3 * math.hypot(se_s, se_b)


def test_strauss_free_moves_keep_uniform_spacing():
    dom = Square(1.0)
    m_s, se_s = _mean_nn(20, lambda s: strauss_mcmc(dom, 100, StraussParams(1.0, 0.07, 10_000), s))
    m_b, se_b = _mean_nn(20, lambda s: sample_binomial(dom, 100, 500 + s))
    assert abs(m_s - m_b) < 3 * math.hypot(se_s, se_b)


def test_strauss_free_moves_preserve_radial_law():
    dom = Disk(1.0)
    radii = [np.linalg.norm(strauss_mcmc(dom, 3, StraussParams(1.0, 0.1, 30), s).points[0]) for s in range(1000)]
    assert stats.kstest(radii, lambda r: np.clip(r, 0, 1) ** 2).pvalue > 0.01


@pytest.mark.parametrize("domain", [Disk(1.0), Torus(1.0), Annulus(0.3, 1.0)], ids=lambda d: type(d).__name__)
def test_strauss_stays_inside(domain):
    ps = strauss_mcmc(domain, 30, StraussParams(0.2, 0.1, 500), 4)
    assert len(ps) == 30 and domain.contains(ps.points).all()


def test_nearest_neighbor_small():
    assert nearest_neighbor_distances(PointSet(np.array([[0.1, 0.1]]), Square(1.0))).size == 0
    ps = PointSet(np.array([[0.1, 0.5], [0.9, 0.5]]), Torus(1.0))
    assert nearest_neighbor_distances(ps) == pytest.approx([0.2, 0.2])
