"""Monte Carlo experiments checked against the analytic predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .analytic import (GeodesicQuery, PfcDisk, continuum_betweenness, expected_geodesic_cardinality,
                       pfc_closed_form)
from .centrality import brandes_betweenness, geodesic_count
from .errors import InvalidInputError, UnsupportedError
from .geometry import Disk, Domain
from .graph import ConnectionModel, GraphInstance, build_graph, is_connected, isolated_count, pairs_within
from .pointprocess import PointSet, sample_poisson
from .rng import check_seed, make_rng
from .trials import Estimate, csv_text, run_trials

__all__ = [
    "Estimate", "ExperimentConfig", "estimate_pfc", "betweenness_profile", "geodesic_experiment",
    "sigma_distribution", "isolated_vs_disconnected",
]


@dataclass(frozen=True)
class ExperimentConfig:
    domain: Domain
    model: ConnectionModel
    rho: tuple[float, ...]
    trials: int
    master_seed: int
    respect_visibility: bool = True
    bins: int = 11
    jobs: int = 1

    def __post_init__(self):
        rho = (self.rho,) if np.isscalar(self.rho) else tuple(self.rho)
        rho = tuple(float(r) for r in rho)
        if not rho or any(not (math.isfinite(r) and r >= 0) for r in rho):
            raise InvalidInputError("densities must be non-negative and finite")
        object.__setattr__(self, "rho", rho)
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidInputError(f"trials must be a positive integer, got {self.trials}")
        if self.bins < 2:
            raise InvalidInputError("bins must be at least 2")
        check_seed(self.master_seed)


# Connectivity ------------------------------------------------------------

def _connectivity_trial(seed, domain, model, rho, visible):
    gen = make_rng(seed)
    g = build_graph(sample_poisson(domain, rho, gen), model, visible, gen)
    return is_connected(g), isolated_count(g)


def _connectivity_runs(cfg: ExperimentConfig, rho: float) -> np.ndarray:
    # The same trial seeds are used at every density (common random numbers).
    res = run_trials(_connectivity_trial, cfg.master_seed, cfg.trials, cfg.jobs,
                     (cfg.domain, cfg.model, rho, cfg.respect_visibility))
    return np.array(res, dtype=np.int64).reshape(-1, 2)


def estimate_pfc(cfg: ExperimentConfig) -> list[Estimate]:
    """Fraction of sampled graphs that are connected, one estimate per density.
    Graphs with at most one vertex count as connected."""
    return [Estimate.binomial(int(_connectivity_runs(cfg, rho)[:, 0].sum()), cfg.trials)
            for rho in cfg.rho]


@dataclass(frozen=True)
class IsolationResult:
    rho: float
    disconnected: int
    fraction: Estimate | None


def isolated_vs_disconnected(cfg: ExperimentConfig) -> list[IsolationResult]:
    """Among disconnected graphs, the fraction holding an isolated vertex.
    ``fraction`` is None when no trial disconnected."""
    out = []
    for rho in cfg.rho:
        runs = _connectivity_runs(cfg, rho)
        broken = runs[runs[:, 0] == 0]
        frac = Estimate.binomial(int(np.count_nonzero(broken[:, 1] > 0)), len(broken)) if len(broken) else None
        out.append(IsolationResult(rho, len(broken), frac))
    return out


def pfc_csv(cfg: ExperimentConfig, estimates: list[Estimate], analytic: list[float | None]) -> str:
    rows = [(rho, e.mean, e.std_error, "" if a is None else a)
            for rho, e, a in zip(cfg.rho, estimates, analytic)]
    return "rho,pfc_mc,se,pfc_analytic\n" + "".join(
        ",".join(v if isinstance(v, str) else repr(float(v)) for v in row) + "\n" for row in rows)


def disk_pfc(R: float, rho: float, beta: float) -> float:
    return pfc_closed_form(PfcDisk(R, rho, beta)).value


# Betweenness profile -----------------------------------------------------

def _profile_trial(seed, domain, model, rho, eps, halfwidth, visible):
    gen = make_rng(seed)
    base = sample_poisson(domain, rho, gen).points
    angle = gen.uniform(0.0, 2 * math.pi, size=len(eps))
    probes = domain.R * np.asarray(eps)[:, None] * np.column_stack([np.cos(angle), np.sin(angle)])
    pts = np.vstack([probes, base])
    bc = brandes_betweenness(build_graph(PointSet(pts, domain), model, visible, gen)).values
    radius = np.linalg.norm(pts, axis=1) / domain.R
    return [float(bc[np.abs(radius - e) <= halfwidth].mean()) for e in eps]


@dataclass(frozen=True)
class ProfileRow:
    eps: float
    g: Estimate
    analytic: float


def betweenness_profile(cfg: ExperimentConfig, eps_grid) -> list[ProfileRow]:
    """Radial betweenness profile on a disk, divided by its largest bin.

    Each trial inserts a probe vertex at every eps*R (random angle), then
    averages the betweenness of all vertices whose radius is within
    ``1 / (2 (bins - 1))`` of eps (in units of R). The probes keep every bin
    occupied. Standard errors use the delta method for the ratio.
    """
    if not isinstance(cfg.domain, Disk):
        raise UnsupportedError("betweenness profiles are defined on the disk")
    eps = [float(e) for e in eps_grid]
    if not eps or any(not 0.0 <= e <= 1.0 for e in eps):
        raise InvalidInputError("eps values must lie in [0, 1]")
    halfwidth = 0.5 / (cfg.bins - 1)
    raw = np.array(run_trials(_profile_trial, cfg.master_seed, cfg.trials, cfg.jobs,
                              (cfg.domain, cfg.model, cfg.rho[0], eps, halfwidth,
                               cfg.respect_visibility))).reshape(cfg.trials, len(eps))
    means = raw.mean(axis=0)
    top = int(np.argmax(means))
    m0 = means[top]
    if m0 <= 0:
        raise InvalidInputError("no vertex carried shortest paths; density too low")
    ref = raw[:, top]
    n = len(ref)
    rows = []
    for k, e in enumerate(eps):
        col = raw[:, k]
        ratio = means[k] / m0
        se = 0.0
        if n > 1 and k != top:
            cov = np.cov(col, ref)
            var = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio**2 * cov[1, 1]) / (n * m0**2)
            se = math.sqrt(max(var, 0.0))
        rows.append(ProfileRow(e, Estimate(float(ratio), se, n), continuum_betweenness(e)))
    return rows


def profile_csv(rows: list[ProfileRow]) -> str:
    return csv_text("eps,g_mc,se,g_analytic", [(r.eps, r.g.mean, r.g.std_error, r.analytic) for r in rows])


def analytic_profile_csv(eps_grid) -> str:
    return csv_text("eps,g_analytic", [(e, continuum_betweenness(e)) for e in eps_grid])


# Geodesics ---------------------------------------------------------------

def _hops(r: float) -> int:
    return math.floor(r) + 1


def _padding(r: float) -> float:
    # Wide enough for every vertex of an optimal path: |z-x| + |z-y| < k.
    k = _hops(r)
    return max(1.5, 0.5 * math.sqrt(max(k * k - r * r, 0.0)) + 0.05)


def _geodesic_trial(seed, rho, r, with_geodesic):
    gen = make_rng(seed)
    pad = _padding(r)
    lo = np.array([-1.5, -pad])
    hi = np.array([r + 1.5, pad])
    count = gen.poisson(rho * float(np.prod(hi - lo)))
    pts = np.vstack([[0.0, 0.0], [r, 0.0], lo + (hi - lo) * gen.random((count, 2))])
    pairs = pairs_within(pts, 1.0)
    d = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    pairs = pairs[d < 1.0]
    n = len(pts)
    adj = sparse.csr_matrix((np.ones(2 * len(pairs)), (np.r_[pairs[:, 0], pairs[:, 1]],
                                                        np.r_[pairs[:, 1], pairs[:, 0]])), shape=(n, n))
    # k-step walks from x to y are exactly the optimal paths: no shorter route exists.
    vec = np.zeros(n)
    vec[0] = 1.0
    for _ in range(_hops(r)):
        vec = adj @ vec
    optimal = float(vec[1])
    if not with_geodesic:
        return optimal, 0.0, 0
    gc = geodesic_count(GraphInstance(n, pairs), 0, 1)
    return optimal, float(gc.count), -1 if gc.length_hops is None else gc.length_hops


@dataclass(frozen=True)
class GeodesicRow:
    r: float
    optimal: Estimate
    analytic: float
    geodesic: Estimate | None = None
    mean_hops: float | None = None


def geodesic_experiment(d: int, rho: float, r_grid, trials: int, seed: int, jobs: int = 1,
                        with_geodesic: bool = True) -> list[GeodesicRow]:
    """Two terminals at separation r among Poisson points of density rho in
    a padded window, unit connection range. Counts optimal-hop paths (and,
    optionally, all shortest paths) between the terminals."""
    if d != 2:
        raise UnsupportedError("the geodesic experiment is planar")
    if not rho > 0:
        raise InvalidInputError("rho must be positive")
    rows = []
    for r in r_grid:
        r = float(r)
        if not (math.isfinite(r) and r >= 0):
            raise InvalidInputError(f"separation must be non-negative, got {r}")
        res = np.array(run_trials(_geodesic_trial, seed, trials, jobs, (rho, r, with_geodesic)))
        analytic = expected_geodesic_cardinality(GeodesicQuery(2, rho, r))
        if with_geodesic:
            reached = res[:, 2] > 0
            hops = float(res[reached, 2].mean()) if reached.any() else float("nan")
            rows.append(GeodesicRow(r, Estimate.from_samples(res[:, 0]), analytic,
                                    Estimate.from_samples(res[:, 1]), hops))
        else:
            rows.append(GeodesicRow(r, Estimate.from_samples(res[:, 0]), analytic))
    return rows


def geodesic_csv(rows: list[GeodesicRow], with_geodesic: bool = False) -> str:
    if with_geodesic:
        return csv_text("r,count_mc,se,count_analytic,geodesic_mc,geodesic_se,mean_hops",
                        [(r.r, r.optimal.mean, r.optimal.std_error, r.analytic, r.geodesic.mean,
                          r.geodesic.std_error, r.mean_hops) for r in rows])
    return csv_text("r,count_mc,se,count_analytic",
                    [(r.r, r.optimal.mean, r.optimal.std_error, r.analytic) for r in rows])


@dataclass(frozen=True)
class SigmaDistribution:
    counts: dict[int, int] = field(repr=False)
    trials: int
    mean: float
    variance: float

    @property
    def dispersion(self) -> float:
        return self.variance / self.mean if self.mean > 0 else float("nan")

    def pmf(self) -> list[tuple[int, float]]:
        return [(k, c / self.trials) for k, c in sorted(self.counts.items())]

    def to_csv(self) -> str:
        return "k,prob\n" + "".join(f"{k},{repr(p)}\n" for k, p in self.pmf())


def sigma_distribution(rho: float, r: float, trials: int, seed: int, jobs: int = 1) -> SigmaDistribution:
    """Empirical law of the optimal-hop path count at separation r."""
    if not r >= 0:
        raise InvalidInputError(f"separation must be non-negative, got {r}")
    if trials < 2:
        raise InvalidInputError("need at least two trials for a variance")
    res = np.array(run_trials(_geodesic_trial, seed, trials, jobs, (float(rho), float(r), False)))
    counts = np.rint(res[:, 0]).astype(np.int64)
    values, freq = np.unique(counts, return_counts=True)
    return SigmaDistribution(dict(zip(values.tolist(), freq.tolist())), trials,
                             float(counts.mean()), float(counts.var(ddof=1)))
