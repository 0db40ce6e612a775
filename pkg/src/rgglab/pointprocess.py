"""Poisson, binomial and Strauss point processes on a Domain."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geometry import Domain
from .rng import resolve_rng

_BATCH_MIN = 64


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    domain: Domain
    seed: int | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, self.domain.dim)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(f"x{k}" for k in range(self.dim)) + "\n")
        for row in self.points:
            buf.write(",".join(format(float(v), ".17g") for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, domain: Domain) -> "PointSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        return cls(np.array(rows, dtype=float).reshape(-1, domain.dim), domain)


@dataclass(frozen=True)
class StraussParams:
    omega: float
    capital_omega: float
    steps: int
    beta_a: float = 2.0
    beta_b: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise InvalidInputError(f"omega must lie in [0, 1], got {self.omega}")
        if not self.capital_omega > 0.0:
            raise InvalidInputError(f"interaction range must be positive, got {self.capital_omega}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise InvalidInputError(f"steps must be a non-negative integer, got {self.steps}")
        if not (self.beta_a > 0.0 and self.beta_b > 0.0):
            raise InvalidInputError("Beta shape parameters must be positive")


def _uniform_in_box(domain: Domain, rng: np.random.Generator, count: int) -> np.ndarray:
    lo, hi = domain.bounds()
    return lo + (hi - lo) * rng.random((count, domain.dim))


def sample_poisson(domain: Domain, rho: float, rng) -> PointSet:
    """Poisson process of intensity ``rho``, obtained by thinning a Poisson
    process on the bounding box. Domains sharing a bounding box (disk and
    annulus of the same outer radius) therefore share points under one seed."""
    rho = float(rho)
    if not (math.isfinite(rho) and rho >= 0.0):
        raise InvalidInputError(f"rho must be a non-negative finite number, got {rho}")
    gen, seed = resolve_rng(rng)
    lo, hi = domain.bounds()
    count = gen.poisson(rho * float(np.prod(hi - lo)))
    pts = _uniform_in_box(domain, gen, count)
    return PointSet(pts[domain.contains(pts)] if count else pts, domain, seed)


def _binomial_points(domain: Domain, n: int, gen: np.random.Generator) -> np.ndarray:
    lo, hi = domain.bounds()
    accept_rate = domain.measure / float(np.prod(hi - lo))
    chunks, have = [], 0
    while have < n:
        want = max(_BATCH_MIN, int(1.2 * (n - have) / accept_rate) + 1)
        pts = _uniform_in_box(domain, gen, want)
        pts = pts[domain.contains(pts)]
        chunks.append(pts)
        have += len(pts)
    if not chunks:
        return np.empty((0, domain.dim))
    return np.concatenate(chunks)[:n]


def sample_binomial(domain: Domain, n: int, rng) -> PointSet:
    if int(n) != n or n < 0:
        raise InvalidInputError(f"n must be a non-negative integer, got {n}")
    gen, seed = resolve_rng(rng)
    return PointSet(_binomial_points(domain, int(n), gen), domain, seed)


def strauss_acceptance(omega: float, n_new: float, n_old: float) -> float:
    """min(1, omega ** (n_new - n_old)), with 0**negative read as +inf."""
    if not 0.0 <= omega <= 1.0:
        raise InvalidInputError(f"omega must lie in [0, 1], got {omega}")
    delta = n_new - n_old
    if delta <= 0.0 or omega == 1.0:
        return 1.0
    if omega == 0.0:
        return 0.0
    return math.exp(delta * math.log(omega))


def _interaction(domain: Domain, pts: np.ndarray, v: int, y: np.ndarray, reach: float) -> float:
    # Sum of reach/d over the other points within distance reach of y.
    d = domain.distance(pts, y)
    d[v] = np.inf
    close = d < reach
    if not np.any(close):
        return 0.0
    with np.errstate(divide="ignore"):
        return float(np.sum(reach / d[close]))


def strauss_mcmc(domain: Domain, n: int, params: StraussParams, rng) -> PointSet:
    """Metropolis-Hastings relaxation of ``n`` binomial points.

    Each step picks a vertex, a uniform direction and a displacement of
    Beta(a, b) times the domain diameter. Moves leaving the domain are
    rejected; otherwise the move is accepted with
    min(1, omega ** (n_new - n_old)).
    """
    gen, seed = resolve_rng(rng)
    pts = _binomial_points(domain, int(n), gen).copy()
    if n < 1:
        return PointSet(pts, domain, seed)
    span = domain.diameter
    for _ in range(params.steps):
        v = int(gen.integers(n))
        u = gen.standard_normal(domain.dim)
        u /= np.linalg.norm(u)
        y = pts[v] + gen.beta(params.beta_a, params.beta_b) * span * u
        coin = gen.random()
        if domain.periodic:
            lo, hi = domain.bounds()
            y = lo + np.mod(y - lo, hi - lo)
        elif not domain.contains(y)[0]:
            continue
        n_old = _interaction(domain, pts, v, pts[v], params.capital_omega)
        n_new = _interaction(domain, pts, v, y, params.capital_omega)
        if math.isinf(n_new) and math.isinf(n_old):
            continue
        if coin < strauss_acceptance(params.omega, n_new, n_old):
            pts[v] = y
    return PointSet(pts, domain, seed)


def nearest_neighbor_distances(ps: PointSet) -> np.ndarray:
    pts = ps.points
    if len(pts) < 2:
        return np.empty(0)
    diff = ps.domain.displacement(pts[:, None, :], pts[None, :, :])
    d = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)
