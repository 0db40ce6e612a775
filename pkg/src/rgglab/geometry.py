"""Domains, line-of-sight visibility, and hypersphere cap/lens measures.

Every domain is an immutable value object. Bounded domains are centred on the
origin (disk, annulus, ball, shell) or anchored at the origin corner (square,
torus, interval). Holes and obstacles are open balls removed from the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .special import reg_incomplete_beta

MAX_DIM = 10
_SEG_TOL = 1e-12
_CONTAIN_TOL = 1e-12


def as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise InvalidInputError(f"point must have finite coordinates, got {x!r}")
    if dim is not None and p.size != dim:
        raise InvalidInputError(f"expected a {dim}-d point, got {p.size} coordinates")
    return p


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise InvalidInputError(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True)
class ObstacleSpec:
    """Circular (or spherical) obstacle: an open ball cut out of the domain."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in as_point(self.center)))
        object.__setattr__(self, "radius", _positive("obstacle radius", self.radius))


class Domain:
    """Common interface; concrete variants below fill in the geometry."""

    dim: int = 2
    convex: bool = True
    periodic: bool = False

    @property
    def measure(self) -> float:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def holes(self) -> list[tuple[np.ndarray, float]]:
        """Excluded open balls as ``(center, radius)`` pairs."""
        return []

    def _outer_contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = self._outer_contains(pts)
        for c, a in self.holes():
            inside &= np.sum((pts - c) ** 2, axis=1) >= a * a * (1.0 - _CONTAIN_TOL)
        return inside

    def displacement(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.asarray(b, dtype=float) - np.asarray(a, dtype=float)

    def distance(self, a, b) -> np.ndarray:
        return np.linalg.norm(self.displacement(a, b), axis=-1)

    def blocked(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Vectorised line-of-sight test for point arrays of shape (m, d)."""
        x = np.atleast_2d(x)
        y = np.atleast_2d(y)
        out = np.zeros(len(x), dtype=bool)
        for c, a in self.holes():
            out |= _segment_hits_ball(x, y, c, a)
        return out

    def ray_extent(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Distance from ``x`` along unit directions ``u`` (shape (m, d)) to the
        first point where the ray leaves the domain or meets a hole."""
        t = self.outer_exit(x, u)
        for c, a in self.holes():
            t = np.minimum(t, _ray_ball_entry(x, u, c, a))
        return t

    def outer_exit(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _segment_hits_ball(x: np.ndarray, y: np.ndarray, c: np.ndarray, a: float) -> np.ndarray:
    # Roots of |x + t(y - x) - c|^2 = a^2; blocked when the chord (t1, t2)
    # overlaps (0, 1) by more than the tolerance. Tangency is visible.
    d = y - x
    f = x - c
    qa = np.einsum("ij,ij->i", d, d)
    qb = 2.0 * np.einsum("ij,ij->i", f, d)
    qc = np.einsum("ij,ij->i", f, f) - a * a
    disc = qb * qb - 4.0 * qa * qc
    hit = np.zeros(len(x), dtype=bool)
    ok = (disc > 0.0) & (qa > 0.0)
    if np.any(ok):
        sq = np.sqrt(disc[ok])
        t1 = (-qb[ok] - sq) / (2.0 * qa[ok])
        t2 = (-qb[ok] + sq) / (2.0 * qa[ok])
        hit[ok] = np.maximum(t1, 0.0) < np.minimum(t2, 1.0) - _SEG_TOL
    return hit


def _ray_ball_entry(x: np.ndarray, u: np.ndarray, c: np.ndarray, a: float) -> np.ndarray:
    f = x - c
    b = u @ f
    disc = b * b - (f @ f - a * a)
    t = np.full(len(u), np.inf)
    ok = disc > 0.0
    t_in = -b[ok] - np.sqrt(disc[ok])
    t[ok] = np.where(t_in >= 0.0, t_in, np.inf)
    return t


def _sphere_exit(x: np.ndarray, u: np.ndarray, radius: float) -> np.ndarray:
    b = u @ x
    disc = b * b - (x @ x - radius * radius)
    return -b + np.sqrt(np.maximum(disc, 0.0))


def _box_exit(x: np.ndarray, u: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t_hi = np.where(u > 0, (hi - x) / u, np.inf)
        t_lo = np.where(u < 0, (lo - x) / u, np.inf)
    return np.min(np.minimum(t_hi, t_lo), axis=1)


@dataclass(frozen=True)
class Disk(Domain):
    R: float
    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "R", _positive("R", self.R))

    @property
    def measure(self):
        return math.pi * self.R**2

    @property
    def diameter(self):
        return 2.0 * self.R

    def bounds(self):
        return np.full(2, -self.R), np.full(2, self.R)

    def _outer_contains(self, pts):
        return np.sum(pts**2, axis=1) <= self.R**2 * (1.0 + _CONTAIN_TOL)

    def outer_exit(self, x, u):
        return _sphere_exit(x, u, self.R)


@dataclass(frozen=True)
class Annulus(Domain):
    r: float
    R: float
    dim = 2
    convex = False

    def __post_init__(self):
        object.__setattr__(self, "r", _positive("r", self.r))
        object.__setattr__(self, "R", _positive("R", self.R))
        if not self.r < self.R:
            raise InvalidInputError(f"annulus needs r < R, got r={self.r}, R={self.R}")

    @property
    def measure(self):
        return math.pi * (self.R**2 - self.r**2)

    @property
    def diameter(self):
        return 2.0 * self.R

    def bounds(self):
        return np.full(2, -self.R), np.full(2, self.R)

    def holes(self):
        return [(np.zeros(2), self.r)]

    def _outer_contains(self, pts):
        return np.sum(pts**2, axis=1) <= self.R**2 * (1.0 + _CONTAIN_TOL)

    def outer_exit(self, x, u):
        return _sphere_exit(x, u, self.R)


@dataclass(frozen=True)
class Square(Domain):
    """The square [0, L]^2, optionally with disjoint circular obstacles."""

    L: float
    obstacles: tuple[ObstacleSpec, ...] = field(default=())
    dim = 2

    def __post_init__(self):
        L = _positive("L", self.L)
        object.__setattr__(self, "L", L)
        obs = tuple(o if isinstance(o, ObstacleSpec) else ObstacleSpec(*o) for o in self.obstacles)
        object.__setattr__(self, "obstacles", obs)
        for o in obs:
            c = np.asarray(o.center)
            if c.size != 2:
                raise InvalidInputError("square obstacles must have 2-d centres")
            if o.radius >= L / 2:
                raise InvalidInputError(f"obstacle radius {o.radius} must be below L/2")
            if np.any(c - o.radius <= 0.0) or np.any(c + o.radius >= L):
                raise InvalidInputError(f"obstacle at {o.center} is not strictly inside the square")
        for i in range(len(obs)):
            for j in range(i + 1, len(obs)):
                gap = np.linalg.norm(np.subtract(obs[i].center, obs[j].center))
                if gap <= obs[i].radius + obs[j].radius:
                    raise InvalidInputError(f"obstacles {i} and {j} overlap")
        blocked = sum(math.pi * o.radius**2 for o in obs)
        if blocked > 0.9 * L * L:
            raise InvalidInputError("obstacles cover more than 90% of the square")

    @property
    def convex(self):
        return not self.obstacles

    @property
    def measure(self):
        return self.L**2 - sum(math.pi * o.radius**2 for o in self.obstacles)

    @property
    def diameter(self):
        return self.L * math.sqrt(2.0)

    def bounds(self):
        return np.zeros(2), np.full(2, self.L)

    def holes(self):
        return [(np.asarray(o.center), o.radius) for o in self.obstacles]

    def _outer_contains(self, pts):
        eps = _CONTAIN_TOL * self.L
        return np.all((pts >= -eps) & (pts <= self.L + eps), axis=1)

    def outer_exit(self, x, u):
        lo, hi = self.bounds()
        return _box_exit(x, u, lo, hi)


@dataclass(frozen=True)
class Sphere(Domain):
    """Solid ball of radius R in three dimensions."""

    R: float
    dim = 3

    def __post_init__(self):
        object.__setattr__(self, "R", _positive("R", self.R))

    @property
    def measure(self):
        return 4.0 / 3.0 * math.pi * self.R**3

    @property
    def diameter(self):
        return 2.0 * self.R

    def bounds(self):
        return np.full(3, -self.R), np.full(3, self.R)

    def _outer_contains(self, pts):
        return np.sum(pts**2, axis=1) <= self.R**2 * (1.0 + _CONTAIN_TOL)

    def outer_exit(self, x, u):
        return _sphere_exit(x, u, self.R)


@dataclass(frozen=True)
class SphericalShell(Domain):
    r: float
    R: float
    dim = 3
    convex = False

    def __post_init__(self):
        object.__setattr__(self, "r", _positive("r", self.r))
        object.__setattr__(self, "R", _positive("R", self.R))
        if not self.r < self.R:
            raise InvalidInputError(f"shell needs r < R, got r={self.r}, R={self.R}")

    @property
    def measure(self):
        return 4.0 / 3.0 * math.pi * (self.R**3 - self.r**3)

    @property
    def diameter(self):
        return 2.0 * self.R

    def bounds(self):
        return np.full(3, -self.R), np.full(3, self.R)

    def holes(self):
        return [(np.zeros(3), self.r)]

    def _outer_contains(self, pts):
        return np.sum(pts**2, axis=1) <= self.R**2 * (1.0 + _CONTAIN_TOL)

    def outer_exit(self, x, u):
        return _sphere_exit(x, u, self.R)


@dataclass(frozen=True)
class Torus(Domain):
    """Flat torus [0, L)^2 with minimum-image distances; no boundary."""

    L: float
    dim = 2
    periodic = True

    def __post_init__(self):
        object.__setattr__(self, "L", _positive("L", self.L))

    @property
    def measure(self):
        return self.L**2

    @property
    def diameter(self):
        return self.L / math.sqrt(2.0)

    def bounds(self):
        return np.zeros(2), np.full(2, self.L)

    def _outer_contains(self, pts):
        eps = _CONTAIN_TOL * self.L
        return np.all((pts >= -eps) & (pts <= self.L + eps), axis=1)

    def displacement(self, a, b):
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        return d - self.L * np.round(d / self.L)

    def outer_exit(self, x, u):
        # Integration cell for minimum-image masses: the box of side L centred on x.
        half = np.full(2, self.L / 2)
        return _box_exit(np.zeros(2), u, -half, half)


@dataclass(frozen=True)
class Interval(Domain):
    L: float
    dim = 1

    def __post_init__(self):
        object.__setattr__(self, "L", _positive("L", self.L))

    @property
    def measure(self):
        return self.L

    @property
    def diameter(self):
        return self.L

    def bounds(self):
        return np.zeros(1), np.full(1, self.L)

    def _outer_contains(self, pts):
        eps = _CONTAIN_TOL * self.L
        return (pts[:, 0] >= -eps) & (pts[:, 0] <= self.L + eps)

    def outer_exit(self, x, u):
        lo, hi = self.bounds()
        return _box_exit(x, u, lo, hi)


def visibility(domain: Domain, x, y) -> bool:
    """True iff the closed segment from ``x`` to ``y`` stays inside ``domain``."""
    x = as_point(x, domain.dim)
    y = as_point(y, domain.dim)
    if not domain.contains(np.vstack([x, y])).all():
        raise InvalidInputError("both endpoints must lie inside the domain")
    if domain.convex or domain.periodic:
        return True
    return not bool(domain.blocked(x[None, :], y[None, :])[0])


def _check_dim(d: int, lowest: int) -> int:
    if int(d) != d or not lowest <= d <= MAX_DIM:
        raise InvalidInputError(f"dimension must be an integer in [{lowest}, {MAX_DIM}], got {d}")
    return int(d)


def ball_volume(d: int, radius: float = 1.0) -> float:
    d = _check_dim(d, 1)
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius**d


def sphere_surface(d: int, radius: float = 1.0) -> float:
    """(d-1)-dimensional measure of the sphere bounding a d-ball."""
    d = _check_dim(d, 1)
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2) * radius ** (d - 1)


def intersection_volume(d: int, s: float) -> float:
    """Volume of the intersection of two unit d-balls whose centres are ``s`` apart.

    Two symmetric caps of height 1 - s/2, each half a ball times
    I_{1 - s^2/4}((d+1)/2, 1/2).
    """
    d = _check_dim(d, 1)
    s = float(s)
    if not (math.isfinite(s) and s >= 0.0):
        raise InvalidInputError(f"separation must be non-negative, got {s}")
    if s >= 2.0:
        return 0.0
    return ball_volume(d) * reg_incomplete_beta(1.0 - s * s / 4.0, (d + 1) / 2, 0.5)


def cap_area(d: int, radius: float, phi: float) -> float:
    """Surface measure of the cap of colatitude ``phi`` on a d-ball's sphere."""
    d = _check_dim(d, 2)
    radius = _positive("radius", radius)
    phi = float(phi)
    if not (0.0 <= phi <= math.pi):
        raise InvalidInputError(f"colatitude must lie in [0, pi], got {phi}")
    full = sphere_surface(d, radius)
    if phi > math.pi / 2:
        return full - cap_area(d, radius, math.pi - phi)
    return 0.5 * full * reg_incomplete_beta(math.sin(phi) ** 2, (d - 1) / 2, 0.5)


def hyperbolic_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """arccosh(cosh y1 cosh(x2 - x1) cosh y2 - sinh y1 sinh y2).

    Evaluated through the identity
    arg - 1 = 2 sinh^2((y1 - y2)/2) + 2 cosh y1 cosh y2 sinh^2((x2 - x1)/2)
    so that coincident points give exactly zero.
    """
    x1, y1 = as_point(p, 2)
    x2, y2 = as_point(q, 2)
    z = 2.0 * math.sinh((y1 - y2) / 2) ** 2 + 2.0 * math.cosh(y1) * math.cosh(y2) * math.sinh((x2 - x1) / 2) ** 2
    return math.log1p(z + math.sqrt(z * (z + 2.0)))
