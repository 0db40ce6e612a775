"""Closed-form and quadrature predictions for random geometric graphs.

Connectivity masses and full-connection probabilities for Rayleigh fading,
the continuum betweenness law, expected geodesic counts and their recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from .errors import ConvergenceError, InvalidInputError, NotOverdispersedError, RegimeError, UnsupportedError
from .geometry import (Annulus, Disk, Domain, Interval, Sphere, SphericalShell, Square, Torus,
                       as_point, intersection_volume)
from .graph import ConnectionModel, Hard
from .special import elliptic_e

_QUAD_EPSREL = 1e-10
_QUAD_EPSABS = 1e-14


def elliptic_E(k: float) -> float:
    return elliptic_e(k)


def continuum_betweenness(eps: float) -> float:
    """Max-normalised betweenness at distance ``eps`` (in units of R) from
    the centre of a disk: (2/pi)(1 - eps^2) E(eps)."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise InvalidInputError(f"eps must lie in [0, 1], got {eps}")
    return 2.0 / math.pi * (1.0 - eps * eps) * elliptic_e(eps)


# Connectivity mass -------------------------------------------------------

def _radial_mass(model: ConnectionModel, dim: int):
    """Return G with G(t) = integral over [0, t] of H(s) s^(dim-1) ds."""
    if isinstance(model, Hard):
        r0 = model.r0
        return lambda t: np.minimum(t, r0) ** dim / dim
    a = dim / model.eta
    scale = gamma_fn(a) / (model.eta * model.beta**a)
    return lambda t: scale * gammainc(a, model.beta * np.asarray(t, dtype=float) ** model.eta)


def _planar_breakpoints(domain: Domain, x: np.ndarray) -> list[float]:
    cuts = []
    for c, a in domain.holes():
        v = c - x
        dist = math.hypot(*v)
        alpha = math.atan2(v[1], v[0])
        half = math.pi / 2 if dist <= a else math.asin(a / dist)
        cuts += [alpha - half, alpha + half]
    if isinstance(domain, (Square, Torus)):
        lo, hi = domain.bounds()
        if isinstance(domain, Torus):
            lo, hi = x - domain.L / 2, x + domain.L / 2
        for cx in (lo[0], hi[0]):
            for cy in (lo[1], hi[1]):
                cuts.append(math.atan2(cy - x[1], cx - x[0]))
    return sorted({c % (2 * math.pi) for c in cuts} | {0.0, 2 * math.pi})


def _ray_integral(domain: Domain, x: np.ndarray, u: np.ndarray, radial, visible: bool) -> float:
    if visible:
        return float(radial(domain.ray_extent(x, u))[0])
    # Everything in the domain counts, shadowed or not: drop only the chords
    # through holes.
    far = float(domain.outer_exit(x, u)[0])
    total = float(radial(far))
    for c, a in domain.holes():
        f = x - c
        b = float(u[0] @ f)
        disc = b * b - (f @ f - a * a)
        if disc > 0:
            t1 = max(-b - math.sqrt(disc), 0.0)
            t2 = min(-b + math.sqrt(disc), far)
            if t2 > t1:
                total -= float(radial(t2) - radial(t1))
    return total


def _mass(domain: Domain, x: np.ndarray, radial, visible: bool = True) -> float:
    if domain.dim == 1:
        return float(radial(x[0]) + radial(domain.L - x[0]))
    if domain.dim == 2:
        def integrand(theta):
            u = np.array([[math.cos(theta), math.sin(theta)]])
            return _ray_integral(domain, x, u, radial, visible)

        cuts = _planar_breakpoints(domain, x)
        return sum(
            integrate.quad(integrand, a, b, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)[0]
            for a, b in zip(cuts[:-1], cuts[1:]) if b > a
        )
    if not isinstance(domain, (Sphere, SphericalShell)):
        raise UnsupportedError(f"no mass integrator for {type(domain).__name__}")
    # Axial symmetry: put x on the z axis, integrate over the polar angle.
    z = float(np.linalg.norm(x))
    axis_pt = np.array([0.0, 0.0, z])

    def integrand(theta):
        u = np.array([[math.sin(theta), 0.0, math.cos(theta)]])
        return _ray_integral(domain, axis_pt, u, radial, visible) * math.sin(theta)

    cuts = [0.0, math.pi]
    if isinstance(domain, SphericalShell) and z > 0:
        cuts.insert(1, math.pi - math.asin(min(1.0, domain.r / z)))
    total = sum(
        integrate.quad(integrand, a, b, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)[0]
        for a, b in zip(cuts[:-1], cuts[1:])
    )
    return 2.0 * math.pi * total


def _check_inside(domain: Domain, x) -> np.ndarray:
    p = as_point(x, domain.dim)
    if not domain.contains(p)[0]:
        raise InvalidInputError(f"point {p.tolist()} lies outside the domain")
    return p


def connectivity_mass(domain: Domain, model: ConnectionModel, x, respect_visibility: bool = True) -> float:
    """Integral of H(|x - y|) over the part of the domain visible from ``x``.

    With ``respect_visibility=False`` the integral runs over the whole domain,
    including points hidden behind holes.
    """
    if isinstance(model, Hard):
        raise UnsupportedError("use visible_ball_volume for the hard model")
    p = _check_inside(domain, x)
    return _mass(domain, p, _radial_mass(model, domain.dim), respect_visibility)


def visible_ball_volume(domain: Domain, r0: float, x) -> float:
    """Measure of the visible part of the ball of radius ``r0`` around ``x``."""
    p = _check_inside(domain, x)
    return _mass(domain, p, _radial_mass(Hard(r0), domain.dim))


def expected_isolated(domain: Domain, model: ConnectionModel, rho: float,
                      respect_visibility: bool = True) -> float:
    """rho times the integral of exp(-rho M(x)) over the domain."""
    rho = float(rho)
    if not (math.isfinite(rho) and rho >= 0.0):
        raise InvalidInputError(f"rho must be non-negative, got {rho}")
    if rho == 0.0:
        return 0.0
    radial = _radial_mass(model, domain.dim)
    scale = model.r0

    def along_axis(eps):
        x = np.zeros(domain.dim)
        x[-1] = eps
        return math.exp(-rho * _mass(domain, x, radial, respect_visibility))

    if isinstance(domain, Torus):
        return rho * domain.measure * math.exp(-rho * _mass(domain, np.full(2, domain.L / 2), radial))
    if isinstance(domain, (Disk, Annulus, Sphere, SphericalShell)):
        inner = getattr(domain, "r", 0.0)
        shell = 2.0 * math.pi if domain.dim == 2 else 4.0 * math.pi
        power = domain.dim - 1
        marks = [m for k in range(1, 8)
                 for m in (domain.R - k * scale, inner + k * scale) if inner < m < domain.R]
        val, _ = integrate.quad(lambda e: along_axis(e) * e**power, inner, domain.R,
                                points=sorted(set(marks)) or None, epsabs=_QUAD_EPSABS,
                                epsrel=1e-8, limit=400)
        return rho * shell * val
    if isinstance(domain, Interval):
        val, _ = integrate.quad(lambda s: math.exp(-rho * _mass(domain, np.array([s]), radial)),
                                0.0, domain.L, epsrel=1e-8, limit=400)
        return rho * val
    if isinstance(domain, Square):
        holes = domain.holes()

        def integrand(y, x):
            p = np.array([x, y])
            if any(np.sum((p - c) ** 2) < a * a for c, a in holes):
                return 0.0
            return math.exp(-rho * _mass(domain, p, radial, respect_visibility))

        val, _ = integrate.dblquad(integrand, 0.0, domain.L, 0.0, domain.L, epsabs=1e-10, epsrel=1e-6)
        return rho * val
    raise UnsupportedError(f"no isolation integrator for {type(domain).__name__}")


# Full-connection probability closed forms -------------------------------

@dataclass(frozen=True)
class PfcDisk:
    R: float
    rho: float
    beta: float


@dataclass(frozen=True)
class PfcAnnulusSmall:
    r: float
    R: float
    rho: float
    beta: float


@dataclass(frozen=True)
class PfcAnnulusLarge:
    r: float
    R: float
    rho: float
    beta: float


@dataclass(frozen=True)
class PfcAnnulusLargeLimit:
    r: float
    R: float
    rho: float
    beta: float


@dataclass(frozen=True)
class PfcShell:
    r: float
    R: float
    rho: float
    beta: float
    regime: str = "large"


@dataclass(frozen=True)
class PfcSquareObstacles:
    L: float
    radii: tuple[float, ...]
    rho: float
    beta: float
    centers: tuple[tuple[float, float], ...] | None = None


PfcDomainSpec = (PfcDisk | PfcAnnulusSmall | PfcAnnulusLarge | PfcAnnulusLargeLimit
                 | PfcShell | PfcSquareObstacles)


@dataclass(frozen=True)
class PfcResult:
    value: float
    raw: float
    clamped: bool


def _positive(name, v):
    if not (math.isfinite(v) and v > 0.0):
        raise InvalidInputError(f"{name} must be positive, got {v}")


def _disk_terms(R, rho, beta):
    bulk = math.pi * R * R * rho * math.exp(-rho * math.pi / beta)
    edge = 2 * math.pi * R * math.sqrt(beta / math.pi) * math.exp(
        -rho / beta * (math.pi / 2 - math.sqrt(math.pi) / (4 * R * math.sqrt(beta))))
    return bulk, edge


def _check_annular(spec, r0):
    _positive("r", spec.r)
    _positive("R", spec.R)
    if not spec.r < spec.R:
        raise InvalidInputError(f"need r < R, got r={spec.r}, R={spec.R}")


def _small(spec, r0):
    if not spec.r < r0 / 3:
        raise RegimeError(f"small-obstacle formula needs r < r0/3 = {r0 / 3:.6g}, got r={spec.r}")


def _large(spec, r0):
    if not spec.r > 3 * r0:
        raise RegimeError(f"large-obstacle formula needs r > 3 r0 = {3 * r0:.6g}, got r={spec.r}")


def _pfc_raw(spec) -> float:
    rho, beta = float(spec.rho), float(spec.beta)
    _positive("rho", rho)
    _positive("beta", beta)
    r0 = beta**-0.5
    if isinstance(spec, PfcDisk):
        _positive("R", spec.R)
        bulk, edge = _disk_terms(spec.R, rho, beta)
        return 1.0 - bulk - edge
    if isinstance(spec, PfcAnnulusSmall):
        _check_annular(spec, r0)
        _small(spec, r0)
        bulk, edge = _disk_terms(spec.R, rho, beta)
        hole = math.pi * spec.r**2 * (2 * beta**2 / rho) * math.exp(-rho * math.pi / (2 * beta))
        return 1.0 - hole - bulk - edge
    if isinstance(spec, PfcAnnulusLarge):
        _check_annular(spec, r0)
        _large(spec, r0)
        bulk, edge = _disk_terms(spec.R, rho, beta)
        inner = 2 * math.pi * spec.r * math.sqrt(beta / math.pi) * math.exp(
            -rho / beta * (math.pi / 2 + math.sqrt(math.pi) / (4 * spec.r * math.sqrt(beta))))
        return 1.0 - inner - bulk - edge
    if isinstance(spec, PfcAnnulusLargeLimit):
        _check_annular(spec, r0)
        _large(spec, r0)
        return (1.0
                - 2 * math.pi * (spec.R + spec.r) * math.sqrt(beta / math.pi) * math.exp(-rho * math.pi / (2 * beta))
                - math.pi * (spec.R**2 - spec.r**2) * rho * math.exp(-rho * math.pi / beta))
    if isinstance(spec, PfcShell):
        _check_annular(spec, r0)
        b32 = beta**1.5
        bulk = 4 * math.pi / 3 * (spec.R**3 - spec.r**3) * rho * math.exp(-rho * math.pi**1.5 / b32)
        edge_exp = math.exp(-rho * (math.pi**1.5 / (2 * b32) - math.pi / (2 * b32 * spec.R * math.sqrt(beta))))
        edge = 4 * math.pi * spec.R**2 * (beta / math.pi) * edge_exp
        if spec.regime == "small":
            _small(spec, r0)
            hole = (4 / 3 * math.pi * spec.r**3 * (12 * beta**3 / (rho * math.pi**3))
                    * math.exp(-rho * math.pi**1.5 / (2 * b32)))
        elif spec.regime == "large":
            _large(spec, r0)
            # Printed with the outer radius and a minus sign in the exponent.
            hole = 4 * math.pi * spec.r**2 * (beta / math.pi) * edge_exp
        else:
            raise InvalidInputError(f"shell regime must be 'small' or 'large', got {spec.regime!r}")
        return 1.0 - bulk - edge - hole
    if isinstance(spec, PfcSquareObstacles):
        L = float(spec.L)
        _positive("L", L)
        radii = [float(a) for a in spec.radii]
        for a in radii:
            _positive("obstacle radius", a)
        if spec.centers is not None:
            _check_separation(L, radii, spec.centers, r0)
        blocked = sum(math.pi * a * a for a in radii)
        return (1.0
                - blocked * (2 * beta**2 / rho) * math.exp(-rho * math.pi / (2 * beta))
                - (L * L - blocked) * rho * math.exp(-math.pi / beta * rho)
                - 4 * L * math.sqrt(beta / math.pi) * math.exp(-math.pi / (2 * beta) * rho)
                - 16 * beta / (rho * math.pi) * math.exp(-math.pi / (4 * beta) * rho))
    raise InvalidInputError(f"unknown domain spec {spec!r}")


def _check_separation(L, radii, centers, r0):
    if len(centers) != len(radii):
        raise InvalidInputError("need one centre per obstacle radius")
    cs = [as_point(c, 2) for c in centers]
    for i, (c, a) in enumerate(zip(cs, radii)):
        wall = min(c[0] - a, c[1] - a, L - c[0] - a, L - c[1] - a)
        if wall < 2 * r0:
            raise RegimeError(f"obstacle {i} is within 2 r0 of the boundary")
        for j in range(i):
            if np.linalg.norm(c - cs[j]) - a - radii[j] < 2 * r0:
                raise RegimeError(f"obstacles {j} and {i} are closer than 2 r0")


def pfc_closed_form(spec: PfcDomainSpec) -> PfcResult:
    """Evaluate the approximate full-connection probability for ``spec``,
    clamping to [0, 1] and flagging when the raw value falls outside."""
    raw = _pfc_raw(spec)
    value = min(1.0, max(0.0, raw))
    return PfcResult(value, raw, value != raw)


def disk_boundary_terms(R: float, rho: float, beta: float) -> tuple[float, float]:
    """(bulk, boundary) deficits of the disk formula."""
    return _disk_terms(R, rho, beta)


def bisect(f, lo: float, hi: float, tol: float = 1e-10, maxiter: int = 200) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise InvalidInputError("root is not bracketed")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if hi - lo < tol or fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise ConvergenceError("bisection did not converge")


def disk_mass_crossover(R: float, beta: float) -> float:
    """Distance from the centre where the near-boundary mass expansion meets
    the bulk value pi/beta."""
    def gap(eps):
        near = (math.pi / (2 * beta) - math.sqrt(math.pi) / (4 * beta * R * math.sqrt(beta))
                + (R - eps) * math.sqrt(math.pi / beta))
        return near - math.pi / beta
    return bisect(gap, 0.0, R)


# Geodesic counts ---------------------------------------------------------

@dataclass(frozen=True)
class GeodesicQuery:
    d: int
    rho: float
    r_xy: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvalidInputError(f"d must be an integer >= 2, got {self.d}")
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise InvalidInputError(f"rho must be positive, got {self.rho}")
        if not (math.isfinite(self.r_xy) and self.r_xy >= 0.0):
            raise InvalidInputError(f"r_xy must be finite and non-negative, got {self.r_xy}")

    @property
    def hops(self) -> int:
        return math.floor(self.r_xy) + 1


def expected_two_hop_exact(q: GeodesicQuery) -> float:
    if not 1.0 <= q.r_xy < 2.0:
        raise InvalidInputError(f"two-hop count needs r_xy in [1, 2), got {q.r_xy}")
    return q.rho * intersection_volume(q.d, q.r_xy)


def expected_geodesic_cardinality(q: GeodesicQuery) -> float:
    """Leading-order expected number of shortest paths with the minimal hop
    count k = floor(r) + 1."""
    r, d = q.r_xy, q.d
    if r < 1.0:
        return 1.0
    m = math.floor(r)
    k = m + 1
    log_coef = (m * math.log(q.rho) + 0.5 * m * (d - 1) * math.log(2 * math.pi)
                + 0.5 * (1 - d) * math.log(k) - math.lgamma((k + 1) / 2 + m * d / 2))
    return math.exp(log_coef) * (k - r) ** (0.5 * m * (d + 1))


def _lens(d: int, s: np.ndarray) -> np.ndarray:
    if d == 2:
        return 2 * np.arccos(s / 2) - s * np.sqrt(1 - s * s / 4)
    return np.pi / 12 * (4 + s) * (2 - s) ** 2


def _cap(d: int, lam: np.ndarray, r: np.ndarray) -> np.ndarray:
    c = np.clip((lam * lam + r * r - 1) / (2 * r * lam), -1.0, 1.0)
    if d == 2:
        return 2 * lam * np.arccos(c)
    return 2 * np.pi * lam * lam * (1 - c)


def _sigma(d: int, rho: float, r: np.ndarray, t: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Vectorised recursion: values of E(sigma) at every entry of r.
    out = np.empty_like(r)
    low = r < 1
    out[low] = 1.0
    two = (r >= 1) & (r < 2)
    out[two] = rho * _lens(d, r[two])
    deep = r >= 2
    if np.any(deep):
        rr = r[deep][:, None]
        a = rr - 1
        b = np.floor(rr)
        lam = a + (b - a) * (1 - np.cos(np.pi * t)) / 2
        jac = (b - a) * np.pi * np.sin(np.pi * t) / 2
        inner = _sigma(d, rho, lam.ravel(), t, w).reshape(lam.shape)
        out[deep] = rho * np.sum(w * jac * _cap(d, lam, rr) * inner, axis=1)
    return out


def geodesic_recursion_numeric(q: GeodesicQuery, tol: float = 1e-10, max_evals: int = 1 << 25) -> float:
    """Expected geodesic count from nested quadrature of the recursion
    E(sigma_r) = rho * int_{r-1}^{floor r} l_lambda E(sigma_lambda) dlambda.

    Gauss-Legendre on the substitution lambda = a + (b - a)(1 - cos(pi t))/2,
    doubling the node count until successive values agree to ``tol``.
    """
    if q.d not in (2, 3):
        raise UnsupportedError("the recursion is implemented for d = 2 and d = 3")
    if q.r_xy >= 6.0:
        raise InvalidInputError(f"r_xy must be below 6, got {q.r_xy}")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if q.r_xy < 1.0:
        return 1.0
    if q.r_xy < 2.0:
        return expected_two_hop_exact(q)
    depth = math.floor(q.r_xy) - 1
    r = np.array([float(q.r_xy)])
    prev = None
    n = 8
    while n**depth <= max_evals:
        x, w = np.polynomial.legendre.leggauss(n)
        val = float(_sigma(q.d, q.rho, r, (x + 1) / 2, w / 2)[0])
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val
        prev = val
        n *= 2
    raise ConvergenceError(f"recursion did not reach tol={tol} at r_xy={q.r_xy}")


def beta_optimal_correction(rho: float, r_xy: float) -> float:
    """Two-hop count corrected by three-hop paths when no two-hop path exists."""
    if not (math.isfinite(rho) and rho >= 0):
        raise InvalidInputError(f"rho must be non-negative, got {rho}")
    if not 1.0 <= r_xy < 2.0:
        raise InvalidInputError(f"r_xy must lie in [1, 2), got {r_xy}")
    area = intersection_volume(2, r_xy)
    tail, _ = integrate.quad(lambda lam: float(_cap(2, np.array(lam), np.array(r_xy)) * _lens(2, np.array(lam))),
                             1.0, 2.0, epsabs=_QUAD_EPSABS, epsrel=1e-12)
    suppress = math.exp(-rho * area)
    return rho * area * (1 - suppress) + suppress * rho * rho * tail


def negbin_fit(mean: float, second_moment: float) -> tuple[float, float]:
    """Negative binomial (p, r) with mean (1-p) r / p and second moment
    mean (1/p + mean)."""
    if not mean > 0:
        raise InvalidInputError(f"mean must be positive, got {mean}")
    var = second_moment - mean * mean
    if not var > mean:
        raise NotOverdispersedError(f"variance {var} does not exceed mean {mean}")
    p = mean / var
    return p, mean * p / (1 - p)


def series_coefficients(f, h: float = 0.02) -> tuple[float, float]:
    """Quadratic and quartic Maclaurin coefficients of an even function from
    central differences at zero."""
    vals = [f(k * h) for k in range(4)]
    f0, f1, f2, f3 = vals
    # Even extension: f(-x) = f(x).
    d2 = (-2 * f2 + 32 * f1 - 30 * f0) / (12 * h * h)
    d4 = (-(f3 + f3) + 12 * (f2 + f2) - 39 * (f1 + f1) + 56 * f0) / (6 * h**4)
    return d2 / 2, d4 / 24


__all__: Sequence[str] = [
    "elliptic_E", "continuum_betweenness", "connectivity_mass", "visible_ball_volume",
    "expected_isolated", "PfcDisk", "PfcAnnulusSmall", "PfcAnnulusLarge", "PfcAnnulusLargeLimit",
    "PfcShell", "PfcSquareObstacles", "PfcResult", "pfc_closed_form", "disk_boundary_terms",
    "disk_mass_crossover", "bisect", "GeodesicQuery", "expected_two_hop_exact",
    "expected_geodesic_cardinality", "geodesic_recursion_numeric", "beta_optimal_correction",
    "negbin_fit", "series_coefficients",
]
