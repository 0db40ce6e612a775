"""Random geometric graphs in bounded domains: connectivity, centrality and
geodesic counts, with closed forms and Monte Carlo estimators side by side."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, InvalidInputError, NotOverdispersedError, RegimeError,
                     UnsupportedError)
from .geometry import (Annulus, Disk, Domain, Interval, ObstacleSpec, Sphere, SphericalShell, Square,
                       Torus, visibility)
from .graph import GraphInstance, Hard, Rayleigh, build_graph, connected_components, is_connected
from .pointprocess import PointSet, StraussParams, sample_binomial, sample_poisson, strauss_mcmc

__all__ = [
    "__version__",
    "ConvergenceError", "InvalidInputError", "NotOverdispersedError", "RegimeError", "UnsupportedError",
    "Annulus", "Disk", "Domain", "Interval", "ObstacleSpec", "Sphere", "SphericalShell", "Square",
    "Torus", "visibility",
    "GraphInstance", "Hard", "Rayleigh", "build_graph", "connected_components", "is_connected",
    "PointSet", "StraussParams", "sample_binomial", "sample_poisson", "strauss_mcmc",
]
