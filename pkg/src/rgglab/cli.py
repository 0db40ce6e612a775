"""Command-line front end: one subcommand per experiment or evaluator."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .analytic import (GeodesicQuery, PfcAnnulusLarge, PfcAnnulusSmall, PfcDisk, PfcShell,
                       PfcSquareObstacles, continuum_betweenness, expected_geodesic_cardinality,
                       expected_isolated, geodesic_recursion_numeric, pfc_closed_form)
from .errors import ConvergenceError, InvalidInputError, RegimeError
from .geometry import Annulus, Disk, Interval, ObstacleSpec, Sphere, SphericalShell, Square, Torus
from .graph import Rayleigh
from .montecarlo import (ExperimentConfig, analytic_profile_csv, betweenness_profile, estimate_pfc,
                         geodesic_csv, geodesic_experiment, isolated_vs_disconnected, pfc_csv,
                         profile_csv, sigma_distribution)
from .percolation import sweep, sweep_csv
from .pointprocess import StraussParams, nearest_neighbor_distances, strauss_mcmc
from .rng import check_seed
from .trials import csv_text

EXIT_USAGE = 2
EXIT_REGIME = 3
EXIT_CONVERGENCE = 4

_DOMAIN_KEYS = {
    "disk": ("R",),
    "annulus": ("r", "R"),
    "sphere": ("R",),
    "shell": ("r", "R"),
    "torus": ("L",),
    "interval": ("L",),
    "square": ("L",),
}


class UsageError(Exception):
    pass


def parse_domain(text: str):
    """``kind:key=value,...``, e.g. ``annulus:r=2,R=20`` or
    ``square:L=10,obstacles=3/3/1+7/7/1``."""
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    if kind not in _DOMAIN_KEYS:
        raise UsageError(f"unknown domain kind {kind!r}")
    fields, obstacles = {}, ()
    for token in filter(None, (t.strip() for t in body.split(","))):
        key, eq, value = token.partition("=")
        if not eq:
            raise UsageError(f"bad domain token {token!r}: expected key=value")
        if kind == "square" and key == "obstacles":
            try:
                obstacles = tuple(ObstacleSpec((float(cx), float(cy)), float(a))
                                  for cx, cy, a in (o.split("/") for o in value.split("+") if o))
            except ValueError:
                raise UsageError(f"bad domain token {token!r}: obstacles are cx/cy/r joined by '+'") from None
            continue
        if key not in _DOMAIN_KEYS[kind]:
            raise UsageError(f"bad domain token {token!r}: {kind} takes {', '.join(_DOMAIN_KEYS[kind])}")
        try:
            fields[key] = float(value)
        except ValueError:
            raise UsageError(f"bad domain token {token!r}: {value!r} is not a number") from None
    missing = [k for k in _DOMAIN_KEYS[kind] if k not in fields]
    if missing:
        raise UsageError(f"domain {kind} is missing {', '.join(missing)}")
    cls = {"disk": Disk, "annulus": Annulus, "sphere": Sphere, "shell": SphericalShell,
           "torus": Torus, "interval": Interval, "square": Square}[kind]
    try:
        if kind == "square":
            return cls(fields["L"], obstacles)
        return cls(**fields)
    except InvalidInputError as exc:
        raise UsageError(f"invalid domain {text!r}: {exc}") from None


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` with both ends included, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}: expected start:stop:count") from None
    if count < 1:
        raise UsageError(f"bad grid {text!r}: count must be positive")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [float(f"{start + k * step:.12g}") for k in range(count)]


def _emit(text: str, path: str | None, outputs: list[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    outputs.append(path)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _pfc_spec(domain, rho: float, beta: float):
    r0 = beta**-0.5
    if isinstance(domain, Disk):
        return PfcDisk(domain.R, rho, beta)
    if isinstance(domain, Annulus):
        if domain.r < r0 / 3:
            return PfcAnnulusSmall(domain.r, domain.R, rho, beta)
        return PfcAnnulusLarge(domain.r, domain.R, rho, beta)
    if isinstance(domain, SphericalShell):
        return PfcShell(domain.r, domain.R, rho, beta, "small" if domain.r < r0 / 3 else "large")
    if isinstance(domain, Square):
        return PfcSquareObstacles(domain.L, tuple(o.radius for o in domain.obstacles), rho, beta,
                                  tuple(o.center for o in domain.obstacles))
    return None


def _analytic_pfc(domain, rhos, beta, eta):
    if eta != 2.0:
        return [None] * len(rhos)
    out = []
    for rho in rhos:
        spec = _pfc_spec(domain, rho, beta)
        out.append(None if spec is None or rho <= 0 else pfc_closed_form(spec).value)
    return out


def cmd_connectivity(args, outputs):
    _require(args, "domain", "beta", "rho_grid")
    domain = parse_domain(args.domain)
    rhos = parse_grid(args.rho_grid)
    cfg = ExperimentConfig(domain, Rayleigh(args.beta, args.eta), rhos, args.trials, args.seed,
                           not args.no_visibility, jobs=args.jobs)
    analytic = _analytic_pfc(domain, rhos, args.beta, args.eta)
    _emit(pfc_csv(cfg, estimate_pfc(cfg), analytic), args.out, outputs)


def cmd_betweenness(args, outputs):
    eps = parse_grid(args.eps_grid)
    if any(not 0.0 <= e <= 1.0 for e in eps):
        raise UsageError("eps values must lie in [0, 1]")
    if args.analytic_only:
        _emit(analytic_profile_csv(eps), args.out, outputs)
        return
    _require(args, "rho", "beta")
    cfg = ExperimentConfig(Disk(args.radius), Rayleigh(args.beta, args.eta), args.rho, args.trials,
                           args.seed, True, bins=args.bins, jobs=args.jobs)
    _emit(profile_csv(betweenness_profile(cfg, eps)), args.out, outputs)


def cmd_geodesics(args, outputs):
    _require(args, "rho", "r_grid")
    rows = geodesic_experiment(args.d, args.rho, parse_grid(args.r_grid), args.trials, args.seed,
                               args.jobs, args.with_geodesic)
    _emit(geodesic_csv(rows, args.with_geodesic), args.out, outputs)


def cmd_sigma(args, outputs):
    _require(args, "rho", "r")
    dist = sigma_distribution(args.rho, args.r, args.trials, args.seed, args.jobs)
    _emit(dist.to_csv(), args.out, outputs)
    print(f"mean={dist.mean!r} variance={dist.variance!r} dispersion={dist.dispersion!r}",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)


def cmd_percolation(args, outputs):
    _require(args, "L", "p_grid")
    grid = parse_grid(args.p_grid)
    if any(not 0.0 <= p <= 1.0 for p in grid):
        raise UsageError("p values must lie in [0, 1]")
    _emit(sweep_csv(sweep(args.L, grid, args.trials, args.seed, args.jobs)), args.out, outputs)


def cmd_strauss(args, outputs):
    _require(args, "n", "omega", "range")
    if not 0.0 <= args.omega <= 1.0:
        raise UsageError(f"--omega must lie in [0, 1], got {args.omega}")
    domain = parse_domain(args.domain)
    params = StraussParams(args.omega, args.range, args.steps, args.beta_a, args.beta_b)
    ps = strauss_mcmc(domain, args.n, params, args.seed)
    _emit(ps.to_csv(), args.out, outputs)
    nn = nearest_neighbor_distances(ps)
    summary = (f"points={len(ps)} mean_nn={float(nn.mean()) if nn.size else float('nan')!r} "
               f"min_nn={float(nn.min()) if nn.size else float('nan')!r}")
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)


def cmd_isolation(args, outputs):
    _require(args, "domain", "beta", "rho_grid")
    cfg = ExperimentConfig(parse_domain(args.domain), Rayleigh(args.beta, args.eta),
                           parse_grid(args.rho_grid), args.trials, args.seed, not args.no_visibility,
                           jobs=args.jobs)
    rows = []
    for res in isolated_vs_disconnected(cfg):
        frac = res.fraction
        rows.append((res.rho, res.disconnected, "" if frac is None else frac.mean,
                     "" if frac is None else frac.std_error))
    text = "rho,disconnected,frac_isolated,se\n" + "".join(
        f"{r!r},{d},{f if f == '' else repr(f)},{s if s == '' else repr(s)}\n" for r, d, f, s in rows)
    _emit(text, args.out, outputs)


def cmd_pfc(args, outputs):
    _require(args, "domain", "beta", "rho_grid")
    domain = parse_domain(args.domain)
    rows = []
    for rho in parse_grid(args.rho_grid):
        spec = _pfc_spec(domain, rho, args.beta)
        if spec is None:
            raise UsageError(f"no closed form for domain {args.domain!r}")
        res = pfc_closed_form(spec)
        rows.append((rho, res.value, res.raw, int(res.clamped)))
    _emit(csv_text("rho,pfc_analytic,raw,clamped", rows), args.out, outputs)


def cmd_cardinality(args, outputs):
    _require(args, "rho", "r_grid")
    header = "r,closed_form" + (",recursion" if args.recursion else "")
    rows = []
    for r in parse_grid(args.r_grid):
        q = GeodesicQuery(args.d, args.rho, r)
        row = [r, expected_geodesic_cardinality(q)]
        if args.recursion:
            row.append(geodesic_recursion_numeric(q, args.tol))
        rows.append(row)
    _emit(csv_text(header, rows), args.out, outputs)


def cmd_isolated(args, outputs):
    _require(args, "domain", "beta", "rho_grid")
    domain = parse_domain(args.domain)
    model = Rayleigh(args.beta, args.eta)
    rows = [(rho, expected_isolated(domain, model, rho, not args.no_visibility))
            for rho in parse_grid(args.rho_grid)]
    _emit(csv_text("rho,expected_isolated", rows), args.out, outputs)


def cmd_gstar(args, outputs):
    eps = parse_grid(args.eps_grid)
    if any(not 0.0 <= e <= 1.0 for e in eps):
        raise UsageError("eps values must lie in [0, 1]")
    _emit(csv_text("eps,g_analytic", [(e, continuum_betweenness(e)) for e in eps]), args.out, outputs)


def _common(p: argparse.ArgumentParser, seeded: bool = True, jobs: bool = True):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--manifest", help="write a JSON run manifest here")
    if seeded:
        p.add_argument("--seed", type=int, help="master seed (fallback: $RGGLAB_SEED)")
        p.add_argument("--trials", type=int, default=1000, help="Monte Carlo trials (default 1000)")
    if jobs:
        p.add_argument("--jobs", type=int, default=1, help="worker processes; output is unchanged")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rgglab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rgglab {__version__}")
    parser.add_argument("--config", help="file of 'key = value' lines; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("connectivity", help="Monte Carlo full-connection probability")
    p.add_argument("--domain", help="e.g. disk:R=5, annulus:r=2,R=20, square:L=10,obstacles=3/3/1")
    p.add_argument("--beta", type=float)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--rho-grid", help="start:stop:count")
    p.add_argument("--no-visibility", action="store_true", help="ignore line of sight")
    _common(p)
    p.set_defaults(func=cmd_connectivity)

    p = sub.add_parser("betweenness", help="radial betweenness profile on a disk")
    p.add_argument("--rho", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--eps-grid", default="0:1:11")
    p.add_argument("--bins", type=int, default=11)
    p.add_argument("--analytic-only", action="store_true", help="print the continuum curve only")
    _common(p)
    p.set_defaults(func=cmd_betweenness, trials=200)

    p = sub.add_parser("geodesics", help="optimal-hop and geodesic path counts")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--rho", type=float)
    p.add_argument("--r-grid")
    p.add_argument("--with-geodesic", action="store_true", help="also count all shortest paths")
    _common(p)
    p.set_defaults(func=cmd_geodesics)

    p = sub.add_parser("sigma", help="distribution of the optimal-hop path count")
    p.add_argument("--rho", type=float)
    p.add_argument("--r", type=float)
    _common(p)
    p.set_defaults(func=cmd_sigma, trials=10000)

    p = sub.add_parser("percolation", help="coupled bond percolation sweep")
    p.add_argument("--L", type=int)
    p.add_argument("--p-grid")
    _common(p)
    p.set_defaults(func=cmd_percolation)

    p = sub.add_parser("strauss", help="Strauss process by Metropolis-Hastings")
    p.add_argument("--domain", default="square:L=1")
    p.add_argument("--n", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--range", type=float, help="interaction range")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--beta-a", type=float, default=2.0)
    p.add_argument("--beta-b", type=float, default=2.0)
    _common(p, jobs=False)
    p.set_defaults(func=cmd_strauss)

    p = sub.add_parser("isolation", help="isolated vertices among disconnected graphs")
    p.add_argument("--domain")
    p.add_argument("--beta", type=float)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--rho-grid")
    p.add_argument("--no-visibility", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_isolation)

    p = sub.add_parser("pfc", help="closed-form full-connection probability")
    p.add_argument("--domain")
    p.add_argument("--beta", type=float)
    p.add_argument("--rho-grid")
    _common(p, seeded=False, jobs=False)
    p.set_defaults(func=cmd_pfc)

    p = sub.add_parser("cardinality", help="expected geodesic cardinality")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--rho", type=float)
    p.add_argument("--r-grid")
    p.add_argument("--recursion", action="store_true", help="add the numeric recursion")
    p.add_argument("--tol", type=float, default=1e-10)
    _common(p, seeded=False, jobs=False)
    p.set_defaults(func=cmd_cardinality)

    p = sub.add_parser("isolated", help="expected number of isolated vertices")
    p.add_argument("--domain")
    p.add_argument("--beta", type=float)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--rho-grid")
    p.add_argument("--no-visibility", action="store_true")
    _common(p, seeded=False, jobs=False)
    p.set_defaults(func=cmd_isolated)

    p = sub.add_parser("gstar", help="continuum betweenness curve")
    p.add_argument("--eps-grid", default="0:1:101")
    _common(p, seeded=False, jobs=False)
    p.set_defaults(func=cmd_gstar)

    p = sub.add_parser("rerun", help="repeat the run recorded in a manifest")
    p.add_argument("manifest_file")
    p.set_defaults(func=None)
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise UsageError(f"{path}:{number}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser, argv, config):
    """Re-parse with config values as defaults so that flags win."""
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in config.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(raw) if action.type else raw
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _schema() -> dict:
    return json.loads(resources.files("rgglab").joinpath("manifest.schema.json").read_text("utf-8"))


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rerun":
        with open(args.manifest_file, encoding="utf-8") as fh:
            manifest = json.load(fh)
        jsonschema.validate(manifest, _schema())
        return _run(manifest["argv"])
    if args.config:
        args = _apply_config(parser, argv, read_config(args.config))
    if hasattr(args, "seed") and not getattr(args, "analytic_only", False):
        if args.seed is None and os.environ.get("RGGLAB_SEED"):
            try:
                args.seed = int(os.environ["RGGLAB_SEED"])
            except ValueError:
                raise UsageError("RGGLAB_SEED must be an integer") from None
        if args.seed is None:
            args.seed = int(np.random.SeedSequence().entropy % (1 << 64))
            print(f"seed={args.seed}", file=sys.stderr)
        check_seed(args.seed)
        if args.trials < 1:
            raise UsageError("--trials must be positive")
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be positive")
    started = datetime.now(timezone.utc)
    clock = time.perf_counter()
    outputs: list[str] = []
    args.func(args, outputs)
    if args.manifest:
        config = {k: _jsonable(v) for k, v in vars(args).items()
                  if k not in ("func", "manifest", "config") and not callable(v)}
        # Replaying from the manifest needs every effective setting on the command line.
        replay = [args.command] + [tok for k, v in config.items() if k != "command"
                                   for tok in _as_flag(k, v)]
        if args.manifest:
            replay += ["--manifest", args.manifest]
        manifest = {
            "tool": "rgglab",
            "version": __version__,
            "subcommand": args.command,
            "argv": replay,
            "config": config,
            "seed": config.get("seed"),
            "started": started.isoformat(),
            "finished": datetime.now(timezone.utc).isoformat(),
            "wall_time_s": time.perf_counter() - clock,
            "outputs": outputs,
        }
        jsonschema.validate(manifest, _schema())
        with open(args.manifest, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _as_flag(key: str, value) -> list[str]:
    flag = "--" + key.replace("_", "-")
    if value is None or value is False:
        return []
    if value is True:
        return [flag]
    return [flag, repr(value) if isinstance(value, float) else str(value)]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv)
    except RegimeError as exc:
        print(f"rgglab: regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ConvergenceError as exc:
        print(f"rgglab: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (UsageError, InvalidInputError, jsonschema.ValidationError, OSError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"rgglab: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
