"""Acceptance gate: twelve end-to-end criteria, each at its stated tolerance
and runtime budget. Every test prints one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from oracles import brute_betweenness, connected_unit_disk_graphs, pinv_current_flow, unit_disk_graphs
from rgglab.analytic import (GeodesicQuery, PfcAnnulusLarge, PfcAnnulusSmall, PfcDisk, bisect,
                             continuum_betweenness, expected_geodesic_cardinality, expected_two_hop_exact,
                             geodesic_recursion_numeric, pfc_closed_form, series_coefficients)
from rgglab.centrality import brandes_betweenness, current_flow_betweenness
from rgglab.cli import main
from rgglab.geometry import Annulus, Disk
from rgglab.graph import Rayleigh
from rgglab.montecarlo import (ExperimentConfig, betweenness_profile, estimate_pfc, geodesic_experiment,
                               isolated_vs_disconnected, sigma_distribution)
from rgglab.percolation import pc_lower_bound, sweep


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number:2d}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail
    return emit


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_01_tabulated_coefficients(report):
    tables = {
        2: [lambda p: 4 * p / 3, lambda p: math.pi * p**2 / (3 * math.sqrt(3)),
            lambda p: 32 * math.pi * p**3 * math.sqrt(2) / 945, lambda p: math.pi**2 * p**4 / (180 * math.sqrt(5)),
            lambda p: 1024 * math.pi**2 * p**5 / (2027025 * math.sqrt(3))],
        3: [lambda p: math.pi * p / 2, lambda p: math.pi**2 * p**2 / 18, lambda p: math.pi**3 * p**3 / 360,
            lambda p: math.pi**4 * p**4 / 12600, lambda p: math.pi**5 * p**5 / 680400],
    }
    worst = 0.0
    with Timer() as t:
        for rho in (1.0, 10.0, 37.5):
            for d, rows in tables.items():
                for m, coef in enumerate(rows, start=1):
                    r = m + 0.25
                    got = expected_geodesic_cardinality(GeodesicQuery(d, rho, r)) / (m + 1 - r) ** (m * (d + 1) / 2)
                    worst = max(worst, abs(got / coef(rho) - 1))
    report(1, "table coefficients", worst < 1e-9 and t.elapsed < 1,
           f"max relative error {worst:.2e} over 10 coefficients x 3 densities, {t.elapsed:.2f}s")


def test_02_two_hop_base_case(report):
    with Timer() as t:
        row = geodesic_experiment(2, 10.0, [1.5], 10_000, 2024, with_geodesic=False)[0]
    target = expected_two_hop_exact(GeodesicQuery(2, 10.0, 1.5))
    z = (row.optimal.mean - target) / row.optimal.std_error
    report(2, "two-hop count", abs(z) < 3 and abs(target - 4.533) < 1e-3 and t.elapsed < 60,
           f"MC {row.optimal.mean:.4f} +/- {row.optimal.std_error:.4f} vs {target:.4f} (z={z:+.2f}), {t.elapsed:.1f}s")


def test_03_three_dimensional_exact_interval(report):
    rho, worst = 10.0, 0.0
    with Timer() as t:
        for r in np.linspace(2.0, 2.98, 20):
            exact = rho**2 * math.pi**2 / 1260 * ((r + 3) * (r + 9) - 6 / r) * (3 - r) ** 4
            worst = max(worst, abs(geodesic_recursion_numeric(GeodesicQuery(3, rho, r)) / exact - 1))
    report(3, "d=3 exact polynomial", worst < 1e-8 and t.elapsed < 10,
           f"max relative error {worst:.2e} at 20 points, {t.elapsed:.2f}s")


def connectivity_beta(R, rho, target):
    """Largest beta whose disk formula still predicts P_fc >= target."""
    return bisect(lambda b: pfc_closed_form(PfcDisk(R, rho, b)).raw - target, 10.0, 1000.0)


def test_04_betweenness_continuum(report):
    beta = connectivity_beta(1.0, 500.0, 0.9)
    eps = [k / 10 for k in range(11)]
    cfg = ExperimentConfig(Disk(1.0), Rayleigh(beta), (500.0,), 200, 4, bins=11)
    with Timer() as t:
        rows = betweenness_profile(cfg, eps)
    dev = max(abs(r.g.mean - r.analytic) for r in rows)
    mono = all(b.g.mean <= a.g.mean + 2 * math.hypot(a.g.std_error, b.g.std_error) for a, b in zip(rows, rows[1:]))
    profile = " ".join(f"{r.g.mean:.3f}" for r in rows)
    report(4, "betweenness profile", dev < 0.1 and mono and t.elapsed < 1800,
           f"beta={beta:.1f}, max |g - g*| = {dev:.3f}, monotone(2se)={mono}, profile [{profile}], {t.elapsed:.0f}s")


def test_05_series(report):
    with Timer() as t:
        c2, c4 = series_coefficients(continuum_betweenness)
    ok = abs(c2 + 5 / 4) < 1e-3 and abs(c4 - 13 / 64) < 1e-3 and t.elapsed < 1
    report(5, "series of g*", ok, f"quadratic {c2:.6f}, quartic {c4:.6f}, {t.elapsed:.3f}s")


def test_06_disk_connectivity(report):
    rhos = (4.0, 5.0, 6.0, 8.0)
    cfg = ExperimentConfig(Disk(5.0), Rayleigh(1.0), rhos, 1000, 606)
    with Timer() as t:
        est = estimate_pfc(cfg)
    parts, ok = [], True
    for rho, e in zip(rhos, est):
        pred = pfc_closed_form(PfcDisk(5.0, rho, 1.0)).value
        if pred >= 0.5:
            ok &= abs(e.mean - pred) <= 0.05
        parts.append(f"rho={rho:g}: MC {e.mean:.3f} vs {pred:.3f}")
    report(6, "disk P_fc", ok and t.elapsed < 600, "; ".join(parts) + f", {t.elapsed:.0f}s")


def test_07_obstacle_connectivity(report):
    rhos = (4.0, 5.0, 6.0)
    beta = 1.0
    r0 = beta**-0.5
    with Timer() as t:
        cfg = ExperimentConfig(Annulus(6 * r0, 20 * r0), Rayleigh(beta), rhos, 1000, 707)
        est = estimate_pfc(cfg)
        parts, ok = [], True
        for rho, e in zip(rhos, est):
            pred = pfc_closed_form(PfcAnnulusLarge(6 * r0, 20 * r0, rho, beta)).value
            if pred >= 0.5:
                ok &= abs(e.mean - pred) <= 0.05
            parts.append(f"rho={rho:g}: MC {e.mean:.3f} vs {pred:.3f}")

        small, R, rho = 0.3 * r0, 5.0, 5.0
        shift = abs(pfc_closed_form(PfcAnnulusSmall(small, R, rho, beta)).value
                    - pfc_closed_form(PfcDisk(R, rho, beta)).value)
        a = estimate_pfc(ExperimentConfig(Disk(R), Rayleigh(beta), (rho,), 1000, 708))[0]
        b = estimate_pfc(ExperimentConfig(Annulus(small, R), Rayleigh(beta), (rho,), 1000, 708))[0]
        gap = abs(a.mean - b.mean)
        se = math.hypot(a.std_error, b.std_error)
    ok = ok and shift < 0.01 and gap < 2 * se and t.elapsed < 1200
    report(7, "obstacle P_fc", ok,
           "; ".join(parts) + f"; small-hole shift {shift:.2e}; A/B {a.mean:.3f} vs {b.mean:.3f} "
           f"(|diff| {gap:.4f} < 2se {2 * se:.4f}), {t.elapsed:.0f}s")


def test_08_dispersion(report):
    with Timer() as t:
        near = sigma_distribution(15.0, 1.6, 10_000, 808)
        far = sigma_distribution(15.0, 2.7, 10_000, 809)
    ok = 0.9 <= near.dispersion <= 1.1 and far.dispersion > 1.1 and t.elapsed < 300
    report(8, "dispersion index", ok,
           f"r=1.6: {near.dispersion:.3f} (mean {near.mean:.2f}); r=2.7: {far.dispersion:.3f} (mean {far.mean:.2f}), "
           f"{t.elapsed:.0f}s")


def test_09_centrality_oracles(report):
    with Timer() as t:
        graphs = list(unit_disk_graphs(50, 12, 909))
        brandes_ok = all(np.allclose(brandes_betweenness(g).values, brute_betweenness(g), rtol=0, atol=1e-12)
                         for g in graphs)
        flows = connected_unit_disk_graphs(20, 10, 910)
        flow_err = max(float(np.max(np.abs(current_flow_betweenness(g).values - pinv_current_flow(g))))
                       for g in flows)
    ok = brandes_ok and flow_err < 1e-9 and t.elapsed < 60
    report(9, "centrality oracles", ok,
           f"Brandes equal on {len(graphs)} graphs: {brandes_ok}; current-flow max error {flow_err:.1e} "
           f"on {len(flows)} graphs, {t.elapsed:.1f}s")


def test_10_percolation(report):
    grid = [round(0.40 + 0.01 * k, 2) for k in range(21)]
    with Timer() as t:
        rows = sweep(50, grid, 1000, 1010)
    span = np.array([r.spanning_prob.mean for r in rows])
    k = int(np.argmax(span >= 0.5))
    if span[k] < 0.5 or k == 0:
        crossing = math.nan
    else:
        crossing = grid[k - 1] + (0.5 - span[k - 1]) / (span[k] - span[k - 1]) * (grid[k] - grid[k - 1])
    ok = 0.45 <= crossing <= 0.55 and pc_lower_bound(2) == 1 / 3 and t.elapsed < 300
    report(10, "percolation crossing", ok,
           f"spanning probability crosses 0.5 at p={crossing:.4f}; bound {pc_lower_bound(2)!r}, {t.elapsed:.0f}s")


def test_11_isolation_tendency(report):
    rhos = (2.0, 4.0, 6.0)
    with Timer() as t:
        res = isolated_vs_disconnected(ExperimentConfig(Disk(5.0), Rayleigh(1.0), rhos, 1000, 1111))
    defined = [r for r in res if r.fraction is not None]
    ok = all(b.fraction.mean >= a.fraction.mean - 3 * math.hypot(a.fraction.std_error, b.fraction.std_error)
             for a, b in zip(defined, defined[1:]))
    ok = ok and len(defined) >= 2 and t.elapsed < 600
    parts = [f"rho={r.rho:g}: " + (f"{r.fraction.mean:.3f} of {r.disconnected}" if r.fraction else "no disconnected")
             for r in res]
    report(11, "isolation tendency", ok, "; ".join(parts) + f", {t.elapsed:.0f}s")


def test_12_cli_determinism(report, tmp_path):
    runs = [
        ["connectivity", "--domain", "annulus:r=0.2,R=4", "--beta", "1", "--rho-grid", "3:5:3", "--trials", "20"],
        ["betweenness", "--rho", "100", "--beta", "30", "--eps-grid", "0:1:3", "--bins", "3", "--trials", "4"],
        ["geodesics", "--rho", "10", "--r-grid", "0.5:2.5:3", "--trials", "50", "--with-geodesic"],
        ["sigma", "--rho", "15", "--r", "2.2", "--trials", "100"],
        ["percolation", "--L", "16", "--p-grid", "0.3:0.7:5", "--trials", "40"],
        ["strauss", "--n", "40", "--omega", "0.2", "--range", "0.1", "--steps", "300"],
        ["isolation", "--domain", "disk:R=3", "--beta", "1", "--rho-grid", "1:2:2", "--trials", "30"],
    ]
    bad = []
    with Timer() as t:
        for k, args in enumerate(runs):
            outputs = []
            for tag, extra in (("a", []), ("b", []), ("c", ["--jobs", "2"])):
                if args[0] == "strauss" and extra:
                    extra = []
                path = tmp_path / f"{k}{tag}.csv"
                code = main(args + ["--seed", "12", "--out", str(path)] + extra)
                outputs.append((code, path.read_bytes()))
            if any(o != outputs[0] for o in outputs) or outputs[0][0] != 0:
                bad.append(args[0])
    report(12, "CLI determinism", not bad,
           f"{len(runs)} subcommands byte-identical across reruns and --jobs: "
           f"{'all' if not bad else 'mismatch in ' + ', '.join(bad)}, {t.elapsed:.1f}s")
