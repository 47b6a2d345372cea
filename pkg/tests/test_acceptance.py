"""End-to-end acceptance checks at their stated tolerances and time budgets.

Each check prints one ``PASS``/``FAIL`` line with the measured quantity and
the wall time; run with ``pytest tests/test_acceptance.py -v -s`` to see them.
"""

import time

import numpy as np
import pytest
from reference import uniform_ball, well_conditioned
from scipy.optimize import brentq

from mdepth.depth import (
    Sample,
    circle_directions,
    count_profile_extrema,
    expectile_depth,
    expectile_depth_2d_exact,
    mdepth_grid,
    outlyingness_profile,
)
from mdepth.geometry import Hyperplane, bounding_box, intersect_halfplanes, region_contains, region_hausdorff
from mdepth.loss import LossSpec
from mdepth.oracles import ed_uniform_ball, ed_uniform_interval, gaussian_g
from mdepth.regions import depth_region_2d, support_radius, tukey_depth_2d_exact
from mdepth.regression import conditional_halfspace, simulate_hetero
from mdepth.risk import (
    TOLERANCE,
    check_homogeneity,
    check_monotonicity,
    check_subadditivity,
    check_superadditivity,
    check_translation,
)
from mdepth.univariate import expectile_exact

QUAD = LossSpec.quadratic()
ABS = LossSpec.absolute()


@pytest.fixture
def report(capsys):
    """Print a PASS/FAIL line and assert both the tolerance and the time budget."""

    def _report(number, title, measured, ok, elapsed, budget):
        timely = elapsed < budget
        status = "PASS" if ok and timely else "FAIL"
        with capsys.disabled():
            print(f"\n[{number:2d}] {status}  {title}: {measured}  ({elapsed:.2f} s, budget {budget:g} s)")
        assert ok, f"{title}: {measured}"
        assert timely, f"{title}: {elapsed:.2f} s over the {budget} s budget"

    return _report


def test_depth_at_mean_is_one_half(report):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(50):
        d, n = (2, 3, 5)[k % 3], (50, 500)[k % 2]
        X = rng.standard_normal((n, d)) @ rng.standard_normal((d, d)) + rng.standard_normal(d)
        s = Sample(X)
        worst = max(worst, abs(expectile_depth(s, s.mean).value - 0.5))
    report(1, "max |depth(mean) - 1/2| over 50 samples", f"{worst:.2e}", worst <= 1e-12,
           time.perf_counter() - t0, 5)


def test_univariate_closed_forms(report):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    s = Sample(rng.uniform(size=50_000))
    err = max(abs(expectile_depth(s, [z]).value - ed_uniform_interval(z)) for z in np.arange(1, 10) / 10)
    pair = Sample(np.array([0.0, 1.0]))
    err2 = max(abs(expectile_depth(pair, [z]).value - min(z, 1 - z)) for z in np.linspace(0, 1, 21))
    report(2, "uniform interval error / two-point error", f"{err:.2e} / {err2:.2e}",
           err <= 0.01 and err2 <= 1e-12, time.perf_counter() - t0, 5)


def test_gaussian_depth_oracle(report):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    s = Sample(rng.standard_normal((20_000, 2)))
    errs = [abs(expectile_depth(s, [r, 0.0]).value - gaussian_g(r)) for r in (0.5, 1.0, 2.0)]
    assert gaussian_g(1.0) == pytest.approx(0.0714, abs=5e-5)
    report(3, "max |empirical - g(r)|, r in {0.5, 1, 2}", f"{max(errs):.4f}", max(errs) <= 0.015,
           time.perf_counter() - t0, 20)


def test_uniform_ball_oracle(report):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    worst = 0.0
    for d in (2, 3):
        s = Sample(uniform_ball(20_000, d, rng))
        for r in (0.25, 0.5, 0.75):
            z = np.zeros(d)
            z[0] = r
            worst = max(worst, abs(expectile_depth(s, z).value - ed_uniform_ball(r, d)))
    report(4, "max |empirical - omega_d(r)|", f"{worst:.4f}", worst <= 0.02, time.perf_counter() - t0, 30)


def test_affine_equivariance(report):
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    X = rng.standard_normal((300, 2))
    U = circle_directions(500)
    dworst = vworst = 0.0
    for k in range(20):
        A, b = well_conditioned(rng), rng.standard_normal(2)
        Y = X @ A.T + b
        UA = U @ np.linalg.inv(A)
        UA /= np.linalg.norm(UA, axis=1)[:, None]
        loss = (QUAD, ABS)[k % 2]
        for z in rng.standard_normal((5, 2)):
            d1 = mdepth_grid(Sample(X), loss, z, U).value
            d2 = mdepth_grid(Sample(Y), loss, A @ z + b, UA).value
            dworst = max(dworst, abs(d1 - d2))
        R1 = depth_region_2d(Sample(X), loss, 0.2, directions=U, box=bounding_box(X, 5))
        R2 = depth_region_2d(Sample(Y), loss, 0.2, directions=UA, box=bounding_box(Y, 5))
        V = R1.vertices @ A.T + b
        D = np.linalg.norm(V[:, None] - R2.vertices[None], axis=2)
        scale = np.abs(R2.vertices).max()
        vworst = max(vworst, D.min(1).max() / scale, D.min(0).max() / scale)
    report(5, "depth difference / relative vertex error", f"{dworst:.2e} / {vworst:.2e}",
           dworst <= 1e-9 and vworst <= 1e-6, time.perf_counter() - t0, 10)


def test_region_depth_duality(report):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    U = circle_directions(500)
    s = Sample(rng.standard_normal((400, 2)) * [1.0, 0.5])
    P = rng.uniform(-2.5, 2.5, (200, 2))
    violations = 0
    for loss in (QUAD, ABS):
        depth = np.array([mdepth_grid(s, loss, z, U).value for z in P])
        for a in (0.05, 0.15, 0.3):
            R = depth_region_2d(s, loss, a, directions=U)
            inside = np.array([region_contains(R, z, tol=0.0) for z in P])
            violations += int(np.sum(inside != (depth >= a)))
    report(6, "membership/depth disagreements", violations, violations == 0, time.perf_counter() - t0, 10)


def test_absolute_loss_matches_tukey_depth(report):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    s = Sample(rng.standard_normal((200, 2)))
    U = circle_directions(1000)
    gap = max(abs(mdepth_grid(s, ABS, z, U).value - tukey_depth_2d_exact(s, z))
              for z in rng.standard_normal((50, 2)) * 0.8)
    report(7, "max |grid - exact Tukey depth|", f"{gap:.4f}", gap <= 0.01, time.perf_counter() - t0, 5)


def test_depth_decreases_along_rays(report):
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    s = Sample(rng.exponential(size=(1000, 2)))
    bad = 0
    for th in 2 * np.pi * np.arange(16) / 16:
        u = np.array([np.cos(th), np.sin(th)])
        R = support_radius(s, s.mean, u)
        radii = np.concatenate([np.linspace(0.0, R, 20, endpoint=False), [1.05 * R, 1.5 * R]])
        depth = [expectile_depth_2d_exact(s, s.mean + r * u).value for r in radii]
        for a, b in zip(depth, depth[1:]):
            # strictly decreasing while positive, and zero stays zero
            bad += (not b < a) if a > 1e-9 else (b > 1e-9)
        bad += depth[-1] != 0.0
    report(8, "ray steps that fail to decrease", bad, bad == 0, time.perf_counter() - t0, 10)


def test_great_circle_profile_is_unimodal(report):
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    s = Sample(rng.exponential(size=(10_000, 2)))
    ang = 2 * np.pi * np.arange(720) / 720
    prof = outlyingness_profile(s, QUAD, [0.8, 0.8], np.column_stack([np.cos(ang), np.sin(ang)]))
    counts = count_profile_extrema(prof, 1e-6)
    report(9, "(minimal arcs, maximal arcs)", counts, counts == (1, 1), time.perf_counter() - t0, 5)


def test_risk_coherency(report):
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    assert TOLERANCE == 1e-9
    failures = 0
    for _ in range(100):
        n = int(rng.integers(20, 200))
        X = rng.standard_normal((n, 2)) * rng.uniform(0.1, 3.0, 2)
        Y = rng.exponential(size=(n, 2)) + X * rng.uniform(-1, 1)
        a = float(rng.uniform(0.01, 0.99))
        th = rng.uniform(0, 2 * np.pi)
        u = np.array([np.cos(th), np.sin(th)])
        checks = [
            check_translation(X, rng.standard_normal(2), a, u),
            check_homogeneity(X, rng.uniform(0.1, 10.0), a, u),
            check_monotonicity(X, X + rng.exponential(size=(n, 2)), a, np.abs(u)),
            check_subadditivity(X, Y, min(a, 1 - a), u),
            check_superadditivity(X, Y, max(a, 1 - a), u),
        ]
        failures += sum(not c.holds for c in checks)
    report(10, "failed coherency checks out of 500", failures, failures == 0, time.perf_counter() - t0, 5)


def test_regression_recovers_model(report):
    t0 = time.perf_counter()
    eps = np.random.default_rng(11).exponential(size=10**6) - 1.0
    data = simulate_hetero(10_000, 11)
    worst = 0.0
    for a in (0.1, 0.5):
        e_a = expectile_exact(eps, a)
        for x in (0.3, 0.5, 0.9):
            theta = conditional_halfspace(data, a, [1.0, 0.0], [x]).theta
            worst = max(worst, abs(theta - (4 * x + np.sqrt(x / 3) * e_a)))
    report(11, "max |fitted - model expectile|", f"{worst:.4f}", worst <= 0.05, time.perf_counter() - t0, 20)


def test_region_consistency_trend(report):
    t0 = time.perf_counter()
    radius = brentq(lambda r: gaussian_g(r) - 0.2, 0.0, 5.0)
    U = circle_directions(500)
    disk = intersect_halfplanes([Hyperplane(u, -radius) for u in U], (-5, -5, 5, 5))
    improved = 0
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        h = [region_hausdorff(depth_region_2d(Sample(rng.standard_normal((n, 2))), QUAD, 0.2, 500), disk)
             for n in (500, 50_000)]
        improved += h[1] < h[0]
    report(12, "seeds where the Hausdorff distance shrinks", f"{improved}/10", improved >= 9,
           time.perf_counter() - t0, 60)
