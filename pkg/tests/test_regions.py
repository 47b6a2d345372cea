import numpy as np
import pytest
from reference import brute_tukey
from scipy.spatial import Delaunay

from mdepth.depth import Sample, circle_directions, mdepth_grid
from mdepth.errors import OriginOutsideSupport
from mdepth.geometry import bounding_box, region_contains
from mdepth.loss import LossSpec
from mdepth.regions import (
    column_expectiles,
    depth_region_2d,
    directional_intercepts,
    m_median,
    mquantile_hyperplane,
    support_radius,
    tukey_depth_2d_exact,
)
from mdepth.univariate import Series, m_quantile, univariate_mdepth

Q, A, H = LossSpec.quadratic(), LossSpec.absolute(), LossSpec.huber(0.5)


def test_hyperplane_examples(rng):
    X = rng.normal(size=(101, 2))
    s = Sample(X)
    u = np.array([0.6, -0.8])
    assert mquantile_hyperplane(s, Q, 0.5, u).theta == pytest.approx(u @ X.mean(0), abs=1e-14)
    q = mquantile_hyperplane(s, A, 0.25, [1, 0]).theta
    assert np.mean(X[:, 0] <= q) >= 0.25 and np.mean(X[:, 0] < q) < 0.25
    b = np.array([3.0, -2.0])
    for loss in (Q, A, H):
        t0 = mquantile_hyperplane(s, loss, 0.3, u).theta
        t1 = mquantile_hyperplane(Sample(X + b), loss, 0.3, u).theta
        assert t1 == pytest.approx(t0 + u @ b, abs=1e-9)


def test_column_expectiles_match_scalar_solver(rng):
    P = rng.standard_normal((57, 40)) * rng.uniform(0.1, 10, 40)
    w = rng.uniform(0, 1, 57)
    for alpha in (0.01, 0.2, 0.5, 0.93):
        ref = [m_quantile(Series(P[:, k]), Q, alpha) for k in range(40)]
        assert np.allclose(column_expectiles(P, alpha), ref, rtol=0, atol=1e-12)
        refw = [m_quantile(Series(P[:, k], w), Q, alpha) for k in range(40)]
        assert np.allclose(column_expectiles(P, alpha, w), refw, rtol=0, atol=1e-12)


def test_intercepts_vectorized_equals_loop(rng):
    s = Sample(rng.exponential(size=(300, 2)))
    U = circle_directions(50)
    vec = directional_intercepts(s, Q, 0.2, U)
    loop = [mquantile_hyperplane(s, Q, 0.2, u).theta for u in U]
    assert np.allclose(vec, loop, atol=1e-12)


def test_square_region_near_center(square):
    r = depth_region_2d(Sample(square), Q, 0.499, L=360)
    assert not r.is_empty
    assert region_contains(r, [0.5, 0.5])
    assert np.max(np.abs(r.vertices - 0.5)) < 0.01


def _hull_excess(X, V):
    from scipy.spatial import ConvexHull

    eq = ConvexHull(X).equations
    return float(np.max(V @ eq[:, :-1].T + eq[:, -1]))


def test_tiny_order_region_inside_hull(rng):
    X = rng.standard_normal((80, 2))
    r = depth_region_2d(Sample(X), Q, 0.0001)
    assert _hull_excess(X, r.vertices) <= 0.0
    assert not r.clipped_edges.any()


@pytest.mark.parametrize("loss", [A, H], ids=str)
def test_tiny_order_region_hugs_hull(rng, loss):
    # the lowest order statistic makes each halfplane a supporting line of the
    # hull, so with L directions the region is the circumscribed L-gon
    X = rng.standard_normal((80, 2))
    diam = np.ptp(X, axis=0).max()
    for L in (100, 500):
        r = depth_region_2d(Sample(X), loss, 0.0001, L=L)
        assert 0.0 <= _hull_excess(X, r.vertices) <= diam * np.pi / L


@pytest.mark.parametrize("loss", [Q, A, H], ids=str)
def test_regions_nested(rng, loss):
    s = Sample(rng.standard_t(3, size=(200, 2)))
    prev = None
    for alpha in (0.02, 0.1, 0.2, 0.3, 0.4):
        r = depth_region_2d(s, loss, alpha, L=200)
        if prev is not None and not r.is_empty:
            for v in r.vertices:
                assert region_contains(prev, v, tol=1e-9)
        prev = r


@pytest.mark.parametrize("loss", [Q, A, H, LossSpec.power(1.5)], ids=str)
def test_region_depth_duality(rng, loss):
    s = Sample(rng.normal(size=(150, 2)) * [1.0, 0.4])
    U = circle_directions(120)
    Z = rng.uniform(-2.5, 2.5, (100, 2))
    for alpha in (0.05, 0.2, 0.35):
        r = depth_region_2d(s, loss, alpha, directions=U)
        for z in Z:
            assert region_contains(r, z, tol=0.0) == (mdepth_grid(s, loss, z, U).value >= alpha)


def test_region_outside_box_excluded(rng):
    X = rng.normal(size=(100, 2))
    r = depth_region_2d(Sample(X), Q, 0.01)
    xmin, ymin, xmax, ymax = bounding_box(X, 0.0)
    assert not region_contains(r, [xmax + 1, ymax + 1])


def test_median_quadratic_is_mean(rng):
    X = rng.gamma(2.0, size=(50, 3))
    assert np.array_equal(m_median(Sample(X), Q), X.mean(axis=0))


@pytest.mark.parametrize("loss", [A, H], ids=str)
def test_median_symmetric_sample(rng, loss):
    P = rng.normal(size=(40, 2))
    c = np.array([1.0, -2.0])
    X = np.vstack([c + P, c - P])
    med = m_median(Sample(X), loss, L=360)
    assert np.linalg.norm(med - c) < 0.02


def test_median_univariate_is_midpoint_of_deepest_set():
    x = np.array([0.0, 1.0, 2.0, 7.0])
    s = Series(x)
    grid = np.linspace(-1, 8, 90001)
    dep = np.array([univariate_mdepth(s, A, t) for t in grid])
    top = grid[dep >= dep.max() - 1e-12]
    med = m_median(Sample(x), A)
    assert med[0] == pytest.approx(0.5 * (top.min() + top.max()), abs=2e-4)


def test_median_three_dimensions(rng):
    P = rng.normal(size=(30, 3))
    X = np.vstack([P, -P])
    med = m_median(Sample(X), H, L=300)
    assert np.linalg.norm(med) < 0.05


def test_tukey_examples(rng, square):
    assert tukey_depth_2d_exact(Sample(square), [0.5, 0.5]) == 0.5
    X = rng.normal(size=(50, 2))
    s = Sample(X)
    assert tukey_depth_2d_exact(s, [10, 10]) == 0.0
    for x in X[:10]:
        assert tukey_depth_2d_exact(s, x) >= 1 / 50


def test_tukey_matches_brute_force(rng):
    for _ in range(5):
        X = rng.normal(size=(int(rng.integers(5, 60)), 2))
        s = Sample(X)
        for z in np.vstack([rng.normal(size=(10, 2)), X[:3]]):
            assert tukey_depth_2d_exact(s, z) == brute_tukey(X, z)


def test_absolute_grid_depth_close_to_tukey(rng):
    X = rng.normal(size=(200, 2))
    s = Sample(X)
    U = circle_directions(1000)
    for z in rng.normal(size=(20, 2)) * 0.8:
        assert abs(mdepth_grid(s, A, z, U).value - tukey_depth_2d_exact(s, z)) <= 0.01


def test_support_radius_examples(square):
    s = Sample(square)
    assert support_radius(s, [0.5, 0.5], [1, 0]) == pytest.approx(0.5)
    for u in ([1, 0], [0, 1], [2**-0.5, 2**-0.5]):
        u = np.array(u, float)
        width = np.ptp(square @ u)
        assert support_radius(s, [0.5, 0.5], u) + support_radius(s, [0.5, 0.5], -u) == pytest.approx(width)
    assert support_radius(Sample(square), [1.0, 0.5], [1, 0]) == 0.0
    with pytest.raises(OriginOutsideSupport):
        support_radius(Sample(square), [2.0, 0.5], [1, 0])


def test_support_radius_against_bisection(rng):
    X = rng.normal(size=(60, 2))
    s = Sample(X)
    tri = Delaunay(X)
    o = X.mean(0)
    for u in circle_directions(16):
        lo, hi = 0.0, 100.0
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if tri.find_simplex(o + mid * u) >= 0 else (lo, mid)
        assert support_radius(s, o, u) == pytest.approx(lo, abs=1e-6)


def test_support_radius_one_dimension():
    s = Sample([0.0, 1.0, 3.0])
    assert support_radius(s, [1.0], [1.0]) == 2.0
    assert support_radius(s, [1.0], [-1.0]) == 1.0
