"""Hyperplane M-quantiles, depth regions, M-medians and support geometry."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull

from .depth import as_direction, as_sample, circle_directions, direction_grid, mdepth_grid
from .errors import InvalidData, NotConverged, OriginOutsideSupport
from .geometry import Hyperplane, Region2D, bounding_box, intersect_halfplanes
from .loss import LossSpec, check_order
from .univariate import Series, m_quantile, univariate_mdepth

__all__ = [
    "column_expectiles",
    "directional_intercepts",
    "mquantile_hyperplane",
    "depth_region_2d",
    "m_median",
    "tukey_depth_2d_exact",
    "support_radius",
]


def column_expectiles(P, alpha, weights=None) -> np.ndarray:
    """Exact order-``alpha`` expectile of every column of ``P``, vectorized.

    Same breakpoint scan as :func:`mdepth.univariate.weighted_expectile`.
    """
    P = np.asarray(P, dtype=float)
    n, L = P.shape
    R = np.ascontiguousarray(P.T)  # one row per column of P: row sorts are cache friendly
    if weights is None:
        Z = np.sort(R, axis=1)
        Wt = np.full((1, n), 1.0 / n)
    else:
        w = np.asarray(weights, dtype=float) / np.sum(weights)
        order = np.argsort(R, axis=1)
        Z = np.take_along_axis(R, order, axis=1)
        Wt = w[order]
    shift = (Wt * Z).sum(axis=1, keepdims=True)
    Z -= shift
    cw = np.cumsum(np.broadcast_to(Wt, Z.shape), axis=1)
    cz = np.cumsum(Wt * Z, axis=1)
    tw, tz = cw[:, -1:], cz[:, -1:]
    a, b = alpha, 1.0 - alpha
    h = a * ((tz - cz) - Z * (tw - cw)) - b * (Z * cw - cz)
    j = np.argmax(h <= 0, axis=1)
    rows = np.arange(L)
    jm = np.maximum(j - 1, 0)
    lo_w, lo_z = cw[rows, jm], cz[rows, jm]
    tw, tz = tw[:, 0], tz[:, 0]
    theta = (a * (tz - lo_z) + b * lo_z) / (a * (tw - lo_w) + b * lo_w)
    theta = np.clip(theta, Z[rows, jm], Z[rows, j])
    exact = (h[rows, j] == 0) | (j == 0)
    theta = np.where(exact, Z[rows, j], theta)
    shift = shift[:, 0]
    return theta + shift


def directional_intercepts(sample, loss: LossSpec, alpha, directions) -> np.ndarray:
    """M-quantile intercepts of the projections of ``sample`` on each direction."""
    sample = as_sample(sample)
    alpha = check_order(alpha)
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    if loss.kind == "quadratic":
        out = np.empty(len(U))
        step = max(1, (1 << 22) // sample.n)
        for k in range(0, len(U), step):
            out[k : k + step] = column_expectiles((U[k : k + step] @ sample.data.T).T, alpha)
        return out
    return np.array([m_quantile(Series(sample.data @ u), loss, alpha) for u in U])


def mquantile_hyperplane(sample, loss: LossSpec, alpha, u) -> Hyperplane:
    """Order-``alpha`` M-quantile hyperplane of ``sample`` in direction ``u``."""
    sample = as_sample(sample)
    u = as_direction(u)
    return Hyperplane(u, m_quantile(Series(sample.data @ u), loss, check_order(alpha)))


def depth_region_2d(sample, loss: LossSpec, alpha, L=500, directions=None, box=None) -> Region2D:
    """Order-``alpha`` M-quantile region as an intersection of directional halfspaces.

    ``L`` equispaced directions are used unless ``directions`` is given.  The
    clipping seed is the data bounding box inflated by 10%; the result may be
    empty.
    """
    sample = as_sample(sample)
    if sample.d != 2:
        raise InvalidData("depth regions are polygons only for d = 2")
    if directions is None:
        if L < 3:
            raise ValueError("need at least 3 directions")
        directions = circle_directions(L)
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    theta = directional_intercepts(sample, loss, alpha, U)
    hs = [Hyperplane(u, t) for u, t in zip(U, theta)]
    if box is None:
        box = bounding_box(sample.data, 0.1)
    return intersect_halfplanes(hs, box)


def _max_region_level(sample, loss, L, resolution=1e-4):
    lo, hi = 0.0, 1.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if depth_region_2d(sample, loss, mid, L).is_empty:
            hi = mid
        else:
            lo = mid
    return lo


def _univariate_median(x, loss):
    s = Series(x)
    if loss.continuous_psi:
        # continuous G: the deepest point is the unique root of G = 1/2
        return m_quantile(s, loss, 0.5)
    v = s.sorted_values
    cands = np.concatenate([v, 0.5 * (v[1:] + v[:-1])])
    top = max(univariate_mdepth(s, loss, c) for c in cands)
    lo = m_quantile(s, loss, top)
    hi = -m_quantile(Series(-s.values), loss, top)
    return 0.5 * (lo + hi)


def m_median(sample, loss: LossSpec, L=500, eps=1e-3, max_iter=2000) -> np.ndarray:
    """M-median: barycenter of the deepest region.

    Quadratic loss returns the column means.  For ``d = 2`` the largest
    non-empty region level is found by bisection to 1e-4 and the vertex
    barycenter of the region at that level minus ``eps`` is returned.  For
    ``d > 2`` the grid depth is maximized directly from the mean.
    """
    sample = as_sample(sample)
    if loss.kind == "quadratic":
        return sample.mean.copy()
    if sample.d == 1:
        return np.array([_univariate_median(sample.data[:, 0], loss)])
    if sample.d == 2:
        top = _max_region_level(sample, loss, L)
        region = depth_region_2d(sample, loss, max(top - eps, top / 2), L)
        return region.barycenter()
    U = direction_grid(L, sample.d)

    def neg_depth(z):
        return -mdepth_grid(sample, loss, z, U).value

    start = sample.mean.copy()
    res = minimize(neg_depth, start, method="Nelder-Mead",
                   options={"maxiter": max_iter, "xatol": 1e-6, "fatol": 1e-9})
    if not res.success and res.nit >= max_iter:
        raise NotConverged(f"depth maximization stopped after {res.nit} iterations")
    return res.x if res.fun <= neg_depth(start) else start


def tukey_depth_2d_exact(sample, z) -> float:
    """Exact bivariate halfspace (Tukey) depth by an angular sweep.

    The count of points in a closed halfplane through ``z`` is minimized by a
    half-circle of angles opening just after one of the data angles.
    """
    sample = as_sample(sample)
    if sample.d != 2:
        raise InvalidData("exact Tukey depth needs d = 2")
    z = np.asarray(z, dtype=float).ravel()
    W = sample.data - z
    at_z = np.all(W == 0, axis=1)
    W = W[~at_z]
    n = sample.n
    if len(W) == 0:
        return 1.0
    ang = np.sort(np.mod(np.arctan2(W[:, 1], W[:, 0]), 2.0 * np.pi))
    m = len(ang)
    ang2 = np.concatenate([ang, ang + 2.0 * np.pi])
    eps = 1e-12
    # points with angle in (a_i, a_i + pi]
    start = np.searchsorted(ang2, ang + eps, side="left")
    stop = np.searchsorted(ang2, ang + np.pi + eps, side="right")
    counts = np.minimum(stop - start, m)
    return float((int(counts.min()) + int(at_z.sum())) / n)


def support_radius(sample, origin, u, tol=1e-9) -> float:
    """Largest ``r`` with ``origin + r u`` in the convex hull of the sample.

    The hull is computed once (qhull) and the exit point along the ray is
    read off the facet inequalities, so no search is needed.
    """
    sample = as_sample(sample)
    origin = np.asarray(origin, dtype=float).ravel()
    u = as_direction(u)
    X = sample.data
    scale = max(1.0, float(np.abs(X).max()))
    if sample.d == 1:
        lo, hi = float(X.min()), float(X.max())
        o = float(origin[0])
        if o < lo - tol * scale or o > hi + tol * scale:
            raise OriginOutsideSupport(f"origin {o} outside [{lo}, {hi}]")
        return max(0.0, (hi - o) if u[0] > 0 else (o - lo))
    hull = ConvexHull(X)
    A, b = hull.equations[:, :-1], hull.equations[:, -1]
    slack = A @ origin + b  # <= 0 inside
    if np.any(slack > tol * scale):
        raise OriginOutsideSupport("origin lies outside the convex hull of the sample")
    rate = A @ u
    out = rate > 0
    if not out.any():
        return math.inf
    return float(max(0.0, np.min(-slack[out] / rate[out])))
