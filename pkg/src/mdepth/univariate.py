"""Univariate M-quantiles, the G function and univariate M-depth.

The M-quantile of order ``alpha`` is taken as ``inf{theta : G(theta) >= alpha}``
where ``G`` is the ratio of lower to total absolute left-derivative mass.
This gives a unique representative even when the loss minimizer is an
interval (absolute loss on atomic samples).
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateDenominator, InvalidData
from .loss import LossSpec, check_order, psi_minus

__all__ = [
    "Series",
    "as_series",
    "g_function",
    "g_left_limit",
    "m_quantile",
    "expectile_exact",
    "weighted_expectile",
    "univariate_mdepth",
]


class Series:
    """Weighted univariate sample standing for an empirical measure.

    Weights are normalized to sum to one.  Points with zero weight are kept
    but carry no mass.  At least two distinct values must carry mass.
    """

    def __init__(self, values, weights=None):
        values = np.array(values, dtype=float).ravel()
        if values.size < 2:
            raise InvalidData("a Series needs at least two values")
        if not np.all(np.isfinite(values)):
            raise InvalidData("Series values must be finite")
        if weights is None:
            weights = np.full(values.size, 1.0 / values.size)
        else:
            weights = np.array(weights, dtype=float).ravel()
            if weights.shape != values.shape:
                raise InvalidData("weights and values differ in length")
            if not np.all(np.isfinite(weights)) or np.any(weights < 0):
                raise InvalidData("weights must be finite and nonnegative")
            total = weights.sum()
            if total <= 0:
                raise InvalidData("weights sum to zero")
            weights = weights / total
        massive = values[weights > 0]
        if massive.min() == massive.max():
            raise InvalidData("all values carrying mass are identical")
        order = np.argsort(values, kind="stable")
        self.values = values
        self.weights = weights
        self.sorted_values = values[order]
        self.sorted_weights = weights[order]
        self.values.setflags(write=False)
        self.weights.setflags(write=False)
        self.sorted_values.setflags(write=False)
        self.sorted_weights.setflags(write=False)

    def __len__(self):
        return self.values.size

    @property
    def lo(self) -> float:
        return float(self.sorted_values[self.sorted_weights > 0][0])

    @property
    def hi(self) -> float:
        return float(self.sorted_values[self.sorted_weights > 0][-1])

    def mean(self) -> float:
        return float(np.dot(self.weights, self.values))


def as_series(s, weights=None) -> Series:
    if isinstance(s, Series):
        return s
    return Series(s, weights)


def _g_sums(s: Series, loss: LossSpec, theta: float):
    mag = np.abs(psi_minus(loss, s.values - theta)) * s.weights
    den = mag.sum()
    if den <= 0:
        raise DegenerateDenominator(f"zero psi-mass around theta={theta}")
    return mag[s.values <= theta].sum(), den


def g_function(s, loss: LossSpec, theta: float) -> float:
    s = as_series(s)
    num, den = _g_sums(s, loss, float(theta))
    return min(max(num / den, 0.0), 1.0)


def g_left_limit(s, loss: LossSpec, theta: float) -> float:
    """Left limit ``G(theta - 0)``.

    For continuous left-derivatives G is continuous and this equals
    :func:`g_function`; for absolute-type losses G is the weighted ECDF and
    the left limit is the strict ECDF ``P[Z < theta]``.
    """
    s = as_series(s)
    theta = float(theta)
    if loss.is_absolute_like:
        return float(s.weights[s.values < theta].sum())
    return g_function(s, loss, theta)


def weighted_expectile(values, weights, alpha: float) -> float:
    """Exact weighted expectile by a sorted scan over breakpoints.

    Solves ``alpha * sum w (z - t)_+ = (1 - alpha) * sum w (t - z)_+``.  The
    left side minus the right side is piecewise linear and decreasing in
    ``t``; its root lies between the first breakpoint where it turns
    nonpositive and the one before.  A constant sample returns its value.
    """
    z = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    keep = w > 0
    z, w = z[keep], w[keep]
    order = np.argsort(z, kind="stable")
    z, w = z[order], w[order] / w.sum()
    if z[0] == z[-1]:
        return float(z[0])
    # centre for accuracy of the running sums
    shift = float(np.dot(w, z))
    z = z - shift
    cw = np.cumsum(w)
    cz = np.cumsum(w * z)
    tw, tz = cw[-1], cz[-1]
    a, b = alpha, 1.0 - alpha
    # h at each breakpoint, lower set = indices <= j
    h = a * ((tz - cz) - z * (tw - cw)) - b * (z * cw - cz)
    j = int(np.argmax(h <= 0))
    if h[j] == 0 or j == 0:
        return float(z[j] + shift)
    lo_w, lo_z = cw[j - 1], cz[j - 1]
    theta = (a * (tz - lo_z) + b * lo_z) / (a * (tw - lo_w) + b * lo_w)
    theta = min(max(theta, z[j - 1]), z[j])
    return float(theta + shift)


def expectile_exact(s, alpha) -> float:
    """Order-``alpha`` expectile of a (weighted) sample, exact up to rounding."""
    alpha = check_order(alpha)
    s = as_series(s)
    return weighted_expectile(s.sorted_values, s.sorted_weights, alpha)


def _ecdf_quantile(s: Series, alpha: float) -> float:
    cw = np.cumsum(s.sorted_weights)
    # guard against rounding in the cumulative weights
    idx = int(np.searchsorted(cw, alpha * (1.0 - 1e-12), side="left"))
    idx = min(idx, cw.size - 1)
    while s.sorted_weights[idx] == 0 and idx < cw.size - 1:
        idx += 1
    return float(s.sorted_values[idx])


def _bisect_quantile(s: Series, loss: LossSpec, alpha: float, max_iter=200) -> float:
    lo, hi = s.lo, s.hi
    # G(lo) < alpha unless lo itself is the answer
    if g_function(s, loss, lo) >= alpha:
        return lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g_function(s, loss, mid) >= alpha:
            hi = mid
        else:
            lo = mid
    return hi


def m_quantile(s, loss: LossSpec, alpha) -> float:
    """Order-``alpha`` M-quantile ``inf{theta : G(theta) >= alpha}``."""
    alpha = check_order(alpha)
    s = as_series(s)
    if loss.is_absolute_like:
        return _ecdf_quantile(s, alpha)
    if loss.kind == "quadratic":
        return weighted_expectile(s.sorted_values, s.sorted_weights, alpha)
    return _bisect_quantile(s, loss, alpha)


def univariate_mdepth(s, loss: LossSpec, theta: float) -> float:
    """``min(G(theta), 1 - G(theta - 0))``; zero outside the sample range."""
    s = as_series(s)
    theta = float(theta)
    if theta < s.lo or theta > s.hi:
        return 0.0
    return min(g_function(s, loss, theta), 1.0 - g_left_limit(s, loss, theta))
