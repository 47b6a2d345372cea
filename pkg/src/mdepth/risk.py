"""Expectile risk halfspaces and executable coherency checks.

Set-valued statements about halfspaces sharing a direction ``u`` reduce to
scalar statements about their intercepts: e.g. ``H(X+Y)`` is contained in the
Minkowski sum ``H(X) + H(Y)`` iff ``theta(X+Y) >= theta(X) + theta(Y)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .depth import as_direction, as_sample
from .errors import InvalidData, PreconditionViolated, ShapeMismatch
from .geometry import Hyperplane, Region2D, bounding_box, intersect_halfplanes
from .loss import check_order
from .regions import column_expectiles
from .univariate import weighted_expectile

__all__ = [
    "RiskReport",
    "risk_intercept",
    "risk_halfspace",
    "positive_directions",
    "upper_envelope_2d",
    "check_translation",
    "check_homogeneity",
    "check_monotonicity",
    "check_subadditivity",
    "check_superadditivity",
]

TOLERANCE = 1e-9


@dataclass
class RiskReport:
    """Outcome of one scalar coherency check (``holds`` iff lhs vs rhs within tolerance)."""

    check: str
    alpha: float
    u: list
    lhs: float
    rhs: float
    holds: bool
    tolerance: float = TOLERANCE

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict())


def risk_intercept(x, alpha, u) -> float:
    """Order-``alpha`` expectile of ``u'X`` for the rows of ``x``."""
    X = np.asarray(getattr(x, "data", x), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    u = as_direction(u)
    p = X @ u
    return weighted_expectile(p, np.ones_like(p), check_order(alpha))


def risk_halfspace(sample, alpha, u) -> Hyperplane:
    """Expectile halfspace ``{z : u'z >= e_alpha(u'X)}``."""
    u = as_direction(u)
    return Hyperplane(u, risk_intercept(sample, alpha, u))


def positive_directions(L: int) -> np.ndarray:
    """``L`` directions equispaced on the closed quarter circle [0, pi/2]."""
    if L < 2:
        raise ValueError("need at least 2 positive directions")
    ang = 0.5 * np.pi * np.arange(L) / (L - 1)
    U = np.column_stack([np.cos(ang), np.sin(ang)])
    U[-1, 0] = 0.0  # exact axis direction
    return U


def upper_envelope_2d(sample, alpha, L=91, inflate=0.1) -> Region2D:
    """Intersection of the expectile halfspaces over positive directions.

    The true envelope is unbounded; it is returned clipped to the data box
    inflated by ``inflate``, with ``clipped_edges`` marking box edges.
    """
    sample = as_sample(sample)
    if sample.d != 2:
        raise InvalidData("upper envelopes are polygons only for d = 2")
    alpha = check_order(alpha)
    U = positive_directions(L)
    theta = column_expectiles(sample.data @ U.T, alpha)
    hs = [Hyperplane(u, t) for u, t in zip(U, theta)]
    box = bounding_box(sample.data, inflate)
    return intersect_halfplanes(hs, box)


def _pair(x, y):
    X = np.asarray(getattr(x, "data", x), dtype=float)
    Y = np.asarray(getattr(y, "data", y), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape != Y.shape:
        raise ShapeMismatch(f"paired samples differ in shape: {X.shape} vs {Y.shape}")
    return X, Y


def _report(name, alpha, u, lhs, rhs, holds):
    return RiskReport(name, float(alpha), [float(v) for v in u], float(lhs), float(rhs), bool(holds))


def check_translation(x, shift, alpha, u) -> RiskReport:
    """``theta(X + z) == theta(X) + u'z``."""
    X = np.asarray(getattr(x, "data", x), dtype=float)
    u = as_direction(u)
    shift = np.asarray(shift, dtype=float)
    lhs = risk_intercept(X + shift, alpha, u)
    rhs = risk_intercept(X, alpha, u) + float(u @ shift)
    return _report("translation", alpha, u, lhs, rhs, abs(lhs - rhs) <= TOLERANCE * max(1.0, abs(rhs)))


def check_homogeneity(x, lam, alpha, u) -> RiskReport:
    """``theta(lam X) == lam theta(X)`` for ``lam > 0``."""
    if lam <= 0:
        raise PreconditionViolated("homogeneity needs a positive scale")
    X = np.asarray(getattr(x, "data", x), dtype=float)
    u = as_direction(u)
    lhs = risk_intercept(lam * X, alpha, u)
    rhs = lam * risk_intercept(X, alpha, u)
    return _report("homogeneity", alpha, u, lhs, rhs, abs(lhs - rhs) <= TOLERANCE * max(1.0, abs(rhs)))


def check_monotonicity(x, y, alpha, u) -> RiskReport:
    """``X <= Y`` componentwise implies ``theta(u'X) <= theta(u'Y)`` for positive ``u``."""
    X, Y = _pair(x, y)
    if np.any(X > Y):
        raise PreconditionViolated("monotonicity check needs X <= Y componentwise")
    u = as_direction(u)
    if np.any(u < 0):
        raise PreconditionViolated("monotonicity check needs a nonnegative direction")
    lhs = risk_intercept(X, alpha, u)
    rhs = risk_intercept(Y, alpha, u)
    return _report("monotonicity", alpha, u, lhs, rhs, lhs <= rhs + TOLERANCE)


def check_subadditivity(x, y, alpha, u) -> RiskReport:
    """``H(X+Y)`` inside ``H(X) + H(Y)``: ``theta(X+Y) >= theta(X) + theta(Y)`` for alpha <= 1/2."""
    X, Y = _pair(x, y)
    alpha = check_order(alpha)
    if alpha > 0.5:
        raise PreconditionViolated("subadditivity holds for alpha <= 1/2")
    u = as_direction(u)
    lhs = risk_intercept(X + Y, alpha, u)
    rhs = risk_intercept(X, alpha, u) + risk_intercept(Y, alpha, u)
    return _report("subadditivity", alpha, u, lhs, rhs, lhs >= rhs - TOLERANCE)


def check_superadditivity(x, y, alpha, u) -> RiskReport:
    """``H(X) + H(Y)`` inside ``H(X+Y)``: ``theta(X+Y) <= theta(X) + theta(Y)`` for alpha >= 1/2."""
    X, Y = _pair(x, y)
    alpha = check_order(alpha)
    if alpha < 0.5:
        raise PreconditionViolated("superadditivity holds for alpha >= 1/2")
    u = as_direction(u)
    lhs = risk_intercept(X + Y, alpha, u)
    rhs = risk_intercept(X, alpha, u) + risk_intercept(Y, alpha, u)
    return _report("superadditivity", alpha, u, lhs, rhs, lhs <= rhs + TOLERANCE)
