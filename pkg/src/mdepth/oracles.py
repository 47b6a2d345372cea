"""Closed-form population expectile depths.

These are exact depths for a few reference laws and serve as ground truth
for the sample-based depth engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import InvalidData, SeriesDiverged

__all__ = [
    "EllipticalSpec",
    "gamma",
    "pochhammer",
    "hyp2f1_series",
    "ed_uniform_interval",
    "ed_uniform_pair",
    "gaussian_g",
    "ed_gaussian",
    "ed_uniform_ball",
    "ed_uniform_sphere",
]


@dataclass
class EllipticalSpec:
    """Location ``mu`` and scatter ``sigma`` of an elliptical law."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        self.sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        d = self.mu.size
        if self.sigma.shape != (d, d):
            raise InvalidData("sigma must be d x d")
        if np.max(np.abs(self.sigma - self.sigma.T)) > 1e-12:
            raise InvalidData("sigma must be symmetric")
        try:
            self._chol = np.linalg.cholesky(self.sigma)
        except np.linalg.LinAlgError:
            raise InvalidData("sigma must be positive definite") from None

    def radius(self, z) -> float:
        """Mahalanobis norm ``sqrt((z - mu)' sigma^{-1} (z - mu))``."""
        y = np.linalg.solve(self._chol, np.asarray(z, dtype=float) - self.mu)
        return float(np.linalg.norm(y))


def gamma(x: float) -> float:
    return math.gamma(x)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``(a)_k``."""
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def hyp2f1_series(a, b, c, x, tol=1e-14, max_terms=10_000) -> float:
    """Gauss series ``sum_k (a)_k (b)_k / ((c)_k k!) x^k`` for ``|x| <= 1``.

    Summation stops once a term drops below ``tol`` (relative to the running
    sum).  Raises :class:`SeriesDiverged` outside the unit disk or when the
    term cap is hit.
    """
    if abs(x) > 1:
        raise SeriesDiverged(f"2F1 series diverges at x={x}")
    total, term = 1.0, 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        total += term
        if term == 0 or abs(term) < tol * max(1.0, abs(total)):
            return total
    raise SeriesDiverged(f"2F1 series did not settle within {max_terms} terms at x={x}")


def ed_uniform_interval(z) -> float:
    """Expectile depth for the uniform law on [0, 1]."""
    z = float(z)
    if z < 0 or z > 1:
        return 0.0
    a, b = z * z, (1.0 - z) ** 2
    return min(a, b) / (a + b)


def ed_uniform_pair(z) -> float:
    """Expectile depth for the uniform law on the pair {0, 1}."""
    z = float(z)
    if z < 0 or z > 1:
        return 0.0
    return min(z, 1.0 - z)


def gaussian_g(r) -> float:
    """Depth at Mahalanobis radius ``r`` for a Gaussian law."""
    r = float(r)
    if r == 0:
        return 0.5
    return 0.5 - 0.5 / ((2.0 / r) * norm.pdf(r) + 2.0 * norm.cdf(r) - 1.0)


def ed_gaussian(z, spec: EllipticalSpec) -> float:
    return gaussian_g(spec.radius(z))


def ed_uniform_ball(r, d: int) -> float:
    """Expectile depth at radius ``r`` for the uniform law on the unit ``d``-ball.

    ``d`` may also be ``0`` or ``-1`` (used by :func:`ed_uniform_sphere`).
    For ``r**2 <= 1/2`` the printed hypergeometric series is summed directly;
    closer to the boundary Euler's transformation
    ``2F1(1, b; 3/2; x) = (1 - x)^{-(d+1)/2} 2F1(1/2, (1-d)/2; 3/2; x)``
    cancels the singular prefactor and the series converges on all of [0, 1].
    """
    r = float(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if d < -1:
        raise ValueError("dimension index must be >= -1")
    if r >= 1:
        return 0.0
    if r == 0:
        return 0.5
    x = r * r
    const = math.sqrt(math.pi) * gamma((d + 3) / 2) / (2.0 * gamma((d + 2) / 2))
    if x <= 0.5:
        f = hyp2f1_series(1.0, (d + 2) / 2, 1.5, x)
        den = (1.0 - x) ** ((d + 1) / 2) * (1.0 + (d + 1) * x * f)
    elif d == -1:
        den = 1.0
    else:
        # terms decay like x^k k^(-d/2 - 3/2): allow a long tail as r -> 1
        ft = hyp2f1_series(0.5, (1 - d) / 2, 1.5, x, max_terms=1_000_000)
        den = (1.0 - x) ** ((d + 1) / 2) + (d + 1) * x * ft
    return max(0.0, 0.5 - const * r / den)


def ed_uniform_sphere(r, d: int) -> float:
    """Expectile depth at radius ``r`` for the uniform law on the unit sphere in R^d.

    Equals the ball formula with dimension index ``d - 2``; ``d = 1`` is the
    symmetric two-point law.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return ed_uniform_ball(r, d - 2)
