"""Multiple-output expectile regression through direction-wise single-output fits.

For a response direction ``u`` the conditional intercept at ``x`` is estimated
by regressing ``u'Y`` on the covariates, either with a linear asymmetric
least-squares fit (IRLS) or with a kernel-weighted local constant expectile.
Intersecting the resulting upper halfspaces over directions gives the
conditional depth region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import as_direction, circle_directions
from .errors import InsufficientLocalData, InvalidData, NotConverged, RankDeficient
from .geometry import Hyperplane, Region2D, bounding_box, intersect_halfplanes
from .loss import check_order
from .univariate import weighted_expectile

__all__ = [
    "RegressionData",
    "RegressionFit",
    "LinearEngine",
    "LocalEngine",
    "parse_engine",
    "linear_expectile_fit",
    "kernel_weights",
    "local_expectile_fit",
    "conditional_halfspace",
    "conditional_region_2d",
    "simulate_hetero",
    "simulate_cigar",
]


class RegressionData:
    """Covariates ``X`` (n x p, p may be 0) and responses ``Y`` (n x d)."""

    def __init__(self, covariates, responses):
        Y = np.array(responses, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        n = Y.shape[0]
        X = np.array(covariates, dtype=float)
        if X.size == 0:
            X = np.empty((n, 0))
        elif X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != n:
            raise InvalidData("covariates and responses differ in length")
        if n < X.shape[1] + 2:
            raise InvalidData(f"need n >= p + 2 observations, got n={n}, p={X.shape[1]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise InvalidData("regression data must be finite")
        X.setflags(write=False)
        Y.setflags(write=False)
        self.covariates = X
        self.responses = Y

    @property
    def n(self):
        return self.responses.shape[0]

    @property
    def p(self):
        return self.covariates.shape[1]

    @property
    def d(self):
        return self.responses.shape[1]


@dataclass
class RegressionFit:
    u: np.ndarray
    alpha: float
    beta: np.ndarray  # intercept first
    iterations: int
    converged: bool

    def predict(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return float(self.beta[0] + x @ self.beta[1:])


@dataclass(frozen=True)
class LinearEngine:
    tol: float = 1e-10
    max_iter: int = 200


@dataclass(frozen=True)
class LocalEngine:
    bandwidth: float
    kernel: str = "gaussian"

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if self.kernel not in ("gaussian", "epanechnikov"):
            raise ValueError(f"unknown kernel {self.kernel!r}")


def parse_engine(text: str):
    """``"linear"`` or ``"local:H"`` / ``"local:H:KERNEL"``."""
    parts = text.strip().lower().split(":")
    if parts[0] == "linear" and len(parts) == 1:
        return LinearEngine()
    if parts[0] == "local" and len(parts) in (2, 3):
        kernel = parts[2] if len(parts) == 3 else "gaussian"
        return LocalEngine(float(parts[1]), kernel)
    raise ValueError(f"bad engine {text!r}; use linear or local:H[:kernel]")


def _design(X, n):
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        X = np.empty((n, 0))
    elif X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(n), X])


def linear_expectile_fit(X, y, alpha, tol=1e-10, max_iter=200, u=None) -> RegressionFit:
    """Linear expectile regression by iteratively reweighted least squares.

    Weights are ``alpha`` for nonnegative residuals and ``1 - alpha`` for
    negative ones; iteration stops when the coefficients move by less than
    ``tol`` in sup-norm.  The fit is returned with ``converged=False`` when
    ``max_iter`` is reached.
    """
    alpha = check_order(alpha)
    y = np.asarray(y, dtype=float).ravel()
    D = _design(X, y.size)
    if np.linalg.matrix_rank(D) < D.shape[1]:
        raise RankDeficient("design matrix [1|X] is rank deficient")
    beta = np.linalg.lstsq(D, y, rcond=None)[0]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        r = y - D @ beta
        w = np.where(r >= 0, alpha, 1.0 - alpha)
        sw = np.sqrt(w)
        new = np.linalg.lstsq(D * sw[:, None], y * sw, rcond=None)[0]
        step = float(np.max(np.abs(new - beta)))
        beta = new
        if step < tol:
            converged = True
            break
    return RegressionFit(None if u is None else as_direction(u), alpha, beta, it, converged)


def kernel_weights(x, x0, bandwidth, kernel="gaussian"):
    t = (np.asarray(x, dtype=float).ravel() - float(x0)) / bandwidth
    if kernel == "gaussian":
        return np.exp(-0.5 * t * t)
    if kernel == "epanechnikov":
        return np.clip(1.0 - t * t, 0.0, None)
    raise ValueError(f"unknown kernel {kernel!r}")


def local_expectile_fit(X, y, alpha, x0, bandwidth, kernel="gaussian", min_points=5.0) -> float:
    """Kernel-weighted local constant expectile of ``y`` at ``x0``.

    The effective sample size ``(sum K)^2 / sum K^2`` must reach
    ``min_points``.
    """
    alpha = check_order(alpha)
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise InvalidData("local engine needs a single covariate")
        X = X[:, 0]
    w = kernel_weights(X, x0, bandwidth, kernel)
    s1, s2 = w.sum(), (w * w).sum()
    if s2 == 0 or s1 * s1 / s2 < min_points:
        raise InsufficientLocalData(f"too little kernel mass at x0={x0} with h={bandwidth}")
    return weighted_expectile(y, w, alpha)


def conditional_halfspace(data: RegressionData, alpha, u, x, engine=None) -> Hyperplane:
    """Estimated conditional halfspace ``{y : u'y >= theta(x)}``."""
    engine = LinearEngine() if engine is None else engine
    u = as_direction(u)
    proj = data.responses @ u
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if isinstance(engine, LocalEngine):
        theta = local_expectile_fit(data.covariates, proj, alpha, x[0], engine.bandwidth, engine.kernel)
    else:
        fit = linear_expectile_fit(data.covariates, proj, alpha, engine.tol, engine.max_iter, u=u)
        if not fit.converged:
            raise NotConverged(f"IRLS did not converge in {engine.max_iter} iterations")
        theta = fit.predict(x) if data.p else float(fit.beta[0])
    return Hyperplane(u, theta)


def conditional_region_2d(data: RegressionData, alpha, x, L=200, engine=None, directions=None,
                          box=None) -> Region2D:
    """Conditional depth region at covariate value ``x`` from ``L`` directions."""
    if data.d != 2:
        raise InvalidData("conditional regions are polygons only for d = 2")
    U = circle_directions(L) if directions is None else np.atleast_2d(directions)
    hs = [conditional_halfspace(data, alpha, u, x, engine) for u in U]
    if box is None:
        box = bounding_box(data.responses, 0.5)
    return intersect_halfplanes(hs, box)


def simulate_hetero(n: int, seed: int) -> RegressionData:
    """Heteroscedastic model ``Y = 4 (X, X) + sqrt(X / 3) (e1, e2)``.

    ``X ~ U[0, 1]`` and ``e1 + 1, e2 + 1`` are independent unit exponentials.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, n)
    eps = rng.exponential(1.0, (n, 2)) - 1.0
    Y = 4.0 * x[:, None] + np.sqrt(x / 3.0)[:, None] * eps
    return RegressionData(x[:, None], Y)


def simulate_cigar(n: int, seed: int):
    """Cigar-shaped cloud: x on a uniform grid of [-1, 1], y ~ N(0, 0.01)."""
    from .depth import Sample

    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    x = np.linspace(-1.0, 1.0, n)
    y = rng.normal(0.0, 0.1, n)
    return Sample(np.column_stack([x, y]))
