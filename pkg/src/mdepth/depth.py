"""Halfspace M-depth of points: directional outlyingness, grid and optimizer paths.

The depth of ``z`` is the infimum over unit directions ``u`` of the
directional outlyingness

    G_u(u'z) = sum_i |psi(u'(Z_i - z))| 1[u'(Z_i - z) <= 0] / sum_i |psi(u'(Z_i - z))|.

For the quadratic loss (expectile depth) the profile of this function along
any great circle is constant, then increasing, then constant when read from
its minimizer, which makes a coordinate-wise great-circle search reliable.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import lsq_linear

from .errors import DegenerateDenominator, InvalidData
from .loss import LossSpec, psi_minus

__all__ = [
    "Sample",
    "DepthResult",
    "as_sample",
    "as_direction",
    "circle_directions",
    "sphere_directions",
    "direction_grid",
    "directional_outlyingness",
    "outlyingness_profile",
    "mdepth_grid",
    "expectile_depth",
    "expectile_depth_2d_exact",
    "segment_certificate",
    "certificate_residual",
    "golden_section",
    "count_profile_extrema",
    "parallel_map",
]

QUADRATIC = LossSpec("quadratic")
_CHUNK = 1 << 22  # elements per projection block


class Sample:
    """An ``n x d`` data matrix standing for the empirical measure.

    No hyperplane may carry all points, so the centred data must have rank
    ``d``; this also forces ``n >= d + 1``.
    """

    def __init__(self, data):
        data = np.array(data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2:
            raise InvalidData("sample data must be a 2-d array")
        n, d = data.shape
        if d < 1 or n < d + 1:
            raise InvalidData(f"need n >= d + 1 observations, got n={n}, d={d}")
        if not np.all(np.isfinite(data)):
            raise InvalidData("sample contains non-finite entries")
        mean = data.mean(axis=0)
        if np.linalg.matrix_rank(data - mean) < d:
            raise InvalidData("sample lies in a hyperplane")
        data.setflags(write=False)
        mean.setflags(write=False)
        self.data = data
        self.mean = mean

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Sample(n={self.n}, d={self.d})"


def as_sample(x) -> Sample:
    return x if isinstance(x, Sample) else Sample(x)


def as_direction(u) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    norm = np.linalg.norm(u)
    if not np.isfinite(norm) or norm == 0:
        raise ValueError("direction must be a nonzero finite vector")
    return u / norm


def circle_directions(L: int) -> np.ndarray:
    """``L`` equispaced unit vectors ``(cos 2 pi l / L, sin 2 pi l / L)``."""
    ang = 2.0 * np.pi * np.arange(L) / L
    return np.column_stack([np.cos(ang), np.sin(ang)])


def sphere_directions(L: int, d: int) -> np.ndarray:
    """Deterministic near-uniform grid of ``L`` points on the sphere plus antipodes.

    ``d = 3`` uses the Fibonacci lattice; larger ``d`` normalizes a fixed
    scrambled Halton sequence pushed through the normal quantile function.
    """
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        return circle_directions(2 * L)
    if d == 3:
        i = np.arange(L) + 0.5
        z = 1.0 - 2.0 * i / L
        r = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - math.sqrt(5.0)) * i
        U = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        from scipy.stats import norm, qmc

        pts = qmc.Halton(d, scramble=True, seed=20240617).random(L)
        U = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
    return np.vstack([U, -U])


def direction_grid(L: int, d: int) -> np.ndarray:
    """Default grid: ``L`` equispaced angles for ``d = 2``, else :func:`sphere_directions`."""
    if d == 2:
        return circle_directions(L)
    return sphere_directions(L, d)


def _ratio(loss: LossSpec, T):
    """Column-wise outlyingness for a block ``T`` of centred projections."""
    if loss.kind == "quadratic":
        mag = np.abs(T)
    elif loss.is_absolute_like:
        mag = np.ones_like(T)
    else:
        mag = np.abs(psi_minus(loss, T))
    num = np.where(T <= 0, mag, 0.0).sum(axis=0)
    den = mag.sum(axis=0)
    if np.any(den <= 0):
        raise DegenerateDenominator("all projected mass sits at u'z")
    return np.clip(num / den, 0.0, 1.0)


def outlyingness_profile(sample, loss: LossSpec, z, directions) -> np.ndarray:
    """Directional outlyingness ``G_u(u'z)`` for every row ``u`` of ``directions``."""
    sample = as_sample(sample)
    z = np.asarray(z, dtype=float).ravel()
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    out = np.empty(len(U))
    step = max(1, _CHUNK // sample.n)
    for k in range(0, len(U), step):
        Uk = U[k : k + step]
        # project data and z separately so values agree with the halfspace intercepts
        T = sample.data @ Uk.T - (Uk @ z)[None, :]
        out[k : k + step] = _ratio(loss, T)
    return out


def directional_outlyingness(sample, loss: LossSpec, z, u) -> float:
    u = as_direction(u)
    return float(outlyingness_profile(sample, loss, z, u[None, :])[0])


@dataclass
class DepthResult:
    """Depth value with the minimizing direction and optimizer diagnostics.

    ``certificate`` holds the lower and upper truncated means along the
    minimizing direction when available.
    """

    value: float
    argmin_u: np.ndarray
    evals: int
    certificate: tuple | None = None
    converged: bool = True

    def __float__(self):
        return float(self.value)


def mdepth_grid(sample, loss: LossSpec, z, directions) -> DepthResult:
    """Minimum of the directional outlyingness over a finite direction set.

    This upper-bounds the true depth; antipodally closed grids are advised.
    """
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    if len(U) == 0:
        raise ValueError("empty direction set")
    vals = outlyingness_profile(sample, loss, z, U)
    k = int(np.argmin(vals))
    return DepthResult(float(vals[k]), U[k].copy(), len(U))


def golden_section(f, a, b, tol=1e-10, max_iter=200):
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x), evals)``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        evals += 1
    return (x1, f1, evals) if f1 <= f2 else (x2, f2, evals)


def _e_value(W, u):
    t = W @ u
    den = np.abs(t).sum()
    if den <= 0:
        raise DegenerateDenominator("all projected mass sits at u'z")
    return float(-t[t <= 0].sum() / den)


def _spread_starts(U, vals, k, min_angle=0.5):
    order = np.argsort(vals, kind="stable")
    chosen = []
    cos_lim = math.cos(min_angle)
    for i in order:
        if all(float(U[i] @ U[j]) < cos_lim for j in chosen):
            chosen.append(i)
        if len(chosen) == k:
            break
    return chosen


def _circle_search(W, u, v, best, coarse=24, tol=1e-10):
    """Minimize the profile along the great circle through ``u`` and ``v``."""
    ts = 2.0 * np.pi * np.arange(coarse) / coarse - np.pi
    C = np.outer(np.cos(ts), u) + np.outer(np.sin(ts), v)
    T = W @ C.T
    den = np.abs(T).sum(axis=0)
    vals = np.where(T <= 0, -T, 0.0).sum(axis=0) / den
    k = int(np.argmin(vals))
    h = 2.0 * np.pi / coarse

    def prof(t):
        return _e_value(W, math.cos(t) * u + math.sin(t) * v)

    t_star, f_star, evals = golden_section(prof, ts[k] - h, ts[k] + h, tol=tol)
    evals += coarse
    cands = [(f_star, t_star), (float(vals[k]), float(ts[k]))]
    f_new, t_new = min(cands)
    if f_new < best:
        w = math.cos(t_new) * u + math.sin(t_new) * v
        return w / np.linalg.norm(w), f_new, evals
    return u, best, evals


def _ridge_sweep(W, u, val, tol, band=1e-8):
    """Descend along the ridge where the current boundary points stay on the hyperplane.

    At a kink of the profile some ``W_i`` satisfy ``u'W_i = 0``; moving along
    great circles orthogonal to all of them keeps those points on the
    boundary, which coordinate circles through ``u`` generally cannot do.
    Newly tight points are added until the ridge reduces to a single
    direction.
    """
    evals = 0
    scale = np.linalg.norm(W, axis=1)
    for _ in range(W.shape[1]):
        tight = np.abs(W @ u) <= band * np.maximum(scale, 1e-300)
        if not tight.any():
            break
        V = null_space(np.vstack([W[tight], u]), rcond=1e-10)
        if V.shape[1] == 0:
            break
        start = val
        for j in range(V.shape[1]):
            v = V[:, j] - (V[:, j] @ u) * u
            v /= np.linalg.norm(v)
            u, val, ne = _circle_search(W, u, v, val, tol=tol)
            evals += ne
        if start - val < tol:
            break
    return u, val, evals


def expectile_depth(sample, z, tol=1e-10, max_iter=50, restarts=8, prescan=64,
                    with_certificate=True) -> DepthResult:
    """Expectile depth of ``z`` by great-circle coordinate descent.

    A coarse prescan over ``prescan`` grid directions seeds ``restarts``
    well-separated starting directions.  From each, sweeps cycle through the
    great circles spanned by the current direction and an orthonormal basis
    of its complement; the circle minimizer is bracketed on a coarse ring and
    refined by golden-section search.  For ``d > 2`` each sweep is followed
    by a ridge phase that moves along circles keeping the current boundary
    points on the hyperplane, which escapes the kinks where plain coordinate
    circles stall.  A sweep improving the value by less than ``tol`` ends the
    descent.  ``converged`` is False when ``max_iter``
    sweeps were exhausted for the winning start.
    """
    sample = as_sample(sample)
    z = np.asarray(z, dtype=float).ravel()
    W = sample.data - z
    d = sample.d
    if d == 1:
        U = np.array([[1.0], [-1.0]])
        vals = outlyingness_profile(sample, QUADRATIC, z, U)
        k = int(np.argmin(vals))
        return DepthResult(float(vals[k]), U[k].copy(), 2)

    U0 = direction_grid(prescan, d)
    vals0 = outlyingness_profile(sample, QUADRATIC, z, U0)
    evals = len(U0)
    best_val, best_u, best_conv = math.inf, None, True
    for i in _spread_starts(U0, vals0, max(1, restarts)):
        u = U0[i].copy()
        val = float(vals0[i])
        converged = False
        for _ in range(max_iter):
            start_val = val
            Q, _r = np.linalg.qr(np.column_stack([u, np.eye(d)]))
            basis = Q[:, 1:d]
            for j in range(d - 1):
                v = basis[:, j] - (basis[:, j] @ u) * u
                v /= np.linalg.norm(v)
                u, val, ne = _circle_search(W, u, v, val, tol=tol)
                evals += ne
            if d > 2:
                u, val, ne = _ridge_sweep(W, u, val, tol)
                evals += ne
            if start_val - val < tol:
                converged = True
                break
        if val < best_val:
            best_val, best_u, best_conv = val, u, converged
    cert = None
    if with_certificate:
        cert = segment_certificate(sample, z, best_u)
    return DepthResult(best_val, best_u, evals, cert, best_conv)


def expectile_depth_2d_exact(sample, z) -> DepthResult:
    """Exact bivariate expectile depth by an angular sweep, O(n log n).

    Between consecutive critical angles (where ``u`` is orthogonal to some
    ``Z_i - z``) the profile is a ratio of two sinusoids with fixed sign of
    derivative, so the minimum sits at a critical angle.  The lower partial
    sums at every critical angle come from prefix sums over sorted angles.
    """
    sample = as_sample(sample)
    if sample.d != 2:
        raise InvalidData("exact expectile sweep needs d = 2")
    z = np.asarray(z, dtype=float).ravel()
    W = sample.data - z
    W = W[np.any(W != 0, axis=1)]
    total = W.sum(axis=0)
    psi = np.mod(np.arctan2(W[:, 1], W[:, 0]), 2.0 * np.pi)
    order = np.argsort(psi, kind="stable")
    psi, W = psi[order], W[order]
    psi2 = np.concatenate([psi, psi + 2.0 * np.pi])
    S = np.vstack([np.zeros(2), np.cumsum(np.vstack([W, W]), axis=0)])
    phi = np.mod(np.concatenate([psi + 0.5 * np.pi, psi - 0.5 * np.pi]), 2.0 * np.pi)
    # lower set at phi: angles in (phi + pi/2, phi + 3 pi/2)
    lo = np.mod(phi + 0.5 * np.pi, 2.0 * np.pi)
    i0 = np.searchsorted(psi2, lo, side="right")
    i1 = np.searchsorted(psi2, lo + np.pi, side="left")
    A = S[i1] - S[i0]
    U = np.column_stack([np.cos(phi), np.sin(phi)])
    ua = np.einsum("ij,ij->i", U, A)
    um = U @ total
    vals = np.clip(-ua / (um - 2.0 * ua), 0.0, 1.0)
    k = int(np.argmin(vals))
    return DepthResult(float(vals[k]), U[k], len(phi), segment_certificate(sample, z, U[k]))


def segment_certificate(sample, z, u, band=1e-7):
    """Lower and upper truncated means along ``u`` through ``z``.

    Points within ``band`` (relative) of the hyperplane ``u'(Z - z) = 0`` are
    split fractionally between the lower and upper sets so that the lower
    partial sum is as parallel as possible to ``sum_i (Z_i - z)``; at a
    minimal direction this makes ``z`` lie on the segment joining the two
    means.  Returns ``None`` when one side is empty.
    """
    sample = as_sample(sample)
    z = np.asarray(z, dtype=float).ravel()
    u = as_direction(u)
    W = sample.data - z
    t = W @ u
    scale = np.linalg.norm(W, axis=1)
    on = np.abs(t) <= band * np.maximum(scale, 1e-300)
    low = (t < 0) & ~on
    a = W[low].sum(axis=0)
    n_low = float(low.sum())
    m = W.sum(axis=0)
    WB = W[on]
    lam = np.zeros(len(WB))
    mnorm = np.linalg.norm(m)
    if len(WB) and mnorm > 0:
        mh = m / mnorm
        P = np.eye(sample.d) - np.outer(mh, mh)
        res = lsq_linear(P @ WB.T, -(P @ a), bounds=(0.0, 1.0))
        lam = np.clip(res.x, 0.0, 1.0)
    elif len(WB):
        lam = np.full(len(WB), 0.5)
    a = a + lam @ WB if len(WB) else a
    n_low += float(lam.sum())
    n_up = sample.n - n_low
    if n_low <= 0 or n_up <= 0:
        return None
    return z + a / n_low, z + (m - a) / n_up


def certificate_residual(z, lower, upper) -> float:
    """Distance from ``z`` to the segment ``[lower, upper]`` relative to its length."""
    z = np.asarray(z, dtype=float)
    seg = upper - lower
    L2 = float(seg @ seg)
    if L2 == 0:
        return float(np.linalg.norm(z - lower))
    s = float((z - lower) @ seg) / L2
    perp = np.linalg.norm((z - lower) - s * seg) / math.sqrt(L2)
    return float(max(perp, -s, s - 1.0, 0.0))


def count_profile_extrema(values, tol=1e-6):
    """Number of local-minimum and local-maximum runs of a cyclic profile.

    Steps smaller than ``tol`` are treated as flat.  A unimodal cyclic
    profile has exactly one of each.
    """
    v = np.asarray(values, dtype=float)
    diff = np.roll(v, -1) - v
    signs = np.sign(np.where(np.abs(diff) <= tol, 0.0, diff))
    signs = signs[signs != 0]
    if signs.size == 0:
        return 0, 0
    changes = signs - np.roll(signs, 1)
    n_min = int(np.sum(changes > 0))  # down then up
    n_max = int(np.sum(changes < 0))
    return n_min, n_max


def _thread_count(threads=None) -> int:
    if threads is None:
        threads = int(os.environ.get("MDEPTH_THREADS", "0") or 0)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def parallel_map(fn, items, threads=None):
    """Order-preserving map, threaded when more than one worker is allowed.

    ``threads=None`` reads ``MDEPTH_THREADS`` (0 means one worker per CPU).
    """
    items = list(items)
    nt = min(_thread_count(threads), len(items))
    if nt <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=nt) as ex:
        return list(ex.map(fn, items))
