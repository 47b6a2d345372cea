"""Convex polygons as intersections of upper halfplanes ``{z : u'z >= theta}``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyRegion

__all__ = [
    "Hyperplane",
    "Region2D",
    "bounding_box",
    "box_halfspaces",
    "clip_halfplane",
    "intersect_halfplanes",
    "region_contains",
    "region_hausdorff",
    "polygon_area",
]

# clipped vertices closer than this (relative to the seed box) are merged
_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class Hyperplane:
    """Hyperplane ``{z : u'z = theta}`` with upper halfspace ``u'z >= theta``."""

    u: np.ndarray
    theta: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).ravel()
        norm = np.linalg.norm(u)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"direction must have unit norm, got {norm}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "theta", float(self.theta))

    def contains(self, z, tol=1e-9) -> bool:
        return float(np.dot(self.u, z)) >= self.theta - tol

    def to_dict(self):
        return {"u": [float(x) for x in self.u], "theta": self.theta}


@dataclass
class Region2D:
    """Convex polygon with counterclockwise vertices.

    ``edge_labels[k]`` is the index into ``halfspaces`` of the constraint
    supporting the edge from ``vertices[k]`` to ``vertices[k+1]``; negative
    labels mark edges of the artificial seed box.  An empty vertex array
    means the intersection is empty.
    """

    halfspaces: list
    vertices: np.ndarray
    edge_labels: np.ndarray = field(default=None)
    box: tuple = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if self.edge_labels is None:
            self.edge_labels = np.zeros(len(self.vertices), dtype=int)
        self.edge_labels = np.asarray(self.edge_labels, dtype=int)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def clipped_edges(self) -> np.ndarray:
        """Boolean mask of edges that come from the seed box."""
        return self.edge_labels < 0

    def barycenter(self) -> np.ndarray:
        if self.is_empty:
            raise EmptyRegion("empty region has no barycenter")
        return self.vertices.mean(axis=0)

    def area(self) -> float:
        return polygon_area(self.vertices)

    def to_dict(self):
        out = {
            "vertices": self.vertices.tolist(),
            "halfspaces": [h.to_dict() for h in self.halfspaces],
        }
        if self.box is not None:
            out["clip_box"] = [float(v) for v in self.box]
            out["clipped_edges"] = [bool(b) for b in self.clipped_edges]
        return out


def polygon_area(v) -> float:
    v = np.asarray(v, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def bounding_box(points, inflate=0.1):
    """Axis box ``(xmin, ymin, xmax, ymax)`` of ``points`` grown by ``inflate`` of its span."""
    p = np.asarray(points, dtype=float)
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = np.maximum(hi - lo, 1e-12 * max(1.0, float(np.abs(p).max())))
    lo, hi = lo - inflate * span, hi + inflate * span
    return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def box_halfspaces(box):
    xmin, ymin, xmax, ymax = box
    return [
        Hyperplane([1.0, 0.0], xmin),
        Hyperplane([0.0, 1.0], ymin),
        Hyperplane([-1.0, 0.0], -xmax),
        Hyperplane([0.0, -1.0], -ymax),
    ]


def _box_polygon(box):
    xmin, ymin, xmax, ymax = box
    verts = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])
    # edge k runs verts[k] -> verts[k+1]: bottom, right, top, left
    labels = np.array([-2, -3, -4, -1])
    return verts, labels


def clip_halfplane(verts, labels, u, theta, label, merge_tol=0.0):
    """Clip a convex polygon to ``u'z >= theta`` (Sutherland-Hodgman, one plane)."""
    n = len(verts)
    if n == 0:
        return verts, labels
    s = verts @ u - theta
    inside = s >= 0
    if inside.all():
        return verts, labels
    if not inside.any():
        return verts[:0], labels[:0]
    nxt = np.roll(inside, -1)
    exits = np.flatnonzero(inside & ~nxt)
    enters = np.flatnonzero(~inside & nxt)
    if len(exits) == 1 and len(enters) == 1:
        v, lab = _clip_convex(verts, labels, s, int(enters[0]), int(exits[0]), label)
    else:  # rounding broke convexity of the sign pattern: walk every edge
        v, lab = _clip_walk(verts, labels, s, label)
    if merge_tol > 0:
        v, lab = _merge_close(v, lab, merge_tol)
    return v, lab


def _cut(verts, s, k):
    j = (k + 1) % len(verts)
    t = s[k] / (s[k] - s[j])
    return verts[k] + t * (verts[j] - verts[k])


def _clip_convex(verts, labels, s, k_in, k_out, label):
    n = len(verts)
    keep = (np.arange(k_in + 1, k_in + 1 + ((k_out - k_in) % n))) % n
    v = np.vstack([_cut(verts, s, k_in)[None], verts[keep], _cut(verts, s, k_out)[None]])
    lab = np.concatenate([[labels[k_in]], labels[keep], [label]]).astype(int)
    return v, lab


def _clip_walk(verts, labels, s, label):
    n = len(verts)
    out_v, out_l = [], []
    for k in range(n):
        j = (k + 1) % n
        a, b = verts[k], verts[j]
        sa, sb = s[k], s[j]
        if sa >= 0:
            out_v.append(a)
            if sb >= 0:
                out_l.append(labels[k])
            else:
                t = sa / (sa - sb)
                out_l.append(labels[k])
                out_v.append(a + t * (b - a))
                out_l.append(label)
        elif sb >= 0:
            t = sa / (sa - sb)
            out_v.append(a + t * (b - a))
            out_l.append(labels[k])
    return np.array(out_v), np.array(out_l, dtype=int)


def _merge_close(v, lab, tol):
    while len(v) > 1:
        d = np.linalg.norm(v - np.roll(v, -1, axis=0), axis=1)
        k = int(np.argmin(d))
        if d[k] > tol:
            break
        # edge k has zero length: drop vertex k+1 and the label of edge k
        j = (k + 1) % len(v)
        v = np.delete(v, j, axis=0)
        if j == 0:
            lab = np.roll(lab[:-1], -1)
        else:
            lab = np.delete(lab, k)
    return v, lab


def intersect_halfplanes(halfspaces, box) -> Region2D:
    """Intersect upper halfplanes inside the seed ``box``."""
    verts, labels = _box_polygon(box)
    scale = max(box[2] - box[0], box[3] - box[1])
    tol = _MERGE_TOL * scale
    for idx, h in enumerate(halfspaces):
        verts, labels = clip_halfplane(verts, labels, h.u, h.theta, idx, merge_tol=tol)
        if len(verts) == 0:
            break
    return Region2D(list(halfspaces), verts, labels, tuple(box))


def region_contains(region: Region2D, z, tol=1e-9) -> bool:
    """True iff ``u'z >= theta - tol`` for every defining halfspace."""
    z = np.asarray(z, dtype=float)
    if not region.halfspaces:
        return True
    U = np.array([h.u for h in region.halfspaces])
    th = np.array([h.theta for h in region.halfspaces])
    return bool(np.all(U @ z >= th - tol))


def _boundary_points(v, per_edge=64):
    t = np.arange(per_edge)[:, None] / per_edge
    nxt = np.roll(v, -1, axis=0)
    pts = v[None, :, :] + t[:, :, None] * (nxt - v)[None, :, :]
    return pts.reshape(-1, 2)


def _directed(a, b):
    dist, _ = cKDTree(b).query(a, k=1)
    return float(dist.max())


def region_hausdorff(a: Region2D, b: Region2D, per_edge=64) -> float:
    """Symmetric Hausdorff distance between edge-sampled polygon boundaries."""
    if a.is_empty or b.is_empty:
        raise EmptyRegion("Hausdorff distance needs two non-empty regions")
    pa = _boundary_points(a.vertices, per_edge)
    pb = _boundary_points(b.vertices, per_edge)
    return max(_directed(pa, pb), _directed(pb, pa))
