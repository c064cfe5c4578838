"""Planar primitives: direct isometries, segment sets, disk clipping, Hausdorff distance.

Points are ``(2,)`` float arrays, segment sets are ``(n, 2, 2)`` arrays
(segment, endpoint, coordinate). Everything here is a pure function of its
arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyInput


@dataclass(frozen=True)
class Tolerances:
    geom: float = 1e-9
    iso: float = 1e-9
    area: float = 1e-6  # relative to the disk area being certified
    quantum: float = 1e-6
    delta: float = 0.01


DEFAULT_TOL = Tolerances()


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix, in closed form.

    Splitting m into a scaled rotation plus a scaled reflection gives
    sigma_max = |rotation part| + |reflection part| with no cancellation.
    """
    m = np.asarray(m, dtype=float)
    e, f = (m[0, 0] + m[1, 1]) / 2, (m[0, 0] - m[1, 1]) / 2
    g, h = (m[1, 0] + m[0, 1]) / 2, (m[1, 0] - m[0, 1]) / 2
    return float(math.hypot(e, h) + math.hypot(f, g))


@dataclass(frozen=True, eq=False)
class Isometry2:
    """Orientation-preserving isometry ``p -> A p + b``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(2))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(2))
    tol: float = DEFAULT_TOL.iso

    def __post_init__(self):
        a = np.array(self.rotation, dtype=float).reshape(2, 2)
        b = np.array(self.translation, dtype=float).reshape(2)
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise ValueError("isometry components must be finite")
        if np.max(np.abs(a.T @ a - np.eye(2))) > self.tol:
            raise ValueError("rotation part is not orthogonal")
        if abs(np.linalg.det(a) - 1.0) > self.tol:
            raise ValueError("rotation part is not orientation preserving")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "rotation", a)
        object.__setattr__(self, "translation", b)

    @classmethod
    def identity(cls) -> "Isometry2":
        return cls()

    @classmethod
    def from_angle(cls, theta: float, translation=(0.0, 0.0)) -> "Isometry2":
        return cls(rotation_matrix(theta), np.asarray(translation, dtype=float))

    @classmethod
    def translate(cls, v) -> "Isometry2":
        return cls(np.eye(2), np.asarray(v, dtype=float))

    @classmethod
    def rotate_about(cls, theta: float, center=(0.0, 0.0)) -> "Isometry2":
        a = rotation_matrix(theta)
        c = np.asarray(center, dtype=float)
        return cls(a, c - a @ c)

    @property
    def angle(self) -> float:
        return math.atan2(self.rotation[1, 0], self.rotation[0, 0])

    @property
    def is_translation(self) -> bool:
        return bool(np.max(np.abs(self.rotation - np.eye(2))) <= self.tol)

    def __matmul__(self, other: "Isometry2") -> "Isometry2":
        """Composition: ``(self @ other)(p) == self(other(p))``."""
        return Isometry2(self.rotation @ other.rotation,
                         self.rotation @ other.translation + self.translation)

    def inverse(self) -> "Isometry2":
        at = self.rotation.T
        return Isometry2(at, -(at @ self.translation))

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.rotation.T + self.translation

    def __repr__(self) -> str:
        return f"Isometry2(angle={self.angle:.12g}, translation={self.translation.tolist()})"


def isometry_distance(t1: Isometry2, t2: Isometry2) -> float:
    return max(operator_norm(t1.rotation - t2.rotation),
               float(np.linalg.norm(t1.translation - t2.translation)))


def in_epsilon_ball(t: Isometry2, eps: float) -> bool:
    if eps <= 0:
        raise ValueError("eps must be positive")
    return isometry_distance(t, Isometry2.identity()) < eps


def apply_isometry(t: Isometry2, obj) -> np.ndarray:
    """Image of a point, segment or segment set (any array with trailing axis 2)."""
    return t(obj)


def as_segments(segs) -> np.ndarray:
    s = np.asarray(segs, dtype=float)
    if s.size == 0:
        return np.zeros((0, 2, 2))
    return s.reshape(-1, 2, 2)


def clip_to_disk(segs, radius: float, center=(0.0, 0.0)) -> np.ndarray:
    """Intersect each segment with the closed disk; segments missing the disk are dropped."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    s = as_segments(segs)
    if len(s) == 0:
        return s
    c = np.asarray(center, dtype=float)
    p = s[:, 0] - c
    d = s[:, 1] - s[:, 0]
    a = np.einsum("ij,ij->i", d, d)
    b = 2.0 * np.einsum("ij,ij->i", p, d)
    cc = np.einsum("ij,ij->i", p, p) - radius * radius
    disc = b * b - 4.0 * a * cc
    ok = (disc >= 0) & (a > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(ok, (-b - sq) / (2 * a), 1.0)
        t1 = np.where(ok, (-b + sq) / (2 * a), 0.0)
    t0 = np.clip(t0, 0.0, 1.0)
    t1 = np.clip(t1, 0.0, 1.0)
    keep = ok & (t1 > t0)
    # a segment touching the circle at one point degenerates to a point; keep
    # it only when that point sits inside (zero-length chords are dropped).
    out = np.stack([s[:, 0] + t0[:, None] * d, s[:, 0] + t1[:, None] * d], axis=1)
    # endpoints already inside stay bit-identical
    inside0 = (np.einsum("ij,ij->i", p, p) <= radius * radius) & (t0 == 0.0)
    q = s[:, 1] - c
    inside1 = (np.einsum("ij,ij->i", q, q) <= radius * radius) & (t1 == 1.0)
    out[inside0, 0] = s[inside0, 0]
    out[inside1, 1] = s[inside1, 1]
    return out[keep]


def unique_segments(segs, tol: float = DEFAULT_TOL.geom) -> np.ndarray:
    """Drop repeated segments (either orientation), comparing endpoints on a ``tol`` grid."""
    s = as_segments(segs)
    if len(s) == 0:
        return s
    q = np.round(s / tol).astype(np.int64).reshape(-1, 4)
    swap = (q[:, 0] > q[:, 2]) | ((q[:, 0] == q[:, 2]) & (q[:, 1] > q[:, 3]))
    q[swap] = q[swap][:, [2, 3, 0, 1]]
    _, first = np.unique(q, axis=0, return_index=True)
    return s[np.sort(first)]


def point_segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise exact distance from ``pts[i]`` to segment ``a[i]-b[i]``."""
    d = b - a
    dd = np.einsum("...j,...j->...", d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dd > 0, np.einsum("...j,...j->...", pts - a, d) / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[..., None] * d
    return np.linalg.norm(pts - proj, axis=-1)


def sample_segments(segs: np.ndarray, pitch: float) -> tuple[np.ndarray, np.ndarray]:
    """Points along every segment at spacing <= pitch, endpoints included."""
    lengths = np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1)
    k = np.maximum(np.ceil(lengths / pitch).astype(int), 1)
    owner = np.repeat(np.arange(len(segs)), k + 1)
    starts = np.concatenate([[0], np.cumsum(k + 1)[:-1]])
    local = np.arange(owner.size) - np.repeat(starts, k + 1)
    t = local / np.repeat(k, k + 1)
    pts = segs[owner, 0] + t[:, None] * (segs[owner, 1] - segs[owner, 0])
    return pts, owner


def _directed(pts_a: np.ndarray, segs_b: np.ndarray, tree_b: cKDTree,
              owner_b: np.ndarray, pitch: float, k: int = 16) -> float:
    """max over ``pts_a`` of the distance to the segments ``segs_b``.

    The nearest sample of B lies within pitch/2 of the true nearest point, so its
    distance d1 overestimates by at most pitch/2. Points whose d1 could still
    attain the maximum are refined exactly against the segments owning their
    k nearest samples; the refined value never exceeds d1.
    """
    d1, _ = tree_b.query(pts_a, k=1, workers=-1)
    top = float(np.max(d1))
    if top == 0.0:
        return 0.0
    cand = np.nonzero(d1 >= top - pitch / 2)[0]
    k = min(k, tree_b.n)
    _, idx = tree_b.query(pts_a[cand], k=k, workers=-1)
    seg = owner_b[idx.reshape(len(cand), k)]
    p = pts_a[cand][:, None, :]
    d = point_segment_distance(p, segs_b[seg, 0], segs_b[seg, 1])
    return float(np.max(np.min(d, axis=1)))


def hausdorff_distance(a, b, delta: float) -> tuple[float, float]:
    """Hausdorff distance between two unions of segments, accurate to ``delta``.

    Both sets are sampled at pitch ``delta`` (endpoints included). Each
    directed term is within ``delta/2`` of the truth: sampling the source set
    loses at most ``delta/2``, and the refined sample-to-set distances
    overestimate by at most ``delta/2``.

    Returns ``(value, error_bound)``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    sa, sb = as_segments(a), as_segments(b)
    if len(sa) == 0 or len(sb) == 0:
        raise EmptyInput("Hausdorff distance needs two nonempty segment sets")
    pa, oa = sample_segments(sa, delta)
    pb, ob = sample_segments(sb, delta)
    ta = cKDTree(pa, balanced_tree=False, compact_nodes=False)
    tb = cKDTree(pb, balanced_tree=False, compact_nodes=False)
    h = max(_directed(pa, sb, tb, ob, delta), _directed(pb, sa, ta, oa, delta))
    return h, delta


def polygon_area(poly) -> float:
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_areas(polys: np.ndarray) -> np.ndarray:
    """Signed areas of a stack ``(n, m, 2)`` of polygons."""
    x, y = polys[..., 0], polys[..., 1]
    return 0.5 * np.sum(x * np.roll(y, -1, axis=-1) - y * np.roll(x, -1, axis=-1), axis=-1)


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _dot(u, v):
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]


def disk_intersection_areas(polys: np.ndarray, radius: float, center=(0.0, 0.0)) -> np.ndarray:
    """Exact area of ``polygon ∩ disk`` for each polygon of a stack ``(n, m, 2)``.

    Sums, over the polygon's edges, the signed area of the disk intersected with
    the triangle (center, edge start, edge end): chord pieces inside the circle
    contribute triangles, pieces outside contribute circular sectors.
    """
    polys = np.asarray(polys, dtype=float)
    c = np.asarray(center, dtype=float)
    p = polys - c
    q = np.roll(p, -1, axis=-2)
    r2 = radius * radius
    d = q - p
    a = _dot(d, d)
    b = 2.0 * _dot(p, d)
    cc = _dot(p, p) - r2
    disc = b * b - 4 * a * cc
    ok = (disc > 0) & (a > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(ok, (-b - sq) / (2 * a), 0.0)
        t1 = np.where(ok, (-b + sq) / (2 * a), 0.0)
    t0 = np.clip(t0, 0.0, 1.0)[..., None]
    t1 = np.clip(t1, 0.0, 1.0)[..., None]
    # clip points at the edge ends must equal them exactly: p + 1·d can differ
    # from q in the last bit, which near the center flips a sector angle
    m0 = np.where(t0 == 0.0, p, p + t0 * d)
    m1 = np.where(t1 == 1.0, q, p + t1 * d)

    def sector(u, v):
        return 0.5 * r2 * np.arctan2(_cross(u, v), _dot(u, v))

    area = sector(p, m0) + 0.5 * _cross(m0, m1) + sector(m1, q)
    return np.sum(area, axis=-1)


def polygon_disk_area(poly, radius: float, center=(0.0, 0.0)) -> float:
    return float(disk_intersection_areas(np.asarray(poly, dtype=float)[None], radius, center)[0])
