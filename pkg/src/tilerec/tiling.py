"""Tiles, tiling windows, patches and protopatch canonicalization.

A tile is a placed polygonal prototile. Tile sets are stored column-wise
(prototile index, rotation angle, translation) and their polygons are always
derived from the placement, so a window has exactly one source of truth.
"""

from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import InsufficientWindow
from .geometry import (
    DEFAULT_TOL,
    Isometry2,
    disk_intersection_areas,
    point_segment_distance,
    polygon_area,
    polygon_areas,
)

TRANSLATION = "translation"
ISOMETRY = "isometry"
MODES = (TRANSLATION, ISOMETRY)


@dataclass(frozen=True, eq=False)
class Prototile:
    id: str
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) < 3:
            raise ValueError(f"prototile {self.id!r} needs at least 3 vertices")
        if polygon_area(v) <= 0:
            raise ValueError(f"prototile {self.id!r} must be counterclockwise with positive area")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @cached_property
    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.max(np.linalg.norm(d, axis=-1)))

    @cached_property
    def shape_key(self) -> tuple:
        """Congruence-class signature: cyclic (edge length, turn) sequence, least rotation."""
        return shape_key(self.vertices)

    def __eq__(self, other):
        return (isinstance(other, Prototile) and self.id == other.id
                and self.vertices.shape == other.vertices.shape
                and np.array_equal(self.vertices, other.vertices))

    def __hash__(self):
        return hash(self.id)


def shape_key(vertices: np.ndarray, q: float = 1e-6) -> tuple:
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(e, axis=1)
    keep = lengths > 1e-12
    e, lengths = e[keep], lengths[keep]
    nxt = np.roll(e, -1, axis=0)
    turn = np.arctan2(e[:, 0] * nxt[:, 1] - e[:, 1] * nxt[:, 0], np.sum(e * nxt, axis=1))
    seq = [(int(round(a / q)), int(round(t / q))) for a, t in zip(lengths, turn)]
    return min(tuple(seq[k:] + seq[:k]) for k in range(len(seq)))


class TileSet:
    """Finite set of placed tiles over a shared prototile table."""

    def __init__(self, prototiles: Sequence[Prototile], proto_index, angles, translations):
        self.prototiles = tuple(prototiles)
        self.proto_index = np.asarray(proto_index, dtype=np.int64).reshape(-1)
        self.angles = np.asarray(angles, dtype=float).reshape(-1)
        self.translations = np.asarray(translations, dtype=float).reshape(-1, 2)
        n = len(self.proto_index)
        if len(self.angles) != n or len(self.translations) != n:
            raise ValueError("placement columns must have equal length")
        for a in (self.proto_index, self.angles, self.translations):
            a.setflags(write=False)

    def __len__(self) -> int:
        return len(self.proto_index)

    @cached_property
    def _padded_protos(self) -> np.ndarray:
        m = max(len(p.vertices) for p in self.prototiles)
        out = np.empty((len(self.prototiles), m, 2))
        for i, p in enumerate(self.prototiles):
            k = len(p.vertices)
            out[i, :k] = p.vertices
            out[i, k:] = p.vertices[-1]
        return out

    @cached_property
    def polygons(self) -> np.ndarray:
        """``(n, m, 2)`` tile polygons; shorter prototiles repeat their last vertex."""
        if len(self) == 0:
            return np.zeros((0, 3, 2))
        base = self._padded_protos[self.proto_index]
        c, s = np.cos(self.angles), np.sin(self.angles)
        x = c[:, None] * base[..., 0] - s[:, None] * base[..., 1]
        y = s[:, None] * base[..., 0] + c[:, None] * base[..., 1]
        out = np.stack([x, y], axis=-1) + self.translations[:, None, :]
        out.setflags(write=False)
        return out

    @cached_property
    def centroids(self) -> np.ndarray:
        return _polygon_centroids(self.polygons)

    @cached_property
    def shape_ids(self) -> np.ndarray:
        """Per-tile congruence class index (equal iff prototile shapes are congruent)."""
        keys = {}
        ids = [keys.setdefault(p.shape_key, len(keys)) for p in self.prototiles]
        return np.asarray(ids, dtype=np.int64)[self.proto_index]

    @cached_property
    def tile_shape_keys(self) -> list:
        return [self.prototiles[i].shape_key for i in self.proto_index]

    @cached_property
    def reach(self) -> float:
        """Largest centroid-to-vertex distance over the prototile table."""
        r = 0.0
        for p in self.prototiles:
            c = _polygon_centroids(p.vertices[None])[0]
            r = max(r, float(np.max(np.linalg.norm(p.vertices - c, axis=1))))
        return r

    @cached_property
    def d_max(self) -> float:
        return max(p.diameter for p in self.prototiles)

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.centroids if len(self) else np.zeros((0, 2)))

    def subset(self, idx) -> "TileSet":
        idx = np.asarray(idx, dtype=np.int64)
        return TileSet(self.prototiles, self.proto_index[idx], self.angles[idx], self.translations[idx])

    def transformed(self, t: Isometry2) -> "TileSet":
        return TileSet(self.prototiles, self.proto_index, self.angles + t.angle, t(self.translations))

    def distances_to(self, point) -> np.ndarray:
        """Euclidean distance from ``point`` to each tile (0 inside)."""
        return polygon_point_distances(self.polygons, point)

    def meeting_disk(self, radius: float, center=(0.0, 0.0)) -> np.ndarray:
        """Indices of tiles whose interior meets the open disk (tangent tiles excluded)."""
        if len(self) == 0:
            return np.zeros(0, dtype=np.int64)
        cand = self.tree.query_ball_point(np.asarray(center, dtype=float), radius + self.reach + 1e-9)
        cand = np.asarray(sorted(cand), dtype=np.int64)
        if len(cand) == 0:
            return cand
        d = polygon_point_distances(self.polygons[cand], center)
        return cand[d < radius]

    def find(self, polys: np.ndarray, tol: float = DEFAULT_TOL.geom) -> np.ndarray:
        """For each query polygon, the index of the coinciding tile, or -1."""
        polys = np.asarray(polys, dtype=float)
        if len(polys) == 0:
            return np.zeros(0, dtype=np.int64)
        if len(self) == 0:
            return np.full(len(polys), -1, dtype=np.int64)
        cq = _polygon_centroids(polys)
        dist, idx = self.tree.query(cq, k=1, distance_upper_bound=max(tol * 10, 1e-7))
        found = np.isfinite(dist)
        out = np.full(len(polys), -1, dtype=np.int64)
        if not np.any(found):
            return out
        qi = np.nonzero(found)[0]
        ti = idx[qi]
        target = self.polygons[ti]
        query = polys[qi]
        if target.shape[1] != query.shape[1]:
            return out
        ok = _vertex_sets_match(query, target, tol)
        out[qi[ok]] = ti[ok]
        return out

    def contains_polygons(self, polys: np.ndarray, tol: float = DEFAULT_TOL.geom) -> np.ndarray:
        return self.find(polys, tol) >= 0

    def description(self) -> list[dict]:
        return [{"proto": self.prototiles[p].id, "rotation": float(a), "translation": [float(x), float(y)]}
                for p, a, (x, y) in zip(self.proto_index, self.angles, self.translations)]


def _polygon_centroids(polys: np.ndarray) -> np.ndarray:
    polys = np.asarray(polys, dtype=float)
    if len(polys) == 0:
        return np.zeros((0, 2))
    ref = polys[:, :1, :]
    p = polys - ref
    q = np.roll(p, -1, axis=1)
    cr = p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    a = 0.5 * np.sum(cr, axis=1)
    cx = np.sum((p[..., 0] + q[..., 0]) * cr, axis=1) / (6 * a)
    cy = np.sum((p[..., 1] + q[..., 1]) * cr, axis=1) / (6 * a)
    return np.stack([cx, cy], axis=1) + ref[:, 0, :]


def _vertex_sets_match(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    d = np.linalg.norm(a[:, :, None, :] - b[:, None, :, :], axis=-1)
    return (np.max(np.min(d, axis=2), axis=1) <= tol) & (np.max(np.min(d, axis=1), axis=1) <= tol)


def polygon_point_distances(polys: np.ndarray, point) -> np.ndarray:
    """Distance from a point to each convex-or-simple polygon of a stack (0 inside)."""
    pt = np.asarray(point, dtype=float)
    a = polys
    b = np.roll(polys, -1, axis=1)
    d = point_segment_distance(np.broadcast_to(pt, a.shape), a, b)
    dist = np.min(d, axis=1)
    # even-odd inside test
    ay, by = a[..., 1], b[..., 1]
    cond = (ay > pt[1]) != (by > pt[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = a[..., 0] + (pt[1] - ay) * (b[..., 0] - a[..., 0]) / (by - ay)
    crossings = np.sum(cond & (pt[0] < xint), axis=1)
    inside = (crossings % 2) == 1
    return np.where(inside, 0.0, dist)


class TilingWindow(TileSet):
    """All tiles of one tiling meeting the closed disk of radius ``radius`` about the origin."""

    def __init__(self, radius: float, prototiles, proto_index, angles, translations):
        super().__init__(prototiles, proto_index, angles, translations)
        self.radius = float(radius)

    @classmethod
    def from_tileset(cls, radius: float, ts: TileSet) -> "TilingWindow":
        return cls(radius, ts.prototiles, ts.proto_index, ts.angles, ts.translations)

    def restrict(self, radius: float) -> "TilingWindow":
        if radius > self.radius + 1e-12:
            raise InsufficientWindow(f"window radius {self.radius} < requested {radius}")
        idx = self.meeting_disk(radius)
        return TilingWindow.from_tileset(radius, self.subset(idx))

    def coverage_defect(self, radius: float | None = None) -> tuple[float, float]:
        """(uncovered area of B_R, total pairwise interior overlap area)."""
        r = self.radius if radius is None else radius
        disk = math.pi * r * r
        covered = float(np.sum(disk_intersection_areas(self.polygons, r))) if len(self) else 0.0
        overlap = total_pairwise_overlap(self)
        # covered counts overlapping regions twice; add overlap back
        deficit = max(disk - (covered - overlap), 0.0)
        return deficit, overlap

    def check_covers_packs(self, tau_area: float = DEFAULT_TOL.area) -> bool:
        deficit, overlap = self.coverage_defect()
        budget = tau_area * math.pi * self.radius ** 2
        return deficit <= budget and overlap <= budget

    def same_tiles(self, other: "TilingWindow") -> bool:
        return (len(self) == len(other)
                and np.array_equal(self.proto_index, other.proto_index)
                and np.array_equal(self.angles, other.angles)
                and np.array_equal(self.translations, other.translations)
                and [p.id for p in self.prototiles] == [p.id for p in other.prototiles])


def sort_tiles(ts: TileSet) -> TileSet:
    """Deterministic tile order: by translation x, then y, then prototile index."""
    order = np.lexsort((ts.proto_index, ts.translations[:, 1], ts.translations[:, 0]))
    return ts.subset(order)


def candidate_pairs(ts: TileSet, slack: float) -> np.ndarray:
    """Unordered index pairs whose centroids are close enough to possibly touch."""
    if len(ts) < 2:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = ts.tree.query_pairs(2 * ts.reach + slack, output_type="ndarray")
    if len(pairs) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = np.sort(pairs, axis=1)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def boundary_distances(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Distance between the boundaries of polygon pairs with disjoint interiors."""
    def one_way(p, q):
        a = q[:, None, :, :]
        b = np.roll(q, -1, axis=1)[:, None, :, :]
        pts = p[:, :, None, :]
        d = point_segment_distance(np.broadcast_to(pts, np.broadcast_shapes(pts.shape, a.shape)),
                                   np.broadcast_to(a, np.broadcast_shapes(pts.shape, a.shape)),
                                   np.broadcast_to(b, np.broadcast_shapes(pts.shape, a.shape)))
        return d.reshape(len(p), -1).min(axis=1)
    out = np.empty(len(pa))
    step = 20000
    for s in range(0, len(pa), step):
        out[s:s + step] = np.minimum(one_way(pa[s:s + step], pb[s:s + step]),
                                     one_way(pb[s:s + step], pa[s:s + step]))
    return out


def adjacent_pairs(ts: TileSet, tol: float = DEFAULT_TOL.geom) -> np.ndarray:
    """Pairs of tiles whose boundaries come within ``tol`` (corner contact counts)."""
    pairs = candidate_pairs(ts, tol)
    if len(pairs) == 0:
        return pairs
    d = boundary_distances(ts.polygons[pairs[:, 0]], ts.polygons[pairs[:, 1]])
    return pairs[d <= tol]


def total_pairwise_overlap(ts: TileSet) -> float:
    """Sum of pairwise interior overlap areas (convex tiles)."""
    pairs = candidate_pairs(ts, 0.0)
    if len(pairs) == 0:
        return 0.0
    total = 0.0
    pa, pb = ts.polygons[pairs[:, 0]], ts.polygons[pairs[:, 1]]
    # separating-axis prefilter over each polygon's edge normals
    overlapping = np.ones(len(pairs), dtype=bool)
    for polys in (pa, pb):
        e = np.roll(polys, -1, axis=1) - polys
        normals = np.stack([e[..., 1], -e[..., 0]], axis=-1)
        for k in range(polys.shape[1]):
            n = normals[:, k, :]
            if np.all(n == 0):
                continue
            proj_a = np.einsum("pmj,pj->pm", pa, n)
            proj_b = np.einsum("pmj,pj->pm", pb, n)
            scale = np.linalg.norm(n, axis=1) * 1e-9 + 1e-300
            sep = (proj_a.max(axis=1) <= proj_b.min(axis=1) + scale) | \
                  (proj_b.max(axis=1) <= proj_a.min(axis=1) + scale)
            overlapping &= ~sep
    for i in np.nonzero(overlapping)[0]:
        total += convex_intersection_area(pa[i], pb[i])
    return total


def convex_intersection_area(a: np.ndarray, b: np.ndarray) -> float:
    """Area of the intersection of two convex CCW polygons (Sutherland-Hodgman)."""
    out = [tuple(p) for p in a]
    m = len(b)
    for k in range(m):
        c0, c1 = b[k], b[(k + 1) % m]
        if np.allclose(c0, c1):
            continue
        inp, out = out, []
        if not inp:
            break
        ex, ey = c1[0] - c0[0], c1[1] - c0[1]

        def side(p):
            return ex * (p[1] - c0[1]) - ey * (p[0] - c0[0])
        for j in range(len(inp)):
            cur, prev = inp[j], inp[j - 1]
            sc, sp = side(cur), side(prev)
            if sc >= 0:
                if sp < 0:
                    t = sp / (sp - sc)
                    out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
                out.append(cur)
            elif sp >= 0:
                t = sp / (sp - sc)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
    if len(out) < 3:
        return 0.0
    return max(polygon_area(np.asarray(out)), 0.0)


class Patch(TileSet):
    """Nonempty tile set whose union is connected."""

    def __init__(self, prototiles, proto_index, angles, translations, *, check=True,
                 tol: float = DEFAULT_TOL.geom):
        super().__init__(prototiles, proto_index, angles, translations)
        if len(self) == 0:
            raise ValueError("a patch needs at least one tile")
        if check and not is_connected(self, tol):
            raise ValueError("patch support is not connected")

    @classmethod
    def from_tileset(cls, ts: TileSet, check=True) -> "Patch":
        return cls(ts.prototiles, ts.proto_index, ts.angles, ts.translations, check=check)

    def transformed(self, t: Isometry2) -> "Patch":
        return Patch(self.prototiles, self.proto_index, self.angles + t.angle, t(self.translations),
                     check=False)


def is_connected(ts: TileSet, tol: float = DEFAULT_TOL.geom) -> bool:
    n = len(ts)
    if n <= 1:
        return n == 1
    pairs = adjacent_pairs(ts, tol)
    if len(pairs) == 0:
        return False
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    ncomp, _ = connected_components(g, directed=False)
    return ncomp == 1


class WindowProvider:
    """Deterministic source of nested windows of one fixed tiling.

    Subclasses implement ``_build(radius)`` returning a window of at least that
    radius. Requests are served by restricting a cached master window, which is
    rebuilt (larger) on demand; the lock makes concurrent requests safe.
    """

    max_radius: float = math.inf

    def __init__(self):
        self._lock = threading.Lock()
        self._master: TilingWindow | None = None

    def _build(self, radius: float) -> TilingWindow:
        raise NotImplementedError

    @property
    def prototiles(self) -> tuple[Prototile, ...]:
        return self.window(1.0).prototiles

    @property
    def d_max(self) -> float:
        return max(p.diameter for p in self.prototiles)

    def window(self, radius: float) -> TilingWindow:
        if radius <= 0:
            raise ValueError("radius must be positive")
        if radius > self.max_radius + 1e-12:
            raise InsufficientWindow(f"provider supports radius <= {self.max_radius}, requested {radius}")
        with self._lock:
            if self._master is None or self._master.radius < radius:
                self._master = self._build(radius)
            master = self._master
        if master.radius == radius:
            return master
        return master.restrict(radius)


class StaticProvider(WindowProvider):
    """Provider backed by one fixed window (e.g. loaded from a file)."""

    def __init__(self, window: TilingWindow):
        super().__init__()
        self._master = window
        self.max_radius = window.radius

    def _build(self, radius):
        raise InsufficientWindow(f"static window radius {self.max_radius} < requested {radius}")


class TransformedProvider(WindowProvider):
    """The image ``T x`` of another provider's tiling under a direct isometry."""

    def __init__(self, base: WindowProvider, t: Isometry2):
        super().__init__()
        self.base = base
        self.t = t
        shift = float(np.linalg.norm(t.translation))
        self.max_radius = base.max_radius - shift

    def _build(self, radius):
        shift = float(np.linalg.norm(self.t.translation))
        src = self.base.window(radius + shift)
        moved = sort_tiles(src.transformed(self.t))
        idx = moved.meeting_disk(radius)
        return TilingWindow.from_tileset(radius, moved.subset(idx))


def skeleton(ts: TileSet) -> np.ndarray:
    """All tile boundary edges as an ``(k, 2, 2)`` segment array (shared edges repeat)."""
    polys = ts.polygons
    if len(polys) == 0:
        return np.zeros((0, 2, 2))
    segs = np.stack([polys, np.roll(polys, -1, axis=1)], axis=2).reshape(-1, 2, 2)
    keep = np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1) > 0
    return segs[keep]


def patches_covering(w: TilingWindow, k_radius: float, center=(0.0, 0.0)) -> Patch:
    """Minimal patch whose support contains the disk: the tiles meeting it."""
    c = np.asarray(center, dtype=float)
    if np.linalg.norm(c) + k_radius > w.radius + 1e-12:
        raise InsufficientWindow("disk is not inside the window's certified region")
    idx = w.meeting_disk(k_radius, c)
    if len(idx) == 0:
        raise InsufficientWindow("no tiles meet the disk")
    return Patch.from_tileset(w.subset(idx), check=False)


def patch_support_contains_disk(p: TileSet, radius: float, center=(0.0, 0.0),
                                tau_area: float = DEFAULT_TOL.area) -> bool:
    disk = math.pi * radius * radius
    covered = float(np.sum(disk_intersection_areas(p.polygons, radius, center)))
    return covered >= disk * (1.0 - tau_area)


@dataclass(frozen=True, eq=False)
class CanonicalProtopatch:
    mode: str
    representative: Patch
    hash: int
    quantum: float
    frame: Isometry2  # maps the input patch onto the representative


def _describe(ts_polys: np.ndarray, keys: list, q: float) -> list:
    quant = np.round(ts_polys / q).astype(np.int64)
    desc = []
    for key, poly in zip(keys, quant):
        verts = sorted(set(map(tuple, poly.tolist())))
        desc.append((key, tuple(verts)))
    desc.sort()
    return desc


def _hash(desc) -> int:
    return int.from_bytes(hashlib.blake2b(repr(desc).encode(), digest_size=8).digest(), "big")


def canonicalize(p: TileSet, mode: str = TRANSLATION, q: float = DEFAULT_TOL.quantum,
                 anchor=None) -> CanonicalProtopatch:
    """Canonical pose and hash of a patch's (congruence) protopatch.

    translation: the anchor (default: lexicographically least quantized vertex)
    is moved to the origin. isometry: the anchor (default: area centroid of the
    support) is moved to the origin and the patch rotated so a longest edge of a
    tile nearest the anchor lies along +x; every such choice is tried and the
    least description wins, so ties cannot break invariance.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if q <= 0:
        raise ValueError("quantum must be positive")
    polys = p.polygons
    keys = p.tile_shape_keys
    if mode == TRANSLATION:
        if anchor is None:
            qv = np.round(polys.reshape(-1, 2) / q).astype(np.int64)
            i = np.lexsort((qv[:, 1], qv[:, 0]))[0]
            origin = polys.reshape(-1, 2)[i]
        else:
            origin = np.asarray(anchor, dtype=float)
        frame = Isometry2.translate(-origin)
        desc = _describe(polys - origin, keys, q)
    else:
        if anchor is None:
            areas = polygon_areas(polys)
            origin = np.sum(p.centroids * areas[:, None], axis=0) / np.sum(areas)
        else:
            origin = np.asarray(anchor, dtype=float)
        rel = polys - origin
        d = polygon_point_distances(rel, (0.0, 0.0))
        scale = max(1.0, float(np.max(np.abs(rel))))
        near = np.nonzero(d <= d.min() + 1e-7 * scale)[0]
        best = None
        for i in near:
            poly = rel[i]
            e = np.roll(poly, -1, axis=0) - poly
            lens = np.linalg.norm(e, axis=1)
            for k in np.nonzero(lens >= lens.max() - 1e-9)[0]:
                t = Isometry2.from_angle(-math.atan2(e[k, 1], e[k, 0]))
                cand = _describe(t(rel), keys, q)
                if best is None or cand < best[0]:
                    best = (cand, t)
        desc, rot = best
        frame = rot @ Isometry2.translate(-origin)
    rep = Patch(p.prototiles, p.proto_index, p.angles + frame.angle, frame(p.translations), check=False)
    return CanonicalProtopatch(mode, rep, _hash(desc), q, frame)


def alignments(src: np.ndarray, dst: np.ndarray, mode: str, tol: float) -> Iterable[Isometry2]:
    """Direct isometries mapping polygon ``src`` onto polygon ``dst`` as vertex sets."""
    m = len(src)
    if len(dst) != m:
        return
    for k in range(m):
        rolled = np.roll(dst, -k, axis=0)
        if mode == TRANSLATION:
            t = Isometry2.translate(rolled[0] - src[0])
        else:
            es, ed = src[1] - src[0], rolled[1] - rolled[0]
            if abs(np.linalg.norm(es) - np.linalg.norm(ed)) > 10 * tol:
                continue
            theta = math.atan2(ed[1], ed[0]) - math.atan2(es[1], es[0])
            a = Isometry2.from_angle(theta)
            t = Isometry2(a.rotation, rolled[0] - a(src[0]))
        if np.max(np.linalg.norm(t(src) - rolled, axis=1)) <= tol:
            yield t


def patch_match(p: TileSet, q: TileSet, mode: str = TRANSLATION,
                tol: float = DEFAULT_TOL.geom) -> Isometry2 | None:
    """An isometry ``T`` (a translation in translation mode) with ``T(p) == q`` tile for tile."""
    if len(p) != len(q) or len(p) == 0:
        return None
    areas = polygon_areas(p.polygons)
    c = np.sum(p.centroids * areas[:, None], axis=0) / np.sum(areas)
    i0 = int(np.argmin(np.linalg.norm(p.centroids - c, axis=1)))
    src = p.polygons[i0]
    key = p.tile_shape_keys[i0]
    qkeys = q.tile_shape_keys
    for j in range(len(q)):
        if qkeys[j] != key:
            continue
        for t in alignments(src, q.polygons[j], mode, tol):
            moved = p.transformed(t)
            if np.all(q.contains_polygons(moved.polygons, tol)):
                return t
    return None


@dataclass(frozen=True)
class TileMoves:
    """Best tile-onto-tile motion per source tile: ``M(z) = R(theta) z + b`` onto ``dst`` tile ``target``."""

    theta: np.ndarray
    b: np.ndarray
    dist: np.ndarray  # distance from the identity of the induced correction
    target: np.ndarray  # -1 where no admissible motion exists


def _shape_codes(src: TileSet, dst: TileSet) -> tuple[np.ndarray, np.ndarray]:
    codes: dict = {}
    s = [codes.setdefault(p.shape_key, len(codes)) for p in src.prototiles]
    d = [codes.setdefault(p.shape_key, len(codes)) for p in dst.prototiles]
    return np.asarray(s, dtype=np.int64)[src.proto_index], np.asarray(d, dtype=np.int64)[dst.proto_index]


def best_tile_moves(src: TileSet, src_idx, dst: TileSet, shift, base, radius,
                    translation_only: bool = False, tol: float = DEFAULT_TOL.geom) -> TileMoves:
    """For each source tile, the direct isometry ``M`` onto a congruent ``dst`` tile that
    minimizes the distance from the identity of ``S = T_{-shift-base} M T_{base}``.

    Only ``dst`` tiles whose centroid lies within ``radius`` (scalar or per tile)
    of the source centroid moved by ``shift`` are considered. ``base`` is a point
    or one point per source tile. Ties go to the lowest ``dst`` index.
    """
    src_idx = np.asarray(src_idx, dtype=np.int64).reshape(-1)
    shift = np.asarray(shift, dtype=float)
    k = len(src_idx)
    theta, b = np.zeros(k), np.zeros((k, 2))
    dist, target = np.full(k, np.inf), np.full(k, -1, dtype=np.int64)
    if k == 0 or len(dst) == 0:
        return TileMoves(theta, b, dist, target)
    base = np.broadcast_to(np.asarray(base, dtype=float), (k, 2))
    radius = np.broadcast_to(np.asarray(radius, dtype=float), (k,))
    hits = dst.tree.query_ball_point(src.centroids[src_idx] + shift, radius)
    counts = np.fromiter((len(h) for h in hits), dtype=np.int64, count=k)
    if counts.sum() == 0:
        return TileMoves(theta, b, dist, target)
    pi = np.repeat(np.arange(k), counts)
    pt = np.fromiter((j for h in hits for j in h), dtype=np.int64, count=int(counts.sum()))
    scode, dcode = _shape_codes(src, dst)
    same = scode[src_idx[pi]] == dcode[pt]
    pi, pt = pi[same], pt[same]
    nv = np.array([len(p.vertices) for p in src.prototiles], dtype=np.int64)[src.proto_index]
    best_d = np.full(len(pi), np.inf)
    best_t = np.zeros(len(pi))
    best_b = np.zeros((len(pi), 2))
    for m in np.unique(nv[src_idx[pi]]):
        sel = np.nonzero(nv[src_idx[pi]] == m)[0]
        ps = src.polygons[src_idx[pi[sel]]][:, :m]
        pd = dst.polygons[pt[sel]][:, :m]
        vb = base[pi[sel]]
        es = ps[:, 1] - ps[:, 0]
        for r in range(m):
            rolled = np.roll(pd, -r, axis=1)
            ed = rolled[:, 1] - rolled[:, 0]
            th = np.arctan2(es[:, 0] * ed[:, 1] - es[:, 1] * ed[:, 0], np.sum(es * ed, axis=1))
            c, s = np.cos(th)[:, None], np.sin(th)[:, None]

            def rot(z):
                return np.stack([c * z[..., 0] - s * z[..., 1], s * z[..., 0] + c * z[..., 1]], axis=-1)

            bb = rolled[:, 0] - rot(ps[:, :1])[:, 0]
            resid = np.max(np.linalg.norm(rot(ps) + bb[:, None] - rolled, axis=-1), axis=1)
            ok = resid <= tol
            rot_norm = 2 * np.abs(np.sin(th / 2))  # operator norm of R(theta) - Id
            if translation_only:
                ok &= rot_norm <= DEFAULT_TOL.iso
            sv = rot(vb[:, None])[:, 0] + bb - shift - vb
            d = np.where(ok, np.maximum(rot_norm, np.linalg.norm(sv, axis=1)), np.inf)
            better = d < best_d[sel]
            idx = sel[better]
            best_d[idx], best_t[idx], best_b[idx] = d[better], th[better], bb[better]
    order = np.lexsort((pt, best_d, pi))
    first = np.ones(len(order), dtype=bool)
    first[1:] = pi[order][1:] != pi[order][:-1]
    chosen = order[first]
    chosen = chosen[np.isfinite(best_d[chosen])]
    rows = pi[chosen]
    theta[rows], b[rows], dist[rows], target[rows] = best_t[chosen], best_b[chosen], best_d[chosen], pt[chosen]
    return TileMoves(theta, b, dist, target)
