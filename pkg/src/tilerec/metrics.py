"""Tiling distances as certified intervals.

``metric_general`` bounds the skeleton metric sup_n (1/n)·d_H(B_n ∩ ∂x, B_n ∩ ∂y).
``metric_d1``, ``metric_d2`` and ``metric_d3`` bound the adapted metrics, which
declare two tilings r-close when they agree on B_{1/r} after a translation in
B_r, a direct isometry in B_r, or one such isometry per tile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InsufficientWindow
from .geometry import DEFAULT_TOL, Isometry2, clip_to_disk, hausdorff_distance, unique_segments
from .tiling import (
    TilingWindow,
    WindowProvider,
    best_tile_moves,
    patch_support_contains_disk,
    skeleton,
)

CAP = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class MetricResult:
    lower: float
    upper: float
    truncation_radius: float
    notes: str = ""

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper,
                "truncation_radius": self.truncation_radius, "notes": self.notes}


def metric_general(x: WindowProvider, y: WindowProvider, N: int = 20,
                   delta: float = DEFAULT_TOL.delta) -> MetricResult:
    """Interval for sup_n (1/n)·d_H(B_n(∂x), B_n(∂y)).

    Terms n <= N are evaluated by sampled Hausdorff distance (error <= δ each).
    Tail bound: each skeleton meets every disk of diameter 2·D_max, so every
    point of B_n is within 2·D_max of both B_n(∂x) and B_n(∂y) (pull a witness
    radially inward by 2·D_max if it leaves B_n). Hence d_H <= 4·D_max and the
    terms n > N contribute at most 4·D_max/N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    d_max = max(x.d_max, y.d_max)
    radius = N + d_max
    wx, wy = x.window(radius), y.window(radius)
    sx, sy = unique_segments(skeleton(wx)), unique_segments(skeleton(wy))
    lower = 0.0
    for n in range(1, N + 1):
        a, b = clip_to_disk(sx, n), clip_to_disk(sy, n)
        h, err = hausdorff_distance(a, b, delta)
        lower = max(lower, (h - err) / n)
    upper = max(lower + 2 * delta, 4 * d_max / N)
    return MetricResult(lower, upper, float(N), f"delta={delta}; tail 4*D_max/N with D_max={d_max:.12g}")


# ---------------------------------------------------------------------------
# adapted metrics

Decision = Callable[[TilingWindow, TilingWindow, float, float], bool]


def _cover_radius(r: float) -> float:
    return 1.0 / r + r


def _source(wx: TilingWindow, r: float) -> np.ndarray:
    return wx.meeting_disk(_cover_radius(r))


def _anchor(wx: TilingWindow, idx: np.ndarray) -> int:
    """The tile of ``idx`` nearest the origin (lowest index on ties)."""
    d = np.linalg.norm(wx.centroids[idx], axis=1)
    return int(idx[np.argmin(d)])


def _global_witness(wx: TilingWindow, wy: TilingWindow, r: float, tol: float,
                    translation_only: bool) -> bool:
    idx = _source(wx, r)
    if len(idx) == 0:
        return False
    a = _anchor(wx, idx)
    ca = float(np.linalg.norm(wx.centroids[a]))
    # a motion in B_r moves the anchor centroid by at most r·(1 + |c|)
    rad = r * (1.0 + ca) + tol
    hits = wy.tree.query_ball_point(wx.centroids[a], rad)
    polys = wx.polygons[idx]
    for j in sorted(hits):
        mv = best_tile_moves(wx, [a], wy.subset([j]), np.zeros(2), np.zeros(2), rad,
                             translation_only, tol)
        if not mv.dist[0] < r:
            continue
        t = Isometry2.from_angle(float(mv.theta[0]), mv.b[0])
        if np.all(wy.contains_polygons(t(polys), tol)):
            return True
    return False


def decide_d1(wx, wy, r, tol=DEFAULT_TOL.geom) -> bool:
    """Is there v in B_r with T_v x' ⊆ y, x' the tiles of x meeting B_{1/r + r}?

    Since |v| < r, supp(T_v x') contains B_{1/r}, so the pair (x', T_v x') is
    admissible.
    """
    return _global_witness(wx, wy, r, tol, True)


def decide_d2(wx, wy, r, tol=DEFAULT_TOL.geom) -> bool:
    return _global_witness(wx, wy, r, tol, False)


def decide_d3(wx, wy, r, tol=DEFAULT_TOL.geom) -> bool:
    """Per-tile motions: each tile of x' goes to a distinct y tile by its own T_i in B_r,
    and the matched y tiles cover B_{1/r}."""
    idx = _source(wx, r)
    if len(idx) == 0:
        return False
    rad = r * (1.0 + np.linalg.norm(wx.centroids[idx], axis=1)) + tol
    mv = best_tile_moves(wx, idx, wy, np.zeros(2), np.zeros(2), rad, False, tol)
    if not np.all(mv.dist < r):
        return False
    if len(np.unique(mv.target)) != len(idx):
        return False
    return patch_support_contains_disk(wy.subset(mv.target), 1.0 / r)


DECIDERS: dict[str, Decision] = {"d1": decide_d1, "d2": decide_d2, "d3": decide_d3}


def _grid(r_min: float, step: float) -> np.ndarray:
    k = int(math.floor((CAP - r_min) / step + 1e-12))
    # rounded so grid values carry no accumulated representation error
    return np.round(r_min + step * np.arange(k + 1), 12)


def _one_direction(x: WindowProvider, y: WindowProvider, decide: Decision, r_min: float,
                   step: float, tol: float) -> tuple[float, float, float]:
    grid = _grid(r_min, step)
    rx = _cover_radius(r_min)
    # images of x' stay within 1/r + 2 + D_max; file-backed windows may offer less,
    # which can only cost witnesses, never create false ones
    need = 1.0 / r_min + 1.0
    ry = min(rx + 2 * max(x.d_max, y.d_max) + 2.0, y.max_radius)
    if x.max_radius < rx or ry < need:
        raise InsufficientWindow(f"windows of radius >= {need:.6g} are needed for r_min={r_min}")
    wx_full, wy_full = x.window(rx), y.window(ry)
    cache: dict[int, bool] = {}

    def test(k: int) -> bool:
        if k not in cache:
            r = float(grid[k])
            wx = wx_full.restrict(_cover_radius(r))
            wy = wy_full.restrict(min(wy_full.radius, _cover_radius(r) + 2 * wy_full.d_max + 2 * r + 1.0))
            cache[k] = decide(wx, wy, r, tol)
        return cache[k]

    if test(0):
        return 0.0, float(grid[0]), ry
    last = len(grid) - 1
    if not test(last):
        return float(grid[last]), CAP, ry
    lo, hi = 0, last  # test(lo) false, test(hi) true
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if test(mid):
            hi = mid
        else:
            lo = mid
    return float(grid[lo]), float(grid[hi]), ry


def adapted_metric(kind: str, x: WindowProvider, y: WindowProvider, r_min: float = 0.01,
                   step: float = 1e-3, tol: float = DEFAULT_TOL.geom) -> MetricResult:
    """Interval for d1, d2 or d3 by bisection over the grid r_min + k·step <= 1/√2.

    ``upper`` is a grid value with an explicit witness (or 1/√2); ``lower`` is the
    largest grid value below it whose decision failed. Both directions are
    evaluated and combined by max, so the result is symmetric.
    """
    if kind not in DECIDERS:
        raise ValueError(f"unknown metric {kind!r}")
    if not 0 < r_min < CAP:
        raise ValueError("r_min must lie in (0, 1/sqrt(2))")
    if step <= 0:
        raise ValueError("step must be positive")
    decide = DECIDERS[kind]
    l1, u1, t1 = _one_direction(x, y, decide, r_min, step, tol)
    l2, u2, t2 = _one_direction(y, x, decide, r_min, step, tol)
    lower, upper = max(l1, l2), min(max(u1, u2), CAP)
    lower = min(lower, upper)
    notes = f"{kind}: grid step {step:g} from r_min {r_min:g}; lower assumes the alignment search is complete"
    return MetricResult(lower, upper, max(t1, t2), notes)


def metric_d1(x, y, r_min=0.01, step=1e-3, tol=DEFAULT_TOL.geom) -> MetricResult:
    return adapted_metric("d1", x, y, r_min, step, tol)


def metric_d2(x, y, r_min=0.01, step=1e-3, tol=DEFAULT_TOL.geom) -> MetricResult:
    return adapted_metric("d2", x, y, r_min, step, tol)


def metric_d3(x, y, r_min=0.01, step=1e-3, tol=DEFAULT_TOL.geom) -> MetricResult:
    return adapted_metric("d3", x, y, r_min, step, tol)


METRICS = {"d1": metric_d1, "d2": metric_d2, "d3": metric_d3}

__all__ = ["CAP", "METRICS", "MetricResult", "adapted_metric", "decide_d1", "decide_d2", "decide_d3",
           "metric_d1", "metric_d2", "metric_d3", "metric_general"]
