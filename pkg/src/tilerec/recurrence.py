"""Certificates of scaled pattern recurrence: verification and search.

A certificate says that a patch ``p`` of the tiling ``x``, whose support holds a
disk of radius 1/ε about the base point ``v``, reappears at every position
``v + n·u`` (u in the pattern F) after an ε-small correction:

* ``thm1``: a translation by ``n·u + c`` with ``|c| < ε``;
* ``thm2``: ``T_{n u + v} S T_{-v}`` with ``S`` in the ε-ball of the isometry group;
* ``thm3``: the same, but with one ``S`` per tile.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhausted, InsufficientWindow
from .geometry import DEFAULT_TOL, Isometry2, in_epsilon_ball
from .ipsets import IPSetSpec, ip_enumerate
from .tiling import (
    TRANSLATION,
    CanonicalProtopatch,
    Patch,
    TileSet,
    TilingWindow,
    WindowProvider,
    best_tile_moves,
    canonicalize,
    patch_support_contains_disk,
    patches_covering,
)

log = logging.getLogger(__name__)

VARIANTS = ("thm1", "thm2", "thm3")


@dataclass(frozen=True, eq=False)
class PatternF:
    vectors: tuple

    def __init__(self, vectors):
        vecs = [tuple(float(c) for c in np.asarray(u, dtype=float).reshape(2)) for u in vectors]
        if not vecs:
            raise ValueError("pattern must contain at least one vector")
        if not all(math.isfinite(c) for u in vecs for c in u):
            raise ValueError("pattern vectors must be finite")
        if len(set(vecs)) != len(vecs):
            raise ValueError("pattern vectors must be distinct")
        object.__setattr__(self, "vectors", tuple(vecs))

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return (np.array(u) for u in self.vectors)

    @property
    def max_norm(self) -> float:
        return max(math.hypot(*u) for u in self.vectors)


@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    """corrections: thm1 one vector per u; thm2 one Isometry2 per u; thm3 per u a list of
    Isometry2, one per patch tile in patch order."""

    variant: str
    n: int
    epsilon: float
    base: np.ndarray
    patch: TileSet
    corrections: list
    pattern: PatternF | None = field(default=None)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float).reshape(2))


def _window_for(x: WindowProvider, radius: float) -> TilingWindow:
    return x.window(radius)


def _needed_radius(cert: WitnessCertificate, F: PatternF) -> float:
    polys = cert.patch.polygons
    reach = float(np.max(np.linalg.norm(polys, axis=-1))) if len(polys) else 0.0
    return reach + cert.n * F.max_norm + 2 * cert.epsilon + cert.patch.d_max


def _common_checks(x: WindowProvider, F: PatternF, cert: WitnessCertificate, variant: str,
                   tol: float) -> TilingWindow | None:
    if cert.variant != variant or len(cert.patch) == 0 or len(cert.corrections) != len(F):
        return None
    w = _window_for(x, _needed_radius(cert, F))
    if not np.all(w.contains_polygons(cert.patch.polygons, tol)):
        return None
    if not patch_support_contains_disk(cert.patch, 1.0 / cert.epsilon, cert.base):
        return None
    return w


def verify_witness_thm1(x: WindowProvider, F: PatternF, cert: WitnessCertificate,
                        tol: float = DEFAULT_TOL.geom) -> bool:
    w = _common_checks(x, F, cert, "thm1", tol)
    if w is None:
        return False
    polys = cert.patch.polygons
    for u, c in zip(F, cert.corrections):
        c = np.asarray(c, dtype=float).reshape(2)
        if not np.linalg.norm(c) < cert.epsilon:
            return False
        if not np.all(w.contains_polygons(polys + (cert.n * u + c), tol)):
            return False
    return True


def _conjugated(s: Isometry2, shift: np.ndarray, v: np.ndarray) -> Isometry2:
    """``T_{shift + v} S T_{-v}``."""
    return Isometry2.translate(shift + v) @ s @ Isometry2.translate(-v)


def verify_witness_thm2(x: WindowProvider, F: PatternF, cert: WitnessCertificate,
                        tol: float = DEFAULT_TOL.geom) -> bool:
    w = _common_checks(x, F, cert, "thm2", tol)
    if w is None:
        return False
    polys = cert.patch.polygons
    for u, s in zip(F, cert.corrections):
        if not isinstance(s, Isometry2) or not in_epsilon_ball(s, cert.epsilon):
            return False
        m = _conjugated(s, cert.n * u, cert.base)
        if not np.all(w.contains_polygons(m(polys), tol)):
            return False
    return True


def verify_witness_thm3(x: WindowProvider, F: PatternF, cert: WitnessCertificate,
                        tol: float = DEFAULT_TOL.geom) -> bool:
    w = _common_checks(x, F, cert, "thm3", tol)
    if w is None:
        return False
    polys = cert.patch.polygons
    for u, per_tile in zip(F, cert.corrections):
        if len(per_tile) != len(polys):
            return False
        moved = np.empty_like(polys)
        for j, s in enumerate(per_tile):
            if not isinstance(s, Isometry2) or not in_epsilon_ball(s, cert.epsilon):
                return False
            moved[j] = _conjugated(s, cert.n * u, cert.base)(polys[j])
        if not np.all(w.contains_polygons(moved, tol)):
            return False
    return True


VERIFIERS = {"thm1": verify_witness_thm1, "thm2": verify_witness_thm2, "thm3": verify_witness_thm3}


def verify_witness(x: WindowProvider, F: PatternF, cert: WitnessCertificate,
                   tol: float = DEFAULT_TOL.geom) -> bool:
    return VERIFIERS[cert.variant](x, F, cert, tol)


def thm1_to_thm2(cert: WitnessCertificate) -> WitnessCertificate:
    """A translation correction c is the isometry T_c, and T_{nu+v} T_c T_{-v} = T_{nu+c}."""
    if cert.variant != "thm1":
        raise ValueError("expected a thm1 certificate")
    corr = [Isometry2.translate(c) for c in cert.corrections]
    return WitnessCertificate("thm2", cert.n, cert.epsilon, cert.base, cert.patch, corr, cert.pattern)


def thm2_to_thm3(cert: WitnessCertificate) -> WitnessCertificate:
    if cert.variant != "thm2":
        raise ValueError("expected a thm2 certificate")
    corr = [[s] * len(cert.patch) for s in cert.corrections]
    return WitnessCertificate("thm3", cert.n, cert.epsilon, cert.base, cert.patch, corr, cert.pattern)


# ---------------------------------------------------------------------------
# patch index

@dataclass
class PatchIndex:
    """Map from protopatch hash to the anchors where that protopatch occurs."""

    mode: str
    patch_radius: float
    quantum: float
    buckets: dict = field(default_factory=dict)  # hash -> [(anchor, frame)]

    def lookup(self, h: int) -> list:
        return self.buckets.get(h, [])

    def __len__(self) -> int:
        return sum(len(b) for b in self.buckets.values())


def build_patch_index(w: TilingWindow, anchor_grid: float, patch_radius: float,
                      mode: str = TRANSLATION, q: float = DEFAULT_TOL.quantum) -> PatchIndex:
    """Canonicalize the minimal patch over the disk at every grid anchor.

    Canonicalization uses the anchor as origin, so equal hashes mean the two
    anchors sit at corresponding points of equal (congruent) patches.
    """
    if anchor_grid <= 0 or patch_radius <= 0:
        raise ValueError("anchor_grid and patch_radius must be positive")
    if patch_radius > w.radius / 4 + 1e-12:
        raise InsufficientWindow("patch_radius must be at most a quarter of the window radius")
    lim = w.radius - patch_radius
    k = int(math.floor(lim / anchor_grid))
    idx = PatchIndex(mode, patch_radius, q)
    for i in range(-k, k + 1):
        for j in range(-k, k + 1):
            a = np.array([i * anchor_grid, j * anchor_grid])
            if np.linalg.norm(a) > lim:
                continue
            p = patches_covering(w, patch_radius, a)
            c: CanonicalProtopatch = canonicalize(p, mode, q, anchor=a)
            idx.buckets.setdefault(c.hash, []).append((a, c.frame))
    return idx


# ---------------------------------------------------------------------------
# search

def _iso(theta: float, b) -> Isometry2:
    return Isometry2.from_angle(float(theta), np.asarray(b, dtype=float))


class _Searcher:
    def __init__(self, x: WindowProvider, F: PatternF, eps: float, variant: str, r_search: float,
                 tol: float, threads: int):
        self.F = F
        self.eps = eps
        self.variant = variant
        self.tol = tol
        self.threads = max(1, int(threads))
        self.w = x.window(r_search)
        self.r = 1.0 / eps
        d = self.w.d_max
        # base anchors: tile centroids whose 1/ε-patch lies inside the window
        cen = self.w.centroids
        norms = np.linalg.norm(cen, axis=1)
        ok = norms + self.r + 2 * d <= self.w.radius
        order = np.lexsort((cen[:, 1], cen[:, 0]))
        self.anchors = order[ok[order]]
        self.norms = norms

    def _slack(self) -> float:
        return self.r + 2 * self.w.d_max + 2 * self.eps

    def candidates(self, n: int) -> np.ndarray:
        """Anchors (in lexicographic order) whose own tile has an admissible motion for every u."""
        a = self.anchors
        a = a[self.norms[a] + n * self.F.max_norm + self._slack() <= self.w.radius]
        for u in self.F:
            if len(a) == 0:
                break
            mv = best_tile_moves(self.w, a, self.w, n * u, self.w.centroids[a], self.eps + self.tol,
                             self.variant == "thm1", self.tol)
            keep = mv.dist < self.eps
            a = a[keep]
            a = a[self._ring_ok(a, n * u, mv.theta[keep], mv.b[keep])]
        return a

    def _ring_ok(self, a: np.ndarray, shift: np.ndarray, theta: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Necessary condition on a few tiles of each anchor's patch.

        A tile whose centroid lies in the open disk belongs to the patch, so the
        tiles nearest to points of an inner ring are checked before the full test.
        """
        w = self.w
        v = w.centroids[a]
        ang = np.linspace(0.0, 2 * np.pi, 12, endpoint=False)
        ring = v[:, None, :] + 0.8 * self.r * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        _, idx = w.tree.query(ring.reshape(-1, 2))
        idx = idx.reshape(len(a), len(ang))
        inside = np.linalg.norm(w.centroids[idx] - v[:, None, :], axis=-1) < self.r
        ok = np.ones(len(a), dtype=bool)
        if self.variant == "thm3":
            rows, cols = np.nonzero(inside)
            t = idx[rows, cols]
            rad = self.eps * (1.0 + np.linalg.norm(w.centroids[t] - v[rows], axis=1)) + self.tol
            mv = best_tile_moves(w, t, w, shift, v[rows], rad, False, self.tol)
            bad = np.zeros(len(a), dtype=bool)
            np.logical_or.at(bad, rows, ~(mv.dist < self.eps))
            return ok & ~bad
        c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
        z = w.centroids[idx]
        img = np.stack([c * z[..., 0] - s * z[..., 1], s * z[..., 0] + c * z[..., 1]], axis=-1) + b[:, None, :]
        d, _ = w.tree.query(img.reshape(-1, 2))
        hit = d.reshape(len(a), len(ang)) <= max(10 * self.tol, 1e-7)
        return np.all(hit | ~inside, axis=1)

    def attempt(self, n: int, anchor: int) -> WitnessCertificate | None:
        w = self.w
        v = w.centroids[anchor].copy()
        p = patches_covering(w, self.r, v)
        if not patch_support_contains_disk(p, self.r, v):
            return None
        src_idx = w.find(p.polygons, self.tol)
        corrections = []
        for u in self.F:
            shift = n * u
            if self.variant == "thm3":
                rad = self.eps * (1.0 + np.linalg.norm(w.centroids[src_idx] - v, axis=1)) + self.tol
                mv = best_tile_moves(w, src_idx, w, shift, v, rad, False, self.tol)
                if not np.all(mv.dist < self.eps):
                    return None
                per = [Isometry2.translate(-(shift + v)) @ _iso(t, bb) @ Isometry2.translate(v)
                       for t, bb in zip(mv.theta, mv.b)]
                corrections.append(per)
                continue
            mv = best_tile_moves(w, np.array([anchor]), w, shift, v, self.eps + self.tol,
                             self.variant == "thm1", self.tol)
            if not mv.dist[0] < self.eps:
                return None
            m = _iso(mv.theta[0], mv.b[0])
            if not np.all(w.contains_polygons(m(p.polygons), self.tol)):
                return None
            s = Isometry2.translate(-(shift + v)) @ m @ Isometry2.translate(v)
            if self.variant == "thm1":
                corrections.append(np.asarray(s.translation, dtype=float))
            else:
                corrections.append(s)
        return WitnessCertificate(self.variant, n, self.eps, v, p, corrections, self.F)

    def first_success(self, n: int, cands: np.ndarray) -> WitnessCertificate | None:
        if self.threads == 1:
            for a in cands:
                cert = self.attempt(n, int(a))
                if cert is not None:
                    return cert
            return None
        # ordered batches: the first success within the earliest batch wins
        batch = 8 * self.threads
        with ThreadPoolExecutor(self.threads) as ex:
            for start in range(0, len(cands), batch):
                chunk = [int(a) for a in cands[start:start + batch]]
                for cert in ex.map(lambda a: self.attempt(n, a), chunk):
                    if cert is not None:
                        return cert
        return None


def dilation_sequence(n_budget: int, ip: IPSetSpec | None) -> list[int]:
    if n_budget < 1:
        return []
    if ip is None:
        return list(range(1, n_budget + 1))
    return ip_enumerate(ip, n_budget)


def search_witness(x: WindowProvider, F: PatternF, eps: float, variant: str = "thm1",
                   n_budget: int = 60, r_search: float = 50.0, ip: IPSetSpec | None = None,
                   tol: float = DEFAULT_TOL.geom, threads: int = 1) -> WitnessCertificate:
    """First certificate in the order (n ascending, base point lexicographic).

    ``n`` runs over 1..n_budget, or over the IP-set elements up to n_budget.
    Base points are tile centroids. Raises BudgetExhausted when no certificate
    exists among the admissible (n, base) pairs of the window.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    ns = dilation_sequence(n_budget, ip)
    if not ns:
        raise BudgetExhausted("empty dilation budget")
    s = _Searcher(x, F, eps, variant, r_search, tol, threads)
    if len(s.anchors) == 0:
        raise InsufficientWindow(f"window radius {r_search} too small for patches of radius {1 / eps}")
    tried = 0
    for n in ns:
        cands = s.candidates(n)
        if len(cands) == 0 and n * F.max_norm + s._slack() > s.w.radius:
            break
        tried += len(cands)
        log.debug("n=%d: %d candidate anchors", n, len(cands))
        cert = s.first_success(n, cands)
        if cert is not None:
            log.info("certificate found at n=%d after %d candidate anchors", n, tried)
            return cert
    raise BudgetExhausted(f"no certificate for n <= {n_budget} within radius {r_search} "
                          f"({tried} candidate anchors tried)")
