"""Two-tile protopatch censuses and finite-local-complexity evidence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_TOL
from .tiling import (
    ISOMETRY,
    MODES,
    TRANSLATION,
    CanonicalProtopatch,
    TilingWindow,
    WindowProvider,
    adjacent_pairs,
    canonicalize,
)

FLC_TRANSLATION = "FLC-translation"
FLC_EUCLIDEAN = "FLC-Euclidean"
NON_FLC = "non-FLC-evidence"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class T2Census:
    mode: str
    window_radius: float
    classes: list  # [(CanonicalProtopatch, count)] sorted by hash

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "window_radius": self.window_radius,
            "class_count": self.class_count,
            "classes": [{"hash": f"{c.hash:016x}", "count": n} for c, n in self.classes],
        }


@dataclass(frozen=True)
class FLCReport:
    verdict: str
    censuses: list

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "censuses": [c.to_dict() for c in self.censuses]}


def _pose_key(w: TilingWindow, i: int, j: int, mode: str, q: float) -> tuple:
    """Both polygons, quantized, in a frame attached to tile i.

    Equal keys imply the pairs are equal up to the mode's group, so the key is
    safe as a memo for the (more expensive) canonical form.
    """
    pi, pj = w.polygons[i], w.polygons[j]
    rel = np.concatenate([pi, pj]) - pi[0]
    if mode == ISOMETRY:
        e = pi[1] - pi[0]
        n = np.hypot(e[0], e[1])
        c, s = e[0] / n, -e[1] / n
        rel = np.stack([c * rel[:, 0] - s * rel[:, 1], s * rel[:, 0] + c * rel[:, 1]], axis=1)
    return (int(w.shape_ids[i]), int(w.shape_ids[j])) + tuple(np.round(rel / q).astype(np.int64).ravel())


def enumerate_T2(w: TilingWindow, mode: str = TRANSLATION, q: float = DEFAULT_TOL.quantum,
                 tol: float = DEFAULT_TOL.geom) -> T2Census:
    """Tally the (congruence) protopatches of adjacent tile pairs lying wholly inside the window."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if len(w) == 0:
        return T2Census(mode, w.radius, [])
    inside = np.max(np.linalg.norm(w.polygons, axis=-1), axis=1) <= w.radius
    pairs = adjacent_pairs(w, tol)
    pairs = pairs[inside[pairs[:, 0]] & inside[pairs[:, 1]]]
    memo: dict[tuple, CanonicalProtopatch] = {}
    counts: dict[int, int] = {}
    reps: dict[int, CanonicalProtopatch] = {}
    for i, j in pairs:
        key = _pose_key(w, i, j, mode, q)
        c = memo.get(key)
        if c is None:
            c = canonicalize(w.subset([i, j]), mode, q)
            memo[key] = c
            memo[_pose_key(w, j, i, mode, q)] = c
        counts[c.hash] = counts.get(c.hash, 0) + 1
        reps.setdefault(c.hash, c)
    classes = [(reps[h], counts[h]) for h in sorted(counts)]
    return T2Census(mode, w.radius, classes)


def classify_flc(p: WindowProvider, radii, q: float = DEFAULT_TOL.quantum) -> FLCReport:
    """Evidence-based FLC verdict from censuses at increasing radii.

    Finite windows cannot prove finite local complexity; the verdict reports
    whether class counts stabilize between the last two radii.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing with at least three entries")
    trans, iso = [], []
    for r in radii:
        w = p.window(r)
        trans.append(enumerate_T2(w, TRANSLATION, q))
        iso.append(enumerate_T2(w, ISOMETRY, q))
    tc = [c.class_count for c in trans]
    ic = [c.class_count for c in iso]
    if tc[-1] == tc[-2]:
        verdict = FLC_TRANSLATION
    elif ic[-1] == ic[-2]:
        verdict = FLC_EUCLIDEAN
    elif all(b > a for a, b in zip(ic, ic[1:])):
        verdict = NON_FLC
    else:
        verdict = INCONCLUSIVE
    censuses = [c for pair in zip(trans, iso) for c in pair]
    return FLCReport(verdict, censuses)
