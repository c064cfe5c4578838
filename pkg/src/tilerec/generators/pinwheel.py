"""Conway-Radin pinwheel tiling by 1-2-√5 right triangles, in exact integer arithmetic.

A triangle is stored by roles (P0, P1, P2): P0 the acute vertex between the
hypotenuse and the long leg, P1 the right angle, P2 the remaining vertex.
Subdivision drops the altitude from P1 to the hypotenuse (foot H) and splits the
larger part (P0, H, P1) through its edge midpoints; the rectangle at H is cut
along its other diagonal, so both chiralities occur. Five copies scaled by 1/√5. Every new vertex is an affine combination with denominators 5 and 2, so
coordinates are kept as integers and the unit grows tenfold per level.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..tiling import Prototile, TilingWindow, TileSet, WindowProvider, sort_tiles

SEED = ((0, 0), (2, 0), (2, 1))

PROTO_R = Prototile("pinR", np.array([(0.0, 0.0), (2.0, 0.0), (2.0, 1.0)]))
PROTO_L = Prototile("pinL", np.array([(0.0, 0.0), (2.0, -1.0), (2.0, 0.0)]))


def _children(p0, p1, p2):
    """Integer subdivision in units ten times finer; works on scalars or arrays."""
    h = 2 * p0 + 8 * p2
    q0, q1, q2 = 10 * p0, h, 10 * p1
    ma = 6 * p0 + 4 * p2
    mb = p0 + 4 * p2 + 5 * p1
    mc = 5 * p0 + 5 * p1
    return [
        (10 * p1, h, 10 * p2),
        (q0, ma, mc),
        (q1, ma, mc),
        (mc, mb, q1),
        (mc, mb, q2),
    ]


def subdivide(p0: np.ndarray, p1: np.ndarray, p2: np.ndarray):
    kids = _children(p0, p1, p2)
    return tuple(np.concatenate([k[r] for k in kids]) for r in range(3))


def _cx(p) -> tuple[Fraction, Fraction]:
    return (Fraction(p[0]), Fraction(p[1]))


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cdiv(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def _csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _orient(p0, p1, p2) -> Fraction:
    return (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])


def _margin(tri, z) -> float:
    pts = [complex(float(p[0]), float(p[1])) for p in tri]
    zz = complex(float(z[0]), float(z[1]))
    o = _orient(*tri)
    sgn = 1 if o > 0 else -1
    best = math.inf
    for i in range(3):
        a, b = pts[i], pts[(i + 1) % 3]
        e = b - a
        cr = e.real * (zz - a).imag - e.imag * (zz - a).real
        best = min(best, sgn * cr / abs(e))
    return best


class PinwheelProvider(WindowProvider):
    def __init__(self, child: int | None = None):
        super().__init__()
        seed = [_cx(p) for p in SEED]
        kids = self._fraction_children(seed)
        o_parent = _orient(*seed)
        best = None
        for i, kid in enumerate(kids):
            if child is not None and i != child:
                continue
            if _orient(*kid) * o_parent <= 0:
                continue
            mu = _cdiv(_csub(kid[1], kid[0]), _csub(seed[1], seed[0]))
            c = _csub(kid[0], _cmul(mu, seed[0]))
            z = _cdiv(c, _csub((Fraction(1), Fraction(0)), mu))
            m = _margin(seed, z)
            if m > 0 and (best is None or m > best[0]):
                best = (m, mu, z)
        if best is None:
            raise RuntimeError("no orientation-preserving child with interior fixed point")
        _, mu, z = best
        self._inflate = _cdiv((Fraction(1), Fraction(0)), mu)
        if any(x.denominator != 1 for x in self._inflate):
            raise RuntimeError("inflation factor is not a Gaussian integer")
        den = 1
        for p in seed:
            for coord in _csub(p, z):
                den = den * coord.denominator // math.gcd(den, coord.denominator)
        self._den = den
        self._seed = [tuple(int(c * den) for c in _csub(p, z)) for p in seed]
        self._seed_margin = _margin([_csub(p, z) for p in seed], (Fraction(0), Fraction(0)))
        self.fixed_point = (float(z[0]), float(z[1]))

    @staticmethod
    def _fraction_children(tri):
        p0, p1, p2 = tri

        def lin(*terms):
            x = sum(w * p[0] for w, p in terms)
            y = sum(w * p[1] for w, p in terms)
            return (x / 10, y / 10)
        res = _children_symbolic()
        pts = {"p0": p0, "p1": p1, "p2": p2}
        return [tuple(lin(*[(w, pts[n]) for n, w in vert.items()]) for vert in kid) for kid in res]

    def certified_radius(self, level: int) -> float:
        return self._seed_margin * math.sqrt(5) ** level

    def _build(self, radius):
        level = 0
        while self.certified_radius(level) < radius + 3.0:
            level += 1
        g = (int(self._inflate[0]), int(self._inflate[1]))
        gk = (1, 0)
        for _ in range(level):
            gk = (gk[0] * g[0] - gk[1] * g[1], gk[0] * g[1] + gk[1] * g[0])
        tri = []
        for x, y in self._seed:
            tri.append(np.array([[x * gk[0] - y * gk[1], x * gk[1] + y * gk[0]]], dtype=object))
        p0, p1, p2 = tri
        bound = max(abs(int(v)) for arr in tri for v in arr.ravel()) * 10 ** level
        dtype = np.int64 if bound < 2 ** 62 else object
        p0, p1, p2 = (a.astype(dtype) for a in (p0, p1, p2))
        for _ in range(level):
            p0, p1, p2 = subdivide(p0, p1, p2)
        unit = self._den * 10 ** level
        f0 = _to_float(p0, unit)
        f1 = _to_float(p1, unit)
        f2 = _to_float(p2, unit)
        e = f1 - f0
        angles = np.arctan2(e[:, 1], e[:, 0])
        cr = (f1[:, 0] - f0[:, 0]) * (f2[:, 1] - f0[:, 1]) - (f1[:, 1] - f0[:, 1]) * (f2[:, 0] - f0[:, 0])
        pidx = np.where(cr > 0, 0, 1)
        ts = TileSet([PROTO_R, PROTO_L], pidx, angles, f0)
        ts = sort_tiles(ts.subset(ts.meeting_disk(radius)))
        return TilingWindow.from_tileset(radius, ts)


def _to_float(p: np.ndarray, unit: int) -> np.ndarray:
    if p.dtype == object:
        return np.array([[x / unit for x in row] for row in p.tolist()], dtype=float)
    return p.astype(np.float64) / float(unit) if unit < 2 ** 53 and np.max(np.abs(p)) < 2 ** 53 \
        else np.array([[int(x) / unit for x in row] for row in p.tolist()], dtype=float)


def _children_symbolic():
    """The child vertices of ``_children`` as weight maps over (p0, p1, p2)."""
    basis = {"p0": np.array([1, 0, 0]), "p1": np.array([0, 1, 0]), "p2": np.array([0, 0, 1])}
    kids = _children(basis["p0"], basis["p1"], basis["p2"])
    names = ("p0", "p1", "p2")
    return [[{n: int(v[i]) for i, n in enumerate(names)} for v in kid] for kid in kids]


def pinwheel(child: int | None = None) -> PinwheelProvider:
    return PinwheelProvider(child)
