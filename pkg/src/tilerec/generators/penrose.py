"""Penrose rhomb tiling as half-rhomb (Robinson) triangles, in exact arithmetic.

Coordinates live in Z[ζ], ζ = exp(2πi/5), stored as integer vectors over the
basis (1, ζ, ζ², ζ³). Division by the golden ratio is multiplication by the
integer element ζ + ζ⁴, so subdivision never rounds. The seed triangle is
placed with the fixed point of one self-similar child map at the origin;
inflating about that point nests every level inside the next, so windows of
different radii restrict to each other exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..tiling import Prototile, TilingWindow, TileSet, WindowProvider, sort_tiles

COS = np.array([math.cos(2 * math.pi * j / 5) for j in range(4)])
SIN = np.array([math.sin(2 * math.pi * j / 5) for j in range(4)])

ONE = np.array([1, 0, 0, 0], dtype=np.int64)
ZETA = np.array([0, 1, 0, 0], dtype=np.int64)
INV_PHI = np.array([-1, 0, -1, -1], dtype=np.int64)  # ζ + ζ⁴
PHI = np.array([0, 0, -1, -1], dtype=np.int64)  # -(ζ² + ζ³)

THIN, THICK = 0, 1


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in Z[ζ] (broadcasting over leading axes)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    full = np.zeros(np.broadcast_shapes(a.shape, b.shape)[:-1] + (7,), dtype=np.int64)
    for i in range(4):
        for j in range(4):
            full[..., i + j] += a[..., i] * b[..., j]
    # x^5 = 1, x^4 = -(1 + x + x^2 + x^3)
    full[..., 0] += full[..., 5]
    full[..., 1] += full[..., 6]
    out = full[..., :4] - full[..., 4:5]
    return out


def power(a: np.ndarray, k: int) -> np.ndarray:
    out = ONE.copy()
    for _ in range(k):
        out = mul(out, a)
    return out


def to_complex(a) -> complex:
    a = np.asarray(a, dtype=float)
    return complex(float(a @ COS), float(a @ SIN))


def to_xy(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.stack([a @ COS, a @ SIN], axis=-1)


def mul_matrix(e: np.ndarray) -> np.ndarray:
    """Integer matrix of ``x -> e·x`` on coefficient vectors."""
    cols = [mul(e, np.eye(4, dtype=np.int64)[j]) for j in range(4)]
    return np.stack(cols, axis=1)


def _solve_rational(m: np.ndarray, rhs: np.ndarray) -> list[Fraction]:
    n = len(rhs)
    a = [[Fraction(int(m[i, j])) for j in range(n)] + [Fraction(int(rhs[i]))] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def subdivide(color: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """One Robinson-triangle deflation step (lengths shrink by 1/φ)."""
    red = color == THIN
    ar, br, cr = a[red], b[red], c[red]
    p = ar + mul(br - ar, INV_PHI)
    ab, bb, cb = a[~red], b[~red], c[~red]
    q = bb + mul(ab - bb, INV_PHI)
    r = bb + mul(cb - bb, INV_PHI)
    colors = [np.full(len(ar), THIN), np.full(len(ar), THICK),
              np.full(len(ab), THICK), np.full(len(ab), THICK), np.full(len(ab), THIN)]
    aa = [cr, p, r, q, r]
    bb_ = [p, cr, cb, r, q]
    cc = [br, ar, ab, bb, ab]
    return (np.concatenate(colors), np.concatenate(aa), np.concatenate(bb_), np.concatenate(cc))


def _apex(color: int) -> np.ndarray:
    """Second leg of the unit seed triangle: exp(iπ/5) for thin, exp(3iπ/5) for thick."""
    return -power(ZETA, 3) if color == THIN else -power(ZETA, 4)


def _children_single(color, a, b, c):
    return subdivide(np.array([color]), a[None], b[None], c[None])


def _orientation(a, b, c) -> float:
    za, zb, zc = to_complex(a), to_complex(b), to_complex(c)
    u, v = zb - za, zc - za
    return u.real * v.imag - u.imag * v.real


class PenroseProvider(WindowProvider):
    def __init__(self, seed_color: int = THICK):
        super().__init__()
        self._setup(seed_color)

    def _setup(self, seed_color):
        # unit-leg seed: thin apex 36°, thick apex 108°
        a0 = np.zeros(4, dtype=np.int64)
        b0 = ONE
        c0 = _apex(seed_color)
        kids = _children_single(seed_color, a0, b0, c0)
        found = None
        parent_z = [to_complex(v) for v in (a0, b0, c0)]
        o_parent = _orientation(a0, b0, c0)
        for i in range(len(kids[0])):
            if kids[0][i] != seed_color:
                continue
            a1, b1, c1 = kids[1][i], kids[2][i], kids[3][i]
            if _orientation(a1, b1, c1) * o_parent <= 0:
                continue
            mu = (to_complex(b1) - to_complex(a1)) / (parent_z[1] - parent_z[0])
            # mu = ±(1/φ)ζ^s
            for sign in (1, -1):
                for s in range(5):
                    cand = sign * mul(INV_PHI, power(ZETA, s))
                    if abs(to_complex(cand) - mu) < 1e-9:
                        mu_e = cand
            if not (np.array_equal(mul(mu_e, b0 - a0), b1 - a1) and np.array_equal(mul(mu_e, c0 - a0), c1 - a1)):
                continue
            shift = a1 - mul(mu_e, a0)
            z = _solve_rational(mul_matrix(ONE - mu_e), shift)
            zc = to_complex(np.array([float(x) for x in z]))
            if _inside_margin(parent_z, zc) > 0.05:
                found = (mu_e, z)
                break
        if found is None:
            raise RuntimeError("no interior fixed point for the Penrose seed")
        mu_e, z = found
        den = 1
        for x in z:
            den = den * x.denominator // math.gcd(den, x.denominator)
        zi = np.array([int(x * den) for x in z], dtype=np.int64)
        self._scale = den
        self._seed = (seed_color, a0 * den - zi, b0 * den - zi, c0 * den - zi)
        # inflation g = 1/mu = ±φ ζ^{-s}; verify exactly
        inv = None
        for sign in (1, -1):
            for s in range(5):
                cand = sign * mul(PHI, power(ZETA, s))
                if np.array_equal(mul(cand, mu_e), ONE):
                    inv = cand
        self._inflate = inv
        seed_xy = [to_complex(v) / den for v in self._seed[1:]]
        self._seed_margin = _inside_margin(seed_xy, 0j)
        self._protos: dict[tuple, Prototile] = {}

    def certified_radius(self, level: int) -> float:
        return self._seed_margin * ((1 + math.sqrt(5)) / 2) ** level

    def _level_for(self, radius: float) -> int:
        k = 0
        while self.certified_radius(k) < radius + 2.0:
            k += 1
        return k

    def _prototile(self, color, chir, k, b_rel, c_rel) -> tuple[str, Prototile]:
        key = (color, chir, k)
        if key not in self._protos:
            name = f"{'thin' if color == THIN else 'thick'}{'L' if chir > 0 else 'R'}{k}"
            pb, pc = to_xy(b_rel) / self._scale, to_xy(c_rel) / self._scale
            verts = [(0.0, 0.0), tuple(pb), tuple(pc)] if chir > 0 else [(0.0, 0.0), tuple(pc), tuple(pb)]
            self._protos[key] = Prototile(name, np.array(verts))
        return self._protos[key]

    def all_prototiles(self) -> list[Prototile]:
        """The fixed 40-entry table: 2 shapes x 2 chiralities x 10 directions."""
        out = []
        for color in (THIN, THICK):
            apex = _apex(color)
            for chir in (1, -1):
                for k in range(10):
                    # exp(ikπ/5) = (-ζ³)^k
                    rot = power(ZETA, (3 * k) % 5) * (-1 if k % 2 else 1)
                    b_rel = mul(rot, ONE) * self._scale
                    c_rel = mul(rot, apex if chir > 0 else _conj(apex)) * self._scale
                    out.append(self._prototile(color, chir, k, b_rel, c_rel))
        return out

    def _build(self, radius):
        level = self._level_for(radius)
        color, a, b, c = self._seed
        color = np.array([color])
        a, b, c = a[None], b[None], c[None]
        g = power(self._inflate, level)
        a, b, c = mul(a, g), mul(b, g), mul(c, g)
        for _ in range(level):
            color, a, b, c = subdivide(color, a, b, c)
        table = self.all_prototiles()
        index = {(p.id): i for i, p in enumerate(table)}
        ab = to_xy(b - a)
        ac = to_xy(c - a)
        chir = np.sign(ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])
        k = np.mod(np.round(np.arctan2(ab[:, 1], ab[:, 0]) / (math.pi / 5)).astype(int), 10)
        names = [f"{'thin' if col == THIN else 'thick'}{'L' if ch > 0 else 'R'}{kk}"
                 for col, ch, kk in zip(color, chir, k)]
        pidx = np.array([index[n] for n in names])
        trans = to_xy(a) / self._scale
        ts = TileSet(table, pidx, np.zeros(len(pidx)), trans)
        ts = sort_tiles(ts.subset(ts.meeting_disk(radius)))
        return TilingWindow.from_tileset(radius, ts)


def _conj(e: np.ndarray) -> np.ndarray:
    """Complex conjugate in Z[ζ]: ζ^j -> ζ^{-j}."""
    a0, a1, a2, a3 = (int(x) for x in e)
    # a1 ζ^4 + a2 ζ^3 + a3 ζ^2, with ζ^4 = -(1+ζ+ζ²+ζ³)
    return np.array([a0 - a1, -a1, a3 - a1, a2 - a1], dtype=np.int64)


def _inside_margin(tri: list[complex], z: complex) -> float:
    """Signed distance from z to the boundary of a triangle (positive inside)."""
    o = (tri[1] - tri[0]).real * (tri[2] - tri[0]).imag - (tri[1] - tri[0]).imag * (tri[2] - tri[0]).real
    sgn = 1 if o > 0 else -1
    best = math.inf
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        e = q - p
        cross = e.real * (z - p).imag - e.imag * (z - p).real
        best = min(best, sgn * cross / abs(e))
    return best


def penrose(seed_color: int = THICK) -> PenroseProvider:
    return PenroseProvider(seed_color)
