"""Periodic parallelogram tilings and row-sheared square tilings."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..errors import DegenerateBasis
from ..tiling import Prototile, TilingWindow, TileSet, WindowProvider, sort_tiles

GOLDEN = (1 + math.sqrt(5)) / 2


class LatticeProvider(WindowProvider):
    """Translates of the fundamental parallelogram over the lattice ``Z b1 + Z b2``."""

    def __init__(self, b1=(1.0, 0.0), b2=(0.0, 1.0)):
        super().__init__()
        self.b1 = np.asarray(b1, dtype=float)
        self.b2 = np.asarray(b2, dtype=float)
        det = self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]
        if not np.all(np.isfinite([det])) or abs(det) < 1e-12:
            raise DegenerateBasis("lattice basis vectors are linearly dependent")
        if det < 0:
            verts = [(0, 0), self.b2, self.b1 + self.b2, self.b1]
        else:
            verts = [(0, 0), self.b1, self.b1 + self.b2, self.b2]
        self.proto = Prototile("cell", np.asarray(verts, dtype=float))

    def _build(self, radius):
        reach = radius + self.proto.diameter
        inv = np.linalg.inv(np.column_stack([self.b1, self.b2]))
        bound = int(math.ceil(np.linalg.norm(inv, 2) * reach)) + 1
        i, j = np.meshgrid(np.arange(-bound, bound + 1), np.arange(-bound, bound + 1), indexing="ij")
        i, j = i.ravel(), j.ravel()
        trans = i[:, None] * self.b1 + j[:, None] * self.b2
        ts = sort_tiles(TileSet([self.proto], np.zeros(len(i)), np.zeros(len(i)), trans))
        return TilingWindow.from_tileset(radius, ts.subset(ts.meeting_disk(radius)))


def square_lattice(basis=((1.0, 0.0), (0.0, 1.0))) -> LatticeProvider:
    return LatticeProvider(*basis)


def golden_linear_offsets(k: int) -> float:
    """frac(k·φ): consecutive rows differ by a constant, so this is a sheared lattice."""
    return (k * GOLDEN) % 1.0


def golden_quadratic_offsets(k: int) -> float:
    """frac(k²·φ): every pair of consecutive rows has its own relative offset."""
    return (k * k * GOLDEN) % 1.0


def seeded_offsets(seed: int) -> Callable[[int], float]:
    def offset(k: int) -> float:
        return float(np.random.default_rng([seed & 0xFFFFFFFF, k & 0xFFFFFFFF]).random())
    return offset


class ShearProvider(WindowProvider):
    """Unit squares in rows; row ``k`` is slid horizontally by ``offsets(k)``."""

    def __init__(self, offsets: Callable[[int], float] | Sequence[float]):
        super().__init__()
        if not callable(offsets):
            seq = list(offsets)
            n = len(seq)
            # a finite sequence is indexed symmetrically: rows 0, 1, ... , then -1, -2, ...
            offsets = (lambda k, seq=seq, n=n: seq[k % n])
        self.offsets = offsets
        self.proto = Prototile("square", np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float))

    def _build(self, radius):
        kmax = int(math.ceil(radius)) + 1
        rows = []
        m = np.arange(-kmax - 1, kmax + 2)
        for k in range(-kmax, kmax + 1):
            off = float(self.offsets(k))
            if not 0.0 <= off < 1.0:
                raise ValueError(f"row offset {off} for row {k} outside [0, 1)")
            rows.append(np.column_stack([m + off, np.full(len(m), float(k))]))
        trans = np.concatenate(rows)
        ts = sort_tiles(TileSet([self.proto], np.zeros(len(trans)), np.zeros(len(trans)), trans))
        return TilingWindow.from_tileset(radius, ts.subset(ts.meeting_disk(radius)))


def shear_squares(offsets) -> ShearProvider:
    return ShearProvider(offsets)
