"""Shifted-lattice covers of R^d and colourings of geometrically embedded graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .cover import ColoredPartition
from .metric import GraphFormatError, WeightedGraph


@dataclass(frozen=True)
class Embedding:
    points: np.ndarray  # shape (n, d)
    C: float = 1.0

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def close_pair(self) -> tuple[int, int, float] | None:
        """Some pair of points closer than 1, or None."""
        if len(self.points) < 2:
            return None
        tree = cKDTree(self.points)
        pairs = tree.query_pairs(1.0 - 1e-12, output_type="ndarray")
        if not len(pairs):
            return None
        i, j = sorted(map(int, pairs[0]))
        return i, j, float(np.linalg.norm(self.points[i] - self.points[j]))

    def long_edge(self, g: WeightedGraph) -> tuple[int, int, float] | None:
        for u, v, _ in g.edges:
            dist = float(np.linalg.norm(self.points[u] - self.points[v]))
            if dist > self.C + 1e-12:
                return u, v, dist
        return None

    def check(self, g: WeightedGraph) -> None:
        if self.points.ndim != 2 or len(self.points) != g.n:
            raise ValueError("embedding must give one point per vertex")
        if self.d < 1 or self.C < 1:
            raise ValueError("need d >= 1 and C >= 1")
        bad = self.close_pair()
        if bad:
            raise ValueError(f"vertices {bad[0]} and {bad[1]} are {bad[2]:.6g} < 1 apart")
        bad = self.long_edge(g)
        if bad:
            raise ValueError(f"edge ({bad[0]}, {bad[1]}) has length {bad[2]:.6g} > C={self.C}")


@dataclass(frozen=True)
class LatticeCover:
    """d+1 cubical lattices of side s(d+1), the j-th shifted by j*s along the all-ones direction."""

    d: int
    r: float
    s: float | None = None

    def __post_init__(self):
        if self.d < 1 or not self.r > 0:
            raise ValueError("need d >= 1 and r > 0")
        if self.s is None:
            object.__setattr__(self, "s", 2.0 * self.r)
        if not self.s > self.r:
            raise ValueError("shift s must exceed r")

    @property
    def side(self) -> float:
        return self.s * (self.d + 1)

    @property
    def margin(self) -> float:
        return self.s / 2

    def cell(self, point: Sequence[float], j: int) -> tuple[int, ...]:
        return tuple(int(math.floor((x - j * self.s) / self.side)) for x in point)

    def depth(self, point: Sequence[float], j: int) -> float:
        """Distance from the point to the nearest face of its class-j cell."""
        out = math.inf
        for x in point:
            frac = (x - j * self.s) % self.side
            out = min(out, frac, self.side - frac)
        return out


def lattice_assign(point: Sequence[float], cover: LatticeCover) -> int:
    """Least class whose cell holds the point at depth >= s/2."""
    if len(point) != cover.d:
        raise ValueError("point dimension does not match the cover")
    for j in range(cover.d + 1):
        if cover.depth(point, j) >= cover.margin:
            return j
    raise AssertionError("no deep class; the pigeonhole argument failed")


def lattice_assign_many(points: np.ndarray, cover: LatticeCover) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    out = np.full(len(pts), -1, dtype=np.int64)
    for j in range(cover.d + 1):
        frac = np.mod(pts - j * cover.s, cover.side)
        deep = np.minimum(frac, cover.side - frac).min(axis=1) >= cover.margin
        out[(out < 0) & deep] = j
    if (out < 0).any():
        raise AssertionError("no deep class; the pigeonhole argument failed")
    return out


def packing_bound(d: int, side: float) -> int:
    """Most points at pairwise distance >= 1 that fit in a cube of the given side."""
    ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * 0.5 ** d
    return int(math.floor((side + 1) ** d / ball + 1e-9))


def embed_color(g: WeightedGraph, emb: Embedding, ell: int) -> ColoredPartition:
    """Colour each vertex by its deep lattice class at scale ell * C (d+1 colours)."""
    emb.check(g)
    if ell < 1:
        raise ValueError("ell must be at least 1")
    cover = LatticeCover(emb.d, ell * emb.C)
    classes = lattice_assign_many(emb.points, cover) if g.n else np.zeros(0, dtype=np.int64)
    deep_side = cover.side - 2 * cover.margin
    bound = max(packing_bound(emb.d, deep_side) - 1, 1)
    return ColoredPartition(tuple(int(c) + 1 for c in classes), ell, float(bound), emb.d + 1)


def grid_embedding(dims: Sequence[int], C: float = 2.0) -> Embedding:
    pts = np.array(list(np.ndindex(*dims)), dtype=float).reshape(-1, len(dims))
    return Embedding(pts, C)


def parse_embedding(text: str, n: int | None = None, C: float = 1.0) -> Embedding:
    """Lines 'v <vertex> <x1> ... <xd>' with 1-indexed vertices."""
    rows: dict[int, list[float]] = {}
    d = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] != "v" or len(parts) < 3:
            raise GraphFormatError(f"expected 'v <vertex> <x1> ... <xd>', got {raw.strip()!r}", lineno)
        try:
            v = int(parts[1]) - 1
            xs = [float(x) for x in parts[2:]]
        except ValueError:
            raise GraphFormatError(f"bad number in {raw.strip()!r}", lineno) from None
        if d is None:
            d = len(xs)
        elif len(xs) != d:
            raise GraphFormatError(f"point has {len(xs)} coordinates, expected {d}", lineno)
        if v < 0 or (n is not None and v >= n) or v in rows:
            raise GraphFormatError(f"vertex {v + 1} out of range or repeated", lineno)
        rows[v] = xs
    count = n if n is not None else len(rows)
    missing = [v for v in range(count) if v not in rows]
    if missing:
        raise GraphFormatError(f"vertex {missing[0] + 1} has no point")
    return Embedding(np.array([rows[v] for v in range(count)], dtype=float).reshape(count, d or 1), C)


def format_embedding(emb: Embedding) -> str:
    return "".join("v {} {}\n".format(i + 1, " ".join(repr(float(x)) for x in p))
                   for i, p in enumerate(emb.points))


def read_embedding(path: str | Path, n: int | None = None, C: float = 1.0) -> Embedding:
    return parse_embedding(Path(path).read_text(), n, C)


def write_embedding(emb: Embedding, path: str | Path) -> None:
    Path(path).write_text(format_embedding(emb))
