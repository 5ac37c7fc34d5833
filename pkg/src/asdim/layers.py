"""Slabs of 1-Lipschitz projections, the parity slab combiner and layered treewidth."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .cover import ColoredPartition, Cover, coloring_to_cover, cover_to_coloring, verify_cover
from .centered import centered_bound
from .decomposition import RootedTreeDecomposition
from .metric import GraphFormatError, WeightedGraph, connected_components, shortest_paths
from .treeglue import FStarParams, fstar, tw_pipeline


def bfs_layering(g: WeightedGraph, root: int = 0) -> dict[int, float]:
    """Distance from `root` in its component; other components use their least vertex."""
    if g.n and not 0 <= root < g.n:
        raise ValueError(f"root {root} is not a vertex")
    L: dict[int, float] = {}
    comps = sorted(connected_components(g), key=lambda c: (root not in c, min(c)))
    for comp in comps:
        src = root if root in comp else min(comp)
        for v, d in shortest_paths(g, [src]).items():
            L[v] = float(d)
    return L


@dataclass(frozen=True)
class Slab:
    index: int
    lo: float
    hi: float
    core: frozenset[int]
    expanded: frozenset[int]


def slabs(g: WeightedGraph, L: Mapping[int, float], S: float, offset: float = 0.0,
          r: float = 0.0) -> list[Slab]:
    """Half-open bands [a + kS, a + (k+1)S) with a = min L + offset, each with its r-collar."""
    if not S > 0:
        raise ValueError("slab width must be positive")
    if not L:
        return []
    anchor = min(L.values()) + offset
    order = sorted(range(g.n), key=lambda v: L[v])
    keys = [L[v] for v in order]
    cores: dict[int, list[int]] = {}
    for v in order:
        cores.setdefault(math.floor((L[v] - anchor) / S), []).append(v)
    out = []
    for k in sorted(cores):
        lo, hi = anchor + k * S, anchor + (k + 1) * S
        i = bisect.bisect_left(keys, lo - r)
        j = bisect.bisect_left(keys, hi + r)
        out.append(Slab(k, lo, hi, frozenset(cores[k]), frozenset(order[i:j])))
    return out


class SlabOracle(Protocol):
    def bound(self, r: float, width: float) -> float: ...

    def __call__(self, sub: WeightedGraph, ids: Sequence[int], r: float, width: float) -> Cover: ...


def expanded_bound(D, r, S):
    """Control of the core cover when the oracle runs on the r-collared slab."""
    return D(r, S + 2 * r)


def intrinsic_expand(g: WeightedGraph, L: Mapping[int, float], slab: Slab, oracle: SlabOracle,
                     r: float, S: float, check: bool = False) -> Cover:
    """Run the oracle on the collared slab and keep only the core vertices."""
    sub, order = g.induced(sorted(slab.expanded))
    cov = oracle(sub, order, r, S + 2 * r)
    if check:
        report = verify_cover(sub, cov)
        if not report.passed:
            raise RuntimeError(f"slab oracle output fails on slab {slab.index}: {report.failures[0]}")
    families = []
    for fam in cov.families:
        sets = []
        for x in fam:
            kept = frozenset(order[i] for i in x) & slab.core
            if kept:
                sets.append(kept)
        families.append(sets)
    return Cover.build(r, families, expanded_bound(oracle.bound, r, S), "intrinsic_expand")


def parity_combine(g: WeightedGraph, L: Mapping[int, float], r: float, S: float,
                   oracle: SlabOracle, offset: float = 0.0, check: bool = False) -> Cover:
    """Families indexed by (slab parity, oracle family); 2(n+1) families in total."""
    if S < r:
        raise ValueError("slab width must be at least r")
    pieces = [(slab, intrinsic_expand(g, L, slab, oracle, r, S, check))
              for slab in slabs(g, L, S, offset, r)]
    count = max((c.num_families for _, c in pieces), default=1)
    families: list[list[frozenset[int]]] = [[] for _ in range(2 * count)]
    for slab, cov in pieces:
        base = (slab.index % 2) * count
        for i, fam in enumerate(cov.families):
            families[base + i].extend(fam)
    return Cover.build(r, families, expanded_bound(oracle.bound, r, S), "parity_combine")


# -- layerings ------------------------------------------------------------------------


def layering_problem(g: WeightedGraph, layers: Mapping[int, int]) -> str | None:
    for v in range(g.n):
        if v not in layers:
            return f"vertex {v} has no layer"
    for u, v, _ in g.edges:
        if abs(layers[u] - layers[v]) > 1:
            return f"edge ({u}, {v}) joins layers {layers[u]} and {layers[v]}"
    return None


def layered_width(td: RootedTreeDecomposition, layers: Mapping[int, int]):
    """Largest bag-layer intersection as (size, bag, layer)."""
    best = (0, None, None)
    for t in sorted(td.bags):
        counts: dict[int, int] = {}
        for v in td.bags[t]:
            counts[layers[v]] = counts.get(layers[v], 0) + 1
        for layer, c in counts.items():
            if c > best[0]:
                best = (c, t, layer)
    return best


class TreewidthSlabOracle:
    """Two-colours a collared slab along the restricted decomposition, then reads off components.

    A slab spanning `width` consecutive integer layers meets every bag in at
    most w * width vertices."""

    def __init__(self, td: RootedTreeDecomposition, w: int, ell: int):
        self.td, self.w, self.ell = td, w, ell

    def theta(self, width: float) -> int:
        return max(self.w * int(math.ceil(width)) - 1, 0)

    def bound(self, r, width):
        theta = self.theta(width)
        params = FStarParams(self.ell, centered_bound(theta + 1, self.ell, 1), 2, theta)
        return self.ell * fstar(params, theta)

    def __call__(self, sub, ids, r, width):
        relabel = {v: i for i, v in enumerate(ids)}
        td = self.td.restricted(relabel, relabel)
        col = tw_pipeline(sub, td, self.ell, self.theta(width))
        return coloring_to_cover(sub, col, "tw_slab")


def layered_tw_pipeline(g: WeightedGraph, layers: Mapping[int, int], td: RootedTreeDecomposition,
                        ell: int, w: int | None = None, S: int | None = None,
                        check: bool = False) -> ColoredPartition:
    """Four-colouring of G^ell for graphs of bounded layered treewidth."""
    if not g.is_unit:
        raise ValueError("layered treewidth pipeline works on unweighted graphs")
    bad = layering_problem(g, layers)
    if bad:
        raise ValueError(f"not a layering: {bad}")
    problems = td.problems(g)
    if problems:
        raise ValueError(f"invalid tree-decomposition: {problems[0]}")
    size, bag, layer = layered_width(td, layers)
    if w is None:
        w = max(size, 1)
    elif size > w:
        raise ValueError(f"bag {bag} meets layer {layer} in {size} > {w} vertices")
    r = ell
    S = max(r, ell) if S is None else S
    L = {v: float(layers[v]) for v in range(g.n)}
    cover = parity_combine(g, L, r, S, TreewidthSlabOracle(td, w, ell), check=check)
    col = cover_to_coloring(g, cover)
    return ColoredPartition(col.colors, col.ell, col.bound, 2 * 2)


# -- layering files -----------------------------------------------------------------


def parse_layering(text: str, n: int | None = None) -> dict[int, int]:
    """Lines 'v <vertex> <layer>' with 1-indexed vertices; 'c' lines are comments."""
    out: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] != "v" or len(parts) != 3:
            raise GraphFormatError(f"expected 'v <vertex> <layer>', got {raw.strip()!r}", lineno)
        try:
            v, layer = int(parts[1]) - 1, int(parts[2])
        except ValueError:
            raise GraphFormatError(f"non-integer field in {raw.strip()!r}", lineno) from None
        if v < 0 or (n is not None and v >= n):
            raise GraphFormatError(f"vertex {v + 1} out of range", lineno)
        if v in out:
            raise GraphFormatError(f"vertex {v + 1} listed twice", lineno)
        out[v] = layer
    return out


def format_layering(layers: Mapping[int, int]) -> str:
    return "".join(f"v {v + 1} {layers[v]}\n" for v in sorted(layers))


def read_layering(path: str | Path, n: int | None = None) -> dict[int, int]:
    return parse_layering(Path(path).read_text(), n)


def write_layering(layers: Mapping[int, int], path: str | Path) -> None:
    Path(path).write_text(format_layering(layers))
