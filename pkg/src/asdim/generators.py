"""Seeded instance generators: grids, stretches, cacti, partial k-trees, triangulations."""

from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.spatial import Delaunay

from .decomposition import RootedTreeDecomposition
from .metric import WeightedGraph, shortest_paths, subdivide, unweighted


def _grid_index(dims):
    strides = []
    s = 1
    for d in reversed(dims):
        strides.append(s)
        s *= d
    return list(reversed(strides)), s


def gen_grid(dims: Sequence[int], diagonals: bool = False) -> WeightedGraph:
    """Row-major d-dimensional grid; `diagonals` adds all king moves."""
    dims = list(dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError("grid dimensions must be positive")
    strides, n = _grid_index(dims)
    if diagonals:
        offsets = [o for o in itertools.product((-1, 0, 1), repeat=len(dims)) if any(o)]
    else:
        offsets = [tuple(1 if i == j else 0 for i in range(len(dims))) for j in range(len(dims))]
    pairs = set()
    for coord in itertools.product(*(range(d) for d in dims)):
        v = sum(c * s for c, s in zip(coord, strides))
        for off in offsets:
            other = [c + o for c, o in zip(coord, off)]
            if all(0 <= c < d for c, d in zip(other, dims)):
                u = sum(c * s for c, s in zip(other, strides))
                pairs.add((min(u, v), max(u, v)))
    return unweighted(n, sorted(pairs))


def gen_torus_grid(a: int, b: int) -> WeightedGraph:
    """a x b grid with wrap-around in both directions (embeds in the torus)."""
    if a < 3 or b < 3:
        raise ValueError("torus grid needs both sides >= 3")
    pairs = set()
    for i in range(a):
        for j in range(b):
            v = i * b + j
            for u in (((i + 1) % a) * b + j, i * b + (j + 1) % b):
                pairs.add((min(u, v), max(u, v)))
    return unweighted(a * b, sorted(pairs))


def grid_coordinates(dims: Sequence[int]) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(d) for d in dims)))


def grid_row_layering(rows: int, cols: int) -> dict[int, int]:
    return {i * cols + j: i for i in range(rows) for j in range(cols)}


def grid_column_td(rows: int, cols: int) -> RootedTreeDecomposition:
    """Path of bags, bag j holding columns j and j+1; each row meets a bag in at most 2 vertices."""
    if cols == 1:
        return RootedTreeDecomposition({0: frozenset(range(rows))}, {0: None}, 0)
    bags = {j: {i * cols + j for i in range(rows)} | {i * cols + j + 1 for i in range(rows)}
            for j in range(cols - 1)}
    return RootedTreeDecomposition.from_edges(bags, [(j, j + 1) for j in range(cols - 2)], 0)


# -- stretches -----------------------------------------------------------------


def _cubic_tree(leaves: int, centre_on_edge: bool):
    """Tree with internal degree 3, grown by splitting the shallowest leaf."""
    if centre_on_edge:
        adj = {0: [1], 1: [0]}
        queue = [0, 1]
    else:
        adj = {0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}
        queue = [1, 2, 3]
    count = len(queue)
    nxt = len(adj)
    head = 0
    while count < leaves:
        leaf = queue[head]
        head += 1
        for _ in range(2):
            adj[leaf].append(nxt)
            adj[nxt] = [leaf]
            queue.append(nxt)
            nxt += 1
        count += 1
    leaf_list = [v for v in queue[head:]]
    return adj, leaf_list


def _stretch_tree(leaves: int, p: int):
    """Smallest-radius p-subdivided cubic tree with `leaves` leaves.

    Returns (edges with subdivision, centre, ordered leaves, vertex count)."""
    if leaves <= 1:
        return [], 0, [0] * leaves, 1
    shapes = [_cubic_tree(leaves, True)] if leaves == 2 else [_cubic_tree(leaves, False),
                                                             _cubic_tree(leaves, True)]
    best = None
    for adj, leaf_list in shapes:
        # subdivide every edge p times
        edges = []
        nxt = len(adj)
        for u in sorted(adj):
            for v in adj[u]:
                if u < v:
                    prev = u
                    for _ in range(p):
                        edges.append((prev, nxt))
                        prev = nxt
                        nxt += 1
                    edges.append((prev, v))
        g = unweighted(nxt, edges)
        ecc = []
        for v in range(nxt):
            dist = shortest_paths(g, [v])
            ecc.append((max(dist.values()), v))
        radius, centre = min(ecc)
        if best is None or radius < best[0]:
            best = (radius, edges, centre, leaf_list, nxt)
    _, edges, centre, leaf_list, count = best
    return edges, centre, leaf_list, count


@dataclass(frozen=True)
class Stretch:
    graph: WeightedGraph
    origin: tuple[int, ...]  # projection of each stretch vertex to G, -1 on connecting paths
    centre: tuple[int, ...]  # centre vertex of T_v for each original v


def gen_stretch(g: WeightedGraph, k: int, p: int) -> Stretch:
    if k < 1 or p < 1:
        raise ValueError("k and p must be at least 1")
    edges, origin, centres = [], [], []
    leaf_of: dict[tuple[int, int], int] = {}
    offset = 0
    for v in range(g.n):
        nbrs = [u for u, _ in g.neighbors(v)]
        t_edges, centre, leaves, count = _stretch_tree(len(nbrs), p)
        edges.extend((a + offset, b + offset) for a, b in t_edges)
        for u, leaf in zip(nbrs, leaves):
            leaf_of[(v, u)] = leaf + offset
        centres.append(centre + offset)
        origin.extend([v] * count)
        offset += count
    for u, v, _ in g.edges:
        prev = leaf_of[(u, v)]
        for _ in range(k):
            edges.append((prev, offset))
            origin.append(-1)
            prev = offset
            offset += 1
        edges.append((prev, leaf_of[(v, u)]))
    return Stretch(unweighted(offset, edges), tuple(origin), tuple(centres))


# -- random families -------------------------------------------------------------


def gen_cactus(n: int, seed: int = 0, max_cycle: int = 8) -> WeightedGraph:
    """Connected cactus: pendant edges and cycles hung at random existing vertices."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    edges = []
    size = 1
    while size < n:
        anchor = rng.randrange(size)
        room = n - size
        if room >= 2 and rng.random() < 0.6:
            length = rng.randint(3, min(max_cycle, room + 1))
            ring = [anchor] + list(range(size, size + length - 1))
            edges.extend((ring[i], ring[(i + 1) % length]) for i in range(length))
            size += length - 1
        else:
            edges.append((anchor, size))
            size += 1
    return unweighted(n, edges)


def gen_partial_ktree(n: int, k: int, seed: int = 0, keep: float = 0.7
                      ) -> tuple[WeightedGraph, RootedTreeDecomposition]:
    """Random k-tree thinned by edge deletion, with the k-tree's own decomposition (width <= k)."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    rng = random.Random(seed)
    first = min(n, k + 1)
    edges = set(itertools.combinations(range(first), 2))
    bags = {0: tuple(range(first))}
    tree_edges = []
    for v in range(first, n):
        parent = rng.randrange(len(bags))
        base = bags[parent]
        drop = rng.randrange(len(base))
        clique = tuple(x for i, x in enumerate(base) if i != drop)
        for x in clique:
            edges.add((x, v))
        node = len(bags)
        bags[node] = clique + (v,)
        tree_edges.append((parent, node))
    kept = [e for e in sorted(edges) if rng.random() < keep]
    g = unweighted(n, kept)
    td = RootedTreeDecomposition.from_edges({t: set(b) for t, b in bags.items()}, tree_edges, 0)
    return g, td


def gen_planar_triangulation(n: int, seed: int = 0) -> tuple[WeightedGraph, np.ndarray]:
    """Delaunay triangulation of n uniform random points in the unit square."""
    if n < 3:
        return unweighted(n, [(i, i + 1) for i in range(n - 1)]), np.zeros((n, 2))
    pts = np.random.default_rng(seed).random((n, 2))
    tri = Delaunay(pts)
    pairs = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            pairs.add((int(min(u, v)), int(max(u, v))))
    return unweighted(n, sorted(pairs)), pts


def gen_one_planar_stress(g: WeightedGraph) -> WeightedGraph:
    """Subdivide every edge |E| times."""
    return subdivide(g, max(g.num_edges, 1))


def gen_cycle(n: int) -> WeightedGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return unweighted(n, [(i, (i + 1) % n) for i in range(n)])


def gen_random_tree(n: int, seed: int = 0) -> WeightedGraph:
    rng = random.Random(seed)
    return unweighted(n, [(rng.randrange(i), i) for i in range(1, n)])


# -- growth ------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    passed: bool
    worst: tuple[int, int, int, float] | None  # (centre, radius, ball size, profile value)


def growth_check(g: WeightedGraph, profile: Callable[[int], float], radii: Iterable[int],
                 centres: Iterable[int] | None = None) -> GrowthReport:
    """Exact ball counts at the given radii around the given centres (all vertices by default)."""
    radii = sorted(set(radii))
    if not radii:
        return GrowthReport(True, None)
    top = radii[-1]
    for c in (range(g.n) if centres is None else centres):
        dist = sorted(shortest_paths(g, [c], top).values())
        for r in radii:
            size = _count_le(dist, r)
            if size > profile(r):
                return GrowthReport(False, (c, r, size, float(profile(r))))
    return GrowthReport(True, None)


def _count_le(sorted_values, x):
    return bisect.bisect_right(sorted_values, x + 1e-9)


def stretch_profile(d: int, k: int, p: int) -> Callable[[int], float]:
    """Three-regime growth profile for stretched d-dimensional grids."""

    def f(r):
        if r <= p / 2:
            return 3 * r + 1
        if r <= k:
            return 4 * d * r + 1
        return 8 * d * k * (1 + 2 * math.ceil(r / k)) ** d

    return f
