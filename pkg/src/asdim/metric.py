"""Weighted graphs, exact shortest-path distances and distance-based components."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence


class _Infinity:
    """Distance between vertices in different connected components."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("asdim.INF")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __float__(self) -> float:
        return math.inf


INF = _Infinity()


def is_finite(value) -> bool:
    return value is not INF


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class WeightedGraph:
    """Simple undirected graph on vertices 0..n-1 with positive edge weights.

    Treat instances as immutable; derived structures are cached lazily.
    """

    __slots__ = ("_n", "_edges", "_adj", "_labels", "_unit", "_csr")

    def __init__(self, n: int, edges: Iterable[tuple] = (), labels: Sequence[str] | None = None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj: list[dict[int, float]] = [dict() for _ in range(n)]
        clean = []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (w > 0 and math.isfinite(w)):
                raise ValueError(f"edge ({u}, {v}) has non-positive or non-finite weight {w}")
            if v in adj[u]:
                raise ValueError(f"parallel edge ({u}, {v})")
            adj[u][v] = w
            adj[v][u] = w
            clean.append((u, v, w))
        if labels is not None and len(labels) != n:
            raise ValueError("labels must have one entry per vertex")
        self._n = n
        self._edges = tuple(clean)
        self._adj = tuple(tuple(sorted(a.items())) for a in adj)
        self._labels = tuple(labels) if labels is not None else None
        self._unit = all(w == 1.0 for _, _, w in clean)
        self._csr = None

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> tuple[tuple[int, int, float], ...]:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def labels(self):
        return self._labels

    @property
    def is_unit(self) -> bool:
        """True when every edge has weight 1 (an unweighted graph)."""
        return self._unit

    @property
    def max_weight(self) -> float:
        return max((w for _, _, w in self._edges), default=0.0)

    def neighbors(self, v: int) -> tuple[tuple[int, float], ...]:
        return self._adj[v]

    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        return self._adj

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return any(x == v for x, _ in self._adj[u])

    def weight(self, u: int, v: int) -> float:
        for x, w in self._adj[u]:
            if x == v:
                return w
        raise KeyError((u, v))

    def vertices(self) -> range:
        return range(self._n)

    def csr(self):
        """Symmetric scipy CSR matrix of edge weights (cached)."""
        if self._csr is None:
            import numpy as np
            from scipy.sparse import csr_matrix

            m = len(self._edges)
            rows = np.empty(2 * m, dtype=np.int64)
            cols = np.empty(2 * m, dtype=np.int64)
            data = np.empty(2 * m, dtype=float)
            for i, (u, v, w) in enumerate(self._edges):
                rows[2 * i], cols[2 * i], data[2 * i] = u, v, w
                rows[2 * i + 1], cols[2 * i + 1], data[2 * i + 1] = v, u, w
            self._csr = csr_matrix((data, (rows, cols)), shape=(self._n, self._n))
        return self._csr

    def induced(self, vertices: Iterable[int]) -> tuple["WeightedGraph", list[int]]:
        """Induced subgraph on `vertices`, relabelled densely in increasing order.

        Returns the subgraph and the list mapping new index -> original vertex.
        """
        order = sorted(set(vertices))
        index = {v: i for i, v in enumerate(order)}
        edges = []
        for v in order:
            i = index[v]
            for u, w in self._adj[v]:
                j = index.get(u)
                if j is not None and i < j:
                    edges.append((i, j, w))
        return WeightedGraph(len(order), edges), order

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self._n}, m={len(self._edges)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))


def unweighted(n: int, pairs: Iterable[tuple[int, int]]) -> WeightedGraph:
    return WeightedGraph(n, ((u, v, 1.0) for u, v in pairs))


# ---------------------------------------------------------------- shortest paths


def shortest_paths(
    g: WeightedGraph,
    sources: Iterable[int],
    radius: float = math.inf,
    allowed: Callable[[int], bool] | None = None,
    predecessors: bool = False,
):
    """Multi-source Dijkstra bounded by `radius`, optionally restricted to `allowed` vertices.

    Returns a dict of reached vertices (distance <= radius). With `predecessors`,
    also returns a parent map; ties are broken towards the smaller parent index.
    """
    dist: dict[int, float] = {}
    parent: dict[int, int] = {}
    adj = g.adjacency()
    if g.is_unit:
        frontier = sorted(set(sources))
        for s in frontier:
            dist[s] = 0.0
        hop = 0
        while frontier and hop + 1 <= radius:
            hop += 1
            nxt = []
            for x in frontier:
                for y, _ in adj[x]:
                    if y in dist or (allowed is not None and not allowed(y)):
                        continue
                    dist[y] = float(hop)
                    parent[y] = x
                    nxt.append(y)
            frontier = sorted(nxt) if predecessors else nxt
        return (dist, parent) if predecessors else dist

    heap = []
    best: dict[int, float] = {}
    for s in set(sources):
        best[s] = 0.0
        heap.append((0.0, s, -1))
    heapq.heapify(heap)
    while heap:
        d, x, p = heapq.heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        if p >= 0:
            parent[x] = p
        for y, w in adj[x]:
            nd = d + w
            if nd > radius or y in dist:
                continue
            if allowed is not None and not allowed(y):
                continue
            if nd <= best.get(y, math.inf):
                best[y] = nd
                heapq.heappush(heap, (nd, y, x))
    return (dist, parent) if predecessors else dist


def distances(g: WeightedGraph, sources: Iterable[int]) -> dict[int, object]:
    """Exact distance from the source set to every vertex; INF when unreachable."""
    srcs = set(sources)
    for s in srcs:
        if not 0 <= s < g.n:
            raise ValueError(f"source {s} is not a vertex")
    reached = shortest_paths(g, srcs)
    return {v: reached.get(v, INF) for v in range(g.n)}


def distance(g: WeightedGraph, u: int, v: int):
    return distances(g, [u])[v]


def neighborhood(g: WeightedGraph, s: Iterable[int], radius: float) -> frozenset[int]:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return frozenset(shortest_paths(g, s, radius))


def shortest_path(g: WeightedGraph, sources: Iterable[int], target: int,
                  allowed: Callable[[int], bool] | None = None) -> list[int]:
    """Vertex sequence of a shortest path from the source set to `target` (source first)."""
    dist, parent = shortest_paths(g, sources, allowed=allowed, predecessors=True)
    if target not in dist:
        raise ValueError(f"vertex {target} is unreachable")
    path = [target]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def connected_components(g: WeightedGraph, subset: Iterable[int] | None = None) -> list[frozenset[int]]:
    """Components of the subgraph induced by `subset` (whole graph by default)."""
    verts = range(g.n) if subset is None else sorted(set(subset))
    member = None if subset is None else set(verts)
    seen: set[int] = set()
    out = []
    adj = g.adjacency()
    for s in verts:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if y not in seen and (member is None or y in member):
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(frozenset(comp))
    return out


# ---------------------------------------------------------------- components


@dataclass(frozen=True)
class ComponentPartition:
    parts: tuple[frozenset[int], ...]
    r: float
    s: float | None = None

    def __len__(self) -> int:
        return len(self.parts)

    def as_set(self) -> set[frozenset[int]]:
        return set(self.parts)

    def part_of(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.parts) for v in part}


class _UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb

    def groups(self) -> list[frozenset[int]]:
        out: dict[int, list[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return sorted((frozenset(v) for v in out.values()), key=min)


def _step_components(g, subset, r, accept) -> tuple[frozenset[int], ...]:
    members = set(subset)
    uf = _UnionFind(members)
    for x in sorted(members):
        for y in shortest_paths(g, [x], r):
            if y in members and y != x and accept(x, y):
                uf.union(x, y)
    return tuple(uf.groups())


def r_components(g: WeightedGraph, subset: Iterable[int], r: float) -> ComponentPartition:
    """Maximal r-connected classes of `subset`, distances taken in the whole graph."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return ComponentPartition(_step_components(g, subset, r, lambda x, y: True), r)


def rs_components(g: WeightedGraph, subset: Iterable[int], r: float, s: float,
                  f: Mapping[int, float]) -> ComponentPartition:
    """Classes under steps with distance <= r and projection difference <= s."""
    if r < 0 or s < 0:
        raise ValueError("r and s must be nonnegative")
    parts = _step_components(g, subset, r, lambda x, y: abs(f[x] - f[y]) <= s)
    return ComponentPartition(parts, r, s)


# ---------------------------------------------------------------- power graphs


def power_hops(g: WeightedGraph, sources: Iterable[int], ell: int,
               max_hops: float = math.inf) -> dict[int, int]:
    """Hop distances in G^ell from the source set, never materializing G^ell."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if g.is_unit:
        d = shortest_paths(g, sources, max_hops * ell)
        return {v: math.ceil(x / ell) for v, x in d.items()}
    hops = {v: 0 for v in set(sources)}
    frontier = list(hops)
    k = 0
    while frontier and k < max_hops:
        k += 1
        reached = shortest_paths(g, frontier, ell)
        frontier = [v for v in reached if v not in hops]
        for v in frontier:
            hops[v] = k
    return hops


def weak_diameter(g: WeightedGraph, subset: Iterable[int], ell: int = 1):
    """Largest G^ell hop distance between two members of `subset` (INF if some pair is disconnected)."""
    members = sorted(set(subset))
    best = 0
    target = set(members)
    for x in members:
        hops = power_hops(g, [x], ell)
        for y in target:
            h = hops.get(y)
            if h is None:
                return INF
            if h > best:
                best = h
    return best


def power_components(g: WeightedGraph, subset: Iterable[int], ell: int) -> ComponentPartition:
    """Components of G^ell induced on `subset`."""
    return r_components(g, subset, ell)


# ---------------------------------------------------------------- transforms


def subdivide(g: WeightedGraph, k: int) -> WeightedGraph:
    """Replace every edge by a path with k+1 edges; original vertices keep their index.

    Each piece inherits the original edge weight, so distances between original
    vertices scale by exactly k+1 (all pieces have weight 1 on unweighted input).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return g
    edges = []
    nxt = g.n
    for u, v, w in g.edges:
        chain = [u] + list(range(nxt, nxt + k)) + [v]
        nxt += k
        edges.extend((a, b, w) for a, b in zip(chain, chain[1:]))
    return WeightedGraph(nxt, edges)


def is_lipschitz(g: WeightedGraph, f: Mapping[int, float]) -> tuple[int, int] | None:
    """First edge violating |f(u)-f(v)| <= w(uv), or None."""
    for u, v, w in g.edges:
        if abs(f[u] - f[v]) > w + 1e-12:
            return (u, v)
    return None


# ---------------------------------------------------------------- file format


def parse_graph(text: str) -> WeightedGraph:
    """Parse the DIMACS-like edge list: 'p <n> <m>' then 'e u v [w]' lines, 1-indexed."""
    n = m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if n is not None:
                raise GraphFormatError("duplicate header", lineno)
            nums = [t for t in tok[1:] if not t.isalpha()]
            if len(nums) != 2:
                raise GraphFormatError("header must be 'p <n> <m>'", lineno)
            try:
                n, m = int(nums[0]), int(nums[1])
            except ValueError:
                raise GraphFormatError("header counts must be integers", lineno) from None
        elif tok[0] == "e":
            if n is None:
                raise GraphFormatError("edge before header", lineno)
            if len(tok) not in (3, 4):
                raise GraphFormatError("edge line must be 'e u v [w]'", lineno)
            try:
                u, v = int(tok[1]), int(tok[2])
                w = float(tok[3]) if len(tok) == 4 else 1.0
            except ValueError:
                raise GraphFormatError("malformed edge values", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"vertex out of range 1..{n}", lineno)
            if u == v:
                raise GraphFormatError("loop edge", lineno)
            if not (w > 0 and math.isfinite(w)):
                raise GraphFormatError("weight must be positive", lineno)
            edges.append((u - 1, v - 1, w, lineno))
        else:
            raise GraphFormatError(f"unknown line type {tok[0]!r}", lineno)
    if n is None:
        raise GraphFormatError("missing 'p' header")
    if m != len(edges):
        raise GraphFormatError(f"header declares {m} edges but {len(edges)} were given")
    seen = set()
    for u, v, _, lineno in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError("parallel edge", lineno)
        seen.add(key)
    return WeightedGraph(n, [(u, v, w) for u, v, w, _ in edges])


def format_graph(g: WeightedGraph) -> str:
    lines = [f"p {g.n} {g.num_edges}"]
    for u, v, w in g.edges:
        if w == 1.0:
            lines.append(f"e {u + 1} {v + 1}")
        else:
            lines.append(f"e {u + 1} {v + 1} {w!r}")
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> WeightedGraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: WeightedGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))
