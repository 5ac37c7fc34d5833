"""Extending precolourings along tree-decompositions.

The recursion works on *instances*: a vertex set V of a unit-weight graph
(given by an adjacency map that may mention vertices outside V), a rooted tree
stored in shared `children`/`bags` maps, a precoloured set Z and its colours.
Subtrees are never copied; a child instance adds one fresh root node above an
existing subtree. Gadget vertices get negative ids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Protocol, Sequence

from .centered import centered_bound, small_vertex_cover, vc_color
from .cover import ColoredPartition, verify_coloring
from .decomposition import Construction, RootedTreeDecomposition, compress, normalize
from .metric import WeightedGraph


@dataclass(frozen=True)
class FStarParams:
    ell: int
    N: float
    m: int
    theta: int

    def __post_init__(self):
        if self.ell < 1 or self.N <= 0 or self.m < 2 or self.theta < 0:
            raise ValueError("need ell >= 1, N > 0, m >= 2 and theta >= 0")

    def f1(self, x: float) -> float:
        return centered_bound(self.theta, 3 * self.ell, x)

    @property
    def n_plus(self) -> float:
        """Bound for bag graphs with one extra vertex (a single apex over the bag class)."""
        return centered_bound(1, 0, self.N)

    @property
    def n_theta(self) -> float:
        return max(centered_bound(self.theta, 0, 1), self.theta + 1)

    @property
    def n_theta_prime(self) -> float:
        return centered_bound(self.theta, 3 * self.ell, 1)


def fstar(params: FStarParams, eta: int) -> float:
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    base = params.n_plus + params.n_theta_prime + params.n_theta + params.f1(params.N)
    value = base
    th, ell = params.theta, params.ell
    for _ in range(eta):
        value = max((14 * th + 4) * ell + 7 * th * ell * ell * params.f1(value), base)
    return value


class BagOracle(Protocol):
    def bound(self, ell: int) -> float: ...

    def __call__(self, piece: WeightedGraph, ids: Sequence[int], ell: int) -> ColoredPartition: ...


class VertexCoverOracle:
    """Colours graphs having a vertex cover of size at most k with a single colour."""

    def __init__(self, k: int):
        self.k = k

    def bound(self, ell: int) -> float:
        return centered_bound(self.k, ell, 1)

    def __call__(self, piece, ids, ell):
        cover = small_vertex_cover(piece, self.k)
        if cover is None:
            raise OracleError(f"piece on vertices {sorted(ids)[:8]} has no vertex cover of size {self.k}")
        return vc_color(piece, cover, self.k, ell)


class OracleError(RuntimeError):
    pass


def _bfs(adj, allowed, sources, radius):
    dist = {s: 0 for s in sources}
    frontier = sorted(dist)
    d = 0
    while frontier and d < radius:
        d += 1
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist and y in allowed:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return dist


def _labelled_bfs(adj, allowed, groups, radius):
    dist, label = {}, {}
    frontier = []
    for i, grp in enumerate(groups):
        for s in sorted(grp):
            if s not in dist:
                dist[s], label[s] = 0, i
                frontier.append(s)
    d = 0
    while frontier and d < radius:
        d += 1
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist and y in allowed:
                    dist[y], label[y] = d, label[x]
                    nxt.append(y)
        frontier = nxt
    return dist, label


def _components(adj, verts):
    seen, out = set(), []
    for s in sorted(verts):
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [s], [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in verts and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(set(comp))
    return out


def _subtree(children, bags, top):
    """Nodes, vertex union and internal-node count of the subtree below `top`."""
    nodes, verts, internal = [], set(), 0
    stack = [top]
    while stack:
        t = stack.pop()
        nodes.append(t)
        verts |= bags[t]
        kids = children.get(t, ())
        if kids:
            internal += 1
            stack.extend(kids)
    return nodes, verts, internal


class _Gluer:
    def __init__(self, ell: int, m: int, theta: int, oracle: BagOracle, check_oracle: bool,
                 first_node: int):
        self.ell, self.m, self.theta = ell, m, theta
        self.oracle = oracle
        self.N = oracle.bound(ell)
        self.check_oracle = check_oracle
        self.nodes = itertools.count(first_node)
        self.gadgets = itertools.count(-1, -1)
        self.oracle_calls = 0
        self.instances = 0

    # -- entry ------------------------------------------------------------

    def solve(self, adj, verts, children, bags, root, Z, cZ, eta):
        result: dict[int, int] = {}
        stack = [(verts, root, set(Z), dict(cZ))]
        while stack:
            V, root, Z, cZ = stack.pop()
            self.instances += 1
            if not V:
                continue
            if eta == 0:
                self._base(adj, V, children, bags, root, Z, cZ, result)
                continue
            if len(Z) == len(V):
                result.update(cZ)
                continue
            comps = _components(adj, V)
            if len(comps) > 1:
                stack.extend(self._split(comps, children, bags, root, Z, cZ))
                continue
            stack.extend(self._step(adj, V, children, bags, root, Z, cZ, eta, result))
        return result

    # -- eta = 0 ------------------------------------------------------------

    def _base(self, adj, V, children, bags, root, Z, cZ, result):
        result.update(cZ)
        tops = [root]
        members: dict[int, list[int]] = {root: [root]}
        stack = [root]
        while stack:
            t = stack.pop()
            for c in children.get(t, ()):
                if bags[t] & bags[c]:
                    if children.get(c):
                        raise ValueError(f"node {c} shares vertices with its parent but has children")
                    if len(bags[c] - bags[t]) > 1:
                        raise ValueError(f"leaf {c} adds more than one vertex to its parent")
                    members[t].append(c)
                else:
                    tops.append(c)
                    members[c] = [c]
                    stack.append(c)
        for top in tops:
            union = set()
            for t in members[top]:
                union |= bags[t]
            piece = union - Z
            if piece:
                self._colour_piece(adj, piece, top, bags[top], result)

    def _colour_piece(self, adj, piece, top, top_bag, result):
        order = sorted(piece)
        index = {v: i for i, v in enumerate(order)}
        edges = []
        for v in order:
            i = index[v]
            for u in adj[v]:
                j = index.get(u)
                if j is not None and i < j:
                    edges.append((i, j, 1.0))
        g = WeightedGraph(len(order), edges)
        self.oracle_calls += 1
        col = self.oracle(g, order, self.ell)
        if any(not 1 <= c <= self.m for c in col.colors):
            raise OracleError(f"oracle used a colour outside 1..{self.m} on bag {top}")
        if self.check_oracle:
            if col.bound > self.N * (1 + 1e-12):
                raise OracleError(f"oracle bound {col.bound} on bag {top} exceeds declared {self.N}")
            report = verify_coloring(g, col)
            if not report.passed:
                raise OracleError(f"oracle colouring of bag {top} {sorted(top_bag)} fails: "
                                  f"{report.failures[0]}")
        for i, v in enumerate(order):
            result[v] = col.colors[i]

    # -- connected components -------------------------------------------------

    def _split(self, comps, children, bags, root, Z, cZ):
        comp_of = {v: i for i, comp in enumerate(comps) for v in comp}
        nodes: list[list[int]] = [[] for _ in comps]
        order, stack = [], [root]
        while stack:
            t = stack.pop()
            order.append(t)
            stack.extend(children.get(t, ()))
        for t in order:
            for i in {comp_of[v] for v in bags[t]}:
                nodes[i].append(t)
        out = []
        for i, comp in enumerate(comps):
            keep = set(nodes[i])
            new = {t: next(self.nodes) for t in nodes[i]}
            for t in nodes[i]:
                bags[new[t]] = frozenset(v for v in bags[t] if comp_of[v] == i)
                children[new[t]] = [new[c] for c in children.get(t, ()) if c in keep]
            top = nodes[i][0]
            if top == root:
                new_root = new[root]
            else:
                new_root = next(self.nodes)
                bags[new_root] = frozenset([min(bags[new[top]])])
                children[new_root] = [new[top]]
            zc = Z & comp
            out.append((comp, new_root, zc, {v: cZ[v] for v in zc}))
        return out

    # -- one level of the recursion --------------------------------------------

    def _step(self, adj, V, children, bags, root, Z, cZ, eta, result):
        ell, m = self.ell, self.m
        root_bag = bags[root]
        if not root_bag:
            raise ValueError("root bag is empty although eta > 0")
        ball = _bfs(adj, V, root_bag, 3 * ell)
        stray = [z for z in Z if z not in ball]
        if stray:
            raise ValueError(f"precoloured vertex {min(stray)} is farther than {3 * ell} from the root bag")
        cZ = dict(cZ)
        for v in ball:
            if v not in cZ:
                cZ[v] = m
        Z = set(ball)
        if len(Z) == len(V):
            result.update(cZ)
            return []

        # T0 and the boundary edges leaving it
        t0_nodes, boundary, internal = [], [], 0
        stack = [root]
        while stack:
            t = stack.pop()
            t0_nodes.append(t)
            kids = children.get(t, ())
            if kids:
                internal += 1
            for c in kids:
                if Z.isdisjoint(bags[c]):
                    boundary.append((t, c))
                else:
                    stack.append(c)
        v0_set = set()
        for t in t0_nodes:
            v0_set |= bags[t]
        tree_nodes = len(t0_nodes)

        edges = []
        for t, c in boundary:
            xe = bags[t] & bags[c]
            e_nodes, ve, e_internal = _subtree(children, bags, c)
            tree_nodes += len(e_nodes)
            internal += e_internal
            if not xe:
                if ve:
                    raise AssertionError("empty adhesion below a connected instance")
                continue
            parts = self._parts(adj, ve, xe)
            edges.append((t, c, xe, ve, e_nodes, e_internal, parts))
        measure = (eta, internal + len(V) - len(Z) + len(V), tree_nodes)

        # gadget graph H and its construction at eta - 1
        adj_h = {v: [u for u in adj[v] if u in v0_set] for v in v0_set}
        gadget = {}
        for ei, (_, _, _, _, _, _, parts) in enumerate(edges):
            for pi, part in enumerate(parts):
                gid = next(self.gadgets)
                adj_h[gid] = sorted(part)
                for y in part:
                    adj_h[y].append(gid)
                gadget[(ei, pi)] = gid
        c_h = dict(cZ)
        verts_h = (v0_set - Z) | set(gadget.values())
        if verts_h:
            ch, bh, root_h = self._gadget_tree(children, bags, root, t0_nodes, edges, gadget, Z, eta)
            c_h.update(self.solve(adj_h, verts_h, ch, bh, root_h, set(), {}, eta - 1))
        for v in v0_set:
            result[v] = c_h[v]

        # shells around the adhesion sets, then the subtrees below them
        todo = []
        for ei, (t, c, xe, ve, e_nodes, e_internal, parts) in enumerate(edges):
            dist, label = _labelled_bfs(adj, ve, parts, 3 * ell)
            ce = {}
            for v, d in dist.items():
                if d == 0:
                    ce[v] = c_h[v]
                elif d <= ell:
                    ce[v] = c_h[gadget[(ei, label[v])]]
                elif d <= 2 * ell:
                    ce[v] = 1
                else:
                    ce[v] = 2
            if len(xe) > eta:
                if len(ve) > self.theta + 1:
                    raise AssertionError("large adhesion below a non-trivial subtree")
                for v in ve:
                    result[v] = ce.get(v, 1)
                continue
            re = next(self.nodes)
            children[re] = [c]
            bags[re] = xe
            ze = set(ce)
            child = (eta, e_internal + 1 + len(ve) - len(ze) + len(ve), len(e_nodes) + 1)
            if not child < measure:
                raise AssertionError(f"recursion measure did not decrease: {child} >= {measure}")
            todo.append((ve, re, ze, ce))
        return todo

    def _parts(self, adj, ve, xe):
        """Components of (G_e)^{7 ell} restricted to the adhesion set, ordered by least vertex."""
        xs = sorted(xe)
        parent = {x: x for x in xs}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in xs:
            near = _bfs(adj, ve, [x], 7 * self.ell)
            for y in xs:
                if y in near:
                    a, b = find(x), find(y)
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for x in xs:
            groups.setdefault(find(x), []).append(x)
        return [frozenset(g) for _, g in sorted(groups.items())]

    def _gadget_tree(self, children, bags, root, t0_nodes, edges, gadget, Z, eta):
        """Tree for H - Z: T0 plus one leaf per part, bags minus Z, re-rooted when eta - 1 > 0."""
        in_t0 = set(t0_nodes)
        new = {t: next(self.nodes) for t in t0_nodes}
        ch: dict[int, list[int]] = {}
        bh: dict[int, frozenset] = {}
        for t in t0_nodes:
            bh[new[t]] = frozenset(v for v in bags[t] if v not in Z)
            ch[new[t]] = [new[c] for c in children.get(t, ()) if c in in_t0]
        for ei, (t, _, xe, _, _, _, parts) in enumerate(edges):
            for pi in range(len(parts)):
                leaf = next(self.nodes)
                bh[leaf] = xe | {gadget[(ei, pi)]}
                ch[leaf] = []
                ch[new[t]].append(leaf)
        root_h = new[root]
        if eta - 1 == 0:
            return ch, bh, root_h
        parent = {root_h: None}
        queue = [root_h]
        target = None
        for t in queue:
            if bh[t]:
                target = t
                break
            for c in ch[t]:
                parent[c] = t
                queue.append(c)
        v0 = min(bh[target], key=lambda v: (v < 0, abs(v)))
        t = target
        while t is not None:
            bh[t] = bh[t] | {v0}
            t = parent[t]
        top = next(self.nodes)
        bh[top] = frozenset([v0])
        ch[top] = [root_h]
        return ch, bh, top


def extend_coloring(g: WeightedGraph, c: Construction, Z=(), c_Z=None, ell: int = 1,
                    oracle: BagOracle | None = None, m: int = 2, check_oracle: bool = True
                    ) -> ColoredPartition:
    """Extend a colouring of Z (within 3*ell of the root bag) to all of G along the construction."""
    if not g.is_unit:
        raise ValueError("tree gluing works on unweighted graphs")
    if m < 2:
        raise ValueError("at least two colours are required")
    if oracle is None:
        raise ValueError("an oracle for the bag class is required")
    Z = set(Z)
    c_Z = dict(c_Z or {})
    if set(c_Z) != Z:
        raise ValueError("c_Z must colour exactly the vertices of Z")
    if any(not 1 <= x <= m for x in c_Z.values()):
        raise ValueError(f"precolouring uses colours outside 1..{m}")
    td = c.td
    adj = {v: [u for u, _ in g.neighbors(v)] for v in range(g.n)}
    root_bag = td.bags[td.root]
    near = _bfs(adj, set(range(g.n)), root_bag, 3 * ell)
    stray = [z for z in Z if z not in near]
    if stray:
        raise ValueError(f"precoloured vertex {min(stray)} is farther than {3 * ell} from the root bag")
    params = FStarParams(ell, oracle.bound(ell), m, c.theta)
    if len(Z) == g.n:
        return ColoredPartition.from_map(g.n, c_Z, ell, params.n_theta_prime, m)
    children = {t: list(k) for t, k in td.children().items()}
    bags = dict(td.bags)
    gluer = _Gluer(ell, m, c.theta, oracle, check_oracle, max(bags) + 1)
    colors = gluer.solve(adj, set(range(g.n)), children, bags, td.root, Z, c_Z, c.eta)
    for z in Z:
        if colors.get(z) != c_Z[z]:
            raise AssertionError(f"precolouring changed at vertex {z}")
    return ColoredPartition.from_map(g.n, colors, ell, fstar(params, c.eta), m)


def tw_pipeline(g: WeightedGraph, td: RootedTreeDecomposition, ell: int, w: int | None = None,
                check_oracle: bool = True) -> ColoredPartition:
    """Two-colouring of G^ell with bounded weak diameter for graphs of treewidth at most w."""
    problems = td.problems(g)
    if problems:
        raise ValueError(f"invalid tree-decomposition: {problems[0]}")
    width = td.width()
    if w is None:
        w = max(width, 0)
    if width > w:
        raise ValueError(f"decomposition has width {width} > {w}")
    cons = normalize(g, compress(td), w)
    return extend_coloring(g, cons, (), {}, ell, VertexCoverOracle(w + 1), 2, check_oracle)
