"""Rooted tree-decompositions, PACE-format ingestion and (eta, theta)-constructions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, permutations
from pathlib import Path
from typing import Iterable, Mapping

from .metric import GraphFormatError, WeightedGraph, connected_components


@dataclass(frozen=True)
class RootedTreeDecomposition:
    bags: Mapping[int, frozenset[int]]
    parent: Mapping[int, int | None]
    root: int

    @classmethod
    def from_edges(cls, bags: Mapping[int, Iterable[int]], edges: Iterable[tuple[int, int]],
                   root: int | None = None) -> "RootedTreeDecomposition":
        bags = {t: frozenset(b) for t, b in bags.items()}
        if not bags:
            raise ValueError("a tree-decomposition needs at least one bag")
        nbrs: dict[int, list[int]] = {t: [] for t in bags}
        count = 0
        for a, b in edges:
            if a not in bags or b not in bags:
                raise ValueError(f"tree edge ({a}, {b}) references an unknown bag")
            nbrs[a].append(b)
            nbrs[b].append(a)
            count += 1
        root = min(bags) if root is None else root
        if root not in bags:
            raise ValueError(f"root bag {root} does not exist")
        parent: dict[int, int | None] = {root: None}
        queue = deque([root])
        while queue:
            t = queue.popleft()
            for s in sorted(nbrs[t]):
                if s in parent:
                    if parent[t] != s:
                        raise ValueError("bag graph contains a cycle")
                    continue
                parent[s] = t
                queue.append(s)
        if len(parent) != len(bags) or count != len(bags) - 1:
            raise ValueError("bag graph is not a tree")
        return cls(bags, parent, root)

    @property
    def nodes(self) -> list[int]:
        return list(self.bags)

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {t: [] for t in self.bags}
        for t, p in self.parent.items():
            if p is not None:
                out[p].append(t)
        for lst in out.values():
            lst.sort()
        return out

    def tree_edges(self) -> list[tuple[int, int]]:
        return [(p, t) for t, p in sorted(self.parent.items()) if p is not None]

    def preorder(self) -> list[int]:
        kids = self.children()
        out, stack = [], [self.root]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(kids[t]))
        return out

    def adhesion(self) -> int:
        return max((len(self.bags[a] & self.bags[b]) for a, b in self.tree_edges()), default=0)

    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def rerooted(self, root: int) -> "RootedTreeDecomposition":
        return RootedTreeDecomposition.from_edges(self.bags, self.tree_edges(), root)

    def problems(self, g: WeightedGraph) -> list[str]:
        """Violations of the tree-decomposition axioms for g (empty when valid)."""
        out = []
        seen = set()
        for t, b in self.bags.items():
            for v in b:
                if not 0 <= v < g.n:
                    out.append(f"bag {t} contains non-vertex {v}")
            seen |= b
        for v in range(g.n):
            if v not in seen:
                out.append(f"vertex {v} lies in no bag")
                break
        holder: dict[int, list[int]] = {}
        for t, b in self.bags.items():
            for v in b:
                holder.setdefault(v, []).append(t)
        held = {v: set(ts) for v, ts in holder.items()}
        for u, v, _ in g.edges:
            if held.get(u, set()).isdisjoint(held.get(v, ())):
                out.append(f"edge ({u}, {v}) lies in no bag")
                break
        for v, ts in holder.items():
            tops = [t for t in ts if self.parent[t] is None or v not in self.bags[self.parent[t]]]
            if len(tops) != 1:
                out.append(f"bags containing vertex {v} do not form a subtree")
                break
        return out

    def restricted(self, keep: Iterable[int], relabel: Mapping[int, int] | None = None
                   ) -> "RootedTreeDecomposition":
        """Same tree with every bag intersected with `keep` (optionally renumbering vertices)."""
        keep = set(keep)
        if relabel is None:
            bags = {t: b & keep for t, b in self.bags.items()}
        else:
            bags = {t: frozenset(relabel[v] for v in b if v in keep) for t, b in self.bags.items()}
        return RootedTreeDecomposition(bags, dict(self.parent), self.root)


def compress(td: RootedTreeDecomposition) -> RootedTreeDecomposition:
    """Contract every node whose bag is contained in its parent's bag (empty bags included).

    Contraction keeps the decomposition valid and makes each adhesion strictly
    smaller than the child bag. The root is kept.
    """
    kids = td.children()
    parent = dict(td.parent)
    alive = set(td.bags)
    for t in reversed(td.preorder()):
        p = parent[t]
        if p is None or not td.bags[t] <= td.bags[p]:
            continue
        for c in kids[t]:
            parent[c] = p
            kids[p].append(c)
        kids[p].remove(t)
        alive.discard(t)
        del parent[t]
    return RootedTreeDecomposition({t: td.bags[t] for t in alive},
                                   {t: parent[t] for t in alive}, td.root)


# ---------------------------------------------------------------- constructions


@dataclass(frozen=True)
class Construction:
    td: RootedTreeDecomposition
    eta: int
    theta: int


@dataclass
class ConstructionReport:
    passed: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def validate_construction(g: WeightedGraph, c: Construction) -> ConstructionReport:
    """Check every structural condition of an (eta, theta)-construction except class membership."""
    td = c.td
    fails = list(td.problems(g))
    if not 0 <= c.eta <= c.theta:
        fails.append(f"need 0 <= eta <= theta, got eta={c.eta}, theta={c.theta}")
    root_bag = td.bags[td.root]
    if len(root_bag) > c.theta:
        fails.append(f"root bag has {len(root_bag)} > theta={c.theta} vertices")
    if c.eta > 0 and not root_bag:
        fails.append("root bag is empty although eta > 0")
    kids = td.children()
    for p, t in td.tree_edges():
        inter = td.bags[p] & td.bags[t]
        if len(inter) > c.theta:
            fails.append(f"edge ({p}, {t}) has adhesion {len(inter)} > theta={c.theta}")
        if len(inter) > c.eta:
            leafy = [(a, b) for a, b in ((t, p), (p, t))
                     if not kids[a] and len(td.bags[a] - td.bags[b]) <= 1]
            if not leafy:
                fails.append(f"edge ({p}, {t}) has adhesion {len(inter)} > eta={c.eta} "
                             "but neither end is a leaf adding at most one vertex")
    return ConstructionReport(not fails, fails)


def normalize(g: WeightedGraph, td: RootedTreeDecomposition | None, theta: int) -> Construction:
    """Re-root under a new node holding a single vertex, giving a (theta, theta)-construction."""
    if g.n == 0:
        return Construction(RootedTreeDecomposition({0: frozenset()}, {0: None}, 0), 0, theta)
    if td is None:
        raise ValueError("a nonempty graph needs a tree-decomposition")
    if td.adhesion() > theta:
        raise ValueError(f"adhesion {td.adhesion()} exceeds theta={theta}")
    order = [td.root] + [t for t in td.preorder() if t != td.root]
    t0 = next((t for t in order if td.bags[t]), None)
    if t0 is None:
        raise ValueError("all bags are empty but the graph is not")
    new = max(td.bags) + 1
    rooted = RootedTreeDecomposition.from_edges(td.bags, td.tree_edges(), t0)
    bags = dict(td.bags)
    bags[new] = frozenset() if theta == 0 else frozenset([min(td.bags[t0])])
    parent = dict(rooted.parent)
    parent[t0] = new
    parent[new] = None
    return Construction(RootedTreeDecomposition(bags, parent, new), theta, theta)


# ---------------------------------------------------------------- PACE format


def parse_td(text: str, n: int | None = None, root: int | None = None) -> RootedTreeDecomposition:
    """Parse 's td <#bags> <width+1> <n>', 'b <id> <v...>' and '<a> <b>' tree-edge lines."""
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        try:
            if tok[0] == "s":
                if len(tok) != 5 or tok[1] != "td":
                    raise GraphFormatError("header must be 's td <bags> <width+1> <n>'", lineno)
                header = (int(tok[2]), int(tok[3]), int(tok[4]))
            elif tok[0] == "b":
                if header is None:
                    raise GraphFormatError("bag before header", lineno)
                bid = int(tok[1])
                if bid in bags:
                    raise GraphFormatError(f"duplicate bag {bid}", lineno)
                verts = [int(x) - 1 for x in tok[2:]]
                if any(not 0 <= v < header[2] for v in verts):
                    raise GraphFormatError("bag vertex out of range", lineno)
                if len(verts) > header[1]:
                    raise GraphFormatError("bag larger than declared width+1", lineno)
                bags[bid] = frozenset(verts)
            else:
                if header is None:
                    raise GraphFormatError("tree edge before header", lineno)
                if len(tok) != 2:
                    raise GraphFormatError("tree edge must be '<a> <b>'", lineno)
                edges.append((int(tok[0]), int(tok[1])))
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError("malformed integer", lineno) from None
    if header is None:
        raise GraphFormatError("missing 's td' header")
    if len(bags) != header[0]:
        raise GraphFormatError(f"header declares {header[0]} bags, found {len(bags)}")
    if n is not None and header[2] != n:
        raise GraphFormatError(f"decomposition is for {header[2]} vertices, graph has {n}")
    if root is None:
        root = 1 if 1 in bags else min(bags)
    try:
        return RootedTreeDecomposition.from_edges(bags, edges, root)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def format_td(td: RootedTreeDecomposition, n: int) -> str:
    ids = sorted(td.bags)
    lines = [f"s td {len(ids)} {td.width() + 1} {n}"]
    for t in ids:
        lines.append(" ".join(["b", str(t)] + [str(v + 1) for v in sorted(td.bags[t])]))
    for a, b in td.tree_edges():
        lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


def read_td(path: str | Path, n: int | None = None, root: int | None = None):
    return parse_td(Path(path).read_text(), n, root)


def write_td(td: RootedTreeDecomposition, n: int, path: str | Path) -> None:
    Path(path).write_text(format_td(td, n))


# ---------------------------------------------------------------- small exact fallback


def exact_small_width_td(g: WeightedGraph, max_width: int = 3) -> RootedTreeDecomposition | None:
    """Optimal tree-decomposition by exhaustive elimination orderings, if width <= max_width.

    Exponential; meant for test graphs with a handful of vertices per component.
    """
    if g.n == 0:
        return RootedTreeDecomposition({0: frozenset()}, {0: None}, 0)
    best = None
    for comp in connected_components(g):
        sub = _component_td(g, sorted(comp), max_width)
        if sub is None:
            return None
        best = sub if best is None else _join(best, sub)
    return best


def _component_td(g, verts, max_width):
    adj0 = {v: {u for u, _ in g.neighbors(v)} for v in verts}
    if len(verts) > 8:
        raise ValueError("exact fallback is limited to components of at most 8 vertices")
    best_order, best_w = None, None
    for order in permutations(verts):
        adj = {v: set(nb) for v, nb in adj0.items()}
        w = 0
        for v in order:
            nb = adj.pop(v)
            w = max(w, len(nb))
            if best_w is not None and w >= best_w:
                break
            for a, b in combinations(nb, 2):
                adj[a].add(b)
                adj[b].add(a)
            for a in nb:
                adj[a].discard(v)
        else:
            best_order, best_w = order, w
            if w == 0:
                break
    if best_w > max_width:
        return None
    adj = {v: set(nb) for v, nb in adj0.items()}
    bags = {}
    later: dict[int, set[int]] = {}
    pos = {v: i for i, v in enumerate(best_order)}
    for i, v in enumerate(best_order):
        nb = adj.pop(v)
        bags[i] = frozenset(nb | {v})
        later[i] = nb
        for a, b in combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        for a in nb:
            adj[a].discard(v)
    edges = []
    last = len(best_order) - 1
    for i in range(last):
        if later[i]:
            edges.append((i, min(pos[u] for u in later[i])))
        else:
            edges.append((i, last))
    return RootedTreeDecomposition.from_edges(bags, edges, last)


def _join(a: RootedTreeDecomposition, b: RootedTreeDecomposition) -> RootedTreeDecomposition:
    shift = max(a.bags) + 1
    bags = dict(a.bags)
    bags.update({t + shift: bag for t, bag in b.bags.items()})
    edges = a.tree_edges() + [(x + shift, y + shift) for x, y in b.tree_edges()]
    edges.append((a.root, b.root + shift))
    return RootedTreeDecomposition.from_edges(bags, edges, a.root)
