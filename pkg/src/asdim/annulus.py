"""Annulus parity covers, fat K_{2,p} witnesses, apex lifting and the K_{3,p} pipeline."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import _exact
from .cover import Cover
from .layers import bfs_layering, parity_combine
from .metric import WeightedGraph, connected_components, r_components, shortest_paths


def annulus_bound(r: float, q: float, kappa: float, p: int) -> float:
    return (5 * r + 9 * q + 9 * kappa) * p


def least_k0(r: float, q: float, kappa: float) -> int:
    """Least integer k0 with k0 * r >= r + 3q + 3kappa."""
    if not (r > 0 and q > 0 and kappa > 0):
        raise ValueError("r, q and kappa must be positive")
    target = r + 3 * q + 3 * kappa
    k = max(1, math.ceil(target / r))
    while (k - 1) * r >= target:
        k -= 1
    while k * r < target:
        k += 1
    return k


@dataclass(frozen=True)
class AnnulusDecomposition:
    """Annuli around one root inside one connected component."""

    root: int
    r: float
    q: float
    kappa: float
    p: int
    k0: int
    dist: Mapping[int, float]

    def label(self, v: int) -> int:
        """0 for the inner ball, otherwise the annulus index k >= k0."""
        d = self.dist[v]
        if d < self.k0 * self.r:
            return 0
        k = int(math.floor(d / self.r))
        while k * self.r > d:
            k -= 1
        while (k + 1) * self.r <= d:
            k += 1
        return k

    @property
    def certificate(self) -> float:
        return annulus_bound(self.r, self.q, self.kappa, self.p)

    def families(self) -> tuple[set[int], set[int]]:
        c0, c1 = set(), set()
        for v in self.dist:
            k = self.label(v)
            if k and (k - self.k0) % 2 == 0:
                c0.add(v)
            else:
                c1.add(v)
        return c0, c1


def _check_weights(g: WeightedGraph, kappa: float):
    for u, v, w in g.edges:
        if w > kappa + 1e-12:
            raise ValueError(f"edge ({u}, {v}) has weight {w} > kappa={kappa}")


def annulus_decompositions(g: WeightedGraph, root: int, r: float, q: float, kappa: float,
                           p: int) -> list[AnnulusDecomposition]:
    """One decomposition per component; components without `root` use their least vertex."""
    if p < 1:
        raise ValueError("p must be positive")
    _check_weights(g, kappa)
    k0 = least_k0(r, q, kappa)
    if k0 * r > 2 * r + 3 * q + 3 * kappa + 1e-9:
        raise AssertionError("k0 exceeds its upper estimate")
    out = []
    for comp in sorted(connected_components(g), key=min):
        src = root if root in comp else min(comp)
        out.append(AnnulusDecomposition(src, r, q, kappa, p, k0, shortest_paths(g, [src])))
    return out


def annulus_cover(g: WeightedGraph, root: int, r: float, q: float, kappa: float, p: int
                  ) -> tuple[Cover, list[AnnulusDecomposition]]:
    """Two families: r-components of the even annuli and of the inner ball plus odd annuli."""
    decs = annulus_decompositions(g, root, r, q, kappa, p)
    fam0, fam1 = [], []
    for dec in decs:
        c0, c1 = dec.families()
        fam0.extend(r_components(g, c0, r).parts)
        fam1.extend(r_components(g, c1, r).parts)
    bound = annulus_bound(r, q, kappa, p)
    return Cover.build(r, [fam0, fam1], bound, "annulus_cover"), decs


@dataclass(frozen=True)
class Violation:
    x: int
    y: int
    distance: float
    component: frozenset[int]


def find_violations(g: WeightedGraph, cover: Cover, bound: float | None = None) -> list[Violation]:
    """Sets of the cover whose weak diameter exceeds the bound, each with a farthest pair."""
    bound = cover.certified_bound if bound is None else bound
    csr = g.csr()
    out = []
    for fam in cover.families:
        for s in fam:
            d, pair = _exact.farthest_pair(csr, s)
            if d > bound + 1e-9 * max(1.0, abs(bound)):
                if pair is None:
                    raise ValueError("cover set spans several components")
                out.append(Violation(min(pair), max(pair), d, frozenset(s)))
    return out


# -- fat minor models -----------------------------------------------------------------


@dataclass(frozen=True)
class FatMinorModel:
    pattern: tuple[tuple[str, str], ...]
    branch: Mapping[str, frozenset[int]]
    connectors: Mapping[tuple[str, str], tuple[int, ...]]
    q: float

    def to_json(self) -> str:
        doc = {
            "pattern": [list(e) for e in self.pattern],
            "branch_sets": {k: sorted(v) for k, v in sorted(self.branch.items())},
            "connectors": [{"edge": list(e), "path": list(self.connectors[e])} for e in self.pattern],
            "q": self.q,
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "FatMinorModel":
        doc = json.loads(text)
        pattern = tuple((a, b) for a, b in doc["pattern"])
        branch = {k: frozenset(v) for k, v in doc["branch_sets"].items()}
        conn = {(c["edge"][0], c["edge"][1]): tuple(c["path"]) for c in doc["connectors"]}
        return cls(pattern, branch, conn, doc["q"])


@dataclass(frozen=True)
class FatModelReport:
    passed: bool
    failure: str = ""
    pair: tuple = ()

    def __bool__(self) -> bool:
        return self.passed


def _connected(g: WeightedGraph, s: frozenset[int]) -> bool:
    if not s:
        return False
    start = min(s)
    return len(shortest_paths(g, [start], allowed=s.__contains__)) == len(s)


def _is_path(g: WeightedGraph, path: Sequence[int]) -> bool:
    return len(path) >= 1 and all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def verify_fat_model(g: WeightedGraph, model: FatMinorModel) -> FatModelReport:
    """Check the fat-minor conditions with exact distances from the verifier engine."""
    csr = g.csr()
    q = model.q
    tol = 1e-9 * max(1.0, q)
    names = sorted(model.branch)
    for name in names:
        if not _connected(g, model.branch[name]):
            return FatModelReport(False, f"branch set {name} is empty or disconnected", (name,))
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if model.branch[a] & model.branch[b]:
                return FatModelReport(False, f"branch sets {a} and {b} intersect", (a, b))
            d = _exact.set_distance(csr, model.branch[a], model.branch[b])
            if d < q - tol:
                return FatModelReport(False, f"branch sets {a} and {b} at distance {d} < {q}", (a, b))
    for e in model.pattern:
        if e not in model.connectors:
            return FatModelReport(False, f"pattern edge {e} has no connector", (e,))
        path = model.connectors[e]
        if not _is_path(g, path):
            return FatModelReport(False, f"connector {e} is not a path", (e,))
        u, v = model.branch[e[0]], model.branch[e[1]]
        if not ((path[0] in u and path[-1] in v) or (path[0] in v and path[-1] in u)):
            return FatModelReport(False, f"connector {e} does not join its branch sets", (e,))
        length = sum(g.weight(a, b) for a, b in zip(path, path[1:]))
        if length < q - tol:
            return FatModelReport(False, f"connector {e} has length {length} < {q}", (e,))
    for i, e in enumerate(model.pattern):
        pe = set(model.connectors[e])
        for f in model.pattern[i + 1:]:
            d = _exact.set_distance(csr, pe, set(model.connectors[f]))
            if d < q - tol:
                return FatModelReport(False, f"connectors {e} and {f} at distance {d} < {q}", (e, f))
        for w in names:
            if w in e:
                continue
            d = _exact.set_distance(csr, pe, model.branch[w])
            if d < q - tol:
                return FatModelReport(False, f"connector {e} and branch set {w} at distance {d} < {q}",
                                      (e, w))
    return FatModelReport(True)


def _path_to_tree_root(parent: Mapping[int, int], x: int) -> list[int]:
    """Path from the search root to x along parent pointers (root first)."""
    out = [x]
    while out[-1] in parent:
        out.append(parent[out[-1]])
    out.reverse()
    return out


def _chain(g: WeightedGraph, comp: frozenset[int], x: int, y: int, r: float) -> list[int]:
    """Fewest-step sequence from x to y inside comp with consecutive distances <= r."""
    prev = {x: None}
    frontier = [x]
    while frontier and y not in prev:
        nxt = []
        for a in frontier:
            for b in sorted(shortest_paths(g, [a], r)):
                if b in comp and b not in prev:
                    prev[b] = a
                    nxt.append(b)
        frontier = sorted(nxt)
    if y not in prev:
        raise ValueError("violating pair does not lie in one r-component")
    out = [y]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    out.reverse()
    return out


def extract_fat_witness(g: WeightedGraph, dec: AnnulusDecomposition, x: int, y: int,
                        component: Iterable[int] | None = None) -> FatMinorModel:
    """Build a q-fat K_{2,p} model from two far-apart vertices of one annulus r-component."""
    r, q, kappa, p = dec.r, dec.q, dec.kappa, dec.p
    cert = dec.certificate
    k = dec.label(x)
    if k == 0 or dec.label(y) != k:
        raise ValueError("pair does not lie in one outer annulus")
    dxy = shortest_paths(g, [x]).get(y, math.inf)
    if not dxy > cert:
        raise ValueError(f"no violation: d(x, y) = {dxy} <= {cert}")
    if component is None:
        ring = {v for v in dec.dist if dec.label(v) == k}
        component = next(c for c in r_components(g, ring, r).parts if x in c)
    comp = frozenset(component)
    chain = _chain(g, comp, x, y, r)
    ell = len(chain)
    step = 4 * r + 9 * q + 9 * kappa

    # iota, 1-based as in the construction
    iota = [1]
    for _ in range(p - 2):
        d_from = shortest_paths(g, [chain[iota[-1] - 1]])
        j = max(j for j in range(iota[-1], ell) if d_from.get(chain[j - 1], math.inf) <= step)
        iota.append(j + 1)
    iota.append(ell)
    if any(a >= b for a, b in zip(iota, iota[1:])):
        raise AssertionError("skeleton indices are not increasing")
    tips = [chain[i - 1] for i in iota]

    root = dec.root
    dist, parent = shortest_paths(g, [root], predecessors=True)
    paths = [_path_to_tree_root(parent, t) for t in tips]
    on_paths = {v for path in paths for v in path}
    a_cut = (k - 1) * r - (3 * q + 3 * kappa)
    A = frozenset(v for v in on_paths if dist[v] <= a_cut + 1e-12)
    D = {v for v in on_paths if dist[v] >= (k - 1) * r - 1e-12}
    B = set(D)
    for a, b in zip(chain, chain[1:]):
        _, par = shortest_paths(g, [a], r, predecessors=True)
        B.update(_path_to_tree_root(par, b))
    B = frozenset(B)

    dA, parA = shortest_paths(g, A, predecessors=True)
    dB, parB = shortest_paths(g, B, predecessors=True)
    reach = q + kappa + 1e-12
    branch = {"A": A, "B": B}
    connectors = {}
    pattern = []
    for i, path in enumerate(paths, 1):
        jb = next(j for j, v in enumerate(path) if v in B)
        ja = max(j for j in range(jb) if dA[path[j]] <= reach)
        jq = min(j for j in range(ja, jb + 1) if dB[path[j]] <= reach)
        name = f"Q{i}"
        branch[name] = frozenset(path[ja:jq + 1])
        pattern += [("A", name), ("B", name)]
        connectors[("A", name)] = tuple(_path_to_tree_root(parA, path[ja]))
        connectors[("B", name)] = tuple(_path_to_tree_root(parB, path[jq]))
    return FatMinorModel(tuple(pattern), branch, connectors, q)


# -- apex lifting --------------------------------------------------------------------------


@dataclass(frozen=True)
class MinorModel:
    pattern: tuple[tuple[str, str], ...]
    branch: Mapping[str, frozenset[int]]


def verify_minor_model(g: WeightedGraph, model: MinorModel) -> FatModelReport:
    names = sorted(model.branch)
    owner = {}
    for name in names:
        s = model.branch[name]
        if not _connected(g, s):
            return FatModelReport(False, f"branch set {name} is empty or disconnected", (name,))
        for v in s:
            if v in owner:
                return FatModelReport(False, f"branch sets {owner[v]} and {name} share vertex {v}",
                                      (owner[v], name))
            owner[v] = name
    for a, b in model.pattern:
        if not any(owner.get(u) == b for v in model.branch[a] for u, _ in g.neighbors(v)):
            return FatModelReport(False, f"no edge between branch sets {a} and {b}", (a, b))
    return FatModelReport(True)


def lift_witness_apex(g: WeightedGraph, model: FatMinorModel, root: int, s: float, t: float,
                      apex: str = "apex") -> MinorModel:
    """Turn a fat model inside the shell s <= d(root, .) <= t into a model of H plus a universal vertex."""
    if not 0 < s < t:
        raise ValueError("need 0 < s < t")
    if not model.q > 2 * (t - s):
        raise ValueError(f"fatness {model.q} must exceed 2(t - s) = {2 * (t - s)}")
    dist, parent = shortest_paths(g, [root], predecessors=True)
    band = frozenset(v for v, d in dist.items() if s <= d <= t)
    inner = {v for v, d in dist.items() if d < s}
    used = set().union(*model.branch.values()) | {v for p in model.connectors.values() for v in p}
    if not used <= band:
        raise ValueError("model leaves the shell")
    band_g, order = g.induced(sorted(band))
    index = {v: i for i, v in enumerate(order)}
    local = FatMinorModel(model.pattern, {k: frozenset(index[v] for v in b) for k, b in model.branch.items()},
                          {e: tuple(index[v] for v in p) for e, p in model.connectors.items()}, model.q)
    report = verify_fat_model(band_g, local)
    if not report:
        raise ValueError(f"inner model is not {model.q}-fat in the shell: {report.failure}")

    plus = {}
    for name, tu in model.branch.items():
        x = min(tu, key=lambda v: (dist[v], v))
        stub = []
        for v in reversed(_path_to_tree_root(parent, x)):  # from x towards the root
            if v not in band:
                break
            stub.append(v)
        plus[name] = set(tu) | set(stub)
    for (u, w), path in model.connectors.items():
        best = None
        last_u = last_w = None
        for j, v in enumerate(path):
            if v in plus[u]:
                last_u = j
                if last_w is not None and (best is None or j - last_w < best[1] - best[0]):
                    best = (last_w, j)
            if v in plus[w]:
                last_w = j
                if last_u is not None and (best is None or j - last_u < best[1] - best[0]):
                    best = (last_u, j)
        if best is None:
            raise AssertionError(f"connector {(u, w)} misses its lifted branch sets")
        plus[u].update(path[best[0] + 1:best[1]])
    branch = {k: frozenset(v) for k, v in plus.items()}
    branch[apex] = frozenset(inner)
    pattern = tuple(model.pattern) + tuple((apex, name) for name in sorted(model.branch))
    return MinorModel(pattern, branch)


# -- K_{3,p} and surfaces ---------------------------------------------------------------------


def normalize_weights(g: WeightedGraph) -> tuple[WeightedGraph, int]:
    """Split every edge heavier than 1 into ceil(w) equal pieces; originals keep their ids."""
    edges = []
    nxt = g.n
    for u, v, w in g.edges:
        if w <= 1:
            edges.append((u, v, w))
            continue
        pieces = math.ceil(w)
        piece = w / pieces
        prev = u
        for _ in range(pieces - 1):
            edges.append((prev, nxt, piece))
            prev = nxt
            nxt += 1
        edges.append((prev, v, piece))
    return WeightedGraph(nxt, edges), g.n


class AnnulusSlabOracle:
    """Annulus cover of a collared slab with fatness three times the slab width."""

    def __init__(self, p: int, kappa: float = 1.0):
        self.p, self.kappa = p, kappa

    def q(self, width):
        return 3 * width

    def bound(self, r, width):
        return annulus_bound(r, self.q(width), self.kappa, self.p)

    def __call__(self, sub, ids, r, width):
        cover, _ = annulus_cover(sub, 0, r, self.q(width), self.kappa, self.p)
        return cover.with_bound(self.bound(r, width), "annulus_slab")


def k3p_pipeline(g: WeightedGraph, p: int, r: float, S: float | None = None) -> Cover:
    """Four families for graphs with no K_{3,p} minor (any positive weights)."""
    if p < 1:
        raise ValueError("p must be positive")
    p = max(p, 2)  # no K_{3,1} minor implies no K_{3,2} minor
    h, n0 = normalize_weights(g)
    L = bfs_layering(h, 0) if h.n else {}
    S = r if S is None else S
    cover = parity_combine(h, L, r, S, AnnulusSlabOracle(p))
    fams = [[s2 for s2 in (frozenset(v for v in s if v < n0) for s in fam) if s2]
            for fam in cover.families]
    return Cover.build(r, fams, cover.certified_bound, "k3p_pipeline")


def genus_pipeline(g: WeightedGraph, genus: int, r: float) -> Cover:
    """K_{3,2g+3} does not embed in a surface of Euler genus g."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    return k3p_pipeline(g, 2 * genus + 3, r)


def linear_to_an(f: Callable[[float], float]) -> Callable[[float], float]:
    """Linear control x -> f(1) x for scaling-closed classes."""
    c = f(1)
    return lambda x: c * x
