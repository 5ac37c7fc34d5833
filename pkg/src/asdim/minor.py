"""Colouring graphs from a tree-decomposition whose torsos are apex-plus-layered-treewidth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .centered import apex_color, centered_bound
from .cover import ColoredPartition
from .decomposition import RootedTreeDecomposition, compress, normalize
from .layers import layered_tw_pipeline, layered_width, layering_problem
from .metric import WeightedGraph, unweighted
from .treeglue import FStarParams, OracleError, extend_coloring, fstar


@dataclass(frozen=True)
class TorsoCertificate:
    """Apex set of one bag plus a layering and decomposition of the torso minus the apex."""

    apex: frozenset[int]
    layers: Mapping[int, int]
    td: RootedTreeDecomposition


def torso_edges(g: WeightedGraph, td: RootedTreeDecomposition, t: int) -> set[tuple[int, int]]:
    bag = td.bags[t]
    out = set()
    for v in bag:
        for u, _ in g.neighbors(v):
            if u in bag and v < u:
                out.add((v, u))
    kids = td.children()
    for s in kids[t] + ([td.parent[t]] if td.parent[t] is not None else []):
        shared = sorted(bag & td.bags[s])
        for i, a in enumerate(shared):
            for b in shared[i + 1:]:
                out.add((a, b))
    return out


def check_torso(g: WeightedGraph, td: RootedTreeDecomposition, t: int, cert: TorsoCertificate,
                p: int, w: int) -> None:
    """Raise naming bag t when its certificate does not hold."""
    bag = td.bags[t]
    if not cert.apex <= bag:
        raise ValueError(f"bag {t}: apex set is not inside the bag")
    if len(cert.apex) > p:
        raise ValueError(f"bag {t}: apex set has {len(cert.apex)} > {p} vertices")
    rest = sorted(bag - cert.apex)
    index = {v: i for i, v in enumerate(rest)}
    edges = [(index[a], index[b]) for a, b in torso_edges(g, td, t) if a in index and b in index]
    torso = unweighted(len(rest), edges)
    missing = [v for v in rest if v not in cert.layers]
    if missing:
        raise ValueError(f"bag {t}: vertex {missing[0]} has no layer")
    local_layers = {index[v]: cert.layers[v] for v in rest}
    bad = layering_problem(torso, local_layers)
    if bad:
        raise ValueError(f"bag {t}: torso layering fails ({bad})")
    local_td = cert.td.restricted(index, index)
    problems = local_td.problems(torso)
    if problems:
        raise ValueError(f"bag {t}: torso decomposition fails ({problems[0]})")
    size, node, layer = layered_width(local_td, local_layers)
    if size > w:
        raise ValueError(f"bag {t}: torso bag {node} meets layer {layer} in {size} > {w} vertices")


def trivial_certificates(td: RootedTreeDecomposition) -> dict[int, TorsoCertificate]:
    """No apices, a single layer and a single bag per torso."""
    out = {}
    for t, bag in td.bags.items():
        out[t] = TorsoCertificate(frozenset(), {v: 0 for v in bag},
                                  RootedTreeDecomposition({0: bag}, {0: None}, 0))
    return out


class TorsoOracle:
    """Colours a bag piece by extending its torso certificate to the piece's extra vertices.

    Extras (piece vertices outside the chosen bag) each get a new leaf bag made of
    their non-apex neighbours, so those neighbours must already share a bag and
    span at most three consecutive layers."""

    def __init__(self, td: RootedTreeDecomposition, certs: Mapping[int, TorsoCertificate], p: int,
                 w: int):
        self.td, self.certs, self.p, self.w = td, certs, p, w
        self.holders: dict[int, list[int]] = {}
        for t in sorted(td.bags):
            for v in td.bags[t]:
                self.holders.setdefault(v, []).append(t)

    def _base_bound(self, ell):
        theta = max(self.w + 1, 1) * 3 * ell - 1
        params = FStarParams(ell, centered_bound(theta + 1, ell, 1), 2, theta)
        value = ell * fstar(params, theta)
        return float(math.floor(value)) if math.isfinite(value) else math.inf  # beyond double range

    def bound(self, ell):
        return centered_bound(self.p, 0, self._base_bound(ell))

    def _home(self, ids):
        score: dict[int, int] = {}
        for v in ids:
            for t in self.holders.get(v, ()):
                score[t] = score.get(t, 0) + 1
        if not score:
            return min(self.td.bags)
        return min(score, key=lambda t: (-score[t], t))

    def __call__(self, piece, ids, ell):
        s = self._home([v for v in ids if v >= 0])
        cert = self.certs[s]
        bag = self.td.bags[s]
        local = {v: i for i, v in enumerate(ids)}
        apex = {local[v] for v in cert.apex if v in local}
        core = [v for v in ids if v in bag and v not in cert.apex]
        extras = [v for v in ids if v not in bag]
        layers = {local[v]: cert.layers[v] for v in core}
        td = cert.td.restricted(set(core), local)
        bags = dict(td.bags)
        parent = dict(td.parent)
        nxt = max(bags) + 1
        pending = list(extras)
        while pending:
            progress = False
            for v in list(pending):
                nb = {u for u, _ in piece.neighbors(local[v])} - apex
                if not nb <= set(layers):
                    continue
                home = next((t for t in sorted(bags) if nb <= bags[t]), None)
                if home is None:
                    raise OracleError(f"bag {s}: neighbours of extra vertex {v} share no torso bag")
                lo = max((layers[u] - 1 for u in nb), default=0)
                hi = min((layers[u] + 1 for u in nb), default=0)
                if lo > hi:
                    raise OracleError(f"bag {s}: neighbours of extra vertex {v} span too many layers")
                layers[local[v]] = lo
                bags[nxt] = frozenset(nb | {local[v]})
                parent[nxt] = home
                nxt += 1
                pending.remove(v)
                progress = True
            if not progress:
                raise OracleError(f"bag {s}: extra vertices {sorted(pending)[:4]} hang on each other")
        keep = sorted(layers)
        sub_index = {v: i for i, v in enumerate(keep)}
        sub_layers = {sub_index[v]: layers[v] for v in keep}
        sub_td = RootedTreeDecomposition(
            {t: frozenset(sub_index[v] for v in b) for t, b in bags.items()}, parent, td.root)
        w_piece = self.w + 1

        def base(g, ell2):
            return layered_tw_pipeline(g, sub_layers, sub_td, ell2, w_piece)

        col = apex_color(piece, apex, base, ell)
        return ColoredPartition(col.colors, col.ell, col.bound, 4)


def minor_pipeline(g: WeightedGraph, td: RootedTreeDecomposition,
                   certs: Mapping[int, TorsoCertificate], ell: int, p: int, w: int,
                   check_oracle: bool = True) -> ColoredPartition:
    """Four-colouring of G^ell along a decomposition with certified apex + layered torsos."""
    problems = td.problems(g)
    if problems:
        raise ValueError(f"invalid tree-decomposition: {problems[0]}")
    if td.adhesion() > p:
        raise ValueError(f"decomposition has adhesion {td.adhesion()} > {p}")
    for t in sorted(td.bags):
        if t not in certs:
            raise ValueError(f"bag {t} has no torso certificate")
        check_torso(g, td, t, certs[t], p, w)
    small = compress(td)
    cons = normalize(g, small, small.adhesion())
    oracle = TorsoOracle(td, certs, p, w)
    return extend_coloring(g, cons, (), {}, ell, oracle, 4, check_oracle)
