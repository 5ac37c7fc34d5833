"""Merging colourings across centered sets, apex sets and vertex covers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .cover import ColoredPartition
from .metric import WeightedGraph, shortest_paths


def centered_bound(k: int, x: float, y: float) -> float:
    """Weak-diameter bound after merging a colouring with a (k, x)-centered precoloured set.

    Closed form 2^k (y + 2x + 2) - 2x - 2, where y bounds the colouring of the rest.
    """
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if not y >= 0:
        raise ValueError("y must be nonnegative")
    return float((2 ** int(k)) * (y + 2 * x + 2) - 2 * x - 2)


@dataclass(frozen=True)
class CenteredSetClaim:
    z: frozenset[int]
    centers: frozenset[int]
    k: int
    r: float

    def uncovered(self, g: WeightedGraph) -> int | None:
        """A vertex of z farther than r from the centers, or None when the claim holds."""
        if len(self.centers) > self.k:
            raise ValueError(f"claim has {len(self.centers)} centers but k={self.k}")
        reach = shortest_paths(g, self.centers, self.r)
        for v in sorted(self.z):
            if v not in reach:
                return v
        return None

    def check(self, g: WeightedGraph) -> None:
        bad = self.uncovered(g)
        if bad is not None:
            raise ValueError(f"vertex {bad} of Z is not within {self.r} of the centers")


def merge_centered(g: WeightedGraph, claim: CenteredSetClaim, base: Mapping[int, int],
                   base_bound: float, z_colors: Mapping[int, int], ell: int,
                   m: int | None = None) -> ColoredPartition:
    """Union of a colouring of G - Z (bound base_bound) with any colouring of Z."""
    claim.check(g)
    colors = {}
    for v, c in base.items():
        if v in claim.z:
            raise ValueError(f"base colouring covers vertex {v} of Z")
        colors[v] = c
    for v in claim.z:
        if v not in z_colors:
            raise ValueError(f"vertex {v} of Z has no colour")
        colors[v] = z_colors[v]
    bound = centered_bound(claim.k, claim.r, base_bound) if claim.z else float(base_bound)
    return ColoredPartition.from_map(g.n, colors, ell, bound, m)


def all_centered_bound(g: WeightedGraph, claim: CenteredSetClaim) -> float:
    """Certificate for an arbitrary colouring of a graph that is itself (k, r)-centered."""
    if claim.z != frozenset(range(g.n)):
        claim = CenteredSetClaim(frozenset(range(g.n)), claim.centers, claim.k, claim.r)
    claim.check(g)
    return centered_bound(claim.k, claim.r, 1)


def apex_color(g: WeightedGraph, apex: Iterable[int],
               base_pipeline: Callable[[WeightedGraph, int], ColoredPartition],
               ell: int) -> ColoredPartition:
    """Colour G - apex with `base_pipeline`, then give the apex vertices colour 1."""
    z = frozenset(apex)
    if not z:
        return base_pipeline(g, ell)
    rest, order = g.induced(v for v in range(g.n) if v not in z)
    inner = base_pipeline(rest, ell)
    base = {order[i]: c for i, c in enumerate(inner.colors)}
    claim = CenteredSetClaim(z, z, len(z), 0.0)
    return merge_centered(g, claim, base, inner.bound, {v: 1 for v in z}, ell, inner.m)


def check_vertex_cover(g: WeightedGraph, cover: Iterable[int]) -> tuple[int, int] | None:
    s = set(cover)
    for u, v, _ in g.edges:
        if u not in s and v not in s:
            return (u, v)
    return None


def vc_color(g: WeightedGraph, cover: Iterable[int], k: int, ell: int) -> ColoredPartition:
    """Constant colouring of a graph with a vertex cover of size at most k."""
    s = set(cover)
    if len(s) > k:
        raise ValueError(f"vertex cover has {len(s)} > k={k} vertices")
    bad = check_vertex_cover(g, s)
    if bad is not None:
        raise ValueError(f"edge {bad} is not covered")
    return ColoredPartition(tuple([1] * g.n), ell, centered_bound(k, ell, 1), 1)


def small_vertex_cover(g: WeightedGraph, k: int) -> list[int] | None:
    """A vertex cover of size at most k, or None (bounded search tree with a degree kernel)."""
    adj = {v: {u for u, _ in g.neighbors(v)} for v in range(g.n) if g.degree(v)}

    def search(adj, budget):
        forced = [v for v, nb in adj.items() if len(nb) > budget]
        if forced:
            v = min(forced)
            rest = _remove(adj, v)
            sub = search(rest, budget - 1) if budget > 0 else None
            return None if sub is None else [v] + sub
        edge = next(((v, min(nb)) for v, nb in sorted(adj.items()) if nb), None)
        if edge is None:
            return []
        if budget == 0:
            return None
        for v in edge:
            sub = search(_remove(adj, v), budget - 1)
            if sub is not None:
                return [v] + sub
        return None

    return search(adj, k)


def _remove(adj, v):
    out = {}
    for x, nb in adj.items():
        if x != v:
            nb = nb - {v} if v in nb else nb
            if nb:
                out[x] = nb
    return out
