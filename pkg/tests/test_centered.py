import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from asdim.annulus import annulus_cover
from asdim.centered import (CenteredSetClaim, all_centered_bound, apex_color, centered_bound,
                            merge_centered, small_vertex_cover, vc_color)
from asdim.cover import ColoredPartition, cover_to_coloring, verify_coloring
from asdim.generators import gen_cycle, gen_grid
from asdim.metric import WeightedGraph, unweighted

from oracles import apsp, closure, coloring_check, power_hops, weak_diam


def test_centered_bound_examples():
    assert centered_bound(2, 1, 3) == 24
    for x, y in [(0, 1), (3, 7.5), (20, 20)]:
        assert centered_bound(0, x, y) == y


def test_centered_bound_recurrence_exhaustive():
    for a in range(1, 11):
        for x in range(21):
            for y in range(21):
                assert centered_bound(a, x, y) == 2 * x + 2 + 2 * centered_bound(a - 1, x, y)


def star(k):
    return unweighted(k + 1, [(0, i) for i in range(1, k + 1)])


def test_merge_with_empty_claim_keeps_base():
    g = gen_grid([4])
    claim = CenteredSetClaim(frozenset(), frozenset(), 0, 1.0)
    col = merge_centered(g, claim, {v: 1 + v % 2 for v in range(4)}, 5.0, {}, 1)
    assert col.bound == 5.0 and col.colors == (1, 2, 1, 2)


def ambient_bound(g, colors, ell, d):
    """Largest G^ell weak diameter of a monochromatic G^ell component among coloured vertices."""
    hops = power_hops(g, ell, d)
    worst = 0
    for c in set(colors.values()):
        for comp in closure([v for v, x in colors.items() if x == c], ell, d):
            worst = max(worst, weak_diam(hops, comp))
    return worst


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_merge_bound_on_random_spiders(seed, legs):
    rng = random.Random(seed)
    edges, n = [], 1
    for _ in range(rng.randint(1, 6)):
        prev = 0
        for _ in range(rng.randint(1, legs + 2)):
            edges.append((prev, n))
            prev, n = n, n + 1
    g = unweighted(n, edges)
    d = apsp(g)
    z = frozenset(v for v in range(n) if d[0][v] <= 1)
    base = {v: rng.randint(1, 2) for v in range(n) if v not in z}
    y = max(ambient_bound(g, base, 1, d), 1)
    claim = CenteredSetClaim(z, frozenset({0}), 1, 1.0)
    col = merge_centered(g, claim, base, y, {v: rng.randint(1, 2) for v in z}, 1, 2)
    assert col.bound == centered_bound(1, 1, y)
    assert coloring_check(g, col, d)[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10**6), st.integers(1, 2))
def test_merge_bound_on_random_graphs(n, seed, k):
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    g = unweighted(n, rng.sample(pairs, rng.randint(n - 1, len(pairs))))
    d = apsp(g)
    centres = frozenset(rng.sample(range(n), min(k, n)))
    r = rng.choice([0, 1])
    z = frozenset(v for v in range(n) if min(d[c][v] for c in centres) <= r)
    base = {v: rng.randint(1, 3) for v in range(n) if v not in z}
    y = max(ambient_bound(g, base, 1, d), 1)
    col = merge_centered(g, CenteredSetClaim(z, centres, k, float(r)), base, y,
                         {v: rng.randint(1, 3) for v in z}, 1, 3)
    assert coloring_check(g, col, d)[0]


def test_claim_rejects_far_vertex():
    g = gen_grid([5])
    with pytest.raises(ValueError, match="vertex 4"):
        merge_centered(g, CenteredSetClaim(frozenset({0, 4}), frozenset({0}), 1, 1.0),
                       {1: 1, 2: 1, 3: 1}, 2.0, {0: 1, 4: 1}, 1)


def test_all_centered_examples():
    assert all_centered_bound(WeightedGraph(0), CenteredSetClaim(frozenset(), frozenset(), 0, 1)) == 1
    with pytest.raises(ValueError):
        all_centered_bound(star(2), CenteredSetClaim(frozenset(), frozenset(), 0, 1))
    s = star(5)
    bound = all_centered_bound(s, CenteredSetClaim(frozenset(), frozenset({0}), 1, 1))
    assert bound == 6
    for colors in itertools.product((1, 2), repeat=6):
        ok, worst = coloring_check(s, ColoredPartition(colors, 1, bound, 2))
        assert ok and worst <= 2
    k6 = unweighted(6, itertools.combinations(range(6), 2))
    bound = all_centered_bound(k6, CenteredSetClaim(frozenset(), frozenset({0}), 1, 1))
    ok, worst = coloring_check(k6, ColoredPartition((1,) * 6, 1, bound, 1))
    assert ok and worst == 1


def wheel(n):
    return unweighted(n + 1, [(i, (i + 1) % n) for i in range(n)] + [(n, i) for i in range(n)])


def test_apex_colour_examples():
    c = gen_cycle(30)

    def base(h, ell):
        cover, _ = annulus_cover(h, 0, ell, ell, 1, 2)
        return cover_to_coloring(h, cover)

    assert apex_color(c, [], base, 1) == base(c, 1)
    w = wheel(30)
    col = apex_color(w, [30], base, 1)
    assert col.colors[30] == 1 and verify_coloring(w, col).passed

    grid = gen_grid([8, 8])
    apexed = WeightedGraph(65, list(grid.edges) + [(64, v, 1.0) for v in range(64)])
    col = apex_color(apexed, [64], base, 1)
    assert verify_coloring(apexed, col).passed


def test_vertex_cover_colouring_examples():
    empty = WeightedGraph(4)
    col = vc_color(empty, [], 0, 1)
    assert verify_coloring(empty, col).passed and verify_coloring(empty, col).observed_bound == 0
    k2m = unweighted(7, [(a, b) for a in (0, 1) for b in range(2, 7)])
    col = vc_color(k2m, [0, 1], 2, 1)
    rep = verify_coloring(k2m, col)
    assert rep.components == 1 and rep.observed_bound == 2 and col.bound >= 2
    s = star(6)
    for ell in (1, 2, 3):
        rep = verify_coloring(s, vc_color(s, [0], 1, ell))
        assert rep.passed and rep.observed_bound == (2 if ell == 1 else 1)
    with pytest.raises(ValueError):
        vc_color(k2m, [0], 2, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6), st.integers(0, 4))
def test_small_vertex_cover_matches_exhaustive(n, seed, k):
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    g = unweighted(n, rng.sample(pairs, rng.randint(0, len(pairs))))
    exists = any(all(u in s or v in s for u, v, _ in g.edges)
                 for size in range(k + 1) for s in map(set, itertools.combinations(range(n), size)))
    found = small_vertex_cover(g, k)
    assert (found is not None) == exists
    if found is not None:
        assert len(found) <= k and all(u in found or v in found for u, v, _ in g.edges)
