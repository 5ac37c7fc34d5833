import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asdim.cover import verify_coloring
from asdim.euclid import (Embedding, LatticeCover, embed_color, format_embedding, grid_embedding,
                          lattice_assign, lattice_assign_many, packing_bound, parse_embedding)
from asdim.generators import (gen_cactus, gen_grid, gen_partial_ktree, gen_planar_triangulation,
                              gen_stretch, gen_torus_grid, growth_check,
                              stretch_profile)
from asdim.metric import GraphFormatError, WeightedGraph, connected_components, unweighted

from oracles import coloring_check


def test_lattice_examples():
    cover = LatticeCover(1, 1)
    assert cover.side == 4 and cover.s == 2
    assert lattice_assign([3.0], cover) == 0
    assert lattice_assign([2.0], cover) == 0
    assert lattice_assign([0.0], cover) == 1


def test_one_dimensional_sweep_is_total():
    cover = LatticeCover(1, 1)
    xs = np.linspace(-50, 50, 100_001).reshape(-1, 1)
    classes = lattice_assign_many(xs, cover)
    assert classes.min() >= 0 and set(classes) == {0, 1}


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.floats(0.1, 10), st.data())
def test_every_point_has_a_deep_class(d, r, data):
    cover = LatticeCover(d, r)
    point = data.draw(st.lists(st.floats(-1e3, 1e3), min_size=d, max_size=d))
    j = lattice_assign(point, cover)
    assert cover.depth(point, j) >= cover.margin
    assert lattice_assign_many(np.array([point]), cover)[0] == j


def test_packing_bound_in_one_dimension():
    for a in (0.5, 1.0, 3.0, 7.5):
        assert packing_bound(1, a) >= math.floor(a) + 1


def test_embed_colour_examples():
    # the centre of a class-0 cell (side 6 at r = 1) gets the first colour
    single = embed_color(WeightedGraph(1), Embedding(np.array([[3.0, 3.0]]), 1.0), 1)
    assert single.colors == (1,)
    for side in (5, 12):
        g = gen_grid([side, side])
        for ell in (1, 2):
            col = embed_color(g, grid_embedding([side, side], 2.0), ell)
            assert col.m == 3 and verify_coloring(g, col).passed
    g = gen_grid([6, 6])
    col = embed_color(g, grid_embedding([6, 6], 2.0), 1)
    assert coloring_check(g, col)[0]


def test_far_cliques():
    square = [(0, 0), (1, 0), (0, 1), (1, 1)]
    pts = np.array(square + [(x + 40, y) for x, y in square], dtype=float)
    edges = list(itertools.combinations(range(4), 2)) + [(a + 4, b + 4) for a, b in
                                                          itertools.combinations(range(4), 2)]
    g = unweighted(8, edges)
    col = embed_color(g, Embedding(pts, 2.0), 1)
    assert verify_coloring(g, col).passed


def test_embedding_checks():
    g = unweighted(2, [(0, 1)])
    with pytest.raises(ValueError, match="apart"):
        embed_color(g, Embedding(np.array([[0.0], [0.5]]), 1.0), 1)
    with pytest.raises(ValueError, match="length"):
        embed_color(g, Embedding(np.array([[0.0], [3.0]]), 2.0), 1)


def test_embedding_file_roundtrip_and_errors():
    emb = grid_embedding([3, 2], 1.0)
    back = parse_embedding(format_embedding(emb), 6)
    assert np.array_equal(back.points, emb.points)
    for text, line in [("v 1 0 0\nv 2 1\n", 2), ("x\n", 1), ("v 1 a\n", 1)]:
        with pytest.raises(GraphFormatError) as info:
            parse_embedding(text)
        assert info.value.line == line


def test_grid_shapes():
    assert gen_grid([5]).num_edges == 4
    c4 = gen_grid([2, 2])
    assert c4.num_edges == 4 and all(c4.degree(v) == 2 for v in range(4))
    king = gen_grid([3, 3], diagonals=True)
    assert king.degree(4) == 8
    torus = gen_torus_grid(5, 6)
    assert all(torus.degree(v) == 4 for v in range(30))


def test_stretch_of_a_pendant_vertex_is_a_single_leaf():
    s = gen_stretch(gen_grid([2]), 3, 2)
    assert s.graph.n == 2 + 3 and s.graph.num_edges == 4
    assert len(connected_components(s.graph)) == 1


def test_stretched_grid_growth():
    d, k, p = 2, 6, 4
    s = gen_stretch(gen_grid([5, 5]), k, p)
    assert growth_check(s.graph, stretch_profile(d, k, p), range(0, 3)).passed
    assert growth_check(s.graph, stretch_profile(d, k, p), range(3, k + 1)).passed
    assert growth_check(s.graph, stretch_profile(d, k, p), range(k + 1, 3 * k)).passed


def test_growth_check_examples():
    assert growth_check(gen_grid([30]), lambda r: 2 * r + 1, range(10)).passed
    # complete binary-branching tree (degree 3) of depth 8
    edges, frontier, n = [], [0], 1
    for _ in range(8):
        nxt = []
        for v in frontier:
            for _ in range(2 if v else 3):
                edges.append((v, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    tree = unweighted(n, edges)
    rep = growth_check(tree, lambda r: (r + 1) ** 2, range(9), [0])
    assert not rep.passed and rep.worst[1] <= 6


def test_cactus_sizes_and_connectivity():
    assert gen_cactus(1).n == 1 and gen_cactus(1).num_edges == 0
    for seed in range(10):
        g = gen_cactus(300, seed)
        assert g.n == 300 and len(connected_components(g)) == 1
        # a cactus has at most floor(3(n-1)/2) edges
        assert g.num_edges <= 3 * (g.n - 1) // 2


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 300), st.integers(1, 5), st.integers(0, 10**6))
def test_partial_ktree_decompositions_validate(n, k, seed):
    g, td = gen_partial_ktree(n, k, seed)
    assert td.problems(g) == [] and td.width() <= k


def test_triangulation_is_planar_sized():
    g, pts = gen_planar_triangulation(500, 0)
    assert g.num_edges <= 3 * g.n - 6 and pts.shape == (500, 2)
    assert len(connected_components(g)) == 1
