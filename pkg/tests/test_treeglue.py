import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from asdim.centered import centered_bound
from asdim.cover import verify_coloring
from asdim.decomposition import RootedTreeDecomposition, compress, normalize
from asdim.generators import gen_grid, gen_partial_ktree, gen_random_tree
from asdim.metric import WeightedGraph, shortest_paths, unweighted
from asdim.treeglue import FStarParams, VertexCoverOracle, extend_coloring, fstar, tw_pipeline

from oracles import coloring_check


def path_td(n):
    return RootedTreeDecomposition.from_edges({i: {i, i + 1} for i in range(n - 1)},
                                              [(i, i + 1) for i in range(n - 2)], 0)


def test_fstar_base_value():
    p = FStarParams(2, 5.0, 2, 3)
    assert fstar(p, 0) == p.n_plus + p.n_theta_prime + p.n_theta + p.f1(p.N)
    assert p.n_plus == centered_bound(1, 0, 5.0)
    assert p.n_theta_prime == centered_bound(3, 6, 1)


def test_fstar_monotone_small_parameters():
    for ell, N, theta in itertools.product((1, 2, 3), (1.0, 2.0, 7.0), range(0, 4)):
        p = FStarParams(ell, N, 2, theta)
        values = [fstar(p, eta) for eta in range(7)]
        assert values == sorted(values) and all(v >= values[0] for v in values)


def test_fstar_rejects_bad_parameters():
    with pytest.raises(ValueError):
        FStarParams(1, 1.0, 1, 1)
    with pytest.raises(ValueError):
        fstar(FStarParams(1, 1.0, 2, 1), -1)


def test_whole_graph_precoloured():
    g = gen_grid([3])
    c = normalize(g, path_td(3), 1)
    col = extend_coloring(g, c, {0, 1, 2}, {0: 2, 1: 1, 2: 2}, 1, VertexCoverOracle(2), 2)
    assert col.colors == (2, 1, 2)
    assert col.bound == FStarParams(1, VertexCoverOracle(2).bound(1), 2, 1).n_theta_prime


def test_one_bag_passes_oracle_colouring_through():
    g = unweighted(4, itertools.combinations(range(4), 2))
    td = RootedTreeDecomposition({0: frozenset(range(4))}, {0: None}, 0)
    col = extend_coloring(g, normalize(g, td, 3), (), {}, 1, VertexCoverOracle(4), 2)
    rep = verify_coloring(g, col)
    assert rep.passed and rep.observed_bound <= 1


def test_precolouring_must_sit_near_root_bag():
    g = gen_grid([20])
    c = normalize(g, path_td(20), 1)
    with pytest.raises(ValueError, match="farther"):
        extend_coloring(g, c, {19}, {19: 1}, 1, VertexCoverOracle(2), 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**6), st.sampled_from([1, 2, 4]))
def test_partial_2trees_against_brute_force(n, seed, ell):
    g, td = gen_partial_ktree(n, 2, seed)
    col = tw_pipeline(g, td, ell)
    assert col.m == 2 and set(col.colors) <= {1, 2}
    ok, worst = coloring_check(g, col)
    assert ok
    assert verify_coloring(g, col).observed_bound == worst


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_precolouring_is_kept(n, seed, ell):
    rng = random.Random(seed)
    g, td = gen_partial_ktree(n, 2, seed)
    c = normalize(g, compress(td), 2)
    near = shortest_paths(g, c.td.bags[c.td.root], 3 * ell)
    Z = set(rng.sample(sorted(near), rng.randint(0, len(near))))
    c_Z = {z: rng.randint(1, 2) for z in Z}
    col = extend_coloring(g, c, Z, c_Z, ell, VertexCoverOracle(3), 2)
    assert all(col.colors[z] == c_Z[z] for z in Z)
    assert coloring_check(g, col)[0]


@pytest.mark.parametrize("seed", range(4))
def test_partial_2trees_up_to_400(seed):
    g, td = gen_partial_ktree(400, 2, seed)
    for ell in (1, 2, 4):
        col = tw_pipeline(g, td, ell)
        rep = verify_coloring(g, col)
        assert rep.passed, rep.failures[:1]
        theta = max(td.width(), 0)
        cert = fstar(FStarParams(ell, VertexCoverOracle(theta + 1).bound(ell), 2, theta), theta)
        assert rep.observed_bound <= col.bound <= cert


def test_random_trees():
    for seed, n in enumerate((10, 200, 2000)):
        g = gen_random_tree(n, seed)
        td = RootedTreeDecomposition.from_edges(
            {i: {u, v} for i, (u, v, _) in enumerate(g.edges)},
            _line_tree(g), 0)
        rep = verify_coloring(g, tw_pipeline(g, td, 1))
        assert rep.passed and rep.colours <= 2


def _line_tree(g):
    # bags are edges; join each edge bag to one earlier bag sharing a vertex
    first: dict[int, int] = {}
    out = []
    for i, (u, v, _) in enumerate(g.edges):
        if i:
            out.append((first.get(u, first.get(v)), i))
        first.setdefault(u, i)
        first.setdefault(v, i)
    return out


def test_path_bound_flat_in_n():
    seen = {verify_coloring(gen_grid([n]), tw_pipeline(gen_grid([n]), path_td(n), 1)).observed_bound
            for n in (100, 200, 400, 800)}
    assert len(seen) == 1


def test_clique_single_bag():
    for w in (1, 3, 5):
        g = unweighted(w + 1, itertools.combinations(range(w + 1), 2))
        td = RootedTreeDecomposition({0: frozenset(range(w + 1))}, {0: None}, 0)
        col = tw_pipeline(g, td, 1)
        rep = verify_coloring(g, col)
        assert rep.passed and rep.observed_bound <= 1 <= col.bound


def test_weighted_input_rejected():
    g = WeightedGraph(2, [(0, 1, 2.0)])
    with pytest.raises(ValueError):
        tw_pipeline(g, RootedTreeDecomposition({0: frozenset({0, 1})}, {0: None}, 0), 1)
