import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from asdim.cover import Cover, verify_coloring, verify_cover
from asdim.generators import gen_grid, gen_partial_ktree, grid_column_td, grid_row_layering
from asdim.layers import (Slab, bfs_layering, expanded_bound, format_layering, intrinsic_expand,
                          layered_tw_pipeline, layered_width, parity_combine, parse_layering, slabs)
from asdim.metric import GraphFormatError, WeightedGraph, is_lipschitz, r_components
from asdim.treeglue import tw_pipeline

P5, P20 = gen_grid([5]), gen_grid([20])


class IntervalOracle:
    """One family: the r-components of the slab (an interval on paths)."""

    def bound(self, r, width):
        return width

    def __call__(self, sub, ids, r, width):
        return Cover.build(r, [r_components(sub, range(sub.n), r).parts], width, "interval")


def test_bfs_layering_examples():
    assert bfs_layering(P5, 2)[2] == 0
    assert [bfs_layering(P5, 0)[v] for v in range(5)] == [0, 1, 2, 3, 4]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6))
def test_bfs_layering_is_lipschitz(n, seed):
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    g = WeightedGraph(n, [(u, v, rng.choice([0.5, 1, 2.5])) for u, v in
                          rng.sample(pairs, rng.randint(0, len(pairs)))])
    assert is_lipschitz(g, bfs_layering(g, 0)) is None


def test_slab_examples():
    L = bfs_layering(P5, 0)
    assert len(slabs(P5, L, 100)) == 1
    cores = [set(s.core) for s in slabs(P5, L, 2)]
    assert cores == [{0, 1}, {2, 3}, {4}]
    shifted = slabs(P5, L, 2, offset=2)
    assert [set(s.core) for s in shifted] == [{0, 1}, {2, 3}, {4}]
    assert [s.index for s in shifted] == [-1, 0, 1]
    collared = slabs(P5, L, 2, r=1)
    assert set(collared[1].expanded) == {1, 2, 3, 4}


def test_expanded_bound_symbolic():
    r, S = sympy.symbols("r S", positive=True)
    D = sympy.Function("D")
    assert expanded_bound(D, r, S) == D(r, S + 2 * r)
    assert expanded_bound(lambda a, b: a * b + 1, 2, 3) == 15


def test_intrinsic_expand_examples():
    L = bfs_layering(P20, 0)
    whole = Slab(0, 0, 100, frozenset(range(20)), frozenset(range(20)))
    cov = intrinsic_expand(P20, L, whole, IntervalOracle(), 1, 100)
    assert cov.families == IntervalOracle()(P20, list(range(20)), 1, 102).families
    first = slabs(P20, L, 3, r=1)[1]
    cov = intrinsic_expand(P20, L, first, IntervalOracle(), 1, 3, check=True)
    assert cov.certified_bound == 5 and cov.sets() == [frozenset({3, 4, 5})]


def test_parity_combine_examples():
    L = bfs_layering(P5, 0)
    cov = parity_combine(P5, L, 1, 10, IntervalOracle())
    assert cov.num_families == 2 and cov.families[1] == ()
    L = bfs_layering(P20, 0)
    cov = parity_combine(P20, L, 1, 2, IntervalOracle())
    assert cov.num_families == 2 and verify_cover(P20, cov).passed
    cores = [set(s.core) for s in slabs(P20, L, 2)]
    assert all(any(s <= c for c in cores) for s in cov.sets())
    with pytest.raises(ValueError):
        parity_combine(P20, L, 3, 2, IntervalOracle())


def test_layered_tw_on_single_layer_matches_tw_shape():
    g, td = gen_partial_ktree(60, 2, 3)
    col = layered_tw_pipeline(g, {v: 0 for v in range(g.n)}, td, 1)
    assert col.m == 4 and verify_coloring(g, col).passed
    assert set(tw_pipeline(g, td, 1).colors) <= {1, 2}


@pytest.mark.parametrize("side", [10, 25])
def test_layered_tw_on_grids(side):
    g = gen_grid([side, side])
    lay, td = grid_row_layering(side, side), grid_column_td(side, side)
    assert layered_width(td, lay)[0] == 2
    for ell in (1, 2):
        col = layered_tw_pipeline(g, lay, td, ell, check=True)
        rep = verify_coloring(g, col)
        assert rep.passed and col.m == 4 and rep.colours <= 4


def test_layered_tw_rejects_bad_inputs():
    g = gen_grid([4, 4])
    td = grid_column_td(4, 4)
    with pytest.raises(ValueError, match="not a layering"):
        layered_tw_pipeline(g, {v: v for v in range(16)}, td, 1)
    with pytest.raises(ValueError, match="meets layer"):
        layered_tw_pipeline(g, grid_row_layering(4, 4), td, 1, w=1)


def test_layering_file_roundtrip_and_errors():
    lay = grid_row_layering(3, 4)
    assert parse_layering(format_layering(lay), 12) == lay
    for text, line in [("v 1\n", 1), ("c x\nv 1 0\nv 1 2\n", 3), ("v 13 0\n", 1), ("v a 0\n", 1)]:
        with pytest.raises(GraphFormatError) as info:
            parse_layering(text, 12)
        assert info.value.line == line
