import pytest

from asdim.cover import verify_coloring
from asdim.decomposition import RootedTreeDecomposition
from asdim.generators import gen_grid, grid_column_td, grid_row_layering
from asdim.metric import WeightedGraph, unweighted
from asdim.minor import TorsoCertificate, check_torso, minor_pipeline, trivial_certificates


def grid_cert(side, shift=0):
    lay = {v + shift: layer for v, layer in grid_row_layering(side, side).items()}
    col = grid_column_td(side, side)
    td = RootedTreeDecomposition({t: frozenset(v + shift for v in b) for t, b in col.bags.items()},
                                 dict(col.parent), col.root)
    return TorsoCertificate(frozenset(), lay, td)


def test_disjoint_bags():
    g = unweighted(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    td = RootedTreeDecomposition.from_edges({0: {0, 1, 2}, 1: {3, 4, 5}}, [(0, 1)], 0)
    col = minor_pipeline(g, td, trivial_certificates(td), 1, 0, 3)
    assert col.m == 4 and verify_coloring(g, col).passed


def test_grid_as_one_bag_with_its_layering():
    side = 12
    g = gen_grid([side, side])
    td = RootedTreeDecomposition({0: frozenset(range(side * side))}, {0: None}, 0)
    col = minor_pipeline(g, td, {0: grid_cert(side)}, 1, 0, 2)
    rep = verify_coloring(g, col)
    assert rep.passed and rep.colours <= 4


def test_two_grids_glued_on_an_edge():
    side = 8
    a = gen_grid([side, side])
    n = side * side
    # second copy shares vertices 0 and 1 of the first
    shift = n - 2
    relabel = {0: 0, 1: 1} | {v: v + shift for v in range(2, n)}
    edges = list(a.edges) + [(relabel[u], relabel[v], 1.0) for u, v, _ in a.edges
                             if not {u, v} <= {0, 1}]
    g = WeightedGraph(2 * n - 2, edges)
    bag0 = frozenset(range(n))
    bag1 = frozenset(relabel.values())
    td = RootedTreeDecomposition.from_edges({0: bag0, 1: bag1}, [(0, 1)], 0)
    second = grid_cert(side)
    lay1 = {relabel[v]: x for v, x in second.layers.items()}
    td1 = RootedTreeDecomposition({t: frozenset(relabel[v] for v in b) for t, b in second.td.bags.items()},
                                  dict(second.td.parent), second.td.root)
    certs = {0: grid_cert(side), 1: TorsoCertificate(frozenset(), lay1, td1)}
    for ell in (1, 2):
        col = minor_pipeline(g, td, certs, ell, 2, 2)
        assert verify_coloring(g, col).passed


def test_apex_vertex_in_certificate():
    side = 6
    grid = gen_grid([side, side])
    hub = side * side
    g = WeightedGraph(hub + 1, list(grid.edges) + [(hub, v, 1.0) for v in range(hub)])
    td = RootedTreeDecomposition({0: frozenset(range(hub + 1))}, {0: None}, 0)
    cert = grid_cert(side)
    cert = TorsoCertificate(frozenset({hub}), cert.layers, cert.td)
    col = minor_pipeline(g, td, {0: cert}, 1, 1, 2)
    assert verify_coloring(g, col).passed


def test_certificate_errors_name_the_bag():
    g = gen_grid([4, 4])
    td = RootedTreeDecomposition({7: frozenset(range(16))}, {7: None}, 7)
    cert = grid_cert(4)
    with pytest.raises(ValueError, match="bag 7"):
        check_torso(g, td, 7, cert, 0, 1)
    bad = TorsoCertificate(frozenset(), {v: v for v in range(16)}, cert.td)
    with pytest.raises(ValueError, match="bag 7: torso layering"):
        check_torso(g, td, 7, bad, 0, 2)
    with pytest.raises(ValueError, match="bag 7 has no torso certificate"):
        minor_pipeline(g, td, {}, 1, 0, 2)
    too_many = TorsoCertificate(frozenset({0, 1}), cert.layers, cert.td)
    with pytest.raises(ValueError, match="bag 7: apex set has 2"):
        check_torso(g, td, 7, too_many, 1, 2)
