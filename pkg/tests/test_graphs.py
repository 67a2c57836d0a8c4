import math

from essence_kit.diagram import BLACK, COLORS, WHITE, all_state
from essence_kit.graphs import (
    LabeledEdge,
    LabeledMultigraph,
    betti_1,
    checkerboard_surface_data,
    cut_components,
    definite_color_of_alternating,
    girth,
    is_adequate,
    is_homogeneous,
    shortest_cycle,
    state_graph,
    state_surface_data,
    tait_graph,
)


def _graph(*edges):
    es = tuple(LabeledEdge(k, u, v, label) for k, (u, v, label) in enumerate(edges))
    verts = tuple(sorted({x for u, v, _ in edges for x in (u, v)}))
    return LabeledMultigraph(verts, es)


def test_trefoil_tait_graphs(trefoil):
    black = tait_graph(trefoil, BLACK)
    assert (len(black.vertices), len(black.edges)) == (2, 3)
    assert girth(black) == 2 and betti_1(black) == 2
    assert is_adequate(black) and is_homogeneous(black)
    assert {e.label for e in black.edges} == {"A"}
    assert len(shortest_cycle(black)) == 2

    white = tait_graph(trefoil, WHITE)
    assert (len(white.vertices), len(white.edges)) == (3, 3)
    assert girth(white) == 3 and betti_1(white) == 1
    assert {e.label for e in white.edges} == {"B"}


def test_all_a_state_graph_is_black_tait_graph(trefoil):
    g = state_graph(trefoil, all_state(trefoil, "A"))
    assert (len(g.vertices), len(g.edges)) == (2, 3)
    assert girth(g) == 2
    assert girth(state_graph(trefoil, all_state(trefoil, "B"))) == 3


def test_kink_has_a_loop(fixture):
    kink = fixture("kink")
    graphs = [tait_graph(kink, c) for c in COLORS]
    assert sorted(is_adequate(g) for g in graphs) == [False, True]
    looped = next(g for g in graphs if not is_adequate(g))
    assert girth(looped) == 1
    bridge = next(g for g in graphs if is_adequate(g))
    assert math.isinf(girth(bridge))
    assert shortest_cycle(bridge) is None


def test_connected_sum_has_cut_vertices(fixture):
    for color in COLORS:
        decomp = cut_components(tait_graph(fixture("trefoil_sum"), color))
        assert len(decomp.cut_vertices) == 1
        assert len(decomp.blocks) == 2


def test_homogeneity_is_per_block():
    mixed = _graph((0, 1, "A"), (0, 1, "B"))
    assert not is_homogeneous(mixed)
    wedge = _graph((0, 1, "A"), (0, 1, "A"), (1, 2, "B"), (1, 2, "B"))
    assert is_homogeneous(wedge)
    assert cut_components(wedge).cut_vertices == (1,)
    assert cut_components(wedge).blocks == ((0, 1), (2, 3))


def test_loops_are_blocks_of_their_own():
    g = _graph((0, 0, "A"), (0, 1, "A"), (0, 1, "A"))
    decomp = cut_components(g)
    assert decomp.blocks == ((0,), (1, 2))
    assert girth(g) == 1
    assert not is_adequate(g)


def test_surface_data(trefoil):
    black = checkerboard_surface_data(trefoil, BLACK)
    assert (black.chi, black.boundary_components, black.orientable) == (-1, 1, True)
    white = checkerboard_surface_data(trefoil, WHITE)
    assert (white.chi, white.orientable) == (0, False)
    assert white.beta_1 == 1
    assert state_surface_data(trefoil, all_state(trefoil, "A")) == black


def test_definite_color(trefoil, fixture):
    assert definite_color_of_alternating(trefoil) == BLACK
    assert definite_color_of_alternating(fixture("p222")) is None
