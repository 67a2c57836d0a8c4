import networkx as nx
import orjson
import pytest

from essence_kit.diagram import COLORS, classify_diagram, diagram_to_json, is_alternating
from essence_kit.errors import DiagramParseError, DiagramValidationError, UsageError
from essence_kit.generators import (
    PlanarMap,
    diagram_from_text,
    fixture_names,
    load_fixture,
    medial_diagram,
    pretzel_diagram,
    random_alternating_diagram,
    random_planar_map,
    random_tree,
    read_diagram,
    theta_map,
    wheel_map,
)
from essence_kit.graphs import girth, tait_graph


def test_digon_medial_is_hopf_link():
    hopf = medial_diagram(PlanarMap.digon())
    assert hopf.n == 2
    assert hopf.component_count == 2
    assert is_alternating(hopf)


def test_random_maps_are_planar(rng):
    for _ in range(20):
        pmap = random_planar_map(rng.randint(2, 15), rng)
        assert nx.is_connected(pmap.to_networkx())
        assert len(pmap.faces()) == pmap.edge_count - len(pmap.rotation) + 2


def test_random_alternating_diagrams(rng):
    for n in range(2, 13):
        d = random_alternating_diagram(n, rng)
        flags = classify_diagram(d)
        assert d.n == n
        assert flags.alternating and flags.reduced and flags.connected
        assert flags.genus == 0
        assert all(len({e.label for e in tait_graph(d, c).edges}) == 1 for c in COLORS)


def test_wheel_medials():
    borromean = medial_diagram(wheel_map(3))
    assert borromean.n == 6 and borromean.component_count == 3
    for color in COLORS:
        g = tait_graph(borromean, color)
        assert (len(g.vertices), len(g.edges), girth(g)) == (4, 6, 3)
    knot = medial_diagram(wheel_map(4))
    assert knot.n == 8 and knot.component_count == 1
    assert all(girth(tait_graph(knot, c)) == 3 for c in COLORS)


def test_theta_and_pretzel():
    pmap, paths = theta_map((1, 2, 3))
    assert [len(p) for p in paths] == [1, 2, 3]
    assert pmap.edge_count == 6
    assert is_alternating(pretzel_diagram((2, 2, 2), flip_middle=False))
    flipped = pretzel_diagram((3, 3, 3))
    assert flipped.n == 9 and not is_alternating(flipped)
    with pytest.raises(UsageError):
        theta_map((0, 1, 1))


def test_chords_must_join_distinct_vertices():
    pmap = PlanarMap.digon(3)
    with pytest.raises(DiagramValidationError):
        pmap.add_chord(0, 2)


def test_random_trees(rng):
    assert nx.is_tree(random_tree(1, rng))
    for _ in range(20):
        edges = rng.randint(2, 30)
        t = random_tree(edges, rng)
        assert nx.is_tree(t) and t.number_of_edges() == edges
    with pytest.raises(UsageError):
        random_tree(0, rng)
    with pytest.raises(UsageError):
        random_planar_map(1, rng)


def test_fixture_loading(settings):
    names = fixture_names(settings)
    assert {"trefoil", "p222", "borromean", "8_18"} <= set(names)
    with pytest.raises(UsageError):
        load_fixture("no_such_knot", settings)


def test_json_input(tmp_path, trefoil):
    path = tmp_path / "trefoil.json"
    path.write_bytes(orjson.dumps(diagram_to_json(trefoil)))
    assert read_diagram(path).crossings == trefoil.crossings
    assert diagram_from_text('{"crossings": [[4, 1, 3, 2], [2, 3, 1, 4]]}').n == 2
    with pytest.raises(DiagramParseError):
        diagram_from_text("{oops")
