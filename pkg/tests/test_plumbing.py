import math

import networkx as nx
import pytest

from essence_kit.diagram import BLACK, WHITE, all_state
from essence_kit.essence import ess_c_report
from essence_kit.errors import DiagramValidationError, HypothesisError
from essence_kit.generators import random_alternating_diagram, random_tree
from essence_kit.graphs import LabeledEdge, LabeledMultigraph, betti_1, girth, tait_graph
from essence_kit.plumbing import (
    ComponentDatum,
    FactorNode,
    PlumbingTree,
    TwistedEdge,
    accept_cap,
    deplumb_graph,
    deplumb_state,
    find_diagrammatic_twisted_caps,
    hierarchical_twisted_deplumb,
    plumb_essence_lower_bound,
    plumbing_bound,
    shadow_pinch_data,
    tree_count_inequality,
    twisted_cap_datum,
    validate_twisted_plumbing,
)


def _core_with_six_annuli() -> LabeledMultigraph:
    """A triangle of A edges with two B digons hanging off each corner."""
    edges = [(0, 1, "A"), (1, 2, "A"), (0, 2, "A")]
    for k in range(6):
        edges += [(k % 3, 3 + k, "B")] * 2
    return LabeledMultigraph(
        tuple(range(9)), tuple(LabeledEdge(i, u, v, lab) for i, (u, v, lab) in enumerate(edges))
    )


def test_seven_factor_deplumbing():
    g = _core_with_six_annuli()
    tree = deplumb_graph(g)
    assert len(tree.nodes) == 7 and len(tree.edges) == 6
    assert tree.nodes[0].crossings == (0, 1, 2)
    assert [n.girth for n in tree.nodes] == [3] + [2] * 6
    assert all(e.u == 0 and not e.twisted for e in tree.edges)
    assert sum(n.chi for n in tree.nodes) - len(tree.edges) == len(g.vertices) - len(g.edges)
    assert sum(n.beta_1 for n in tree.nodes) == betti_1(g)
    bound = plumbing_bound(tree)
    assert (bound.value, bound.applicable, bound.tag) == (2, True, "T:PlumbEss")


def test_state_deplumbing(fixture):
    trefoil = fixture("trefoil")
    single = deplumb_state(trefoil, all_state(trefoil, "A"))
    assert len(single.nodes) == 1 and single.edges == ()
    composite = fixture("trefoil_sum")
    tree = deplumb_state(composite, all_state(composite, "A"))
    assert len(tree.nodes) == 2 and len(tree.edges) == 1
    assert min(n.girth for n in tree.nodes) == 2


def test_plumbing_tree_must_be_a_tree():
    node = FactorNode((0,), (0, 1), math.inf, True, True, 0, 1)
    with pytest.raises(DiagramValidationError):
        PlumbingTree((node, node), ())


def test_tree_inequality_equality_cases():
    assert tree_count_inequality(nx.path_graph(3)) == (8, 8, True)
    assert tree_count_inequality(nx.star_graph(3)) == (10, 10, True)
    with pytest.raises(DiagramValidationError):
        tree_count_inequality(nx.path_graph(2))
    with pytest.raises(DiagramValidationError):
        tree_count_inequality(nx.cycle_graph(4))


def test_tree_inequality_on_random_trees(rng):
    for _ in range(300):
        lhs, rhs, holds = tree_count_inequality(random_tree(rng.randint(2, 200), rng))
        assert holds and lhs >= rhs


def test_twisted_validator_cases():
    assert not validate_twisted_plumbing(1, 1, 5).passed
    assert validate_twisted_plumbing(1, 1, 6).passed
    too_wide = validate_twisted_plumbing(2, 3, 10)
    assert not too_wide.passed
    assert any("diameter" in v for v in too_wide.violations)
    assert validate_twisted_plumbing(0, 0, 2).passed


def test_validator_component_rules():
    assert not validate_twisted_plumbing(1, 1, 6, [ComponentDatum(1, 2)]).passed
    assert not validate_twisted_plumbing(1, 1, 6, [ComponentDatum(1, 1)]).passed
    assert not validate_twisted_plumbing(2, 2, 8, [ComponentDatum(2, 0)]).passed
    assert validate_twisted_plumbing(1, 1, 6, [ComponentDatum(1, 3), ComponentDatum(1, 3)]).passed
    assert validate_twisted_plumbing(1, 1, 6).as_dict()["pass"] is True


def test_shadow_pinch_data():
    assert shadow_pinch_data((0, 1), (5, 6)) == (0, (), 0, (ComponentDatum(0, 4),))
    m, tree, d, comps = shadow_pinch_data(range(5), range(10, 15))
    assert (m, d) == (3, 3)
    assert tree == ((0, 1), (1, 2), (2, 3))
    assert comps == (ComponentDatum(1, 3), ComponentDatum(2, 2), ComponentDatum(2, 2), ComponentDatum(1, 3))
    for r in range(1, 13):
        datum = twisted_cap_datum(0, tuple(range(r)), tuple(range(100, 100 + r)))
        assert datum.complexity == 2 * r and len(datum.points) == 2 * r
        assert datum.validate().passed


def test_cap_revisiting_a_region_is_rejected():
    datum = twisted_cap_datum(7, (0, 1, 2, 3), (5, 6, 5, 7))
    assert datum.defect == 3
    assert datum.pinch_tree == ((0, 1), (1, 2), (0, 2))
    check = datum.validate()
    assert not check.passed
    assert any("parity" in v for v in check.violations)
    assert any("tree" in v for v in check.violations)
    assert not accept_cap(datum)
    assert not accept_cap(twisted_cap_datum(7, (0, 1), (5, 5)))
    assert accept_cap(twisted_cap_datum(7, (0, 1, 2, 3), (5, 6, 8, 7)))


def test_trefoil_twisted_caps(trefoil):
    caps = find_diagrammatic_twisted_caps(trefoil, BLACK)
    assert [c.complexity for c in caps] == [2, 4, 4, 4]
    framing = caps[0]
    assert framing.kind == "cycle-framing" and framing.r == 1
    assert framing.white_region in {c.white_region for c in caps[1:]}
    assert all(c.kind == "facial" and c.r == 2 for c in caps[1:])
    assert all(c.validate().passed for c in caps)
    assert len(find_diagrammatic_twisted_caps(trefoil, BLACK, max_r=1)) == 1
    assert find_diagrammatic_twisted_caps(trefoil, WHITE) == []


def test_trefoil_twisted_hierarchy(trefoil):
    tree = hierarchical_twisted_deplumb(trefoil, BLACK)
    assert [n.kind for n in tree.nodes] == ["twisted-leaf", "factor"]
    assert [n.crossings for n in tree.nodes] == [(0, 1), (0, 2)]
    assert all(n.girth == 2 and n.beta_1 == 1 for n in tree.nodes)
    (edge,) = tree.edges
    assert edge.twisted and edge.complexity == 2
    assert edge.complexity == edge.ess_c == ess_c_report(trefoil, BLACK).value
    bound = plumbing_bound(tree)
    assert (bound.value, bound.applicable, bound.tag) == (2, True, "T:TwistedEss")


def test_hierarchy_threshold_stops_early(trefoil):
    stopped = hierarchical_twisted_deplumb(trefoil, BLACK, threshold=2)
    assert len(stopped.nodes) == 1 and stopped.edges == ()
    assert stopped.nodes[0].crossings == (0, 1, 2)
    assert len(hierarchical_twisted_deplumb(trefoil, BLACK, threshold=4).nodes) == 2


def test_random_hierarchies_keep_factor_cycles(rng):
    for _ in range(10):
        d = random_alternating_diagram(rng.randint(3, 9), rng)
        tree = hierarchical_twisted_deplumb(d, BLACK)
        assert len(tree.edges) == len(tree.nodes) - 1
        assert tree.nodes[-1].beta_1 <= max(1, betti_1(tait_graph(d, BLACK)))
        assert min(n.girth for n in tree.nodes) >= girth(tait_graph(d, BLACK))


def test_twisted_plumbing_needs_reduced_alternating(fixture):
    with pytest.raises(HypothesisError) as err:
        hierarchical_twisted_deplumb(fixture("p222"), BLACK)
    assert "alternating" in err.value.failed
    with pytest.raises(HypothesisError) as err:
        find_diagrammatic_twisted_caps(fixture("kink"), BLACK)
    assert "reduced" in err.value.failed


def test_plumb_essence_lower_bound():
    assert plumb_essence_lower_bound([3, 4]).value == 3
    twisted = plumb_essence_lower_bound([4, 4], [TwistedEdge(4, 4)])
    assert (twisted.value, twisted.applicable, twisted.tag) == (4, True, "T:TwistedEss")
    assert not plumb_essence_lower_bound([1, 5]).applicable
    assert not plumb_essence_lower_bound([4, 4], [TwistedEdge(6, 6)]).applicable
    assert not plumb_essence_lower_bound([4, 4], [TwistedEdge(4, 6)]).applicable
    assert not plumb_essence_lower_bound([4, 4], [TwistedEdge(4, 2)]).applicable
    with pytest.raises(DiagramValidationError):
        plumb_essence_lower_bound([])
