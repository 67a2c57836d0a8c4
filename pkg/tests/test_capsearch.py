from itertools import combinations

import pytest

from essence_kit.capsearch import (
    ABOVE,
    BELOW,
    SIDES,
    CapAssembly,
    CapVerdict,
    TraceStep,
    boundary_word,
    build_decomposition,
    chords_cross,
    dump_strata,
    enumerate_subdisks,
    _subdisk_embedded,
    fake_cap_filters,
    find_bounded_height_caps,
    pick_cap,
    pruning_heights,
    reduce_cyclic_word,
)
from essence_kit.diagram import BLACK, COLORS, WHITE
from essence_kit.errors import BudgetExceeded, DiagramValidationError, HypothesisError, IntegrityError


def test_decomposition_of_trefoil(trefoil):
    decomp = build_decomposition(trefoil, BLACK)
    assert len(decomp.black_disks) == 2
    assert len(decomp.white_disks) == 3
    assert len(decomp.surface_disks) == 2 and len(decomp.cap_disks) == 3
    assert len(decomp.vertical_arcs) == 3


def test_decomposition_needs_crossings(fixture):
    with pytest.raises(DiagramValidationError):
        build_decomposition(fixture("unknot"), BLACK)


@pytest.mark.parametrize("name", ["trefoil", "fig8", "6_2", "8_18"])
def test_alternating_knots_have_empty_height_zero(fixture, settings, name):
    for color in COLORS:
        result = find_bounded_height_caps(build_decomposition(fixture(name), color), 1, "geometric", 0, settings)
        assert result.strata.count(0) == 0
        assert not result.compressible
        assert result.certificate.startswith("height-0 stratum is empty")


def test_pretzel_strata(fixture, settings):
    result = find_bounded_height_caps(build_decomposition(fixture("p222"), BLACK), 2, "geometric", 0, settings)
    assert result.strata.count(0) > 0
    assert result.strata.count(1) > 0
    assert result.strata.count(2) == 0
    assert result.summary() == "h0: >0, h1: >0, h2: 0 — incompressible ≤ height 2"
    assert result.as_json()["strata"][2] == 0


def test_three_twist_pretzel_has_no_height_one_subdisks(fixture, settings):
    strata = enumerate_subdisks(build_decomposition(fixture("p333"), BLACK), 1, "geometric", 0, settings)
    assert strata.count(0) > 0
    assert strata.count(1) == 0


def test_boundary_mode_adds_link_touch_bigons(fixture, settings):
    # the two faces across the summing edges meet along a second edge
    for color in COLORS:
        decomp = build_decomposition(fixture("trefoil_sum"), color)
        geometric = enumerate_subdisks(decomp, 0, "geometric", 0, settings)
        boundary = enumerate_subdisks(decomp, 0, "boundary", 2, settings)
        assert boundary.count(0) > geometric.count(0)
        assert any(j.kind == "L" for s in boundary.layers[0] for j in s.junctions)
        assert set(geometric.layers[0]) <= set(boundary.layers[0])


def test_algebraic_mode_lets_boundary_arcs_cross(fixture):
    decomp = build_decomposition(fixture("8_18"), BLACK)
    relaxed = 0
    for side in SIDES:
        by_face = {}
        for j in decomp.junctions(with_link=False):
            f, p = decomp.surface_end(j, side)
            by_face.setdefault(f, []).append((p, j))
        for corners in by_face.values():
            for (_, a), (_, b), (_, c), (_, d) in combinations(sorted(corners), 4):
                if len({a.index, b.index, c.index, d.index}) < 4:
                    continue
                # boundary arcs (a, c) and (b, d) interleave in the hub disk
                seq = [d, a, c, b]
                faces = [decomp.cap_end(d)[0], decomp.cap_end(c)[0]]
                assert not _subdisk_embedded(decomp, side, seq, faces, "geometric")
                relaxed += _subdisk_embedded(decomp, side, seq, faces, "algebraic")
    assert relaxed > 0


def test_algebraic_mode_finds_at_least_the_geometric_strata(fixture, settings):
    decomp = build_decomposition(fixture("p222"), BLACK)
    geometric = enumerate_subdisks(decomp, 1, "geometric", 0, settings)
    algebraic = enumerate_subdisks(decomp, 1, "algebraic", 0, settings)
    for side in (ABOVE, BELOW):
        assert set(geometric.levels[side]) <= set(algebraic.levels[side])


def test_dump_strata_shape(fixture, settings):
    dump = dump_strata(build_decomposition(fixture("p222"), BLACK), 1, settings=settings)
    assert [layer["height"] for layer in dump["strata"]] == [0, 1]
    assert dump["strata"][0]["count"] > 0
    assert set(dump["interfaces"]) == {ABOVE, BELOW}


def test_small_budget_stops_cap_assembly(fixture, settings):
    decomp = build_decomposition(fixture("p333"), WHITE)
    nodes = enumerate_subdisks(decomp, 2, "geometric", 0, settings).nodes
    tight = settings.model_copy(update={"node_budget": nodes + 500})
    result = find_bounded_height_caps(decomp, 2, "geometric", 0, tight)
    assert result.budget_exceeded
    assert result.certificate is None
    assert result.as_json()["budget_exceeded"] is True


def test_node_budget_is_enforced(fixture, settings):
    tight = settings.model_copy(update={"node_budget": 1})
    with pytest.raises(BudgetExceeded):
        find_bounded_height_caps(build_decomposition(fixture("p222"), BLACK), 2, "geometric", 0, tight)


def test_unknown_mode_and_negative_height(trefoil, settings):
    decomp = build_decomposition(trefoil, BLACK)
    with pytest.raises(DiagramValidationError):
        enumerate_subdisks(decomp, 1, "sideways", 0, settings)
    with pytest.raises(DiagramValidationError):
        enumerate_subdisks(decomp, -1, "geometric", 0, settings)


def test_chords_cross():
    assert chords_cross(0, 2, 1, 3, 4)
    assert not chords_cross(0, 1, 2, 3, 4)
    assert not chords_cross(0, 2, 2, 3, 4)


def test_reduce_cyclic_word():
    assert reduce_cyclic_word([(1, 1), (2, 1), (2, -1), (1, -1)]) == ()
    assert reduce_cyclic_word([(1, 1), (2, 1), (1, -1)]) == ((2, 1),)
    assert reduce_cyclic_word([(1, 1), (2, 1)]) == ((1, 1), (2, 1))


def test_pruning_heights():
    assert pruning_heights([None, 0, 1, 2, 3]) == [0, 1, 2, 1, 0]
    assert pruning_heights([None, 0, 0, 0]) == [1, 0, 0, 0]
    assert pruning_heights([None]) == [0]


def _assembly(*trace, closed=True):
    l_count = sum(1 for s in trace if s.kind == "L")
    return CapAssembly((), "geometric", tuple(trace), l_count, 0, closed)


def test_fake_cap_filters():
    odd = _assembly(TraceStep("L", 0), TraceStep("v", 1, 1))
    assert fake_cap_filters(odd, CapVerdict(True, 1, False, fake=True)) == ("odd-L-count",)

    strung = _assembly(TraceStep("L", 0), TraceStep("v", 1, 1), TraceStep("L", 2), TraceStep("v", 2, 1))
    assert fake_cap_filters(strung, CapVerdict(True, 2, False, fake=True)) == ("essential-string",)

    assert fake_cap_filters(strung, CapVerdict(True, 2, True)) == ()


def test_boundary_word_of_trace():
    cap = _assembly(TraceStep("v", 0, 1), TraceStep("v", 1, 1), TraceStep("v", 1, -1), TraceStep("v", 0, -1))
    assert boundary_word(cap) == ((), False)
    loop = _assembly(TraceStep("v", 0, 1), TraceStep("v", 1, 1))
    assert boundary_word(loop) == (((0, 1), (1, 1)), True)
    with pytest.raises(HypothesisError):
        boundary_word(_assembly(TraceStep("v", 0, 1), closed=False))


def test_open_assembly_cannot_be_essential():
    with pytest.raises(IntegrityError):
        CapVerdict(False, 0, True)


def test_pick_cap_prefers_essential_over_earlier_fake():
    fake = (_assembly(TraceStep("v", 0, 1), TraceStep("v", 0, -1)), CapVerdict(True, 0, False, fake=True))
    real = (_assembly(TraceStep("v", 0, 1), TraceStep("v", 1, 1)), CapVerdict(True, 0, True, ((0, 1), (1, 1))))
    assert pick_cap(iter([fake, real])) == (real, False)
    assert pick_cap([fake]) == (fake, False)
    assert pick_cap([]) == (None, False)

    def runs_out():
        yield fake
        raise BudgetExceeded("out of nodes", 7)

    assert pick_cap(runs_out()) == (fake, True)
