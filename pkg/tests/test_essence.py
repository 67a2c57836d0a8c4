import math

import pytest

from essence_kit.capsearch import CapAssembly, CapSearchResult, CapVerdict, Strata
from essence_kit.diagram import BLACK, WHITE, State, all_state, parse_diagram, resolve_state
from essence_kit.errors import HypothesisError, IntegrityError
from essence_kit.essence import (
    Bounds,
    Certificate,
    EssenceReport,
    check_cycle_witness,
    checkerboard_bounds_report,
    checkerboard_state,
    combine_bounds,
    end_essential_report,
    ess_c_report,
    essence_alternating_checkerboard,
    essence_state_surface,
)
from essence_kit.graphs import tait_graph
from essence_kit.plumbing import PlumbBound

CERT = Certificate("test", "given")


def _capsearch(l_count: int, mode: str = "geometric") -> CapSearchResult:
    strata = Strata(mode, 1, 0, ((),), {}, 0)
    cap = CapAssembly((), mode, (), l_count, 1)
    return CapSearchResult(BLACK, mode, 1, 0, strata, ((cap, CapVerdict(True, l_count, True)),), None)


def test_trefoil_values(trefoil):
    black = essence_alternating_checkerboard(trefoil, BLACK)
    assert black.exact and black.ess.lower == 2
    assert black.summary() == "ess = ess_g = 2 (T:CBEss; cycle c1c2)"
    white = essence_alternating_checkerboard(trefoil, WHITE)
    assert white.ess.lower == white.ess_g.lower == 3
    assert white.summary().startswith("ess = ess_g = 3 (T:CBEss")


def test_report_json(trefoil):
    out = essence_alternating_checkerboard(trefoil, BLACK).as_dict()
    assert out["ess"] == out["ess_g"]
    assert out["ess"]["lower"] == out["ess"]["upper"] == 2
    assert out["certificates"][0] == {
        "tag": "T:CBEss",
        "statement": "girth of the black Tait graph equals the Goeritz minimum",
        "cycle": [1, 2],
    }


def test_exact_theorem_hypotheses(fixture):
    with pytest.raises(HypothesisError) as err:
        essence_alternating_checkerboard(fixture("kink"), BLACK)
    assert "reduced" in err.value.failed
    with pytest.raises(HypothesisError) as err:
        essence_alternating_checkerboard(fixture("p222"), BLACK)
    assert err.value.failed == ("alternating",)
    with pytest.raises(HypothesisError) as err:
        essence_alternating_checkerboard(fixture("torus_grid"), BLACK)
    assert "genus_0" in err.value.failed


def test_cycle_witness(trefoil):
    black = tait_graph(trefoil, BLACK)
    assert check_cycle_witness(black, (0, 1))
    assert not check_cycle_witness(black, (0, 1, 2))
    assert not check_cycle_witness(black, (0,))
    assert not check_cycle_witness(black, ())


def test_state_surface_reports(fixture):
    fig8 = fixture("fig8")
    report = essence_state_surface(fig8, all_state(fig8, "A"))
    assert report.exact and report.layering == "some"
    assert report.ess.lower_cert.tag == "C:StateEss"
    assert "[some layering]" in report.summary()

    kink = fixture("kink")
    reports = [essence_state_surface(kink, all_state(kink, x)) for x in "AB"]
    assert sorted(r.inconclusive for r in reports) == [False, True]
    stuck = next(r for r in reports if r.inconclusive)
    assert stuck.failed == ("adequate",)
    assert stuck.summary() == "inconclusive: adequate failed"


def test_checkerboard_state_is_the_all_a_state(trefoil):
    assert checkerboard_state(trefoil, BLACK) == all_state(trefoil, "A")
    assert checkerboard_state(trefoil, WHITE) == all_state(trefoil, "B")


def test_bounds_only_fallback(fixture):
    kink = fixture("kink")
    reports = [checkerboard_bounds_report(kink, c) for c in (BLACK, WHITE)]
    assert not any(r.exact for r in reports)
    assert all("reduced" in r.failed for r in reports)
    assert sorted(r.inconclusive for r in reports) == [False, True]
    bounded = next(r for r in reports if not r.inconclusive)
    assert math.isinf(bounded.ess.lower)
    assert bounded.notes[0] == "bounds only: reduced failed"


def test_ess_c_reports(trefoil):
    black = ess_c_report(trefoil, BLACK)
    assert black.beta_1 == 2
    assert black.value == 2
    assert black.bounds.upper == 2
    assert black.bounds.upper_cert.tag in ("P:EssC", "P:EssCBound")
    assert len(black.caps) == 4

    white = ess_c_report(trefoil, WHITE)
    assert white.beta_1 == 1
    assert white.bounds.exact and math.isinf(white.bounds.lower)
    assert white.bounds.lower_cert.tag == "D:Hierarchy"
    assert white.as_dict()["bounds"]["lower"] == "inf"


def test_bounds_invariants():
    with pytest.raises(IntegrityError):
        Bounds(3)
    with pytest.raises(IntegrityError):
        Bounds(None, 3)
    with pytest.raises(IntegrityError):
        Bounds(5, 3, CERT, CERT)
    b = Bounds(2, lower_cert=CERT).raise_lower(1, CERT).cut_upper(4, CERT)
    assert (b.lower, b.upper, b.exact) == (2, 4, False)
    assert b.text("ess") == "ess >= 2, ess <= 4"
    assert Bounds().text("ess") == "ess unknown"


def test_report_keeps_ess_below_ess_g():
    with pytest.raises(IntegrityError):
        EssenceReport("s", ess=Bounds(5, lower_cert=CERT), ess_g=Bounds(None, 3, upper_cert=CERT))


def test_combine_with_ess_c(trefoil):
    white = essence_alternating_checkerboard(trefoil, WHITE)
    combined = combine_bounds(white, ess_c=ess_c_report(trefoil, WHITE).bounds)
    assert combined.exact and combined.ess.lower == 3

    report = EssenceReport("s", ess_g=Bounds(2, lower_cert=CERT))
    combined = combine_bounds(report, ess_c=Bounds(6, lower_cert=CERT))
    assert combined.ess.lower == 2
    assert combined.ess.lower_cert.tag == "P:(1)(2)"

    exact_g = EssenceReport("s", ess_g=Bounds(3, 3, CERT, CERT))
    combined = combine_bounds(exact_g, ess_c=Bounds(6, lower_cert=CERT))
    assert combined.exact and combined.ess.lower == 3


def test_combine_with_plumbing():
    report = EssenceReport("s", failed=("homogeneous",))
    assert report.inconclusive
    combined = combine_bounds(report, plumbing=PlumbBound(3, True))
    assert combined.ess.lower == 3 and combined.ess.lower_cert.tag == "T:PlumbEss"
    assert combined.failed == ()
    skipped = combine_bounds(report, plumbing=PlumbBound(None, False, "factor bound 1 < 2"))
    assert skipped.ess.lower is None
    assert skipped.notes == ("T:PlumbEss not applicable: factor bound 1 < 2",)


def test_combine_with_caps():
    combined = combine_bounds(EssenceReport("s"), capsearch=[_capsearch(2)])
    assert combined.ess.upper == 2 and combined.ess_g.upper == 2
    algebraic = combine_bounds(EssenceReport("s"), capsearch=[_capsearch(2, "algebraic")])
    assert algebraic.ess.upper == 2 and math.isinf(algebraic.ess_g.upper)
    certified = EssenceReport("s", ess=Bounds(4, 4, CERT, CERT), ess_g=Bounds(4, 4, CERT, CERT))
    with pytest.raises(IntegrityError):
        combine_bounds(certified, capsearch=[_capsearch(2)])


def test_end_essential_verdicts(fixture):
    grid = fixture("torus_grid")
    verdict = end_essential_report(grid, all_state(grid, "A"))
    assert (verdict.verdict, verdict.theorem) == ("end-essential", "T:Endess")
    assert verdict.disk_bounded

    kinked = fixture("torus_kink")
    stuck = end_essential_report(kinked, all_state(kinked, "A"))
    assert stuck.verdict == "inconclusive"
    assert not stuck.nugatory_free and not stuck.adequate
    assert "nugatory_free" in stuck.failed and "adequate" in stuck.failed

    trefoil = fixture("trefoil")
    sphere = end_essential_report(trefoil, all_state(trefoil, "A"))
    assert (sphere.verdict, sphere.theorem) == ("pi1-essential", "T:ozawafkp")


def test_end_essential_without_cellularity():
    thick = parse_diagram("genus 2\nX 6 3 1 4 / X 4 1 5 2 / X 2 5 3 6")
    verdict = end_essential_report(thick, all_state(thick, "A"))
    assert not verdict.cellular
    assert (verdict.verdict, verdict.theorem) == ("end-essential", "T:EndEssH")
    assert verdict.as_dict()["genus"] == 2


def test_end_essential_needs_disk_bounded_circles(fixture):
    grid = fixture("torus_grid")
    assert resolve_state(grid, all_state(grid, "A")).disk_bounded == (True, True)
    mixed = State(tuple("AABB"))
    assert resolve_state(grid, mixed).disk_bounded == (False, False)
    verdict = end_essential_report(grid, mixed)
    assert (verdict.verdict, verdict.theorem) == ("inconclusive", None)
    assert verdict.failed == ("disk_bounded",)
    assert verdict.as_dict()["disk_bounded"] is False
