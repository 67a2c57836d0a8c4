# essence_kit/essence.py
"""Essence reports: exact values, certified bounds and end-essential verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import networkx as nx

from essence_kit.capsearch import CapSearchResult
from essence_kit.diagram import (
    LinkDiagram,
    State,
    checkerboard_coloring,
    classify_diagram,
    crossing_names,
    resolve_state,
    tait_label,
)
from essence_kit.errors import HypothesisError, IntegrityError
from essence_kit.goeritz import definite_form, form_minimum, goeritz_matrix
from essence_kit.graphs import (
    LabeledMultigraph,
    betti_1,
    girth,
    is_adequate,
    is_homogeneous,
    shortest_cycle,
    state_graph,
    tait_graph,
)
from essence_kit.logconf import logging
from essence_kit.plumbing import PlumbBound, TwistedCapDatum, find_diagrammatic_twisted_caps

log = logging.getLogger(__name__)

COMPLETENESS_NOTE = "exact modulo cap-family completeness"
LAYERING_NOTE = "equality holds for some layering of the state disks; the lower bound holds for every layering"


def _fmt(x: float | None) -> str:
    if x is None:
        return "?"
    return "∞" if math.isinf(x) else str(int(x))


def _json_num(x: float | None):
    if x is None:
        return None
    return "inf" if math.isinf(x) else int(x)


@dataclass(frozen=True)
class Certificate:
    tag: str
    statement: str
    cycle: tuple[int, ...] = ()  # crossings of a witnessing cycle

    def as_dict(self) -> dict:
        out = {"tag": self.tag, "statement": self.statement}
        if self.cycle:
            out["cycle"] = [c + 1 for c in self.cycle]
        return out


@dataclass(frozen=True)
class Bounds:
    lower: float | None = None
    upper: float = math.inf
    lower_cert: Certificate | None = None
    upper_cert: Certificate | None = None

    def __post_init__(self):
        if self.lower is not None and self.lower_cert is None:
            raise IntegrityError("lower bound without a certificate")
        if not math.isinf(self.upper) and self.upper_cert is None:
            raise IntegrityError("finite upper bound without a certificate")
        if self.lower is not None and self.lower > self.upper:
            raise IntegrityError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower == self.upper

    def raise_lower(self, value: float, cert: Certificate) -> "Bounds":
        if self.lower is not None and self.lower >= value:
            return self
        return replace(self, lower=value, lower_cert=cert)

    def cut_upper(self, value: float, cert: Certificate) -> "Bounds":
        if value >= self.upper:
            return self
        return replace(self, upper=value, upper_cert=cert)

    def certificates(self) -> list[Certificate]:
        return [c for c in (self.lower_cert, self.upper_cert) if c is not None]

    def text(self, name: str) -> str:
        if self.exact:
            return f"{name} = {_fmt(self.lower)}"
        if self.lower is None and math.isinf(self.upper):
            return f"{name} unknown"
        parts = []
        if self.lower is not None:
            parts.append(f"{name} >= {_fmt(self.lower)}")
        if not math.isinf(self.upper):
            parts.append(f"{name} <= {_fmt(self.upper)}")
        return ", ".join(parts)

    def as_dict(self) -> dict:
        return {
            "lower": _json_num(self.lower),
            "upper": _json_num(self.upper),
            "exact": self.exact,
            "certificates": [c.as_dict() for c in self.certificates()],
        }


@dataclass(frozen=True)
class EssenceReport:
    surface: str
    ess: Bounds = field(default_factory=Bounds)
    ess_g: Bounds = field(default_factory=Bounds)
    ess_c: Bounds | None = None
    layering: str | None = None
    failed: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        # ess <= ess_g for every spanning surface
        if self.ess.lower is not None and self.ess.lower > self.ess_g.upper:
            raise IntegrityError(f"ess >= {self.ess.lower} contradicts ess_g <= {self.ess_g.upper}")

    @property
    def exact(self) -> bool:
        return self.ess.exact

    @property
    def inconclusive(self) -> bool:
        return bool(self.failed) and self.ess.lower is None

    def summary(self) -> str:
        if self.inconclusive:
            return f"inconclusive: {', '.join(self.failed)} failed"
        certs = self.ess.certificates()
        tag = certs[0] if certs else None
        detail = ""
        if tag is not None:
            detail = f" ({tag.tag}" + (f"; cycle {crossing_names(tag.cycle)}" if tag.cycle else "") + ")"
        if self.ess.exact and self.ess_g.exact and self.ess_g.lower == self.ess.lower:
            head = f"ess = ess_g = {_fmt(self.ess.lower)}"
        else:
            head = self.ess.text("ess")
        if self.layering:
            head += f" [{self.layering} layering]"
        return head + detail

    def as_dict(self) -> dict:
        out = {
            "surface": self.surface,
            "ess": self.ess.as_dict(),
            "ess_g": self.ess_g.as_dict(),
            "exact": self.exact,
            "failed": list(self.failed),
            "notes": list(self.notes),
            "certificates": [c.as_dict() for b in (self.ess, self.ess_g) for c in b.certificates()],
        }
        if self.ess_c is not None:
            out["ess_c"] = self.ess_c.as_dict()
        if self.layering:
            out["layering"] = self.layering
        return out


def _hypotheses(diagram: LinkDiagram) -> tuple[str, ...]:
    flags = classify_diagram(diagram)
    checks = {
        "connected": flags.connected,
        "reduced": flags.reduced,
        "alternating": flags.alternating,
        "genus_0": flags.genus == 0,
    }
    return tuple(name for name, ok in checks.items() if not ok)


def check_cycle_witness(graph: LabeledMultigraph, cycle: Sequence[int]) -> bool:
    """Do these edge keys form a single cycle of ``graph``?"""
    if not cycle:
        return False
    sub = graph.subgraph(cycle)
    if len(sub.edges) != len(set(cycle)):
        return False
    if len(sub.edges) == 1:
        return sub.edges[0].is_loop
    g = sub.to_networkx()
    return nx.is_connected(g) and all(d == 2 for _, d in g.degree())


def essence_alternating_checkerboard(diagram: LinkDiagram, color: str) -> EssenceReport:
    failed = _hypotheses(diagram)
    if failed:
        raise HypothesisError(
            f"exact checkerboard essence needs a connected reduced alternating diagram on the sphere ({', '.join(failed)} failed)",
            failed,
        )
    tait = tait_graph(diagram, color)
    cycle = shortest_cycle(tait) or ()
    by_girth = girth(tait)
    by_form = form_minimum(definite_form(goeritz_matrix(diagram, color)))
    if by_girth != by_form:
        raise IntegrityError(f"Tait girth {by_girth} differs from Goeritz minimum {by_form} on the {color} surface")
    log.info("✅ %s surface: girth = form minimum = %s", color, _fmt(by_girth))
    cert = Certificate("T:CBEss", f"girth of the {color} Tait graph equals the Goeritz minimum", tuple(cycle))
    exact = Bounds(by_girth, by_girth, cert, cert)
    return EssenceReport(f"{color} checkerboard surface", ess=exact, ess_g=exact)


def essence_state_surface(diagram: LinkDiagram, state: State) -> EssenceReport:
    g = state_graph(diagram, state)
    surface = f"state surface {state}"
    failed = tuple(
        name for name, ok in (("adequate", is_adequate(g)), ("homogeneous", is_homogeneous(g))) if not ok
    )
    if failed:
        return EssenceReport(surface, failed=failed)
    n = girth(g)
    cert = Certificate("C:StateEss", "girth of the adequate homogeneous state graph", shortest_cycle(g) or ())
    bounds = Bounds(n, n, cert, cert)
    return EssenceReport(surface, ess=bounds, ess_g=bounds, layering="some", notes=(LAYERING_NOTE,))


@dataclass(frozen=True)
class EssCReport:
    beta_1: int
    bounds: Bounds
    caps: tuple[TwistedCapDatum, ...] = ()
    value: float = math.inf  # smallest detected cap complexity
    note: str = COMPLETENESS_NOTE

    def as_dict(self) -> dict:
        return {
            "beta_1": self.beta_1,
            "value": _json_num(self.value),
            "note": self.note,
            "bounds": self.bounds.as_dict(),
            "caps": [c.as_dict() for c in self.caps],
        }


def ess_c_report(diagram: LinkDiagram, color: str, max_r: float = math.inf) -> EssCReport:
    failed = _hypotheses(diagram)
    if failed:
        raise HypothesisError(f"ess_c needs a reduced alternating diagram on the sphere ({', '.join(failed)} failed)", failed)
    tait = tait_graph(diagram, color)
    b1 = betti_1(tait)
    if b1 <= 1:
        cert = Certificate("D:Hierarchy", f"beta_1 = {b1}: no twisted plumbing cap exists")
        return EssCReport(b1, Bounds(math.inf, math.inf, cert, None))
    caps = tuple(find_diagrammatic_twisted_caps(diagram, color, max_r))
    bounds = Bounds()
    value = math.inf
    if caps:
        best = min(caps, key=lambda cap: (cap.complexity, cap.crossings))
        value = best.complexity
        bounds = bounds.cut_upper(value, Certificate(
            "P:EssC", f"diagrammatic twisted plumbing cap ({best.kind}) of complexity {best.complexity}", best.crossings,
        ))
    ess = girth(tait)
    bounds = bounds.cut_upper(2 * (ess - 1), Certificate(
        "P:EssCBound", f"beta_1 = {b1} >= 2 and ess = {_fmt(ess)} give ess_c <= 2(ess - 1)",
        shortest_cycle(tait) or (),
    ))
    log.info("ess_c of the %s surface: %d caps, %s", color, len(caps), bounds.text("ess_c"))
    return EssCReport(b1, bounds, caps, value)


def combine_bounds(
    report: EssenceReport,
    capsearch: Sequence[CapSearchResult] = (),
    plumbing: PlumbBound | None = None,
    ess_c: Bounds | None = None,
) -> EssenceReport:
    """Fold cap-search caps, plumbing bounds and an ess_c lower bound into ``report``."""
    ess, ess_g = report.ess, report.ess_g
    notes = list(report.notes)
    for result in capsearch:
        for assembly, verdict in result.caps:
            if not verdict.essential:
                continue
            k = verdict.boundary_L_count
            cert = Certificate(f"capsearch:{result.mode}", f"essential {result.mode} cap of height {assembly.max_height} meeting L {k} times")
            if ess.lower is not None and ess.lower > k:
                raise IntegrityError(f"certified ess >= {_fmt(ess.lower)} but an essential cap meets L {k} times")
            ess = ess.cut_upper(k, cert)
            if result.mode == "geometric":
                ess_g = ess_g.cut_upper(k, cert)
        if result.certificate:
            notes.append(result.certificate)
    if plumbing is not None:
        if plumbing.applicable:
            ess = ess.raise_lower(plumbing.value, Certificate(plumbing.tag, "minimum of the plumbing factor lower bounds"))
        else:
            notes.append(f"{plumbing.tag} not applicable: {plumbing.reason}")
    if ess_c is not None and ess_c.lower is not None:
        two_r = ess_c.lower
        if ess_g.lower is not None and ess_g.exact and ess_g.lower <= two_r:
            cert = Certificate("P:(1)(2)", f"ess_c >= {_fmt(two_r)} and ess_g = {_fmt(ess_g.lower)} <= {_fmt(two_r)} give ess = ess_g")
            ess = ess.raise_lower(ess_g.lower, cert).cut_upper(ess_g.upper, cert)
        elif ess_g.lower is not None:
            cert = Certificate("P:(1)(2)", f"ess_c >= {_fmt(two_r)} gives ess >= min(ess_g, {_fmt(two_r)})")
            ess = ess.raise_lower(min(ess_g.lower, two_r), cert)
    if not math.isinf(ess_g.upper):
        ess = ess.cut_upper(ess_g.upper, ess_g.upper_cert)
    return replace(report, ess=ess, ess_g=ess_g, notes=tuple(notes), failed=() if ess.lower is not None else report.failed)


# ---- end-essential verdicts --------------------------------------------------
@dataclass(frozen=True)
class EndEssVerdict:
    cellular: bool
    alternating: bool
    nugatory_free: bool
    adequate: bool
    homogeneous: bool
    disk_bounded: bool
    genus: int
    verdict: str
    theorem: str | None = None
    failed: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "cellular": self.cellular,
            "alternating": self.alternating,
            "nugatory_free": self.nugatory_free,
            "adequate": self.adequate,
            "homogeneous": self.homogeneous,
            "disk_bounded": self.disk_bounded,
            "genus": self.genus,
            "verdict": self.verdict,
            "theorem": self.theorem,
            "failed": list(self.failed),
        }


def end_essential_report(diagram: LinkDiagram, state: State) -> EndEssVerdict:
    flags = classify_diagram(diagram)
    g = state_graph(diagram, state)
    facts = {
        "cellular": flags.cellular,
        "alternating": flags.alternating,
        "nugatory_free": not flags.nugatory,
        "adequate": is_adequate(g),
        "homogeneous": is_homogeneous(g),
        "disk_bounded": all(resolve_state(diagram, state).disk_bounded),
    }
    homogeneously_adequate = facts["adequate"] and facts["homogeneous"]
    verdict, theorem, failed = "inconclusive", None, ()
    if flags.genus == 0:
        if homogeneously_adequate:
            verdict, theorem = "pi1-essential", "T:ozawafkp"
        else:
            failed = tuple(k for k in ("adequate", "homogeneous") if not facts[k])
    elif not facts["disk_bounded"]:
        # an essential state circle spans no state disk
        failed = ("disk_bounded",)
    elif all(facts[k] for k in ("cellular", "alternating", "nugatory_free", "adequate")):
        verdict, theorem = "end-essential", "T:Endess"
    elif homogeneously_adequate:
        verdict, theorem = "end-essential", "T:EndEssH"
    else:
        failed = tuple(k for k in ("cellular", "alternating", "nugatory_free", "adequate") if not facts[k])
        if not facts["homogeneous"]:
            failed += ("homogeneous",)
    log.info("state %s on genus %d: %s", state, flags.genus, verdict)
    return EndEssVerdict(**facts, genus=flags.genus, verdict=verdict, theorem=theorem, failed=failed)


def checkerboard_state(diagram: LinkDiagram, color: str) -> State:
    """The state whose circles bound the ``color`` regions."""
    coloring = checkerboard_coloring(diagram)
    return State(tuple(tait_label(diagram, coloring, c, color) for c in range(diagram.n)))


def checkerboard_bounds_report(diagram: LinkDiagram, color: str) -> EssenceReport:
    """Bounds-only report for a checkerboard surface outside the exact theorem:
    the surface as a state surface, never presented as exact."""
    failed = _hypotheses(diagram)
    as_state = essence_state_surface(diagram, checkerboard_state(diagram, color))
    note = f"bounds only: {', '.join(failed)} failed" if failed else "bounds only"
    if as_state.ess.lower is None:
        return EssenceReport(f"{color} checkerboard surface", failed=failed + as_state.failed, notes=(note,))
    cert = as_state.ess.lower_cert
    return EssenceReport(
        f"{color} checkerboard surface",
        ess=Bounds(as_state.ess.lower, lower_cert=cert),
        failed=failed,
        notes=(note, LAYERING_NOTE),
    )
