# essence_kit/plumbing.py
"""Deplumbing of state surfaces and twisted plumbing along Tait-graph cycles."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import networkx as nx

from essence_kit.diagram import (
    LinkDiagram,
    State,
    checkerboard_coloring,
    doubled_crossings,
    is_alternating,
    other_color,
)
from essence_kit.errors import DiagramValidationError, HypothesisError
from essence_kit.graphs import (
    LabeledMultigraph,
    betti_1,
    cut_components,
    girth,
    is_adequate,
    is_homogeneous,
    state_graph,
    tait_graph,
)
from essence_kit.logconf import logging

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorNode:
    crossings: tuple[int, ...]
    vertices: tuple[int, ...]
    girth: float
    adequate: bool
    homogeneous: bool
    beta_1: int
    chi: int
    kind: str = "block"

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "crossings": [c + 1 for c in self.crossings],
            "vertices": list(self.vertices),
            "girth": None if math.isinf(self.girth) else self.girth,
            "adequate": self.adequate,
            "homogeneous": self.homogeneous,
            "beta_1": self.beta_1,
            "chi": self.chi,
        }


@dataclass(frozen=True)
class PlumbingEdge:
    u: int
    v: int
    twisted: bool = False
    cut_vertex: int | None = None  # shared state disk of an untwisted plumbing
    complexity: int | None = None  # 2r of a twisted plumbing cap
    ess_c: float | None = None  # of the factor the cap was taken from
    defect: int | None = None
    diameter: int | None = None

    def as_dict(self) -> dict:
        out = {"u": self.u, "v": self.v, "twisted": self.twisted}
        if self.twisted:
            out.update(complexity=self.complexity, ess_c=self.ess_c, defect=self.defect, diameter=self.diameter)
        else:
            out["cut_vertex"] = self.cut_vertex
        return out


@dataclass(frozen=True)
class PlumbingTree:
    nodes: tuple[FactorNode, ...]
    edges: tuple[PlumbingEdge, ...]

    def __post_init__(self):
        g = nx.Graph()
        g.add_nodes_from(range(len(self.nodes)))
        g.add_edges_from((e.u, e.v) for e in self.edges)
        if self.nodes and not nx.is_tree(g):
            raise DiagramValidationError("plumbing factors do not form a tree")

    def as_dict(self) -> dict:
        return {"nodes": [n.as_dict() for n in self.nodes], "edges": [e.as_dict() for e in self.edges]}


def _factor(g: LabeledMultigraph, keys, kind: str = "block") -> FactorNode:
    sub = g.subgraph(keys)
    return FactorNode(
        crossings=tuple(sorted(keys)),
        vertices=sub.vertices,
        girth=girth(sub),
        adequate=is_adequate(sub),
        homogeneous=is_homogeneous(sub),
        beta_1=betti_1(sub),
        chi=len(sub.vertices) - len(sub.edges),
        kind=kind,
    )


def deplumb_graph(g: LabeledMultigraph) -> PlumbingTree:
    """One factor per block; blocks through a cut vertex are plumbed on its
    state disk, as a star from the lowest-numbered block."""
    decomp = cut_components(g)
    nodes = tuple(_factor(g, block) for block in decomp.blocks)
    edges = []
    for v in decomp.cut_vertices:
        around = [i for i, verts in enumerate(decomp.block_vertices) if v in verts]
        edges.extend(PlumbingEdge(around[0], i, cut_vertex=v) for i in around[1:])
    return PlumbingTree(nodes, tuple(edges))


def deplumb_state(diagram: LinkDiagram, state: State) -> PlumbingTree:
    if len(diagram.pieces) > 1:
        raise DiagramValidationError("deplumbing needs a connected state graph")
    tree = deplumb_graph(state_graph(diagram, state))
    log.info("deplumbed state %s into %d factors", state, len(tree.nodes))
    return tree


# ---- twisted plumbing -------------------------------------------------------
class ComponentDatum(NamedTuple):
    pinches: int
    l_count: int


@dataclass(frozen=True)
class PlumbingValidation:
    m: int
    d: int
    boundary_L: int
    passed: bool
    violations: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"m": self.m, "d": self.d, "boundary_L": self.boundary_L,
                "pass": self.passed, "violations": list(self.violations)}


def validate_twisted_plumbing(
    m: int, d: int, boundary_L: int, component_data: Sequence[tuple[int, int]] = ()
) -> PlumbingValidation:
    bad = []
    if d > m:
        bad.append(f"diameter {d} exceeds defect {m}")
    if m >= 1 and boundary_L < 2 * m + 4:
        bad.append(f"boundary meets L {boundary_L} times, needs >= {2 * m + 4} (2m+4)")
    if m >= 1 and boundary_L < 2 * d + 4:
        bad.append(f"boundary meets L {boundary_L} times, needs >= {2 * d + 4} (2d+4)")
    for i, (pinches, lc) in enumerate(component_data):
        if pinches % 2 != lc % 2:
            bad.append(f"component {i}: {pinches} pinches but L-count {lc} (parity)")
        if pinches == 1 and lc < 3:
            bad.append(f"component {i}: one pinch needs L-count >= 3, got {lc}")
        if pinches == 2 and lc < 2:
            bad.append(f"component {i}: two pinches need L-count >= 2, got {lc}")
    return PlumbingValidation(m, d, boundary_L, not bad, tuple(bad))


def tree_count_inequality(tree: nx.Graph) -> tuple[int, int, bool]:
    """3 n1 + 2 n2 + sum of n_k over odd k >= 3, against 2|E| + 4."""
    if tree.number_of_edges() < 2:
        raise DiagramValidationError("tree inequality needs at least two edges")
    if not nx.is_tree(tree):
        raise DiagramValidationError("tree inequality needs a tree")
    census = Counter(d for _, d in tree.degree())
    lhs = 3 * census[1] + 2 * census[2] + sum(n for k, n in census.items() if k >= 3 and k % 2)
    rhs = 2 * tree.number_of_edges() + 4
    return lhs, rhs, lhs >= rhs


@dataclass(frozen=True)
class TwistedCapDatum:
    white_region: int  # cap-color region the cap runs through
    crossings: tuple[int, ...]  # crossings the cap passes beside, in boundary order
    black_regions: tuple[int, ...]  # surface region after each of those crossings
    points: tuple[tuple[int, int], ...]  # 2r crossings with L, two beside each crossing
    complexity: int
    defect: int
    pinch_tree: tuple[tuple[int, int], ...]  # pinch points joining components of U - x
    diameter: int
    component_data: tuple[ComponentDatum, ...]
    kind: str = "facial"

    @property
    def r(self) -> int:
        return self.complexity // 2

    def validate(self) -> PlumbingValidation:
        check = validate_twisted_plumbing(self.defect, self.diameter, self.complexity, self.component_data)
        pinches = nx.MultiGraph()
        pinches.add_nodes_from(range(len(self.component_data)))
        pinches.add_edges_from(self.pinch_tree)
        if nx.is_tree(pinches):
            return check
        bad = check.violations + ("pinch points do not form a tree on the components",)
        return PlumbingValidation(check.m, check.d, check.boundary_L, False, bad)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "white_region": self.white_region,
            "crossings": [c + 1 for c in self.crossings],
            "black_regions": list(self.black_regions),
            "complexity": self.complexity,
            "defect": self.defect,
            "diameter": self.diameter,
            "pinch_tree": [list(e) for e in self.pinch_tree],
            "components": [list(c) for c in self.component_data],
        }


def shadow_pinch_data(
    crossings: Sequence[int], black_regions: Sequence[int]
) -> tuple[int, tuple[tuple[int, int], ...], int, tuple[ComponentDatum, ...]]:
    """Pinch structure of the surface strip U along a cap.

    The strip is pinched beside every crossing but the first and last, giving
    a path of components; the end components meet L three times, the inner
    ones twice. A surface region met twice pinches the strip once more,
    joining the components that hold its two visits.
    """
    r = len(crossings)
    m = max(0, r - 2)
    if m == 0:
        pinches, l_counts = [0], [2 * r]
    else:
        pinches = [1] + [2] * (m - 1) + [1]
        l_counts = [3] + [2] * (m - 1) + [3]
    edges = [(i, i + 1) for i in range(m)]

    def component(i: int) -> int:
        return 0 if i == r - 1 else min(i, m)

    first_visit: dict[int, int] = {}
    for i, b in enumerate(black_regions):
        if b not in first_visit:
            first_visit[b] = i
            continue
        u, v = component(first_visit[b]), component(i)
        pinches[u] += 1
        pinches[v] += 1
        edges.append((min(u, v), max(u, v)))
    shape = nx.Graph()
    shape.add_nodes_from(range(len(pinches)))
    shape.add_edges_from(edges)
    diameter = nx.diameter(shape)
    comps = tuple(ComponentDatum(p, lc) for p, lc in zip(pinches, l_counts))
    return len(edges), tuple(edges), diameter, comps


def twisted_cap_datum(
    white_region: int, crossings: Sequence[int], black_regions: Sequence[int], kind: str = "facial"
) -> TwistedCapDatum:
    m, tree, d, comps = shadow_pinch_data(crossings, black_regions)
    return TwistedCapDatum(
        white_region=white_region,
        crossings=tuple(crossings),
        black_regions=tuple(black_regions),
        points=tuple((c, k) for c in crossings for k in (0, 1)),
        complexity=2 * len(crossings),
        defect=m,
        pinch_tree=tree,
        diameter=d,
        component_data=comps,
        kind=kind,
    )


def accept_cap(datum: TwistedCapDatum) -> bool:
    check = datum.validate()
    if not check.passed:
        log.warning("discarding %s cap around region %d: %s", datum.kind, datum.white_region, "; ".join(check.violations))
    return check.passed


@dataclass
class _TaitFactor:
    """A factor of the hierarchy: surviving Tait edges and the cap-color
    regions around them (multisets of crossings)."""
    diagram: LinkDiagram
    graph: LabeledMultigraph
    edges: set[int]
    regions: dict[int, Counter] = field(default_factory=dict)
    order: dict[int, tuple[tuple[int, int], ...]] = field(default_factory=dict)

    @property
    def current(self) -> LabeledMultigraph:
        return self.graph.subgraph(self.edges)

    @property
    def beta_1(self) -> int:
        return betti_1(self.current)

    def ring(self, w: int) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Crossings around region ``w`` and the surface region after each."""
        if w in self.order:
            walk = self.order[w]
            black = []
            for c, q in walk:
                other = self.diagram.partner[(c, q)]
                black.append(self.diagram.face_at(other.crossing, other.slot))
            return tuple(c for c, _ in walk), tuple(black)
        # merged regions keep no boundary order; walk the cycle they surround
        sub = self.graph.subgraph(self.regions[w])
        if not all(d == 2 for _, d in sub.to_networkx().degree()):
            return None
        left = list(sub.edges)
        e = left.pop(0)
        crossings, black, at = [e.key], [e.v], e.v
        while left:
            e = next((f for f in left if at in (f.u, f.v)), None)
            if e is None:
                return None
            left.remove(e)
            at = e.v if e.u == at else e.u
            crossings.append(e.key)
            black.append(at)
        return tuple(crossings), tuple(black)

    def caps(self, max_r: float = math.inf) -> list[TwistedCapDatum]:
        """Facial caps of this factor, plus the framing cap of a facial girth cycle."""
        facial = []
        for w in sorted(self.regions):
            ring = self.regions[w]
            if not ring or any(k > 1 for k in ring.values()):
                continue
            found = self.ring(w)
            if found is not None:
                datum = twisted_cap_datum(w, *found)
                if accept_cap(datum):
                    facial.append(datum)
        facial.sort(key=_cap_order)
        out = [cap for cap in facial if cap.r <= max_r]
        n = girth(self.current)
        shortest = next((cap for cap in facial if cap.r == n), None)
        if shortest is not None and 2 <= n <= max_r + 1:
            framing = twisted_cap_datum(
                shortest.white_region, shortest.crossings[:-1], shortest.black_regions[:-1], kind="cycle-framing",
            )
            if accept_cap(framing):
                out.append(framing)
        return sorted(out, key=_cap_order)

    def ess_c(self, caps: Sequence[TwistedCapDatum]) -> float:
        """Smallest cap complexity, cut at 2(girth - 1)."""
        best = min((cap.complexity for cap in caps), default=math.inf)
        return min(best, 2 * (girth(self.current) - 1))

    def split(self, w: int) -> tuple[tuple[int, ...], int]:
        """Remove the highest crossing around ``w``; its two regions merge."""
        cycle = tuple(sorted(self.regions[w]))
        cut = cycle[-1]
        self.edges.discard(cut)
        both = [x for x in sorted(self.regions) if cut in self.regions[x]]
        merged = Counter()
        for x in both:
            merged += self.regions.pop(x)
            self.order.pop(x, None)
        del merged[cut]
        self.regions[min(both)] = merged
        return cycle, cut


def _cap_order(cap: TwistedCapDatum):
    return cap.complexity, tuple(sorted(cap.crossings)), cap.kind


def _initial_factor(diagram: LinkDiagram, color: str) -> _TaitFactor:
    coloring = checkerboard_coloring(diagram)
    g = tait_graph(diagram, color, coloring)
    factor = _TaitFactor(diagram, g, {e.key for e in g.edges})
    for w in coloring.faces_of(other_color(color)):
        walk = diagram.faces[w]
        factor.regions[w] = Counter(c for c, _ in walk)
        factor.order[w] = tuple(walk)
    return factor


def _require_alternating(diagram: LinkDiagram):
    failed = []
    if diagram.genus != 0:
        failed.append("genus_0")
    if doubled_crossings(diagram):
        failed.append("reduced")
    if not is_alternating(diagram):
        failed.append("alternating")
    if len(diagram.pieces) > 1:
        failed.append("connected")
    if failed:
        raise HypothesisError(f"twisted plumbing needs a reduced alternating diagram on the sphere ({', '.join(failed)} failed)", tuple(failed))


def find_diagrammatic_twisted_caps(diagram: LinkDiagram, color: str, max_r: float = math.inf) -> list[TwistedCapDatum]:
    """Caps along facial Tait cycles: the curve runs through one cap-color region
    and crosses the link beside each of its r crossings, 2r points in all.

    A facial cycle of girth length n also frames a cap meeting L beside n - 1
    of its crossings, complexity 2(n - 1).
    """
    _require_alternating(diagram)
    factor = _initial_factor(diagram, color)
    if factor.beta_1 < 2:
        return []
    return factor.caps(max_r)


def hierarchical_twisted_deplumb(diagram: LinkDiagram, color: str, threshold: float = math.inf) -> PlumbingTree:
    """Split along a minimal-complexity cap of each factor until that
    complexity reaches ``threshold`` or the remaining factor has beta_1 = 1."""
    _require_alternating(diagram)
    factor = _initial_factor(diagram, color)
    g = factor.graph
    leaves: list[FactorNode] = []
    splits: list[tuple[TwistedCapDatum, float]] = []
    while factor.beta_1 >= 2:
        caps = factor.caps()
        if not caps or caps[0].complexity >= threshold:
            break
        cap = caps[0]
        ess_c = factor.ess_c(caps)
        cycle, cut = factor.split(cap.white_region)
        leaves.append(_factor(g, cycle, kind="twisted-leaf"))
        splits.append((cap, ess_c))
        log.info("split off cycle %s along a %s cap (complexity %d), removed crossing %d",
                 cycle, cap.kind, cap.complexity, cut + 1)
    nodes = leaves + [_factor(g, sorted(factor.edges), kind="factor")]
    edges = tuple(
        PlumbingEdge(i, i + 1, twisted=True, complexity=cap.complexity, ess_c=ess_c,
                     defect=cap.defect, diameter=cap.diameter)
        for i, (cap, ess_c) in enumerate(splits)
    )
    return PlumbingTree(tuple(nodes), edges)


# ---- plumbing lower bound ---------------------------------------------------
class TwistedEdge(NamedTuple):
    complexity: int  # 2r
    ess_c: float  # boundary-contractible essence of the factor at that stage


@dataclass(frozen=True)
class PlumbBound:
    value: float | None
    applicable: bool
    reason: str = ""
    tag: str = "T:PlumbEss"


def plumb_essence_lower_bound(factor_bounds: Sequence[float], twisted: Sequence[TwistedEdge] = ()) -> PlumbBound:
    if not factor_bounds:
        raise DiagramValidationError("no factor bounds given")
    weak = [b for b in factor_bounds if b < 2]
    if weak:
        return PlumbBound(None, False, f"factor bound {weak[0]} < 2: factors are not all pi1-essential")
    n = min(factor_bounds)
    for edge in twisted:
        if not (n >= edge.complexity and edge.complexity == edge.ess_c):
            return PlumbBound(
                None, False,
                f"twisted edge of complexity {edge.complexity} needs n >= 2r = ess_c (n={n}, ess_c={edge.ess_c})",
                "T:TwistedEss",
            )
    return PlumbBound(n, True, tag="T:TwistedEss" if twisted else "T:PlumbEss")


def plumbing_bound(tree: PlumbingTree) -> PlumbBound:
    """T:PlumbEss / T:TwistedEss over a deplumbing; a factor that is not
    adequate and homogeneous contributes no bound."""
    bounds = [node.girth if node.adequate and node.homogeneous else 0 for node in tree.nodes]
    twisted = [TwistedEdge(e.complexity, e.ess_c) for e in tree.edges if e.twisted]
    return plumb_essence_lower_bound(bounds, twisted)
