# essence_kit/graphs.py
"""Tait graphs, state graphs, blocks and girth."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx

from essence_kit.diagram import (
    CheckerboardColoring,
    LinkDiagram,
    State,
    checkerboard_coloring,
    resolve_state,
    tait_label,
)
from essence_kit.errors import DiagramValidationError
from essence_kit.logconf import logging

log = logging.getLogger(__name__)


class LabeledEdge(NamedTuple):
    key: int  # crossing index
    u: int
    v: int
    label: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class LabeledMultigraph:
    vertices: tuple[int, ...]
    edges: tuple[LabeledEdge, ...]

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.u, e.v, key=e.key, label=e.label)
        return g

    def edge(self, key: int) -> LabeledEdge:
        return next(e for e in self.edges if e.key == key)

    def subgraph(self, keys) -> "LabeledMultigraph":
        keep = [e for e in self.edges if e.key in set(keys)]
        verts = sorted({x for e in keep for x in (e.u, e.v)})
        return LabeledMultigraph(tuple(verts), tuple(keep))

    def as_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"crossing": e.key + 1, "u": e.u, "v": e.v, "label": e.label} for e in self.edges],
        }


@dataclass(frozen=True)
class CutDecomposition:
    blocks: tuple[tuple[int, ...], ...]  # edge keys per block
    cut_vertices: tuple[int, ...]
    block_vertices: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SurfaceData:
    chi: int
    boundary_components: int
    orientable: bool

    @property
    def beta_1(self) -> int:
        return 1 - self.chi


def tait_graph(diagram: LinkDiagram, color: str, coloring: CheckerboardColoring | None = None) -> LabeledMultigraph:
    if coloring is None:
        coloring = checkerboard_coloring(diagram)
    vertices = coloring.faces_of(color)
    edges = []
    for c in range(diagram.n):
        q = 1 if coloring.colors[diagram.face_at(c, 1)] == color else 0
        u, v = sorted((diagram.face_at(c, q), diagram.face_at(c, q + 2)))
        edges.append(LabeledEdge(c, u, v, tait_label(diagram, coloring, c, color)))
    return LabeledMultigraph(vertices, tuple(edges))


def state_graph(diagram: LinkDiagram, state: State) -> LabeledMultigraph:
    circles = resolve_state(diagram, state)
    edges = []
    for c in range(diagram.n):
        u, v = sorted((circles.circle_of[c][0], circles.circle_of[c][2]))
        edges.append(LabeledEdge(c, u, v, state[c]))
    return LabeledMultigraph(tuple(range(len(circles))), tuple(edges))


def is_adequate(g: LabeledMultigraph) -> bool:
    return not any(e.is_loop for e in g.edges)


def betti_1(g: LabeledMultigraph) -> int:
    return len(g.edges) - len(g.vertices) + nx.number_connected_components(g.to_networkx())


def cut_components(g: LabeledMultigraph) -> CutDecomposition:
    """Block decomposition of a connected multigraph; every loop is its own block."""
    if g.vertices and not nx.is_connected(g.to_networkx()):
        raise DiagramValidationError("cut components need a connected graph")
    simple = nx.Graph()
    simple.add_nodes_from(g.vertices)
    parallel: dict[frozenset, list[int]] = {}
    blocks: list[tuple[int, ...]] = []
    for e in g.edges:
        if e.is_loop:
            blocks.append((e.key,))
        else:
            simple.add_edge(e.u, e.v)
            parallel.setdefault(frozenset((e.u, e.v)), []).append(e.key)
    for comp in nx.biconnected_component_edges(simple):
        keys = sorted(k for u, v in comp for k in parallel[frozenset((u, v))])
        blocks.append(tuple(keys))
    blocks.sort()
    block_vertices = tuple(
        tuple(sorted({x for k in block for x in (g.edge(k).u, g.edge(k).v)})) for block in blocks
    )
    count: dict[int, int] = {}
    for verts in block_vertices:
        for x in verts:
            count[x] = count.get(x, 0) + 1
    cuts = tuple(sorted(x for x, k in count.items() if k > 1))
    return CutDecomposition(tuple(blocks), cuts, block_vertices)


def is_homogeneous(g: LabeledMultigraph) -> bool:
    if not g.edges:
        return True
    labels = {e.key: e.label for e in g.edges}
    return all(len({labels[k] for k in block}) == 1 for block in cut_components(g).blocks)


def shortest_cycle(g: LabeledMultigraph) -> tuple[int, ...] | None:
    """Edge keys of a shortest cycle, or None for a forest.

    A shortest cycle through edge uv is uv plus a shortest u-v path avoiding it;
    minimizing over edges gives the girth, loops and parallel pairs included.
    """
    best: tuple[int, ...] | None = None
    loops = [e for e in g.edges if e.is_loop]
    if loops:
        return (loops[0].key,)
    for e in g.edges:
        h = nx.Graph()
        h.add_nodes_from(g.vertices)
        for f in g.edges:
            if f.key != e.key and not h.has_edge(f.u, f.v):
                h.add_edge(f.u, f.v, key=f.key)
        try:
            path = nx.shortest_path(h, e.u, e.v)
        except nx.NetworkXNoPath:
            continue
        cycle = (e.key,) + tuple(h.edges[a, b]["key"] for a, b in zip(path, path[1:]))
        if best is None or len(cycle) < len(best):
            best = cycle
    return best


def girth(g: LabeledMultigraph) -> float:
    cycle = shortest_cycle(g)
    return math.inf if cycle is None else len(cycle)


def state_surface_data(diagram: LinkDiagram, state: State) -> SurfaceData:
    g = state_graph(diagram, state)
    return SurfaceData(
        chi=len(g.vertices) - diagram.n,
        boundary_components=diagram.component_count,
        orientable=nx.is_bipartite(g.to_networkx()),
    )


def checkerboard_surface_data(diagram: LinkDiagram, color: str) -> SurfaceData:
    g = tait_graph(diagram, color)
    return SurfaceData(
        chi=len(g.vertices) - diagram.n,
        boundary_components=diagram.component_count,
        orientable=nx.is_bipartite(g.to_networkx()),
    )


def definite_color_of_alternating(diagram: LinkDiagram) -> str | None:
    """The color whose Tait edges are all A: its Goeritz form is positive definite."""
    coloring = checkerboard_coloring(diagram)
    for color in ("black", "white"):
        if all(tait_label(diagram, coloring, c, color) == "A" for c in range(diagram.n)):
            return color
    return None
