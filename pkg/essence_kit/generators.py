# essence_kit/generators.py
"""
Diagram generators.

Random reduced alternating diagrams are medial diagrams of random 2-connected
planar maps.  Edge ``e`` of the map becomes crossing ``e``; the map's
vertices become the black regions, so the black Tait graph is the map itself
with every edge labeled A.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import orjson

from essence_kit.config import Settings, get_settings
from essence_kit.diagram import LinkDiagram, diagram_from_json, flip_crossing, parse_diagram
from essence_kit.errors import DiagramParseError, DiagramValidationError, UsageError
from essence_kit.logconf import logging

log = logging.getLogger(__name__)

# local ends of a medial crossing, counterclockwise: NE, NW, SW, SE for an
# edge drawn from its tail (west) to its head (east)
_SUCC_END = (1, 3)  # corner after the half-edge, by tail/head
_PRED_END = (2, 0)  # corner before the half-edge


@dataclass
class PlanarMap:
    """Rotation system of a loopless planar multigraph.

    Edge ``e`` has half-edges ``2e`` (tail) and ``2e + 1`` (head);
    ``rotation[v]`` lists the half-edges at ``v`` counterclockwise.
    """
    rotation: list[list[int]] = field(default_factory=list)
    vertex_of: list[int] = field(default_factory=list)

    @classmethod
    def digon(cls, multiplicity: int = 2) -> "PlanarMap":
        """Two vertices joined by ``multiplicity`` parallel edges."""
        tails = [2 * e for e in range(multiplicity)]
        heads = [2 * e + 1 for e in range(multiplicity)]
        return cls([tails[::-1], heads], [0, 1] * multiplicity)

    @property
    def edge_count(self) -> int:
        return len(self.vertex_of) // 2

    def ends(self, e: int) -> tuple[int, int]:
        return self.vertex_of[2 * e], self.vertex_of[2 * e + 1]

    def succ(self, h: int) -> int:
        ring = self.rotation[self.vertex_of[h]]
        return ring[(ring.index(h) + 1) % len(ring)]

    def pred(self, h: int) -> int:
        ring = self.rotation[self.vertex_of[h]]
        return ring[ring.index(h) - 1]

    def faces(self) -> list[list[int]]:
        """Face walks; each half-edge is followed by pred(twin)."""
        seen: set[int] = set()
        out = []
        for start in range(len(self.vertex_of)):
            if start in seen:
                continue
            walk, h = [], start
            while h not in seen:
                seen.add(h)
                walk.append(h)
                h = self.pred(h ^ 1)
            out.append(walk)
        return out

    def _insert_after(self, h: int, new: int):
        ring = self.rotation[self.vertex_of[h]]
        ring.insert(ring.index(h) + 1, new)

    def _insert_before(self, h: int, new: int):
        ring = self.rotation[self.vertex_of[h]]
        ring.insert(ring.index(h), new)

    def add_parallel(self, e: int) -> int:
        f = self.edge_count
        u, v = self.ends(e)
        self.vertex_of += [u, v]
        self._insert_after(2 * e, 2 * f)
        self._insert_before(2 * e + 1, 2 * f + 1)
        return f

    def subdivide(self, e: int) -> int:
        f = self.edge_count
        _, v = self.ends(e)
        w = len(self.rotation)
        ring = self.rotation[v]
        ring[ring.index(2 * e + 1)] = 2 * f + 1
        self.vertex_of += [w, v]
        self.vertex_of[2 * e + 1] = w
        self.rotation.append([2 * e + 1, 2 * f])
        return f

    def add_chord(self, a: int, b: int) -> int:
        """New edge from the corner after half-edge ``a`` to the corner after ``b``."""
        if self.vertex_of[a] == self.vertex_of[b]:
            raise DiagramValidationError("a chord would be a loop")
        f = self.edge_count
        self.vertex_of += [self.vertex_of[a], self.vertex_of[b]]
        self._insert_after(a, 2 * f)
        self._insert_after(b, 2 * f + 1)
        return f

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(len(self.rotation)))
        for e in range(self.edge_count):
            g.add_edge(*self.ends(e), key=e)
        return g


def random_planar_map(edges: int, rng: random.Random) -> PlanarMap:
    """Grow a 2-connected loopless planar map to ``edges`` edges."""
    if edges < 2:
        raise UsageError("a medial diagram needs at least two map edges")
    pmap = PlanarMap.digon()
    while pmap.edge_count < edges:
        op = rng.choice(("parallel", "subdivide", "chord"))
        if op == "parallel":
            pmap.add_parallel(rng.randrange(pmap.edge_count))
        elif op == "subdivide":
            pmap.subdivide(rng.randrange(pmap.edge_count))
        else:
            walk = rng.choice(pmap.faces())
            pairs = [(a, b) for a in walk for b in walk if pmap.vertex_of[a] < pmap.vertex_of[b]]
            if not pairs:
                continue
            pmap.add_chord(*rng.choice(pairs))
    return pmap


def medial_diagram(pmap: PlanarMap) -> LinkDiagram:
    """PD code of the alternating medial diagram of ``pmap``."""
    link: dict[tuple[int, int], tuple[int, int]] = {}
    for ring in pmap.rotation:
        for i, h in enumerate(ring):
            h2 = ring[(i + 1) % len(ring)]
            a = (h // 2, _SUCC_END[h % 2])
            b = (h2 // 2, _PRED_END[h2 % 2])
            link[a], link[b] = b, a

    # walk components straight through crossings, numbering medial edges
    label: dict[tuple[int, int], int] = {}
    entered: dict[int, list[int]] = {}
    n = pmap.edge_count
    for x in range(n):
        for start in range(4):
            if (x, start) in label:
                continue
            cur = (x, start)
            while True:
                c, end = cur
                entered.setdefault(c, []).append(end)
                out = (c, (end + 2) % 4)
                k = len(label) // 2 + 1
                label[out] = label[link[out]] = k
                cur = link[out]
                if cur == (x, start):
                    break
    crossings = []
    for x in range(n):
        k = next(end for end in entered[x] if end % 2 == 0)
        crossings.append(tuple(label[(x, (k + s) % 4)] for s in range(4)))
    diagram = LinkDiagram(tuple(crossings))
    if diagram.derived_genus != 0:
        raise DiagramValidationError("medial construction produced a non-planar diagram")
    return diagram


def random_alternating_diagram(crossings: int, rng: random.Random) -> LinkDiagram:
    return medial_diagram(random_planar_map(crossings, rng))


def wheel_map(spokes: int) -> PlanarMap:
    """Hub 0 with a rim cycle 1..spokes; rim edges first, then spokes."""
    pmap = PlanarMap(rotation=[[] for _ in range(spokes + 1)])
    for i in range(spokes):
        # rim edge i runs from rim vertex i+1 to the next one, counterclockwise
        pmap.vertex_of += [i + 1, (i + 1) % spokes + 1]
    for i in range(spokes):
        pmap.vertex_of += [0, i + 1]
    for i in range(spokes):
        rim_out, rim_in = 2 * i, 2 * ((i - 1) % spokes) + 1
        spoke = 2 * (spokes + i) + 1
        # outward from the rim vertex: next rim vertex, the hub, previous rim vertex
        pmap.rotation[i + 1] = [rim_out, spoke, rim_in]
    pmap.rotation[0] = [2 * (spokes + i) for i in range(spokes)]
    return pmap


def theta_map(lengths: tuple[int, int, int]) -> tuple[PlanarMap, list[list[int]]]:
    """Theta graph with paths of the given lengths; also returns each path's edges."""
    if min(lengths) < 1:
        raise UsageError("theta paths need at least one edge")
    pmap = PlanarMap.digon(3)
    paths = [[e] for e in range(3)]
    for p, length in enumerate(lengths):
        while len(paths[p]) < length:
            paths[p].append(pmap.subdivide(paths[p][-1]))
    return pmap, paths


def pretzel_diagram(twists: tuple[int, int, int], flip_middle: bool = True) -> LinkDiagram:
    """Pretzel diagram whose black surface is two disks joined by three twisted
    bands; with ``flip_middle`` the middle band twists the other way."""
    pmap, paths = theta_map(tuple(abs(t) for t in twists))
    diagram = medial_diagram(pmap)
    if flip_middle:
        for c in paths[1]:
            diagram = flip_crossing(diagram, c)
    return diagram


def random_tree(edges: int, rng: random.Random) -> nx.Graph:
    if edges < 1:
        raise UsageError("a tree needs at least one edge")
    if edges == 1:
        return nx.path_graph(2)
    return nx.from_prufer_sequence([rng.randrange(edges + 1) for _ in range(edges - 1)])


GENERATED = {
    "borromean": lambda: medial_diagram(wheel_map(3)),
    "8_18": lambda: medial_diagram(wheel_map(4)),
    "p333": lambda: pretzel_diagram((3, 3, 3)),
}


def diagram_from_text(text: str) -> LinkDiagram:
    """PD text, or a JSON diagram document when the text opens with a brace."""
    if text.lstrip().startswith("{"):
        try:
            obj = orjson.loads(text)
        except orjson.JSONDecodeError as e:
            raise DiagramParseError(f"JSON diagram: {e}") from e
        return diagram_from_json(obj)
    return parse_diagram(text)


def read_diagram(source: str | Path) -> LinkDiagram:
    path = Path(source)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json" and not text.lstrip().startswith("{"):
        raise DiagramParseError(f"{path.name} is not a JSON object")
    return diagram_from_text(text)


def load_fixture(name: str, settings: Settings | None = None) -> LinkDiagram:
    """A named fixture: ``<fixtures_dir>/<name>.pd`` or a generated diagram."""
    settings = settings or get_settings()
    path = settings.fixtures_dir / f"{name}.pd"
    if path.exists():
        return read_diagram(path)
    if name in GENERATED:
        log.debug("generating fixture %s", name)
        return GENERATED[name]()
    raise UsageError(f"no fixture named {name!r} in {settings.fixtures_dir}")


def fixture_names(settings: Settings | None = None) -> list[str]:
    settings = settings or get_settings()
    files = {p.stem for p in settings.fixtures_dir.glob("*.pd")}
    return sorted(files | set(GENERATED))
