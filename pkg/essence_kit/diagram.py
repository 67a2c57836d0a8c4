# essence_kit/diagram.py
"""
Link diagrams as rotation systems.

A crossing is a 4-tuple of edge labels listed counterclockwise starting at
the incoming under-strand (PD convention).  A *dart* ``(c, s)`` is slot ``s``
of crossing ``c``; quadrant ``q`` of a crossing lies between slots ``q`` and
``q + 1``.  Faces are orbits of the dart permutation

    next(c, s) = (c', s' - 1)   where (c', s') is the partner of (c, s)

and dart ``(c, q)`` doubles as the name of quadrant ``q`` of ``c``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import jsonschema
import networkx as nx
from networkx.utils import UnionFind

from essence_kit.errors import (
    DiagramParseError,
    DiagramValidationError,
    HypothesisError,
    IntegrityError,
    NotColorableError,
)
from essence_kit.logconf import logging

log = logging.getLogger(__name__)

BLACK, WHITE = "black", "white"
COLORS = (BLACK, WHITE)

# smoothing partner of each slot, and the two quadrants each smoothing cuts off
SMOOTHING = {"A": (3, 2, 1, 0), "B": (1, 0, 3, 2)}
CUT_OFF = {"A": (1, 3), "B": (0, 2)}

DIAGRAM_SCHEMA = {
    "type": "object",
    "properties": {
        "crossings": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "minItems": 4,
                "maxItems": 4,
            },
        },
        "genus": {"type": "integer", "minimum": 0},
        "planar": {"type": "boolean"},
        "unknot": {"type": "boolean"},
    },
    "required": ["crossings"],
    "additionalProperties": False,
}


class Dart(NamedTuple):
    crossing: int
    slot: int


def other_color(color: str) -> str:
    return WHITE if color == BLACK else BLACK


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple[tuple[int, int, int, int], ...]
    genus_header: int | None = None
    planar: bool = False
    unknot: bool = False

    def __post_init__(self):
        if self.unknot and self.crossings:
            raise DiagramValidationError("the U document cannot carry crossings")
        if not self.unknot and not self.crossings:
            raise DiagramValidationError("diagram has no crossings")
        seen: dict[int, list[Dart]] = {}
        for c, labels in enumerate(self.crossings):
            if len(labels) != 4:
                raise DiagramValidationError(f"crossing {c + 1} has {len(labels)} slots, expected 4")
            for s, label in enumerate(labels):
                seen.setdefault(label, []).append(Dart(c, s))
        for label, darts in seen.items():
            if len(darts) == 1:
                raise DiagramValidationError(f"edge label {label} is unmatched (used once)")
            if len(darts) > 2:
                raise DiagramValidationError(f"edge label {label} is used {len(darts)} times")
        derived = self.derived_genus
        if self.planar and derived > 0:
            raise DiagramValidationError(f"diagram flagged planar but its rotation system has genus {derived}")
        if self.genus_header is not None:
            if self.genus_header < 0:
                raise DiagramValidationError("genus must be nonnegative")
            if self.genus_header < derived:
                raise DiagramValidationError(
                    f"genus header {self.genus_header} is below the rotation-system genus {derived}"
                )
            if self.planar and self.genus_header > 0:
                raise DiagramValidationError("planar flag contradicts the genus header")

    # ---- combinatorial skeleton -------------------------------------------
    @property
    def n(self) -> int:
        return len(self.crossings)

    @cached_property
    def darts(self) -> tuple[Dart, ...]:
        return tuple(Dart(c, s) for c in range(self.n) for s in range(4))

    @cached_property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted({label for labels in self.crossings for label in labels}))

    @cached_property
    def edges(self) -> tuple[tuple[Dart, Dart], ...]:
        """Edges in label order, each as its two darts (lower dart first)."""
        where: dict[int, list[Dart]] = {}
        for d in self.darts:
            where.setdefault(self.crossings[d.crossing][d.slot], []).append(d)
        return tuple(tuple(sorted(where[label])) for label in self.labels)

    @cached_property
    def edge_of(self) -> tuple[tuple[int, int, int, int], ...]:
        index = {label: i for i, label in enumerate(self.labels)}
        return tuple(tuple(index[label] for label in labels) for labels in self.crossings)

    @cached_property
    def partner(self) -> dict[Dart, Dart]:
        out: dict[Dart, Dart] = {}
        for a, b in self.edges:
            out[a], out[b] = b, a
        return out

    def face_next(self, d: Dart) -> Dart:
        c, s = self.partner[d]
        return Dart(c, (s - 1) % 4)

    @cached_property
    def faces(self) -> tuple[tuple[Dart, ...], ...]:
        if self.unknot:
            return ((), ())
        faces, seen = [], set()
        for d in self.darts:
            if d in seen:
                continue
            walk, cur = [], d
            while cur not in seen:
                seen.add(cur)
                walk.append(cur)
                cur = self.face_next(cur)
            faces.append(tuple(walk))
        return tuple(faces)

    @cached_property
    def face_of(self) -> tuple[tuple[int, int, int, int], ...]:
        table = [[-1] * 4 for _ in range(self.n)]
        for f, walk in enumerate(self.faces):
            for c, q in walk:
                table[c][q] = f
        return tuple(tuple(row) for row in table)

    def face_at(self, c: int, q: int) -> int:
        return self.face_of[c][q % 4]

    @cached_property
    def pieces(self) -> tuple[tuple[int, ...], ...]:
        """Connected pieces of the underlying 4-valent graph (crossing sets)."""
        if self.unknot:
            return ((),)
        uf = UnionFind(range(self.n))
        for a, b in self.edges:
            uf.union(a.crossing, b.crossing)
        return tuple(sorted(tuple(sorted(p)) for p in uf.to_sets()))

    @cached_property
    def derived_genus(self) -> int:
        if self.unknot:
            return 0
        piece_of = {c: i for i, p in enumerate(self.pieces) for c in p}
        chi = [0] * len(self.pieces)
        for c in range(self.n):
            chi[piece_of[c]] += 1
        for a, _ in self.edges:
            chi[piece_of[a.crossing]] -= 1
        for walk in self.faces:
            chi[piece_of[walk[0].crossing]] += 1
        total = 0
        for value in chi:
            if value > 2 or (2 - value) % 2:
                raise DiagramValidationError(f"Euler characteristic {value} gives no valid genus")
            total += (2 - value) // 2
        return total

    @property
    def genus(self) -> int:
        return self.genus_header if self.genus_header is not None else self.derived_genus

    @property
    def cellular(self) -> bool:
        return self.genus == self.derived_genus

    @cached_property
    def component_count(self) -> int:
        if self.unknot:
            return 1
        uf = UnionFind(range(len(self.edges)))
        for c in range(self.n):
            e = self.edge_of[c]
            uf.union(e[0], e[2])
            uf.union(e[1], e[3])
        return len(list(uf.to_sets()))

    @cached_property
    def orientation(self) -> tuple[tuple[Dart, Dart], ...]:
        """Each edge as (tail, head) along the link orientation."""
        directed: dict[int, tuple[Dart, Dart]] = {}

        def walk(start: Dart, checked: bool):
            c, s = start
            while True:
                out = Dart(c, (s + 2) % 4)
                head = self.partner[out]
                directed[self.edge_of[out.crossing][out.slot]] = (out, head)
                if head == start:
                    return
                c, s = head
                if checked and s == 2:
                    raise DiagramValidationError(
                        f"crossing {c + 1}: under-strand enters at slot 2, orientation is inconsistent"
                    )

        for c in range(self.n):
            if self.edge_of[c][0] not in directed:
                walk(Dart(c, 0), checked=True)
        for c in range(self.n):
            for s in (1, 3):
                if self.edge_of[c][s] not in directed:
                    walk(Dart(c, s), checked=False)
        return tuple(directed[i] for i in range(len(self.edges)))

    def over_enters_at_one(self, c: int) -> bool:
        tail, head = self.orientation[self.edge_of[c][1]]
        return head == Dart(c, 1)


# ---- parsing and serialization ----------------------------------------------
_TOKEN = re.compile(r"\S+")
_INT = re.compile(r"-?\d+")


def parse_diagram(text: str) -> LinkDiagram:
    """Parse a PD document (``X a b c d`` per crossing, ``/`` or newlines between)."""
    crossings: list[tuple[int, int, int, int]] = []
    uses: dict[int, int] = {}
    genus: int | None = None
    planar = unknot = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        line = re.sub(r"[\[\],;]", " ", line)
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        i = 0
        while i < len(tokens):
            tok, col = tokens[i]
            key = tok.lower()
            if tok in ("/", "PD"):
                i += 1
            elif key == "x":
                args = tokens[i + 1:i + 5]
                if len(args) < 4 or any(not _INT.fullmatch(a) for a, _ in args):
                    bad = next(((a, c) for a, c in args if not _INT.fullmatch(a)), (tok, col))
                    raise DiagramParseError(f"crossing needs 4 integer labels, got {bad[0]!r}", lineno, bad[1])
                labels = tuple(int(a) for a, _ in args)
                for (a, c), label in zip(args, labels):
                    if label < 0:
                        raise DiagramParseError(f"negative edge label {label}", lineno, c)
                    uses[label] = uses.get(label, 0) + 1
                    if uses[label] > 2:
                        raise DiagramParseError(f"edge label {label} used more than twice", lineno, c)
                crossings.append(labels)
                i += 5
            elif key == "genus":
                if i + 1 >= len(tokens):
                    raise DiagramParseError("genus header needs a value", lineno, col)
                value, vcol = tokens[i + 1]
                if not _INT.fullmatch(value) or int(value) < 0:
                    raise DiagramParseError(f"genus must be a nonnegative integer, got {value!r}", lineno, vcol)
                genus = int(value)
                i += 2
            elif key == "planar":
                planar = True
                i += 1
            elif tok == "U":
                unknot = True
                i += 1
            else:
                raise DiagramParseError(f"unexpected token {tok!r}", lineno, col)
    if not crossings and not unknot:
        raise DiagramParseError("empty document")
    if unknot and crossings:
        raise DiagramParseError("the U document cannot carry crossings")
    diagram = LinkDiagram(tuple(crossings), genus_header=genus, planar=planar, unknot=unknot)
    log.debug("parsed diagram: %d crossings, %d faces, genus %d", diagram.n, len(diagram.faces), diagram.genus)
    return diagram


def diagram_from_json(obj: dict) -> LinkDiagram:
    try:
        jsonschema.validate(obj, DIAGRAM_SCHEMA)
    except jsonschema.ValidationError as e:
        raise DiagramParseError(f"JSON diagram: {e.message}") from e
    return LinkDiagram(
        tuple(tuple(x) for x in obj["crossings"]),
        genus_header=obj.get("genus"),
        planar=obj.get("planar", False),
        unknot=obj.get("unknot", False),
    )


def diagram_to_json(diagram: LinkDiagram) -> dict:
    out: dict = {"crossings": [list(x) for x in diagram.crossings]}
    if diagram.genus_header is not None:
        out["genus"] = diagram.genus_header
    if diagram.planar:
        out["planar"] = True
    if diagram.unknot:
        out["unknot"] = True
    return out


def serialize_diagram(diagram: LinkDiagram) -> str:
    lines = []
    if diagram.genus_header is not None:
        lines.append(f"genus {diagram.genus_header}")
    if diagram.planar:
        lines.append("planar")
    if diagram.unknot:
        lines.append("U")
    lines.extend("X " + " ".join(str(x) for x in labels) for labels in diagram.crossings)
    return "\n".join(lines) + "\n"


def trace_faces(diagram: LinkDiagram) -> tuple[tuple[Dart, ...], ...]:
    return diagram.faces


def flip_crossing(diagram: LinkDiagram, c: int) -> LinkDiagram:
    """Switch over and under at crossing ``c`` by a cyclic shift of its labels."""
    labels = diagram.crossings[c]
    if diagram.over_enters_at_one(c):
        flipped = labels[1:] + labels[:1]
    else:
        flipped = labels[3:] + labels[:3]
    crossings = list(diagram.crossings)
    crossings[c] = flipped
    return LinkDiagram(tuple(crossings), diagram.genus_header, diagram.planar)


# ---- colorings ---------------------------------------------------------------
@dataclass(frozen=True)
class CheckerboardColoring:
    colors: tuple[str, ...]

    def faces_of(self, color: str) -> tuple[int, ...]:
        return tuple(f for f, col in enumerate(self.colors) if col == color)


def checkerboard_coloring(diagram: LinkDiagram) -> CheckerboardColoring:
    """Breadth-first 2-coloring across edges; the lowest face of each piece is white."""
    if diagram.unknot:
        return CheckerboardColoring((WHITE, BLACK))
    nbrs: dict[int, set[int]] = {f: set() for f in range(len(diagram.faces))}
    for c in range(diagram.n):
        for q in range(4):
            a, b = diagram.face_at(c, q), diagram.face_at(c, q + 1)
            nbrs[a].add(b)
            nbrs[b].add(a)
    colors: dict[int, str] = {}
    for root in sorted(nbrs):
        if root in colors:
            continue
        colors[root] = WHITE
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for g in sorted(nbrs[f]):
                if g not in colors:
                    colors[g] = other_color(colors[f])
                    queue.append(g)
                elif colors[g] == colors[f]:
                    raise NotColorableError(
                        f"faces {f} and {g} share an edge but are forced to the same color"
                    )
    return CheckerboardColoring(tuple(colors[f] for f in range(len(diagram.faces))))


def tait_label(diagram: LinkDiagram, coloring: CheckerboardColoring, c: int, color: str) -> str:
    """A when ``color`` occupies quadrants 1 and 3 of crossing ``c``."""
    return "A" if coloring.colors[diagram.face_at(c, 1)] == color else "B"


# ---- classification ----------------------------------------------------------
@dataclass(frozen=True)
class DiagramFlags:
    alternating: bool
    connected: bool
    reduced: bool
    cellular: bool
    diagram_prime: bool
    split: bool
    genus: int
    nugatory: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "alternating": self.alternating,
            "connected": self.connected,
            "reduced": self.reduced,
            "cellular": self.cellular,
            "diagram_prime": self.diagram_prime,
            "split": self.split,
            "genus": self.genus,
            "nugatory": [c + 1 for c in self.nugatory],
        }

    def summary(self) -> str:
        words = [
            "alternating" if self.alternating else "non-alternating",
            "reduced" if self.reduced else "non-reduced",
            "prime" if self.diagram_prime else "composite",
        ]
        if self.split:
            words.append("split")
        text = f"{' '.join(words)}, genus {self.genus}"
        if self.nugatory:
            text += f"; nugatory: {', '.join(f'c{c + 1}' for c in self.nugatory)}"
        return text


def doubled_crossings(diagram: LinkDiagram) -> tuple[int, ...]:
    """Crossings incident twice to the same face."""
    return tuple(
        c for c in range(diagram.n)
        if any(diagram.face_at(c, q) == diagram.face_at(c, q + 2) for q in range(2))
    )


def is_alternating(diagram: LinkDiagram) -> bool:
    return all((a.slot - b.slot) % 2 == 1 for a, b in diagram.edges)


def _has_separating_edge_pair(diagram: LinkDiagram) -> bool:
    edges = [(a.crossing, b.crossing) for a, b in diagram.edges]
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            uf = UnionFind(range(diagram.n))
            for k, (u, v) in enumerate(edges):
                if k not in (i, j):
                    uf.union(u, v)
            if len(list(uf.to_sets())) > 1:
                return True
    return False


def classify_diagram(diagram: LinkDiagram) -> DiagramFlags:
    connected = len(diagram.pieces) == 1
    reduced = not doubled_crossings(diagram)
    prime = connected and reduced and (diagram.unknot or not _has_separating_edge_pair(diagram))
    return DiagramFlags(
        alternating=is_alternating(diagram),
        connected=connected,
        reduced=reduced,
        cellular=diagram.cellular,
        diagram_prime=prime,
        split=not connected,
        genus=diagram.genus,
        nugatory=detect_nugatory(diagram),
    )


def _removable_at(diagram: LinkDiagram, c: int, q: int) -> bool:
    """Is the loop through crossing ``c`` and its doubled face a disk boundary?"""
    side_of_slot = {(q + 1) % 4: 0, (q + 2) % 4: 0, (q + 3) % 4: 1, q % 4: 1}

    def node(d: Dart):
        return ("cut", side_of_slot[d.slot]) if d.crossing == c else d.crossing

    g = nx.MultiGraph()
    g.add_nodes_from([("cut", 0), ("cut", 1)])
    g.add_nodes_from(x for x in range(diagram.n) if x != c)
    for a, b in diagram.edges:
        g.add_edge(node(a), node(b))
    if nx.has_path(g, ("cut", 0), ("cut", 1)):
        return False
    doubled = diagram.face_at(c, q)
    for side in (0, 1):
        part = nx.node_connected_component(g, ("cut", side))
        vertices = len(part)
        edges = sum(1 for a, _ in diagram.edges if node(a) in part) + 1
        faces = 1 + sum(
            1 for f, walk in enumerate(diagram.faces)
            if f != doubled and node(walk[0]) in part
        )
        if vertices - edges + faces == 1:
            return True
    return False


def detect_nugatory(diagram: LinkDiagram) -> tuple[int, ...]:
    """Doubled crossings, restricted to removably nugatory ones off the sphere."""
    found = []
    for c in doubled_crossings(diagram):
        if diagram.genus == 0:
            found.append(c)
            continue
        qs = [q for q in range(2) if diagram.face_at(c, q) == diagram.face_at(c, q + 2)]
        if any(_removable_at(diagram, c, q) for q in qs):
            found.append(c)
    return tuple(found)


# ---- states ------------------------------------------------------------------
@dataclass(frozen=True)
class State:
    labels: tuple[str, ...]

    def __post_init__(self):
        bad = [x for x in self.labels if x not in SMOOTHING]
        if bad:
            raise DiagramValidationError(f"state labels must be A or B, got {bad[0]!r}")

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, c: int) -> str:
        return self.labels[c]

    def __str__(self) -> str:
        return "".join(self.labels)

    def extended(self, more: Iterable[str]) -> "State":
        return State(self.labels + tuple(more))


def all_state(diagram: LinkDiagram, label: str) -> State:
    return State((label,) * diagram.n)


def seifert_state(diagram: LinkDiagram) -> State:
    """The oriented smoothing at every crossing."""
    return State(tuple("A" if diagram.over_enters_at_one(c) else "B" for c in range(diagram.n)))


def parse_state(text: str, diagram: LinkDiagram) -> State:
    key = text.strip()
    if key.lower() == "alla":
        return all_state(diagram, "A")
    if key.lower() == "allb":
        return all_state(diagram, "B")
    if key.lower() == "seifert":
        return seifert_state(diagram)
    labels = tuple(key.upper())
    if len(labels) != diagram.n:
        raise DiagramValidationError(f"state {text!r} has {len(labels)} labels for {diagram.n} crossings")
    return State(labels)


@dataclass(frozen=True)
class StateCircles:
    """Circles as cyclic tuples of outgoing darts, each in its canonical direction."""
    circles: tuple[tuple[Dart, ...], ...]
    circle_of: tuple[tuple[int, int, int, int], ...]
    disk_bounded: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.circles)


def _circle_walk(diagram: LinkDiagram, state: State, start: Dart) -> tuple[Dart, ...]:
    walk, cur = [], start
    while True:
        walk.append(cur)
        c, s = diagram.partner[cur]
        cur = Dart(c, SMOOTHING[state[c]][s])
        if cur == start:
            return tuple(walk)


def resolve_state(diagram: LinkDiagram, state: State) -> StateCircles:
    if len(state) != diagram.n:
        raise DiagramValidationError(f"state has {len(state)} labels for {diagram.n} crossings")
    if diagram.unknot:
        return StateCircles(((),), (), (True,))
    circles, table = [], [[-1] * 4 for _ in range(diagram.n)]
    for d in diagram.darts:
        if table[d.crossing][d.slot] >= 0:
            continue
        walk = _circle_walk(diagram, state, d)
        for out in walk:
            arrive = diagram.partner[out]
            table[out.crossing][out.slot] = len(circles)
            table[arrive.crossing][arrive.slot] = len(circles)
        circles.append(walk)
    circle_of = tuple(tuple(row) for row in table)
    if diagram.genus == 0:
        bounded = (True,) * len(circles)
    else:
        bounded = _disk_bounded(diagram, state, circles, circle_of)
    return StateCircles(tuple(circles), circle_of, bounded)


def _disk_bounded(diagram, state, circles, circle_of) -> tuple[bool, ...]:
    """Cut the surface along every circle; a circle bounds a disk when it is a
    bridge of the region/circle graph with an Euler-characteristic-1 side."""
    uf = UnionFind(range(len(diagram.faces)))
    bands: list[int] = []
    for c in range(diagram.n):
        q = 0 if state[c] == "A" else 1
        uf.union(diagram.face_at(c, q), diagram.face_at(c, q + 2))
        bands.append(diagram.face_at(c, q))
    region = {f: uf[f] for f in range(len(diagram.faces))}
    chi: dict = {}
    for f in range(len(diagram.faces)):
        chi[region[f]] = chi.get(region[f], 0) + 1
    for f in bands:
        chi[region[f]] -= 1
    g = nx.MultiGraph()
    g.add_nodes_from(chi)
    for i, walk in enumerate(circles):
        c, s = walk[0]
        g.add_edge(region[diagram.face_at(c, s)], region[diagram.face_at(c, s - 1)], key=i)
    out = []
    for i, walk in enumerate(circles):
        c, s = walk[0]
        left, right = region[diagram.face_at(c, s)], region[diagram.face_at(c, s - 1)]
        if left == right:
            out.append(False)
            continue
        h = g.copy()
        h.remove_edge(left, right, key=i)
        if nx.has_path(h, left, right):
            out.append(False)
            continue
        out.append(any(
            sum(chi[r] for r in nx.node_connected_component(h, side)) == 1
            for side in (left, right)
        ))
    return tuple(out)


def innermost_flags(diagram: LinkDiagram, state: State, circles: StateCircles | None = None) -> tuple[bool, ...]:
    """A circle is innermost when one side of it is a single face with every
    corner cut off by the smoothing (no bands, no other circles)."""
    if circles is None:
        circles = resolve_state(diagram, state)
    if diagram.unknot:
        return (True,)
    cut = {Dart(c, q) for c in range(diagram.n) for q in CUT_OFF[state[c]]}
    flags = [False] * len(circles)
    for walk in diagram.faces:
        if all(d in cut for d in walk):
            c, q = walk[0]
            flags[circles.circle_of[c][q]] = True
    return tuple(flags)


# ---- state surface to checkerboard surface -----------------------------------
@dataclass(frozen=True)
class CheckerboardRealization:
    diagram: LinkDiagram
    color: str
    state: State
    history: tuple[int, ...]  # non-innermost circle count before each pass


def _reroute(diagram: LinkDiagram, state: State, circle: tuple[Dart, ...]) -> tuple[LinkDiagram, State]:
    """Drag the first edge of ``circle`` across its state disk, parallel to the
    rest of the circle on its left, under every band attached from that side."""
    m = len(circle)
    arrive = [diagram.partner[circle[(i - 1) % m]] for i in range(m)]
    inward = [circle[i].slot == (arrive[i].slot + 1) % 4 for i in range(m)]

    # new crossings in the order the rerouted arc meets them
    new_nodes: list[tuple[str, int]] = []
    for v in [0] + list(range(m - 1, 0, -1)):
        if inward[v]:
            new_nodes.extend([("B", v), ("A", v)])
    index = {key: diagram.n + k for k, key in enumerate(new_nodes)}

    segments: list[tuple[tuple[int, int], tuple[int, int]]] = []
    on_circle = set()
    for i in range(m):
        out, nxt = circle[i], arrive[(i + 1) % m]
        on_circle.add(diagram.edge_of[out.crossing][out.slot])
        stops: list[tuple[tuple[int, int] | None, tuple[int, int] | None]] = [(None, tuple(out))]
        if inward[i]:
            stops.append(((index[("B", i)], 2), (index[("B", i)], 0)))
        if i == 0:
            for key in new_nodes:
                stops.append(((index[key], 1), (index[key], 3)))
        if inward[(i + 1) % m]:
            k = index[("A", (i + 1) % m)]
            stops.append(((k, 0), (k, 2)))
        stops.append((tuple(nxt), None))
        for (_, tail), (head, _) in zip(stops, stops[1:]):
            segments.append((tail, head))
    for e, (a, b) in enumerate(diagram.edges):
        if e not in on_circle:
            segments.append((tuple(a), tuple(b)))

    label = {}
    for k, (a, b) in enumerate(segments, start=1):
        label[a] = label[b] = k

    tail, _ = diagram.orientation[diagram.edge_of[circle[0].crossing][circle[0].slot]]
    forward = tail == circle[0]
    shift = 1 if forward else 3
    crossings = [tuple(label[(c, s)] for s in range(4)) for c in range(diagram.n)]
    labels = list(state.labels)
    for key in new_nodes:
        k = index[key]
        crossings.append(tuple(label[(k, (shift + j) % 4)] for j in range(4)))
        labels.append("A" if key[0] == "B" else "B")
    rerouted = LinkDiagram(tuple(crossings), planar=diagram.planar)
    if rerouted.derived_genus != 0:
        raise IntegrityError("rerouting produced a non-planar rotation system")
    return rerouted, State(tuple(labels))


def cut_off_color(diagram: LinkDiagram, state: State) -> str:
    coloring = checkerboard_coloring(diagram)
    if diagram.unknot:
        return BLACK
    found = {coloring.colors[diagram.face_at(c, CUT_OFF[state[c]][0])] for c in range(diagram.n)}
    if len(found) != 1:
        raise IntegrityError("cut-off quadrants are not a single checkerboard color")
    return found.pop()


def state_to_checkerboard(diagram: LinkDiagram, state: State) -> CheckerboardRealization:
    if diagram.genus > 0:
        raise HypothesisError("state_to_checkerboard needs a diagram on the sphere", ("genus_0",))
    if len(diagram.pieces) > 1:
        raise DiagramValidationError("state_to_checkerboard needs a connected diagram")
    history = []
    while True:
        circles = resolve_state(diagram, state)
        flags = innermost_flags(diagram, state, circles)
        outer = [i for i, flag in enumerate(flags) if not flag]
        if history and len(outer) >= history[-1]:
            raise IntegrityError(f"rerouting left {len(outer)} non-innermost circles, had {history[-1]}")
        history.append(len(outer))
        if not outer:
            break
        log.info("🔁 rerouting circle %d of %d (%d non-innermost)", outer[0], len(circles), len(outer))
        diagram, state = _reroute(diagram, state, circles.circles[outer[0]])
    return CheckerboardRealization(diagram, cut_off_color(diagram, state), state, tuple(history))


def crossing_names(crossings: Sequence[int]) -> str:
    return "".join(f"c{c + 1}" for c in crossings)
