# essence_kit/capsearch.py
"""
Height-bounded search for compressing disks against the flat cap system.

The checkerboard surface of ``color`` is cut by the opposite-color disks
(the cap system) and one vertical arc per crossing into two balls, above and
below.  A candidate disk X in normal position meets the cap system in cap
arcs and is cut by them into subdisks, each inside one ball.  A subdisk is a
polygon whose sides alternate between cap arcs (chords of cap disks) and
boundary arcs (chords of surface disks), with corners on vertical arcs, or on
the link itself when boundary touches are allowed.

Heights are computed by memoized interface expansion: an *interface* is a cap
arc seen from one ball, and R_h(side) collects the interfaces that bound a
hanging subtree of height at most h in that ball.

Boundary mode adds corners on link edges.  Algebraic mode lets boundary arcs
cross inside a surface disk, since only the interior of X is embedded; cap arcs
stay disjoint in every mode.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple

from essence_kit.config import Settings, get_settings
from essence_kit.diagram import LinkDiagram, checkerboard_coloring, other_color
from essence_kit.errors import BudgetExceeded, DiagramValidationError, HypothesisError, IntegrityError
from essence_kit.logconf import logging

log = logging.getLogger(__name__)

ABOVE, BELOW = "above", "below"
SIDES = (ABOVE, BELOW)
# quadrant -> quadrant sharing its side of the overpass (above) or underpass (below)
PAIRING = {ABOVE: (3, 2, 1, 0), BELOW: (1, 0, 3, 2)}
MODES = ("geometric", "boundary", "algebraic")


def opposite(side: str) -> str:
    return BELOW if side == ABOVE else ABOVE


class Junction(NamedTuple):
    """A corner of a subdisk: ``v`` on the vertical arc of a crossing (named by
    its cap-colored quadrant), or ``L`` on a link edge."""
    kind: str
    index: int
    quadrant: int = 0

    def as_json(self) -> list:
        return [self.kind, self.index + 1, self.quadrant] if self.kind == "v" else [self.kind, self.index + 1]


class Interface(NamedTuple):
    face: int
    a: Junction
    b: Junction

    @classmethod
    def of(cls, face: int, j1: Junction, j2: Junction) -> "Interface":
        a, b = sorted((j1, j2))
        return cls(face, a, b)

    def as_json(self) -> dict:
        return {"face": self.face, "ends": [self.a.as_json(), self.b.as_json()]}


class Disk(NamedTuple):
    face: int
    color: str
    items: tuple[tuple[str, int, int], ...]  # ("v", crossing, quadrant) / ("L", edge, 0), alternating


class VerticalArc(NamedTuple):
    crossing: int
    over_ends: tuple[int, int]
    under_ends: tuple[int, int]


@dataclass(frozen=True)
class FlatCapDecomposition:
    diagram: LinkDiagram
    color: str
    surface_disks: tuple[Disk, ...]
    cap_disks: tuple[Disk, ...]
    vertical_arcs: tuple[VerticalArc, ...]
    incidence: tuple[tuple[tuple[int, int], ...], ...]  # per crossing: (face, quadrant) x 4
    colors: tuple[str, ...]
    sides: tuple[str, str] = SIDES

    @property
    def black_disks(self) -> tuple[Disk, ...]:
        return self.surface_disks if self.color == "black" else self.cap_disks

    @property
    def white_disks(self) -> tuple[Disk, ...]:
        return self.cap_disks if self.color == "black" else self.surface_disks

    @property
    def corner_count(self) -> int:
        return sum(len(x) for x in self.incidence)

    def face_size(self, face: int) -> int:
        return 2 * len(self.diagram.faces[face])

    def corner_position(self, c: int, q: int) -> int:
        walk = self.diagram.faces[self.diagram.face_at(c, q)]
        return 2 * walk.index((c, q))

    def edge_faces(self, e: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """((surface face, position), (cap face, position)) along edge ``e``."""
        out = {}
        for d in self.diagram.edges[e]:
            f = self.diagram.face_at(d.crossing, d.slot)
            out[self.colors[f]] = (f, 2 * self.diagram.faces[f].index(d) + 1)
        return out[self.color], out[other_color(self.color)]

    # ---- junction geometry ------------------------------------------------
    def cap_end(self, j: Junction) -> tuple[int, int]:
        if j.kind == "v":
            return self.diagram.face_at(j.index, j.quadrant), self.corner_position(j.index, j.quadrant)
        return self.edge_faces(j.index)[1]

    def surface_end(self, j: Junction, side: str) -> tuple[int, int]:
        if j.kind == "v":
            q = PAIRING[side][j.quadrant]
            return self.diagram.face_at(j.index, q), self.corner_position(j.index, q)
        return self.edge_faces(j.index)[0]

    def junctions(self, with_link: bool) -> tuple[Junction, ...]:
        out = [
            Junction("v", c, q)
            for c in range(self.diagram.n)
            for q in range(4)
            if self.colors[self.diagram.face_at(c, q)] != self.color
        ]
        if with_link:
            out.extend(Junction("L", e) for e in range(len(self.diagram.edges)))
        return tuple(sorted(out))


def build_decomposition(diagram: LinkDiagram, color: str) -> FlatCapDecomposition:
    if len(diagram.pieces) > 1:
        raise DiagramValidationError("flat cap system needs a connected diagram")
    if diagram.unknot:
        raise DiagramValidationError("flat cap system needs at least one crossing")
    coloring = checkerboard_coloring(diagram)
    surface, caps = [], []
    for f, walk in enumerate(diagram.faces):
        items = []
        for c, q in walk:
            items.append(("v", c, q))
            items.append(("L", diagram.edge_of[c][q], 0))
        disk = Disk(f, coloring.colors[f], tuple(items))
        (surface if coloring.colors[f] == color else caps).append(disk)
    arcs = tuple(
        VerticalArc(c, (labels[1], labels[3]), (labels[0], labels[2]))
        for c, labels in enumerate(diagram.crossings)
    )
    incidence = tuple(tuple((diagram.face_at(c, q), q) for q in range(4)) for c in range(diagram.n))
    return FlatCapDecomposition(diagram, color, tuple(surface), tuple(caps), arcs, incidence, coloring.colors)


# ---- chords -------------------------------------------------------------------
def _normal_chord(j1: Junction, p1: int, j2: Junction, p2: int, size: int) -> bool:
    """Excludes arcs parallel to a vertical arc or to an adjacent link edge."""
    if j1 == j2:
        return False
    if j1.kind == "v" and j2.kind == "v":
        return j1.index != j2.index
    if j1.kind != j2.kind:
        return (p1 - p2) % size not in (1, size - 1)
    return True


def chords_cross(a: int, b: int, c: int, d: int, size: int) -> bool:
    if len({a, b, c, d}) < 4:
        return False
    span = (b - a) % size

    def inside(p):
        return 0 < (p - a) % size < span

    return inside(c) != inside(d)


def _non_crossing(chords: list[tuple[int, int, int]], size_of) -> bool:
    """``chords`` are (face, p1, p2); chords in the same face must not cross."""
    by_face: dict[int, list[tuple[int, int]]] = {}
    for f, p1, p2 in chords:
        by_face.setdefault(f, []).append((p1, p2))
    for f, items in by_face.items():
        size = size_of(f)
        for i in range(len(items)):
            for k in range(i + 1, len(items)):
                if chords_cross(*items[i], *items[k], size):
                    return False
    return True


# ---- subdisk types ------------------------------------------------------------
@dataclass(frozen=True, order=True)
class SubdiskType:
    """Cap arcs are (j0, j1), (j2, j3), ...; boundary arcs (j1, j2), ..., (j_last, j0).
    The first cap arc is the parent interface."""
    side: str
    junctions: tuple[Junction, ...]
    height: int = 0
    l_count: int = 0
    faces: tuple[int, ...] = ()  # cap face of each cap arc

    @property
    def arc_count(self) -> int:
        return len(self.junctions) // 2

    def cap_arc(self, i: int) -> Interface:
        return Interface.of(self.faces[i], self.junctions[2 * i], self.junctions[2 * i + 1])

    @property
    def parent(self) -> Interface:
        return self.cap_arc(0)

    @property
    def children(self) -> tuple[Interface, ...]:
        return tuple(self.cap_arc(i) for i in range(1, self.arc_count))

    def as_json(self) -> dict:
        return {
            "side": self.side,
            "height": self.height,
            "l_count": self.l_count,
            "junctions": [j.as_json() for j in self.junctions],
            "cap_faces": list(self.faces),
        }


def _canonical(side, seq: list[Junction], faces: list[int]) -> tuple:
    reflected = [seq[1], seq[0]] + seq[:1:-1]
    rfaces = faces[:1] + faces[:0:-1]
    return min((tuple(seq), tuple(faces)), (tuple(reflected), tuple(rfaces)))


def _subdisk_embedded(
    decomp: FlatCapDecomposition, side: str, seq: list[Junction], faces: list[int], mode: str = "geometric"
) -> bool:
    """Cap arcs never cross; boundary arcs may cross only in algebraic mode."""
    caps, bounds = [], []
    m = len(seq) // 2
    for i in range(m):
        f, p1 = decomp.cap_end(seq[2 * i])
        _, p2 = decomp.cap_end(seq[2 * i + 1])
        caps.append((f, p1, p2))
        g, p3 = decomp.surface_end(seq[2 * i + 1], side)
        _, p4 = decomp.surface_end(seq[(2 * i + 2) % len(seq)], side)
        bounds.append((g, p3, p4))
    if not _non_crossing(caps, decomp.face_size):
        return False
    return mode == "algebraic" or _non_crossing(bounds, decomp.face_size)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock()

    def tick(self, n: int = 1):
        with self._lock:
            self.used += n
            if self.used > self.limit:
                raise BudgetExceeded(f"cap search exceeded its node budget of {self.limit}", self.used)


@dataclass
class _Context:
    decomp: FlatCapDecomposition
    junctions: tuple[Junction, ...]
    max_arcs: int
    max_l: int
    budget: _Budget
    mode: str = "geometric"
    surface_at: dict = field(default_factory=dict)  # (face, side) -> junctions

    def __post_init__(self):
        for side in SIDES:
            for j in self.junctions:
                f, _ = self.decomp.surface_end(j, side)
                self.surface_at.setdefault((f, side), []).append(j)

    def cap_chords(self) -> list[tuple[int, Junction, Junction]]:
        by_face: dict[int, list[Junction]] = {}
        for j in self.junctions:
            by_face.setdefault(self.decomp.cap_end(j)[0], []).append(j)
        out = []
        for f in sorted(by_face):
            size = self.decomp.face_size(f)
            for j0 in by_face[f]:
                for j1 in by_face[f]:
                    if _normal_chord(j0, self.decomp.cap_end(j0)[1], j1, self.decomp.cap_end(j1)[1], size):
                        out.append((f, j0, j1))
        return out

    def boundary_ok(self, side: str, j1: Junction, j2: Junction) -> bool:
        f1, p1 = self.decomp.surface_end(j1, side)
        f2, p2 = self.decomp.surface_end(j2, side)
        return f1 == f2 and _normal_chord(j1, p1, j2, p2, self.decomp.face_size(f1))


def _expand(ctx: _Context, side: str, parent, below: dict, height: int) -> list[SubdiskType]:
    """All polygons in ``side`` with the given parent cap arc whose children lie
    in ``below`` (interface -> (level, l_count)) with top child level height-1."""
    face, j0, j1 = parent
    own_l = (j0.kind == "L") + (j1.kind == "L")
    if own_l > ctx.max_l:
        return []
    by_junction: dict[Junction, list] = {}
    for iface, (level, lc) in below.items():
        by_junction.setdefault(iface.a, []).append((iface.b, iface, level, lc))
        by_junction.setdefault(iface.b, []).append((iface.a, iface, level, lc))
    found: dict[tuple, SubdiskType] = {}
    seq, faces = [j0, j1], [face]

    def close(l_total: int, top: int):
        if height == 0 and len(seq) != 2:
            return
        if height > 0 and (len(seq) == 2 or top != height - 1):
            return
        if not ctx.boundary_ok(side, seq[-1], seq[0]):
            return
        if not _subdisk_embedded(ctx.decomp, side, seq, faces, ctx.mode):
            return
        key = _canonical(side, seq, faces)
        if key not in found:
            found[key] = SubdiskType(side, key[0], height, l_total, key[1])

    def grow(l_total: int, top: int):
        ctx.budget.tick()
        close(l_total, top)
        if height == 0 or len(seq) // 2 >= ctx.max_arcs:
            return
        f, _ = ctx.decomp.surface_end(seq[-1], side)
        for j2 in ctx.surface_at.get((f, side), ()):
            if j2 in seq or not ctx.boundary_ok(side, seq[-1], j2):
                continue
            for j3, iface, level, lc in by_junction.get(j2, ()):
                if j3 in seq or j3 == j2:
                    continue
                extra = lc  # counts the child arc ends too
                if l_total + extra > ctx.max_l:
                    continue
                seq.extend((j2, j3))
                faces.append(iface.face)
                grow(l_total + extra, max(top, level))
                seq[-2:] = []
                faces.pop()

    grow(own_l, -1)
    return sorted(found.values())


@dataclass(frozen=True)
class Strata:
    mode: str
    max_height: int
    max_l: int
    layers: tuple[tuple[SubdiskType, ...], ...]
    levels: dict  # side -> {Interface: (level, l_count)}
    nodes: int

    def count(self, height: int, side: str | None = None) -> int:
        if height >= len(self.layers):
            return 0
        return sum(1 for s in self.layers[height] if side is None or s.side == side)

    def witnesses(self, side: str, iface: Interface, max_height: int) -> list[SubdiskType]:
        return [
            s for layer in self.layers[: max_height + 1] for s in layer
            if s.side == side and s.parent == iface
        ]


def _mode_touches(mode: str, settings: Settings) -> int:
    if mode not in MODES:
        raise DiagramValidationError(f"unknown cap-search mode {mode!r}")
    return settings.max_l_touches if mode == "boundary" else 0


def enumerate_subdisks(
    decomp: FlatCapDecomposition,
    max_height: int,
    mode: str = "geometric",
    max_l: int | None = None,
    settings: Settings | None = None,
) -> Strata:
    settings = settings or get_settings()
    if max_height < 0:
        raise DiagramValidationError("height bound must be nonnegative")
    max_l = _mode_touches(mode, settings) if max_l is None else max_l
    ctx = _Context(
        decomp, decomp.junctions(with_link=max_l > 0), settings.max_cap_arcs, max_l,
        _Budget(settings.node_budget), mode,
    )
    parents = ctx.cap_chords()
    levels: dict[str, dict[Interface, tuple[int, int]]] = {ABOVE: {}, BELOW: {}}
    layers: list[tuple[SubdiskType, ...]] = []
    for k in range(max_height + 1):
        layer: list[SubdiskType] = []
        for side in SIDES:
            below = dict(levels[opposite(side)])
            if k > 0 and not any(level == k - 1 for level, _ in below.values()):
                continue
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                results = pool.map(lambda p: _expand(ctx, side, p, below, k), parents)
                for found in results:
                    layer.extend(found)
        layer.sort()
        fresh = 0
        for s in layer:
            level, lc = levels[s.side].get(s.parent, (k, s.l_count))
            if s.parent not in levels[s.side]:
                fresh += 1
            levels[s.side][s.parent] = (level, min(lc, s.l_count))
        layers.append(tuple(layer))
        log.info("stratum %d: %d subdisk types, %d new interfaces", k, len(layer), fresh)
        if not fresh:
            layers.extend(() for _ in range(k + 1, max_height + 1))
            break
    return Strata(mode, max_height, max_l, tuple(layers), levels, ctx.budget.used)


def dump_strata(decomp: FlatCapDecomposition, n: int, mode: str = "geometric", settings: Settings | None = None) -> dict:
    strata = enumerate_subdisks(decomp, n, mode, settings=settings)
    return {
        "color": decomp.color,
        "mode": mode,
        "max_height": n,
        "strata": [
            {
                "height": k,
                "count": len(layer),
                ABOVE: [s.as_json() for s in layer if s.side == ABOVE],
                BELOW: [s.as_json() for s in layer if s.side == BELOW],
            }
            for k, layer in enumerate(strata.layers)
        ],
        "interfaces": {
            side: sorted(
                ({**iface.as_json(), "level": lv, "l_count": lc} for iface, (lv, lc) in strata.levels[side].items()),
                key=lambda x: (x["level"], x["face"], x["ends"]),
            )
            for side in SIDES
        },
    }


# ---- assemblies ---------------------------------------------------------------
class AssemblyNode(NamedTuple):
    subdisk: SubdiskType
    parent: int | None
    parent_arc: int | None  # cap arc index in the parent glued to this node's arc 0
    pruning_height: int = 0


class TraceStep(NamedTuple):
    kind: str  # "v" or "L"
    index: int
    sign: int = 0


@dataclass(frozen=True)
class CapAssembly:
    nodes: tuple[AssemblyNode, ...]
    mode: str
    boundary_trace: tuple[TraceStep, ...]
    l_count: int
    max_height: int
    closed: bool = True

    def as_json(self) -> dict:
        return {
            "mode": self.mode,
            "l_count": self.l_count,
            "max_height": self.max_height,
            "nodes": [
                {"parent": n.parent, "parent_arc": n.parent_arc, "height": n.pruning_height, **n.subdisk.as_json()}
                for n in self.nodes
            ],
            "trace": [list(s) for s in self.boundary_trace],
        }


@dataclass(frozen=True)
class CapVerdict:
    closed: bool
    boundary_L_count: int
    essential: bool
    word: tuple[tuple[int, int], ...] = ()
    fake: bool = False
    fake_flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.essential and not self.closed:
            raise IntegrityError("an open assembly cannot be essential")

    def as_json(self) -> dict:
        return {
            "closed": self.closed,
            "boundary_L_count": self.boundary_L_count,
            "essential": self.essential,
            "word": [[c + 1, s] for c, s in self.word],
            "fake": self.fake,
            "fake_flags": list(self.fake_flags),
        }


def pruning_heights(parents: list[int | None]) -> list[int]:
    """Leaf-pruning heights of a tree given by parent pointers."""
    n = len(parents)
    nbrs = [set() for _ in range(n)]
    for i, p in enumerate(parents):
        if p is not None:
            nbrs[i].add(p)
            nbrs[p].add(i)
    alive, heights, h = set(range(n)), [0] * n, 0
    while alive:
        leaves = [i for i in alive if len(nbrs[i] & alive) <= 1]
        for i in leaves:
            heights[i] = h
        alive -= set(leaves)
        h += 1
    return heights


def _trace(decomp: FlatCapDecomposition, nodes: list[tuple[SubdiskType, int | None, int | None]]) -> tuple[TraceStep, ...]:
    match: dict[tuple[int, int], int] = {}
    for i, (_, parent, arc) in enumerate(nodes):
        if parent is not None:
            match[(i, 0)] = parent
            match[(parent, arc)] = i
    steps: list[TraceStep] = []
    node, pos = 0, 1
    start = (node, pos)
    while True:
        sub = nodes[node][0]
        size = len(sub.junctions)
        pos = (pos + 1) % size if pos % 2 else (pos - 1) % size
        j = sub.junctions[pos]
        other = match.get((node, pos // 2))
        if other is None:
            raise HypothesisError("assembly has an unmatched cap arc", ("closed",))
        nxt = nodes[other][0]
        if j.kind == "v":
            src = PAIRING[sub.side][j.quadrant]
            steps.append(TraceStep("v", j.index, 1 if src < 2 else -1))
        else:
            steps.append(TraceStep("L", j.index))
        node, pos = other, nxt.junctions.index(j)
        if (node, pos) == start or len(steps) > 4 * sum(len(n[0].junctions) for n in nodes):
            break
    return tuple(steps)


def reduce_cyclic_word(letters) -> tuple[tuple[int, int], ...]:
    stack: list[tuple[int, int]] = []
    for c, s in letters:
        if stack and stack[-1] == (c, -s):
            stack.pop()
        else:
            stack.append((c, s))
    i, k = 0, len(stack) - 1
    while i < k and stack[i] == (stack[k][0], -stack[k][1]):
        i += 1
        k -= 1
    return tuple(stack[i:k + 1])


def boundary_word(assembly: CapAssembly, decomp: FlatCapDecomposition | None = None) -> tuple[tuple[tuple[int, int], ...], bool]:
    """Project the boundary onto the Tait graph of the surface and reduce it."""
    if not assembly.closed:
        raise HypothesisError("boundary word needs a closed assembly", ("closed",))
    word = reduce_cyclic_word((s.index, s.sign) for s in assembly.boundary_trace if s.kind == "v")
    return word, bool(word)


def _arcs_between_touches(trace: tuple[TraceStep, ...]) -> list[tuple[tuple[int, int], ...]]:
    cut = [i for i, s in enumerate(trace) if s.kind == "L"]
    if not cut:
        return []
    arcs = []
    for a, b in zip(cut, cut[1:] + [cut[0] + len(trace)]):
        segment = [trace[i % len(trace)] for i in range(a + 1, b)]
        stack: list[tuple[int, int]] = []
        for s in segment:
            if stack and stack[-1] == (s.index, -s.sign):
                stack.pop()
            else:
                stack.append((s.index, s.sign))
        arcs.append(tuple(stack))
    return arcs


def fake_cap_filters(assembly: CapAssembly, verdict: CapVerdict) -> tuple[str, ...]:
    """Soundness checks on caps marked fake; a non-empty result is a contradiction."""
    flags = []
    if not verdict.fake:
        return ()
    if verdict.boundary_L_count % 2:
        flags.append("odd-L-count")
    arcs = _arcs_between_touches(assembly.boundary_trace)
    r = verdict.boundary_L_count // 2
    if r and len(arcs) == 2 * r:
        essential = [bool(a) for a in arcs]
        for start in range(len(arcs)):
            if all(essential[(start + i) % len(arcs)] for i in range(r)):
                flags.append("essential-string")
                break
    return tuple(flags)


def _hang(strata: Strata, side: str, iface: Interface, limit: int, budget: _Budget) -> Iterator[list]:
    """Hanging subtrees for ``iface`` in ``side``: lists of (subdisk, parent, arc)
    with local parent indices, the root first.  Generated lazily, one budget
    node per witness and per child combination."""
    for sub in strata.witnesses(side, iface, limit):
        budget.tick()
        yield from _graft(strata, side, sub, 1, [(sub, None, None)], budget)


def _graft(strata: Strata, side: str, sub: SubdiskType, arc: int, tree: list, budget: _Budget) -> Iterator[list]:
    if arc == sub.arc_count:
        budget.tick()
        yield tree
        return
    for subtree in _hang(strata, opposite(side), sub.cap_arc(arc), sub.height - 1, budget):
        offset = len(tree)
        grown = tree + [(subtree[0][0], 0, arc)] + [(s, p + offset, a) for s, p, a in subtree[1:]]
        yield from _graft(strata, side, sub, arc + 1, grown, budget)


def _assembly_ok(decomp: FlatCapDecomposition, nodes, mode: str) -> bool:
    caps, surface = [], []
    for sub, _, _ in nodes:
        m = sub.arc_count
        for i in range(m):
            f, p1 = decomp.cap_end(sub.junctions[2 * i])
            _, p2 = decomp.cap_end(sub.junctions[2 * i + 1])
            caps.append((f, p1, p2))
            g, p3 = decomp.surface_end(sub.junctions[2 * i + 1], sub.side)
            _, p4 = decomp.surface_end(sub.junctions[(2 * i + 2) % (2 * m)], sub.side)
            surface.append((g, p3, p4))
    if not _non_crossing(caps, decomp.face_size):
        return False
    return mode == "algebraic" or _non_crossing(surface, decomp.face_size)


@dataclass(frozen=True)
class CapSearchResult:
    color: str
    mode: str
    max_height: int
    max_l: int
    strata: Strata
    caps: tuple[tuple[CapAssembly, CapVerdict], ...]
    certificate: str | None
    budget_exceeded: bool = False

    @property
    def compressible(self) -> bool:
        return any(v.essential for _, v in self.caps)

    def summary(self) -> str:
        parts = [f"h{k}: {'>0' if layer else '0'}" for k, layer in enumerate(self.strata.layers)]
        if self.compressible:
            tail = "compressing cap found"
        elif self.budget_exceeded:
            tail = "node budget exhausted before assembly finished"
        else:
            tail = f"incompressible ≤ height {self.max_height}"
        return ", ".join(parts) + " — " + tail

    def as_json(self) -> dict:
        return {
            "color": self.color,
            "mode": self.mode,
            "max_height": self.max_height,
            "max_l": self.max_l,
            "strata": [len(layer) for layer in self.strata.layers],
            "caps": [{"assembly": a.as_json(), "verdict": v.as_json()} for a, v in self.caps],
            "compressible": self.compressible,
            "certificate": self.certificate,
            "budget_exceeded": self.budget_exceeded,
            "nodes": self.strata.nodes,
        }


def find_bounded_height_caps(
    decomp: FlatCapDecomposition,
    max_height: int,
    mode: str = "geometric",
    max_l: int | None = None,
    settings: Settings | None = None,
) -> CapSearchResult:
    """Closed assemblies with every height at most ``max_height`` and at most
    ``max_l`` link touches.  A closed assembly exists iff some interface is in
    R_n from both balls; each such interface is expanded into witness trees
    until an essential one passes the global chord checks."""
    settings = settings or get_settings()
    max_l = _mode_touches(mode, settings) if max_l is None else max_l
    strata = enumerate_subdisks(decomp, max_height, mode, max_l, settings)
    budget = _Budget(settings.node_budget)
    budget.used = strata.nodes
    caps: list[tuple[CapAssembly, CapVerdict]] = []
    common = sorted(set(strata.levels[ABOVE]) & set(strata.levels[BELOW]))
    exhausted = False
    for iface in common:
        shared = (iface.a.kind == "L") + (iface.b.kind == "L")
        if strata.levels[ABOVE][iface][1] + strata.levels[BELOW][iface][1] - shared > max_l:
            continue
        picked, exhausted = pick_cap(_closed_caps(decomp, strata, iface, max_height, max_l, mode, budget))
        if picked is not None:
            caps.append(picked)
        if exhausted:
            # strata are complete; only the witness trees ran out
            log.warning("node budget hit while assembling caps; %d found so far", len(caps))
            break
    certificate = None
    if mode == "geometric" and max_l == 0 and not exhausted and not any(v.essential for _, v in caps):
        if strata.count(0) == 0:
            certificate = "height-0 stratum is empty: no subdisk tree has a leaf, so no cap exists at any height"
        else:
            above = len(strata.levels[ABOVE])
            below = len(strata.levels[BELOW])
            certificate = (
                f"no essential {mode} cap of height <= {max_height} with <= {max_l} link touches: "
                f"{len(common)} of {above}/{below} realizable interfaces close up, none essentially"
            )
    log.info("🔎 cap search (%s, h<=%d, L<=%d): %d closed caps", mode, max_height, max_l, len(caps))
    return CapSearchResult(decomp.color, mode, max_height, max_l, strata, tuple(caps), certificate, exhausted)


def pick_cap(candidates: Iterable[tuple[CapAssembly, CapVerdict]]) -> tuple[tuple[CapAssembly, CapVerdict] | None, bool]:
    """The first essential cap, else the first fake one, and whether the node
    budget ran out before the candidates did."""
    first = None
    try:
        for cap in candidates:
            if cap[1].essential:
                return cap, False
            if first is None:
                first = cap
    except BudgetExceeded:
        return first, True
    return first, False


def _closed_caps(decomp, strata, iface, max_height, max_l, mode, budget) -> Iterator[tuple[CapAssembly, CapVerdict]]:
    for top in _hang(strata, ABOVE, iface, max_height, budget):
        if not _assembly_ok(decomp, top, mode):
            continue
        for bottom in _hang(strata, BELOW, iface, max_height, budget):
            budget.tick()
            nodes = list(top)
            offset = len(nodes)
            for k, (s, p, a) in enumerate(bottom):
                nodes.append((s, 0 if k == 0 else p + offset, 0 if k == 0 else a))
            # every link touch is an end of one cap arc, shared by two nodes
            l_count = sum(1 for s, _, _ in nodes for j in s.junctions if j.kind == "L") // 2
            if l_count > max_l or not _assembly_ok(decomp, nodes, mode):
                continue
            heights = pruning_heights([p for _, p, _ in nodes])
            if any(h > s.height for h, (s, _, _) in zip(heights, nodes)):
                raise IntegrityError("leaf-pruning height exceeds a stored stratum height")
            trace = _trace(decomp, nodes)
            assembly = CapAssembly(
                tuple(AssemblyNode(s, p, a, h) for (s, p, a), h in zip(nodes, heights)),
                mode, trace, l_count, max(heights),
            )
            word, essential = boundary_word(assembly, decomp)
            verdict = CapVerdict(True, l_count, essential, word, fake=not essential)
            if verdict.fake:
                verdict = replace(verdict, fake_flags=fake_cap_filters(assembly, verdict))
            yield assembly, verdict
