"""Singular disk diagrams as combinatorial maps.

A dart is ``(edge, +1)`` (source to target) or ``(edge, -1)``.  The rotation
at a vertex lists the darts leaving it counterclockwise.  Faces are dart
cycles with the face on the left, so the successor of a dart ``d`` inside
its face is the clockwise neighbour of ``rev(d)`` at the head of ``d``.  The
darts left over form one more cycle, the outer face; the boundary of the
diagram is that cycle reversed (counterclockwise around the disk), started
at the base vertex.

The rotation system is the planarity certificate: a connected map is planar
iff ``V - E + (number of dart cycles) == 2``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    AmbiguousLift,
    DiagramError,
    InputError,
    LemmaViolation,
    NoLift,
    NotPlanar,
    NotSimplyConnected,
    PreconditionFailed,
)
from .graph_core import Alphabet, LabelledGraph, Letter, Word, free_reduce, inverse, read_end

Dart = tuple[int, int]


def rev(d: Dart) -> Dart:
    return (d[0], -d[1])


@dataclass(frozen=True)
class DEdge:
    source: int
    target: int
    letter: int | None = None


class Diagram:
    """Immutable combinatorial map with faces, base vertex and boundary walk."""

    def __init__(self, num_vertices: int, edges: Sequence, rotation: Sequence[Sequence[Dart]],
                 faces: Sequence[Sequence[Dart]], base: int, boundary: Sequence[Dart],
                 alphabet: Alphabet | None = None, arc_words: Sequence[Word | None] | None = None):
        self.num_vertices = num_vertices
        self.edges = tuple(e if isinstance(e, DEdge) else DEdge(*e) for e in edges)
        self.rotation = tuple(tuple(tuple(x) for x in r) for r in rotation)
        self.faces = tuple(tuple(tuple(x) for x in f) for f in faces)
        self.base = base
        self.boundary = tuple(tuple(x) for x in boundary)
        self.alphabet = alphabet
        self.arc_words = None if arc_words is None else tuple(arc_words)
        self._pos = {}
        for v, r in enumerate(self.rotation):
            for k, x in enumerate(r):
                self._pos[x] = (v, k)

    # -- constructors

    @classmethod
    def from_faces(cls, num_vertices: int, edges: Sequence, faces: Sequence[Sequence[Dart]], base: int,
                   boundary: Sequence[Dart] | None = None, alphabet: Alphabet | None = None) -> "Diagram":
        """Build a diagram, deriving the rotation from the dart cycles.

        With ``boundary`` every dart lies on a known cycle and the rotation
        is forced.  Without it each vertex may miss at most one corner (the
        outer one), which is then closed up.
        """
        edges = tuple(e if isinstance(e, DEdge) else DEdge(*e) for e in edges)
        cycles = [list(f) for f in faces]
        if boundary is not None:
            cycles.append([rev(x) for x in reversed(boundary)])
        rotation = derive_rotation(num_vertices, edges, cycles)
        d = cls(num_vertices, edges, rotation, faces, base, (), alphabet)
        if boundary is None:
            boundary = d.derive_boundary(base)
        return cls(num_vertices, edges, rotation, faces, base, boundary, alphabet)

    def derive_boundary(self, base: int, first: Dart | None = None) -> tuple[Dart, ...]:
        """Counterclockwise boundary walk from ``base`` read off the outer dart cycle."""
        face_darts = {x for f in self.faces for x in f}
        outer = [x for r in self.rotation for x in r if x not in face_darts]
        if not outer:
            return ()
        starts = [rev(x) for x in outer if self.head(x) == base]
        if first is not None:
            if first not in starts:
                raise DiagramError("requested first boundary dart is not on the boundary at the base")
            start = first
        else:
            if not starts:
                raise DiagramError("base vertex is not on the boundary")
            # the first dart of the base rotation that lies on the boundary
            order = {x: k for k, x in enumerate(self.rotation[base])}
            start = min(starts, key=lambda x: order[x])
        walk = [start]
        while True:
            # boundary successor: reverse of the outer predecessor
            x = rev(self.face_next_inverse(rev(walk[-1])))
            if x == start:
                break
            walk.append(x)
            if len(walk) > 2 * len(self.edges) + 1:
                raise DiagramError("boundary walk does not close")
        return tuple(walk)

    # -- local structure

    def tail(self, x: Dart) -> int:
        e = self.edges[x[0]]
        return e.source if x[1] > 0 else e.target

    def head(self, x: Dart) -> int:
        e = self.edges[x[0]]
        return e.target if x[1] > 0 else e.source

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def sigma(self, x: Dart) -> Dart:
        v, k = self._pos[x]
        r = self.rotation[v]
        return r[(k + 1) % len(r)]

    def sigma_inverse(self, x: Dart) -> Dart:
        v, k = self._pos[x]
        r = self.rotation[v]
        return r[(k - 1) % len(r)]

    def face_next(self, x: Dart) -> Dart:
        return self.sigma_inverse(rev(x))

    def face_next_inverse(self, x: Dart) -> Dart:
        return rev(self.sigma(x))

    def dart_word(self, x: Dart) -> Word | None:
        if self.arc_words is not None:
            w = self.arc_words[x[0]]
            if w is None:
                return None
            return w if x[1] > 0 else inverse(w)
        letter = self.edges[x[0]].letter
        if letter is None:
            return None
        return ((letter, x[1]),)

    def walk_word(self, darts: Iterable[Dart]) -> Word:
        out: list[Letter] = []
        for x in darts:
            w = self.dart_word(x)
            if w is None:
                raise PreconditionFailed("diagram edges are unlabelled")
            out.extend(w)
        return tuple(out)

    def face_word(self, k: int) -> Word:
        return self.walk_word(self.faces[k])

    def boundary_word(self) -> Word:
        return self.walk_word(self.boundary)

    @property
    def area(self) -> int:
        return len(self.faces)

    def outer_darts(self) -> set[Dart]:
        return {rev(x) for x in self.boundary}

    def boundary_vertices(self) -> set[int]:
        if not self.boundary:
            return {self.base}
        return {self.tail(x) for x in self.boundary}

    def edge_is_interior(self, e: int) -> bool:
        outer = self.outer_darts()
        return (e, 1) not in outer and (e, -1) not in outer

    def face_of(self) -> dict[Dart, int]:
        return {x: k for k, f in enumerate(self.faces) for x in f}

    def orbits(self) -> list[tuple[Dart, ...]]:
        seen: set[Dart] = set()
        out = []
        for r in self.rotation:
            for x in r:
                if x in seen:
                    continue
                cyc = [x]
                seen.add(x)
                y = self.face_next(x)
                while y != x:
                    cyc.append(y)
                    seen.add(y)
                    y = self.face_next(y)
                out.append(tuple(cyc))
        return out

    # -- serialisation

    def to_dict(self) -> dict:
        def letter_out(e: DEdge):
            if e.letter is None:
                return None
            return self.alphabet.letters[e.letter] if self.alphabet else e.letter

        out = {
            "alphabet": list(self.alphabet.letters) if self.alphabet else None,
            "vertices": self.num_vertices,
            "edges": [[e.source, e.target, letter_out(e)] for e in self.edges],
            "faces": [[list(x) for x in f] for f in self.faces],
            "base": self.base,
            "boundary": [list(x) for x in self.boundary],
            "rotation": [[list(x) for x in r] for r in self.rotation],
        }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Diagram":
        try:
            alphabet = Alphabet(tuple(data["alphabet"])) if data.get("alphabet") else None
            edges = []
            for s, t, x in data["edges"]:
                if x is None:
                    letter = None
                elif alphabet is not None:
                    letter = alphabet.index(x)
                else:
                    letter = int(x)
                edges.append(DEdge(int(s), int(t), letter))
            faces = [[(int(e), int(s)) for e, s in f] for f in data["faces"]]
            nv = int(data["vertices"])
            base = int(data.get("base", 0))
            boundary = data.get("boundary")
            rotation = data.get("rotation")
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed diagram: {exc}") from None
        if rotation is None:
            bd = None if boundary is None else [(int(e), int(s)) for e, s in boundary]
            return cls.from_faces(nv, edges, faces, base, bd, alphabet)
        rotation = [[(int(e), int(s)) for e, s in r] for r in rotation]
        d = cls(nv, edges, rotation, faces, base, (), alphabet)
        if boundary is None:
            boundary = d.derive_boundary(base)
        else:
            boundary = [(int(e), int(s)) for e, s in boundary]
        return cls(nv, edges, rotation, faces, base, boundary, alphabet)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, Diagram) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"Diagram(V={self.num_vertices}, E={len(self.edges)}, F={len(self.faces)})"


def derive_rotation(num_vertices: int, edges: Sequence[DEdge], cycles: Sequence[Sequence[Dart]]) -> list[list[Dart]]:
    """Rotation system forced by dart cycles: ``sigma(next(d)) = rev(d)``."""

    def tail(x):
        e = edges[x[0]]
        return e.source if x[1] > 0 else e.target

    succ: dict[Dart, Dart] = {}
    for cyc in cycles:
        n = len(cyc)
        for k in range(n):
            d, nxt = cyc[k], cyc[(k + 1) % n]
            if tail(nxt) != tail(rev(d)):
                raise DiagramError(f"dart cycle is not a closed walk at {d} -> {nxt}")
            if nxt in succ and succ[nxt] != rev(d):
                raise NotPlanar(f"dart {nxt} is used by two corners")
            succ[nxt] = rev(d)
    rotation = []
    for v in range(num_vertices):
        darts = sorted([(i, 1) for i, e in enumerate(edges) if e.source == v]
                       + [(i, -1) for i, e in enumerate(edges) if e.target == v])
        if not darts:
            rotation.append([])
            continue
        dset = set(darts)
        local = {x: succ[x] for x in darts if x in succ}
        preds = set(local.values())
        if len(local) < len(darts):
            heads = [x for x in darts if x not in preds]
            tails = [x for x in darts if x not in local]
            if len(heads) != 1 or len(tails) != 1:
                raise DiagramError(f"rotation at vertex {v} is ambiguous; supply the boundary")
            local[tails[0]] = heads[0]
        order = [darts[0]]
        while True:
            nxt = local[order[-1]]
            if nxt not in dset:
                raise DiagramError(f"corner at vertex {v} leaves the vertex")
            if nxt == order[0]:
                break
            order.append(nxt)
            if len(order) > len(darts):
                raise DiagramError(f"rotation at vertex {v} does not close")
        if len(order) != len(darts):
            raise NotPlanar(f"vertex {v} has a neighbourhood that is not a single disk")
        rotation.append(order)
    return rotation


# ------------------------------------------------------------------ validate


@dataclass
class ValidationReport:
    vertices: int
    edges: int
    faces: int
    boundary_length: int
    interior_faces: list[int]
    boundary_faces: list[int]
    interior_edges: list[int]
    arcs: list[list[Dart]]
    interior_arcs: list[list[Dart]]
    spurs: list[int]
    boundary_word: str | None = None

    def to_dict(self) -> dict:
        return {
            "valid": True,
            "vertices": self.vertices,
            "edges": self.edges,
            "faces": self.faces,
            "boundary_length": self.boundary_length,
            "interior_faces": self.interior_faces,
            "boundary_faces": self.boundary_faces,
            "interior_edges": self.interior_edges,
            "arcs": [[list(x) for x in a] for a in self.arcs],
            "interior_arcs": [[list(x) for x in a] for a in self.interior_arcs],
            "spurs": self.spurs,
            "boundary_word": self.boundary_word,
        }


def _connected(d: Diagram) -> bool:
    if d.num_vertices == 0:
        return False
    adj = [[] for _ in range(d.num_vertices)]
    for e in d.edges:
        adj[e.source].append(e.target)
        adj[e.target].append(e.source)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == d.num_vertices


def _same_cycle(a: Sequence[Dart], b: Sequence[Dart]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        k = list(b).index(a[0])
    except ValueError:
        return False
    return tuple(b[k:]) + tuple(b[:k]) == tuple(a)


def validate(d: Diagram) -> ValidationReport:
    """Check that ``d`` is a singular disk diagram and classify its parts."""
    for v, r in enumerate(d.rotation):
        expect = sorted([(i, 1) for i, e in enumerate(d.edges) if e.source == v]
                        + [(i, -1) for i, e in enumerate(d.edges) if e.target == v])
        if sorted(r) != expect:
            raise DiagramError(f"rotation at vertex {v} is not a permutation of its darts")
    if len(d.rotation) != d.num_vertices:
        raise DiagramError("rotation table size differs from the vertex count")
    if not _connected(d):
        raise NotSimplyConnected("diagram is disconnected")
    orbits = d.orbits()
    euler = d.num_vertices - len(d.edges) + len(orbits) + (1 if not d.edges else 0)
    if euler != 2:
        raise NotPlanar(f"Euler characteristic {euler} of the embedding is not 2")
    remaining = list(orbits)
    for k, f in enumerate(d.faces):
        if not f:
            raise DiagramError(f"face {k} is empty")
        match = [o for o in remaining if _same_cycle(f, o)]
        if not match:
            raise DiagramError(f"face {k} is not a face of the embedding")
        remaining.remove(match[0])
    if d.edges and len(remaining) != 1:
        if not remaining:
            raise NotSimplyConnected("no outer face: the complex is a sphere")
        raise NotSimplyConnected(f"{len(remaining)} regions are not faces: the diagram has holes")
    outer = remaining[0] if remaining else ()
    expect_boundary = tuple(rev(x) for x in reversed(outer))
    if not _same_cycle(d.boundary, expect_boundary):
        raise DiagramError("boundary is not the counterclockwise outer walk")
    if d.boundary and d.tail(d.boundary[0]) != d.base:
        raise DiagramError("boundary does not start at the base vertex")
    if not d.boundary and d.base != 0:
        raise DiagramError("base vertex out of range")

    outer_set = set(outer)
    boundary_faces, interior_faces = [], []
    for k, f in enumerate(d.faces):
        if any(rev(x) in outer_set for x in f):
            boundary_faces.append(k)
        else:
            interior_faces.append(k)
    interior_edges = [i for i in range(len(d.edges)) if (i, 1) not in outer_set and (i, -1) not in outer_set]
    arcs = list_arcs(d)
    interior_set = set(interior_edges)
    interior_arcs = [a for a in arcs if all(x[0] in interior_set for x in a)]
    spurs = [i for i, e in enumerate(d.edges) if d.degree(e.source) == 1 or d.degree(e.target) == 1]
    try:
        from .graph_core import format_word

        bw = format_word(d.boundary_word(), d.alphabet) if d.alphabet else None
    except PreconditionFailed:
        bw = None
    return ValidationReport(d.num_vertices, len(d.edges), len(d.faces), len(d.boundary), interior_faces,
                            boundary_faces, interior_edges, arcs, interior_arcs, spurs, bw)


def list_arcs(d: Diagram) -> list[list[Dart]]:
    """Maximal paths whose inner vertices have degree two."""
    nodes = [v for v in range(d.num_vertices) if d.degree(v) != 2]
    seen_edges: set[int] = set()
    arcs = []
    for v in nodes:
        for x in d.rotation[v]:
            if x[0] in seen_edges:
                continue
            arc = [x]
            while d.degree(d.head(arc[-1])) == 2 and d.head(arc[-1]) not in nodes:
                h = d.head(arc[-1])
                a, b = d.rotation[h]
                arc.append(b if a == rev(arc[-1]) else a)
            seen_edges.update(y[0] for y in arc)
            arcs.append(arc)
    # closed cycles made only of degree-2 vertices
    for v in range(d.num_vertices):
        for x in d.rotation[v]:
            if x[0] in seen_edges:
                continue
            arc = [x]
            while d.head(arc[-1]) != v:
                h = d.head(arc[-1])
                a, b = d.rotation[h]
                arc.append(b if a == rev(arc[-1]) else a)
            seen_edges.update(y[0] for y in arc)
            arcs.append(arc)
    return arcs


# ---------------------------------------------------------- forget degree 2


def forget_degree2(d: Diagram) -> Diagram:
    """Replace every maximal chain through degree-2 vertices by one edge.

    Labels are dropped; the word of each new edge is kept in ``arc_words``
    when the input was labelled.  A cycle made only of degree-2 vertices
    keeps one vertex (the base if it lies there) and becomes a loop.
    """
    keep = set()
    for v in range(d.num_vertices):
        r = d.rotation[v]
        if len(r) != 2 or r[0][0] == r[1][0]:
            keep.add(v)
    covered = set(keep)

    def chain(x: Dart) -> list[Dart]:
        arc = [x]
        while d.head(arc[-1]) not in keep:
            a, b = d.rotation[d.head(arc[-1])]
            arc.append(b if a == rev(arc[-1]) else a)
        return arc

    for v in sorted(keep):
        for x in d.rotation[v]:
            covered.update(d.head(y) for y in chain(x))
    # cycles made only of degree-2 vertices keep one vertex, the base if possible
    for v in sorted(range(d.num_vertices), key=lambda u: (u != d.base, u)):
        if v in covered:
            continue
        keep.add(v)
        covered.update(d.head(y) for y in chain(d.rotation[v][0]))
    if d.num_vertices and not d.edges:
        keep = {0}

    labelled = all(d.dart_word((i, 1)) is not None for i in range(len(d.edges)))
    dart_map: dict[Dart, Dart] = {}
    arcs: list[list[Dart]] = []
    for v in sorted(keep):
        for x in d.rotation[v]:
            if x in dart_map:
                continue
            arc = chain(x)
            k = len(arcs)
            arcs.append(arc)
            dart_map[x] = (k, 1)
            dart_map[rev(arc[-1])] = (k, -1)
    arc_len = {}
    for k, arc in enumerate(arcs):
        arc_len[(k, 1)] = arc_len[(k, -1)] = len(arc)

    def compress(walk: Sequence[Dart], cyclic: bool) -> list[Dart]:
        walk = list(walk)
        if not walk:
            return []
        if cyclic:
            s = next(i for i, x in enumerate(walk) if d.tail(x) in keep)
            walk = walk[s:] + walk[:s]
        out, i = [], 0
        while i < len(walk):
            y = dart_map[walk[i]]
            out.append(y)
            i += arc_len[y]
        return out

    base = d.base
    boundary = list(d.boundary)
    if base not in keep and boundary:
        s = next(i for i, x in enumerate(boundary) if d.tail(x) in keep)
        boundary = boundary[s:] + boundary[:s]
        base = d.tail(boundary[0])
    renum = {v: i for i, v in enumerate(sorted(keep))}
    new_edges = [DEdge(renum[d.tail(a[0])], renum[d.head(a[-1])], None) for a in arcs]
    rotation = [[dart_map[x] for x in d.rotation[v]] for v in sorted(keep)]
    faces = [compress(f, True) for f in d.faces]
    arc_words = [d.walk_word(a) for a in arcs] if labelled else None
    return Diagram(len(keep), new_edges, rotation, faces, renum[base], compress(boundary, False),
                   d.alphabet, arc_words)


# ------------------------------------------------------------ (p,q) checks


@dataclass
class PQVerdict:
    holds: bool
    violation: dict | None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "violation": self.violation}


def is_pq_diagram(d: Diagram, p: int, q: int, bracket: bool = False) -> PQVerdict:
    bverts = d.boundary_vertices()
    for v in range(d.num_vertices):
        if v not in bverts and d.degree(v) < p:
            return PQVerdict(False, {"kind": "vertex", "vertex": v, "degree": d.degree(v)})
    outer = d.outer_darts()
    for k, f in enumerate(d.faces):
        interior = not any(rev(x) in outer for x in f)
        if (bracket or interior) and len(f) < q:
            return PQVerdict(False, {"kind": "face", "face": k, "edges": len(f)})
    return PQVerdict(True, None)


@dataclass
class CurvatureResult:
    total: Fraction | int
    bound: int
    satisfied: bool

    def to_dict(self) -> dict:
        return {"sum": str(self.total), "bound": self.bound, "satisfied": self.satisfied}


def curvature_I(d: Diagram) -> CurvatureResult:
    """Sum over boundary faces of ``4 - (interior darts of the face)``."""
    if len(d.faces) < 2:
        raise PreconditionFailed("needs at least two faces")
    verdict = is_pq_diagram(d, 3, 6)
    if not verdict:
        raise PreconditionFailed(f"not a (3,6)-diagram: {verdict.violation}")
    outer = d.outer_darts()
    total = 0
    for f in d.faces:
        if any(rev(x) in outer for x in f):
            total += 4 - sum(1 for x in f if rev(x) not in outer)
    return CurvatureResult(total, 6, total >= 6)


def curvature_II(d: Diagram) -> CurvatureResult:
    """Sum over boundary vertices of ``5/2 - degree``."""
    verdict = is_pq_diagram(d, 3, 6, bracket=True)
    if not verdict:
        raise PreconditionFailed(f"not a [3,6]-diagram: {verdict.violation}")
    total = sum((Fraction(5, 2) - d.degree(v) for v in d.boundary_vertices()), Fraction(0))
    return CurvatureResult(total, 3, total >= 3)


def area_bounds(d: Diagram) -> dict:
    """Compare the area with ``8|boundary|`` and ``3|boundary|^2``.

    Hypotheses are tested on the diagram with degree-2 vertices forgotten;
    the boundary length is that of ``d`` itself, which is never smaller.
    """
    reduced = forget_degree2(d)
    length = len(d.boundary)
    out = {"area": d.area, "boundary_length": length}
    if is_pq_diagram(reduced, 3, 7):
        out["linear"] = {"evaluated": True, "bound": 8 * length, "holds": d.area <= 8 * length}
    else:
        out["linear"] = {"evaluated": False}
    if is_pq_diagram(reduced, 3, 6):
        out["quadratic"] = {"evaluated": True, "bound": 3 * length * length, "holds": d.area <= 3 * length * length}
    else:
        out["quadratic"] = {"evaluated": False}
    return out


# --------------------------------------------------------------------- lifts


@dataclass
class FaceLift:
    face: int
    component: int
    start: int
    orientation: int
    all_starts: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"face": self.face, "component": self.component, "start": self.start,
                "orientation": self.orientation, "all_starts": self.all_starts}


def lift_faces(d: Diagram, g: LabelledGraph, idx, gr_mode: bool = False, check_c2: bool = False) -> list[FaceLift]:
    """Lift each face boundary (read from its first dart) to a closed path of ``g``."""
    if check_c2 and not gr_mode:
        from .conditions import check_Cn

        if not check_Cn(g, idx, 2).holds:
            raise PreconditionFailed("the graph does not satisfy C(2)")
    _require_same_alphabet(d, g)
    lifts = []
    for k in range(len(d.faces)):
        word = d.face_word(k)
        starts = [v for v in range(g.num_vertices) if read_end(g, v, word) == v]
        if not starts:
            raise NoLift(f"face {k} does not lift to a closed path of the graph")
        if gr_mode:
            if idx.orbit_count(starts) != 1:
                raise AmbiguousLift(f"face {k} has essentially distinct lifts {starts}")
        elif len(starts) != 1:
            raise AmbiguousLift(f"face {k} has {len(starts)} lifts {starts}")
        lifts.append(FaceLift(k, g.component_of(starts[0]), starts[0], 1, starts))
    return lifts


def _require_same_alphabet(d: Diagram, g: LabelledGraph) -> None:
    if d.alphabet is not None and d.alphabet != g.alphabet:
        raise PreconditionFailed("diagram and graph use different alphabets")


def _image_at(d: Diagram, g: LabelledGraph, lift: FaceLift, position: int) -> int:
    """Image of the tail of the face dart at ``position`` under the lift."""
    face = d.faces[lift.face]
    return read_end(g, lift.start, d.walk_word(face[:position]))


def originates_from(d: Diagram, g: LabelledGraph, idx, arc: Sequence[Dart], lifts: Sequence[FaceLift] | None = None,
                    gr_mode: bool = False) -> bool:
    """Do the two face lifts send this interior arc to the same path of ``g``?"""
    if lifts is None:
        lifts = lift_faces(d, g, idx, gr_mode)
    face_of = d.face_of()
    first = arc[0]
    if first not in face_of or rev(first) not in face_of:
        raise PreconditionFailed("arc is not interior")
    f1 = face_of[first]
    f2 = face_of[rev(arc[-1])]
    pos1 = d.faces[f1].index(first)
    # rev(arc[-1]) .. rev(arc[0]) appear in f2; the arc start is the head of rev(arc[0])
    pos2 = d.faces[f2].index(rev(first)) + 1
    img1 = _image_at(d, g, lifts[f1], pos1)
    img2 = _image_at(d, g, lifts[f2], pos2)
    if gr_mode:
        return idx.orbit_of[img1] == idx.orbit_of[img2]
    return img1 == img2


# ----------------------------------------------------------------- surgery


class _Work:
    """Mutable copy of a diagram used by the surgery moves."""

    def __init__(self, d: Diagram):
        self.alphabet = d.alphabet
        self.edges = {i: [e.source, e.target, e.letter] for i, e in enumerate(d.edges)}
        self.verts = set(range(d.num_vertices))
        self.rot = {v: list(r) for v, r in enumerate(d.rotation)}
        self.faces: list[list[Dart] | None] = [list(f) for f in d.faces]
        self.boundary = list(d.boundary)
        self.base = d.base

    def tail(self, x: Dart) -> int:
        e = self.edges[x[0]]
        return e[0] if x[1] > 0 else e[1]

    def head(self, x: Dart) -> int:
        e = self.edges[x[0]]
        return e[1] if x[1] > 0 else e[0]

    def letter(self, x: Dart) -> Letter | None:
        e = self.edges[x[0]]
        return None if e[2] is None else (e[2], x[1])

    def replace(self, mapping: dict[Dart, Dart]) -> None:
        for f in self.faces:
            if f is not None:
                f[:] = [mapping.get(x, x) for x in f]
        self.boundary = [mapping.get(x, x) for x in self.boundary]

    def merge_vertex(self, w: int, u: int) -> None:
        for e in self.edges.values():
            if e[0] == w:
                e[0] = u
            if e[1] == w:
                e[1] = u
        self.verts.discard(w)
        del self.rot[w]
        if self.base == w:
            self.base = u

    def finish(self) -> Diagram:
        vs = sorted(self.verts)
        vmap = {v: i for i, v in enumerate(vs)}
        es = sorted(self.edges)
        emap = {e: i for i, e in enumerate(es)}

        def m(x: Dart) -> Dart:
            return (emap[x[0]], x[1])

        edges = [DEdge(vmap[self.edges[e][0]], vmap[self.edges[e][1]], self.edges[e][2]) for e in es]
        rotation = [[m(x) for x in self.rot[v]] for v in vs]
        faces = [[m(x) for x in f] for f in self.faces if f is not None]
        return Diagram(len(vs), edges, rotation, faces, vmap[self.base], [m(x) for x in self.boundary],
                       self.alphabet)


def _fold(work: _Work, x: Dart, y: Dart, face: int | None) -> None:
    """Identify ``y`` with ``rev(x)``: x, y consecutive on a dart cycle with inverse labels.

    ``face`` is the index of the face holding the pair, or None when the
    pair is consecutive on the outer cycle (then the boundary holds
    ``rev(y), rev(x)``).
    """
    if x[0] == y[0]:
        raise PreconditionFailed("the pair is a spur, not a fold")
    lx, ly = work.letter(x), work.letter(y)
    if lx is None or ly is None or lx[0] != ly[0] or lx[1] != -ly[1]:
        raise PreconditionFailed("labels of the pair do not cancel")
    u, v, w = work.tail(x), work.head(x), work.tail(rev(y))
    if u == v or v == w:
        raise PreconditionFailed("cannot fold a loop edge")
    cycle = work.faces[face] if face is not None else None
    if u == w:
        bigon = face is not None and len(cycle) == 2
        if not bigon:
            raise PreconditionFailed("folding would enclose a spherical pocket")
    rv = work.rot[v]
    rv.remove(y)
    if u != w:
        rw = work.rot[w]
        k = rw.index(rev(y))
        spliced = rw[k + 1:] + rw[:k]
        ru = work.rot[u]
        i = ru.index(x)
        ru[i + 1:i + 1] = spliced
        work.merge_vertex(w, u)
    else:
        work.rot[u].remove(rev(y))
    if face is not None:
        n = len(cycle)
        i = cycle.index(x)
        if cycle[(i + 1) % n] != y:
            raise PreconditionFailed("darts are not consecutive on the face")
        keep = cycle[:i] + cycle[i + 2:] if i < n - 1 else cycle[1:n - 1]
        work.faces[face] = keep if keep else None
    else:
        b = work.boundary
        n = len(b)
        i = b.index(rev(y))
        if b[(i + 1) % n] != rev(x):
            raise PreconditionFailed("darts are not consecutive on the boundary")
        if i == n - 1:
            raise PreconditionFailed("refusing to fold across the base")
        work.boundary = b[:i] + b[i + 2:]
    del work.edges[y[0]]
    work.replace({y: rev(x), rev(y): x})


def fold_pair(d: Diagram, face: int, position: int) -> Diagram:
    """Fold the darts at ``position`` and ``position + 1`` of a face."""
    work = _Work(d)
    f = d.faces[face]
    _fold(work, f[position], f[(position + 1) % len(f)], face)
    return work.finish()


def fold_trivial_face(d: Diagram, face: int) -> Diagram:
    """Fold a face whose boundary word is freely trivial into a tree."""
    word = d.face_word(face)
    if free_reduce(word) != () or not _cyclically_trivial(word):
        raise PreconditionFailed("face boundary word is not freely trivial")
    f = d.faces[face]
    if any(f[(i + 1) % len(f)] == rev(f[i]) for i in range(len(f))):
        raise PreconditionFailed("a spur ends inside the face")
    if len({d.tail(x) for x in f}) != len(f):
        raise PreconditionFailed("face boundary is not a simple cycle")
    work = _Work(d)
    while work.faces[face] is not None:
        cyc = work.faces[face]
        n = len(cyc)
        for i in range(n):
            a, b = cyc[i], cyc[(i + 1) % n]
            la, lb = work.letter(a), work.letter(b)
            if la[0] == lb[0] and la[1] == -lb[1]:
                _fold(work, a, b, face)
                break
        else:  # pragma: no cover - excluded by the free triviality check
            raise PreconditionFailed("no cancelling pair left on the face")
    out = work.finish()
    validate(out)
    return out


def _cyclically_trivial(word: Word) -> bool:
    return free_reduce(word) == ()


def pinch_vertices(d: Diagram, face: int, v1: int, v2: int, g: LabelledGraph | None = None,
                   idx=None, gr_mode: bool = False) -> Diagram:
    """Identify two vertices of a face, splitting it in two.

    When a graph is given the two vertices must have the same image under
    the face's lift.
    """
    if v1 == v2:
        raise PreconditionFailed("vertices must differ")
    f = list(d.faces[face])
    tails = [d.tail(x) for x in f]
    if v1 not in tails or v2 not in tails:
        raise PreconditionFailed("both vertices must lie on the face")
    i, j = tails.index(v1), tails.index(v2)
    if g is not None:
        lift = lift_faces(d, g, idx, gr_mode)[face]
        if _image_at(d, g, lift, i) != _image_at(d, g, lift, j):
            raise PreconditionFailed("the lifts of the two vertices differ")
    lo, hi = min(i, j), max(i, j)
    w1, w2 = tails[lo], tails[hi]

    def from_corner(v: int, first: Dart) -> list[Dart]:
        # counterclockwise from the face corner: ends at the face dart leaving v
        r = d.rotation[v]
        k = r.index(first)
        return r[k:] + r[:k]

    seg1 = from_corner(w1, rev(f[lo - 1]))
    seg2 = from_corner(w2, rev(f[hi - 1]))
    work = _Work(d)
    work.rot[v1] = seg1 + seg2 if w1 == v1 else seg2 + seg1
    keep_first = f[lo:hi]
    second = f[hi:] + f[:lo]
    work.merge_vertex(v2, v1)
    work.faces[face] = keep_first
    work.faces.append(second)
    out = work.finish()
    validate(out)
    return out


# ------------------------------------------------------- originating edges


@dataclass
class RemovalResult:
    branch: int  # 1: merged diagram, 2: offending subdiagram
    diagram: Diagram
    originating_edges: list[int]
    faces: list[int] | None = None

    def to_dict(self) -> dict:
        return {"branch": self.branch, "diagram": self.diagram.to_dict(),
                "originating_edges": self.originating_edges, "faces": self.faces}


def originating_edges(d: Diagram, g: LabelledGraph, idx, lifts: Sequence[FaceLift], gr_mode: bool = False) -> list[int]:
    face_of = d.face_of()
    out = []
    for e in range(len(d.edges)):
        x = (e, 1)
        if x not in face_of or rev(x) not in face_of:
            continue
        if originates_from(d, g, idx, [x], lifts, gr_mode):
            out.append(e)
    return out


def subdiagram(d: Diagram, faces: Sequence[int]) -> Diagram:
    """The diagram formed by a set of faces with their edges and vertices."""
    faces = sorted(faces)
    darts = {x for k in faces for x in d.faces[k]}
    es = sorted({x[0] for x in darts})
    vs = sorted({d.tail(x) for x in darts} | {d.head(x) for x in darts})
    vmap = {v: i for i, v in enumerate(vs)}
    emap = {e: i for i, e in enumerate(es)}

    def m(x: Dart) -> Dart:
        return (emap[x[0]], x[1])

    edges = [DEdge(vmap[d.edges[e].source], vmap[d.edges[e].target], d.edges[e].letter) for e in es]
    eset = set(es)
    rotation = [[m(x) for x in d.rotation[v] if x[0] in eset] for v in vs]
    new_faces = [[m(x) for x in d.faces[k]] for k in faces]
    sub = Diagram(len(vs), edges, rotation, new_faces, 0, (), d.alphabet)
    base = min(sub.tail(rev(x)) for x in _leftover(sub)) if _leftover(sub) else 0
    return Diagram(len(vs), edges, rotation, new_faces, base, sub.derive_boundary(base), d.alphabet)


def _leftover(d: Diagram) -> list[Dart]:
    face_darts = {x for f in d.faces for x in f}
    return [x for r in d.rotation for x in r if x not in face_darts]


def _is_simple_disk(d: Diagram) -> bool:
    try:
        validate(d)
    except DiagramError:
        return False
    tails = [d.tail(x) for x in d.boundary]
    return len(tails) == len(set(tails)) and len(d.faces) >= 1


def remove_originating_edges(d: Diagram, g: LabelledGraph, idx, n: int = 6, report=None,
                             gr_mode: bool = False) -> RemovalResult:
    """Merge faces across originating edges, or return the offending subdiagram."""
    if n < 6:
        raise PreconditionFailed("needs C(n) with n >= 6")
    if report is None:
        from .conditions import check_condition

        report = check_condition(g, idx, f"Gr{n}" if gr_mode else f"C{n}")
    if not report.holds:
        raise PreconditionFailed(f"{report.condition} does not hold")
    lifts = lift_faces(d, g, idx, gr_mode)
    orig = originating_edges(d, g, idx, lifts, gr_mode)
    if not orig:
        return RemovalResult(1, d, [])
    face_of = d.face_of()
    parent = list(range(len(d.faces)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in orig:
        a, b = find(face_of[(e, 1)]), find(face_of[(e, -1)])
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes: dict[int, list[int]] = {}
    for k in range(len(d.faces)):
        classes.setdefault(find(k), []).append(k)
    orig_set = set(orig)
    for cls in sorted(classes.values()):
        if len(cls) < 2:
            continue
        sub = subdiagram(d, cls)
        if not _is_simple_disk(sub):
            continue
        if free_reduce(sub.boundary_word()) != ():
            continue
        cls_darts = {x for k in cls for x in d.faces[k]}
        internal = {x[0] for x in cls_darts if rev(x) in cls_darts}
        if internal <= orig_set:
            return RemovalResult(2, sub, orig, cls)

    work = _Work(d)
    for e in orig:
        s, t, _ = work.edges.pop(e)
        work.rot[s].remove((e, 1))
        work.rot[t].remove((e, -1))
    for v in list(work.verts):
        if not work.rot[v]:
            if v == work.base:
                raise LemmaViolation("base vertex became isolated")
            work.verts.discard(v)
            del work.rot[v]
    work.faces = []
    tmp = work.finish()
    if not _connected(tmp):
        raise LemmaViolation("merging produced a face with a hole", faces=sorted(classes))
    outer = tmp.outer_darts()
    faces = [o for o in tmp.orbits() if o[0] not in outer]
    for f in faces:
        if len({tmp.tail(x) for x in f}) < len(f):
            raise LemmaViolation("merging produced a face that is not simply connected")
    merged = Diagram(tmp.num_vertices, tmp.edges, tmp.rotation, faces, tmp.base, tmp.boundary, d.alphabet)
    validate(merged)
    return RemovalResult(1, merged, orig)


# -------------------------------------------------------- builders/fixtures


def bouquet_diagram(pieces: Sequence[tuple[Word, Word]], alphabet: Alphabet) -> Diagram:
    """Lollipops at one base vertex: stem ``g`` then a face reading ``s``.

    The boundary reads the product of ``g s g^-1`` in the given order.
    """
    edges: list[DEdge] = []
    boundary: list[Dart] = []
    faces: list[list[Dart]] = []
    nv = 1

    def add_edge(a: int, b: int, letter: Letter) -> Dart:
        x, s = letter
        if s > 0:
            edges.append(DEdge(a, b, x))
            return (len(edges) - 1, 1)
        edges.append(DEdge(b, a, x))
        return (len(edges) - 1, -1)

    for stem, loop in pieces:
        if not loop:
            raise PreconditionFailed("face words must be non-empty")
        cur = 0
        stem_darts = []
        for letter in stem:
            nxt = nv
            nv += 1
            stem_darts.append(add_edge(cur, nxt, letter))
            cur = nxt
        tip = cur
        face = []
        for k, letter in enumerate(loop):
            if k == len(loop) - 1:
                nxt = tip
            else:
                nxt = nv
                nv += 1
            face.append(add_edge(cur, nxt, letter))
            cur = nxt
        faces.append(face)
        boundary.extend(stem_darts + face + [rev(x) for x in reversed(stem_darts)])
    return Diagram.from_faces(nv, edges, faces, 0, boundary, alphabet)


def _drop_pocket(work: _Work, i: int) -> None:
    """Delete what the boundary loop ``b[i] b[i+1]`` encloses, then its second edge.

    The loop reads ``x x^-1``, so the enclosed subdiagram is spherical and
    can be discarded; the first edge becomes a spur.
    """
    b = work.boundary
    a, c = b[i], b[i + 1]
    u, v = work.tail(a), work.head(a)
    inside_v = {v}
    stack = [v]
    while stack:
        p = stack.pop()
        for x in work.rot[p]:
            if x[0] in (a[0], c[0]):
                continue
            q = work.head(x)
            if q != u and q not in inside_v:
                inside_v.add(q)
                stack.append(q)
    dead_edges = {c[0]}
    for e, (s_, t_, _) in work.edges.items():
        if e != a[0] and (s_ in inside_v or t_ in inside_v):
            dead_edges.add(e)
    for k, f in enumerate(work.faces):
        if f is not None and any(x[0] in dead_edges or x[0] == a[0] for x in f):
            dead_edges.update(x[0] for x in f if x[0] != a[0])
            work.faces[k] = None
    if any(x[0] in dead_edges for x in b[:i] + b[i + 2:]):
        raise DiagramError("pocket shares edges with the rest of the boundary")
    for e in dead_edges:
        del work.edges[e]
    for p in list(work.rot):
        work.rot[p] = [x for x in work.rot[p] if x[0] not in dead_edges]
    for p in inside_v - {v}:
        del work.rot[p]
        work.verts.discard(p)
    work.boundary = b[:i] + [a, rev(a)] + b[i + 2:]


def fold_boundary(d: Diagram) -> Diagram:
    """Fold cancelling consecutive boundary darts until the boundary word is reduced.

    Pairs are never taken across the base, so the boundary word read from
    the base becomes the free reduction of the original one.  A pair that
    closes a loop encloses a spherical part, which is discarded, so the
    area may drop.
    """
    work = _Work(d)
    while True:
        b = work.boundary
        found = None
        for i in range(len(b) - 1):
            la, lb = work.letter(b[i]), work.letter(b[i + 1])
            if la[0] == lb[0] and la[1] == -lb[1]:
                found = i
                break
        if found is None:
            break
        a, c = b[found], b[found + 1]
        if c == rev(a):
            # spur: drop the edge and its free end
            tip = work.head(a)
            work.rot[work.tail(a)].remove(a)
            del work.rot[tip]
            work.verts.discard(tip)
            del work.edges[a[0]]
            work.boundary = b[:found] + b[found + 2:]
            continue
        if work.tail(a) == work.head(c):
            _drop_pocket(work, found)
            continue
        try:
            _fold(work, rev(c), rev(a), None)
        except PreconditionFailed as exc:
            raise DiagramError(f"boundary fold failed: {exc}") from None
    out = work.finish()
    validate(out)
    return out


def octagon_fold_fixture() -> Diagram:
    """One octagonal face reading a^-1 b^-1 c c^-1 d^-1 d b a (freely trivial)."""
    alphabet = Alphabet(("a", "b", "c", "d"))
    a, b, c, dd = range(4)
    edges = [(1, 0, a), (2, 1, b), (2, 3, c), (4, 3, c), (5, 4, dd), (5, 6, dd), (6, 7, b), (7, 0, a)]
    face = [(0, -1), (1, -1), (2, 1), (3, -1), (4, -1), (5, 1), (6, 1), (7, 1)]
    return Diagram.from_faces(8, [DEdge(*e) for e in edges], [face], 0, None, alphabet)


def octagon_pinch_fixture() -> Diagram:
    """One octagonal face reading (c d a b)^2, to be pinched into two faces."""
    alphabet = Alphabet(("a", "b", "c", "d"))
    a, b, c, dd = range(4)
    letters = [c, dd, a, b, c, dd, a, b]
    edges = [DEdge(i, (i + 1) % 8, x) for i, x in enumerate(letters)]
    return Diagram.from_faces(8, edges, [[(i, 1) for i in range(8)]], 0, None, alphabet)


def mirror_faces_fixture(word: Word, alphabet: Alphabet) -> Diagram:
    """Two faces reading ``word`` and its mirror, glued along all edges but the last.

    The boundary reads ``x^-1 x`` for the last letter ``x``, so it is freely
    trivial, and every interior edge has equal lifts on both sides.
    """
    n = len(word)
    if n < 2:
        raise PreconditionFailed("word too short")
    edges = []
    for i, (x, s) in enumerate(word):
        u, v = i, (i + 1) % n
        edges.append(DEdge(u, v, x) if s > 0 else DEdge(v, u, x))
    x, s = word[-1]
    edges.append(DEdge(n - 1, 0, x) if s > 0 else DEdge(0, n - 1, x))
    upper = [(i, 1 if word[i][1] > 0 else -1) for i in range(n)]
    lower = [(i, -1 if word[i][1] > 0 else 1) for i in range(n - 2, -1, -1)]
    lower.append((n, -1 if s > 0 else 1))
    return Diagram.from_faces(n, edges, [upper, lower], 0, None, alphabet)


def honeycomb_patch(rings: int = 1) -> Diagram:
    """Hexagonal tiling patch: all hexagons within ``rings`` steps of a centre hexagon."""
    centres = []
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            if abs(q + r) <= rings:
                centres.append((q, r))
    points: dict[tuple[float, float], int] = {}
    coords: list[tuple[float, float]] = []

    def vid(x: float, y: float) -> int:
        key = (round(x, 6), round(y, 6))
        if key not in points:
            points[key] = len(coords)
            coords.append((x, y))
        return points[key]

    edge_ids: dict[tuple[int, int], int] = {}
    edges: list[DEdge] = []
    faces = []
    for q, r in sorted(centres):
        cx, cy = math.sqrt(3) * (q + r / 2), 1.5 * r
        corners = [vid(cx + math.cos(math.radians(30 + 60 * k)), cy + math.sin(math.radians(30 + 60 * k)))
                   for k in range(6)]
        face = []
        for k in range(6):
            a, b = corners[k], corners[(k + 1) % 6]
            if (a, b) in edge_ids:
                face.append((edge_ids[(a, b)], 1))
            elif (b, a) in edge_ids:
                face.append((edge_ids[(b, a)], -1))
            else:
                edge_ids[(a, b)] = len(edges)
                edges.append(DEdge(a, b, None))
                face.append((len(edges) - 1, 1))
        faces.append(face)
    rotation = []
    for v, (x, y) in enumerate(coords):
        darts = [(i, 1) for i, e in enumerate(edges) if e.source == v] + [(i, -1) for i, e in enumerate(edges) if e.target == v]

        def angle(dart):
            e = edges[dart[0]]
            other = e.target if dart[1] > 0 else e.source
            ox, oy = coords[other]
            return math.atan2(oy - y, ox - x)

        rotation.append(sorted(darts, key=angle))
    d = Diagram(len(coords), edges, rotation, faces, 0, ())
    base = min(d.tail(rev(x)) for x in _leftover(d))
    out = Diagram(len(coords), edges, rotation, faces, base, d.derive_boundary(base))
    validate(out)
    return out


def load_diagram(path: str) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"diagram file is not JSON: {exc}") from None
    return Diagram.from_dict(data)


def save_diagram(d: Diagram, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d.to_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")
