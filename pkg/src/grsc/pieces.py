"""Pieces, essential pieces, labelled automorphisms and piece distance.

Under a reduced labelling a map of a labelled path into the graph is fixed
by the image of its first vertex, so "two distinct maps of p" is the same as
"the label of p can be read from two distinct start vertices".  Every query
here is therefore indexed by words, not by paths.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

from .errors import LemmaViolation, NotReducedWord, PreconditionFailed, UndefinedDistance
from .graph_core import (
    DEFAULT_CYCLE_BUDGET,
    Cycle,
    LabelledGraph,
    Letter,
    PathRef,
    Word,
    is_reduced,
    read_end,
    simple_cycles,
)

ORBIT_CONVENTION_NOTE = (
    "automorphisms are taken of the whole graph, so isomorphic components may be swapped"
)
CLOSED_PATH_NOTE = (
    "a closed traversal of a whole cycle counts as a piece when its label is readable from two starts"
)


# ------------------------------------------------------------ automorphisms


def refine_colours(g: LabelledGraph) -> list[int]:
    """Colour refinement on (in-letter, out-letter) neighbourhoods."""
    colour = []
    for v in range(g.num_vertices):
        sig = tuple(sorted(g.step_letter(e, d) for e, d in g.incident(v)))
        colour.append(sig)
    colour = _compress(colour)
    while True:
        sigs = []
        for v in range(g.num_vertices):
            nb = tuple(sorted((g.step_letter(e, d), colour[g.step_target(e, d)]) for e, d in g.incident(v)))
            sigs.append((colour[v], nb))
        new = _compress(sigs)
        if len(set(new)) == len(set(colour)):
            return new
        colour = new


def _compress(sigs: Sequence) -> list[int]:
    table = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [table[s] for s in sigs]


def _extend_isomorphism(g: LabelledGraph, root: int, image: int) -> dict[int, int] | None:
    """Propagate ``root -> image`` along labels; None if it is not an isomorphism."""
    mapping = {root: image}
    used = {image}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        w = mapping[v]
        for e, d in g.incident(v):
            cont = g.continuation(w, g.step_letter(e, d))
            if not cont:
                return None
            u = g.step_target(e, d)
            u2 = g.step_target(cont[0], d)
            if u in mapping:
                if mapping[u] != u2:
                    return None
            else:
                if u2 in used:
                    return None
                mapping[u] = u2
                used.add(u2)
                queue.append(u)
    src = g.component_of(root)
    dst = g.component_of(image)
    if len(g.components[src].vertices) != len(g.components[dst].vertices):
        return None
    if len(mapping) != len(g.components[src].vertices):
        return None
    # edge counts must agree, otherwise the image component has extra edges
    if _edge_count(g, src) != _edge_count(g, dst):
        return None
    return mapping


def _edge_count(g: LabelledGraph, ci: int) -> int:
    return sum(len(g.incident(v)) for v in g.components[ci].vertices) // 2


@dataclass
class Automorphisms:
    generators: list[tuple[int, ...]]
    order: int
    orbits: list[tuple[int, ...]]
    component_orbits: list[tuple[int, ...]]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "generators": [list(p) for p in self.generators],
            "orbits": [list(o) for o in self.orbits],
            "component_orbits": [list(o) for o in self.component_orbits],
        }


def compute_automorphisms(g: LabelledGraph) -> Automorphisms:
    """Exact automorphism group of ``g`` as a labelled directed graph.

    Candidates for the image of one root per component are pruned by colour
    refinement; each candidate extends in at most one way because the
    labelling is reduced.
    """
    g.require_reduced()
    colour = refine_colours(g)
    n = g.num_vertices
    isos: dict[tuple[int, int], list[dict[int, int]]] = {}
    for ci, comp in enumerate(g.components):
        root = comp.vertices[0]
        for cj, other in enumerate(g.components):
            if len(other.vertices) != len(comp.vertices):
                continue
            found = []
            for cand in other.vertices:
                if colour[cand] != colour[root]:
                    continue
                m = _extend_isomorphism(g, root, cand)
                if m is not None:
                    found.append(m)
            if found:
                isos[(ci, cj)] = found

    def union_find_orbits(allowed) -> list[tuple[int, ...]]:
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (ci, cj), maps in isos.items():
            if not allowed(ci, cj):
                continue
            for m in maps:
                for a, b in m.items():
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for v in range(n):
            groups.setdefault(find(v), []).append(v)
        return sorted(tuple(vs) for vs in groups.values())

    orbits = union_find_orbits(lambda a, b: True)
    comp_orbits = union_find_orbits(lambda a, b: a == b)

    gens: list[tuple[int, ...]] = []
    for ci in range(len(g.components)):
        for m in isos.get((ci, ci), []):
            if any(a != b for a, b in m.items()):
                perm = list(range(n))
                for a, b in m.items():
                    perm[a] = b
                gens.append(tuple(perm))
    # component classes under isomorphism
    classes: list[list[int]] = []
    for ci in range(len(g.components)):
        for cls in classes:
            if (cls[0], ci) in isos:
                cls.append(ci)
                break
        else:
            classes.append([ci])
    order = 1
    for cls in classes:
        aut = len(isos.get((cls[0], cls[0]), [1]))
        order *= aut ** len(cls) * factorial(len(cls))
        for a, b in zip(cls, cls[1:]):
            m = isos[(a, b)][0]
            perm = list(range(n))
            for x, y in m.items():
                perm[x] = y
                perm[y] = x
            gens.append(tuple(perm))
    return Automorphisms(gens, order, orbits, comp_orbits)


def is_automorphism(g: LabelledGraph, perm: Sequence[int]) -> bool:
    if sorted(perm) != list(range(g.num_vertices)):
        return False
    edges = {(e.source, e.target, e.letter) for e in g.edges}
    mapped = {(perm[e.source], perm[e.target], e.letter) for e in g.edges}
    return edges == mapped and len(edges) == len(g.edges)


# ------------------------------------------------------------------ index


class PieceIndex:
    """Occurrence table plus automorphism orbits; immutable once built."""

    def __init__(self, g: LabelledGraph, orbit_mode: str = "union"):
        if orbit_mode not in ("union", "component"):
            raise ValueError("orbit_mode must be 'union' or 'component'")
        g.require_reduced()
        self.graph = g
        self.orbit_mode = orbit_mode
        self.automorphisms = compute_automorphisms(g)
        orbits = self.automorphisms.orbits if orbit_mode == "union" else self.automorphisms.component_orbits
        self.orbits = orbits
        self.orbit_of = [0] * g.num_vertices
        for k, orb in enumerate(orbits):
            for v in orb:
                self.orbit_of[v] = k
        self._reach_cache: dict[tuple[int, bool], frozenset[int]] = {}

    def with_orbit_mode(self, mode: str) -> "PieceIndex":
        if mode == self.orbit_mode:
            return self
        other = PieceIndex.__new__(PieceIndex)
        other.graph = self.graph
        other.orbit_mode = mode
        other.automorphisms = self.automorphisms
        other.orbits = self.automorphisms.orbits if mode == "union" else self.automorphisms.component_orbits
        other.orbit_of = [0] * self.graph.num_vertices
        for k, orb in enumerate(other.orbits):
            for v in orb:
                other.orbit_of[v] = k
        other._reach_cache = {}
        return other

    def witnesses(self, w: Sequence[Letter]) -> list[int]:
        g = self.graph
        if not w:
            return list(range(g.num_vertices))
        return [v for v in range(g.num_vertices) if read_end(g, v, w) is not None]

    def orbit_count(self, starts: Iterable[int]) -> int:
        return len({self.orbit_of[v] for v in starts})

    def qualifies(self, starts: Sequence[int], essential: bool) -> bool:
        if essential:
            return self.orbit_count(starts) >= 2
        return len(starts) >= 2

    def edge_is_piece(self, e: int, essential: bool = False) -> bool:
        letter = self.graph.edges[e].letter
        return self.qualifies(self.witnesses(((letter, 1),)), essential)

    def extension_lengths(self, word: Sequence[Letter], essential: bool, cyclic: bool = True,
                          cap: int | None = None) -> list[int]:
        """For each offset ``i`` the longest piece reading ``word`` from ``i``.

        With ``cyclic`` the word is read around and the length is capped at
        ``len(word)``; pieces are closed under taking subwords, so these
        lengths describe every piece subpath of the cycle.
        """
        g = self.graph
        n = len(word)
        cap = n if cap is None else cap
        out = []
        for i in range(n):
            limit = cap if cyclic else min(cap, n - i)
            tracks = {v: v for v in range(g.num_vertices)}
            best = 0
            for k in range(limit):
                letter = word[(i + k) % n]
                nxt = {}
                for s, cur in tracks.items():
                    cont = g.continuation(cur, letter)
                    if cont:
                        nxt[s] = g.step_target(cont[0], letter[1])
                tracks = nxt
                if self.qualifies(list(tracks), essential):
                    best = k + 1
                else:
                    break
            out.append(best)
        return out

    # -- single-piece reachability (product construction)

    def _piece_reach(self, u: int, essential: bool, marks: Sequence[int] = ()) -> set[tuple[int, int]]:
        """Pairs ``(endpoint, mask)`` reachable from ``u`` by one piece.

        ``mask`` records which of ``marks`` the piece path visits (its start
        included).  States walk every other admissible start in lockstep.
        """
        g = self.graph

        def mark_bits(v: int) -> int:
            return sum(1 << k for k, m in enumerate(marks) if m == v)

        if essential:
            others = frozenset(v for v in range(g.num_vertices) if self.orbit_of[v] != self.orbit_of[u])
        else:
            others = frozenset(v for v in range(g.num_vertices) if v != u)
        start = (u, None, others, mark_bits(u))
        seen = {start}
        queue = deque([start])
        reach: set[tuple[int, int]] = set()
        letters = sorted({g.step_letter(e, d) for v in range(g.num_vertices) for e, d in g.incident(v)})
        while queue:
            cur, last, oth, mask = queue.popleft()
            for letter in letters:
                if last is not None and letter[0] == last[0] and letter[1] == -last[1]:
                    continue
                cont = g.continuation(cur, letter)
                if not cont:
                    continue
                nxt_cur = g.step_target(cont[0], letter[1])
                nxt_oth = set()
                for o in oth:
                    c2 = g.continuation(o, letter)
                    if c2:
                        nxt_oth.add(g.step_target(c2[0], letter[1]))
                if not nxt_oth:
                    continue
                nmask = mask | mark_bits(nxt_cur)
                reach.add((nxt_cur, nmask))
                state = (nxt_cur, letter, frozenset(nxt_oth), nmask)
                if state not in seen:
                    seen.add(state)
                    queue.append(state)
        return reach

    def single_piece_reach(self, u: int, essential: bool = False) -> frozenset[int]:
        key = (u, essential)
        if key not in self._reach_cache:
            self._reach_cache[key] = frozenset(v for v, _ in self._piece_reach(u, essential))
        return self._reach_cache[key]


# --------------------------------------------------------------- reports


@dataclass
class PieceReport:
    word: Word
    path: PathRef | None
    witness_starts: list[int]
    is_piece: bool
    essential: bool

    def to_dict(self) -> dict:
        return {
            "word": [list(x) for x in self.word],
            "path": None if self.path is None else self.path.to_dict(),
            "witness_starts": self.witness_starts,
            "piece": self.is_piece,
            "essential": self.essential,
        }


def is_piece(g: LabelledGraph, idx: PieceIndex, w: Sequence[Letter]) -> PieceReport:
    w = tuple(w)
    if not is_reduced(w):
        raise NotReducedWord("query the free reduction of the word instead")
    if not w:
        return PieceReport(w, None, [], False, False)
    starts = idx.witnesses(w)
    from .graph_core import read_path

    path = read_path(g, starts[0], w) if starts else None
    piece = len(starts) >= 2
    return PieceReport(w, path, starts, piece, piece and idx.orbit_count(starts) >= 2)


def max_piece_prefix(g: LabelledGraph, idx: PieceIndex, start: int, along: PathRef, essential: bool = False) -> int:
    """Length of the longest (essential) piece that is a prefix of ``along``.

    The prefix is measured from the first visit of ``start``; pieces are
    closed under subpaths so the longest qualifying prefix is well defined.
    """
    verts = along.vertices(g)
    if start not in verts:
        raise PreconditionFailed(f"vertex {start} is not on the path")
    offset = verts.index(start)
    word = g.label(along)[offset:]
    if not word:
        return 0
    return idx.extension_lengths(word, essential, cyclic=False)[0]


def _check_all_pieces(g: LabelledGraph, idx: PieceIndex, component: int, essential: bool) -> None:
    comp = set(g.components[component].vertices)
    for i, e in enumerate(g.edges):
        if e.source in comp and not idx.edge_is_piece(i, essential):
            raise UndefinedDistance(i)


def piece_distance(g: LabelledGraph, idx: PieceIndex, x: int, y: int, essential: bool = False) -> int:
    """Least number of pieces concatenating to a path from x to y."""
    if g.component_of(x) != g.component_of(y):
        raise PreconditionFailed("vertices lie in different components")
    _check_all_pieces(g, idx, g.component_of(x), essential)
    if x == y:
        return 0
    dist = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for u in sorted(idx.single_piece_reach(v, essential)):
            if u not in dist:
                dist[u] = dist[v] + 1
                if u == y:
                    return dist[u]
                queue.append(u)
    raise LemmaViolation("target unreachable although all edges are pieces", x=x, y=y)


def piece_distances_from(g: LabelledGraph, idx: PieceIndex, x: int, essential: bool = False) -> dict[int, int]:
    _check_all_pieces(g, idx, g.component_of(x), essential)
    dist = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for u in sorted(idx.single_piece_reach(v, essential)):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def pieces_through_both(g: LabelledGraph, idx: PieceIndex, x: int, y: int, z: int, essential: bool = False) -> int:
    """Least number of pieces of a path from x visiting both y and z."""
    marks = (y, z)
    full = 3
    start_mask = (1 if x == y else 0) | (2 if x == z else 0)
    if start_mask == full:
        return 0
    dist = {(x, start_mask): 0}
    queue = deque([(x, start_mask)])
    while queue:
        v, mask = queue.popleft()
        for u, m in sorted(idx._piece_reach(v, essential, marks)):
            state = (u, mask | m)
            if state not in dist:
                dist[state] = dist[(v, mask)] + 1
                if state[1] == full:
                    return dist[state]
                queue.append(state)
    raise LemmaViolation("no path visits both vertices", x=x, y=y, z=z)


@dataclass
class OppositeVerdict:
    branch: str  # "even", "far-vertex" or "opposite-edge"
    x: int
    y: int
    z: int | None
    distance: int
    through_both: int | None = None

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "distance": self.distance,
            "through_both": self.through_both,
        }


def opposite_edge(g: LabelledGraph, idx: PieceIndex, cycle: PathRef, x: int, n: int,
                  essential: bool = False) -> OppositeVerdict:
    """Evaluate the far-vertex / opposite-edge alternative on one cycle."""
    verts = cycle.vertices(g)[:-1]
    if x not in verts:
        raise PreconditionFailed(f"vertex {x} is not on the cycle")
    dist = piece_distances_from(g, idx, x, essential)
    order = verts[verts.index(x):] + verts[:verts.index(x)]
    if n % 2 == 0:
        for y in order:
            if dist[y] == n // 2:
                return OppositeVerdict("even", x, y, None, n // 2)
        raise LemmaViolation("no vertex at piece distance n/2", cycle=cycle.to_dict(), x=x, n=n)
    for y in order:
        if dist[y] == (n + 1) // 2:
            return OppositeVerdict("far-vertex", x, y, None, (n + 1) // 2)
    half = (n - 1) // 2
    for k in range(len(order)):
        y, z = order[k], order[(k + 1) % len(order)]
        if dist[y] == half and dist[z] == half and y != z:
            through = pieces_through_both(g, idx, x, y, z, essential)
            if through >= (n + 1) // 2:
                return OppositeVerdict("opposite-edge", x, y, z, half, through)
    raise LemmaViolation("neither branch of the opposite-edge alternative holds",
                         cycle=cycle.to_dict(), x=x, n=n)


def disjoint_simple_cycles(g: LabelledGraph, budget: int = DEFAULT_CYCLE_BUDGET,
                           cycles: Sequence[Cycle] | None = None) -> list[Cycle]:
    """Greedy inclusion-maximal family of vertex-disjoint simple cycles."""
    if cycles is None:
        cycles = simple_cycles(g, budget)
    used: set[int] = set()
    chosen = []
    for c in cycles:  # already ordered shortest first, then by label
        vs = set(c.path.vertices(g))
        if vs & used:
            continue
        chosen.append(c)
        used |= vs
    return chosen


def maximal_pieces(g: LabelledGraph, idx: PieceIndex, max_len: int, essential: bool = False) -> list[PieceReport]:
    """All pieces of length <= max_len that extend to no longer piece on either side."""
    letters = sorted({g.step_letter(e, d) for v in range(g.num_vertices) for e, d in g.incident(v)})
    found: list[Word] = []
    frontier: list[Word] = [(l,) for l in letters]
    pieces: set[Word] = set()
    while frontier:
        nxt = []
        for w in frontier:
            starts = idx.witnesses(w)
            if not idx.qualifies(starts, essential):
                continue
            pieces.add(w)
            if len(w) < max_len:
                for l in letters:
                    if not (l[0] == w[-1][0] and l[1] == -w[-1][1]):
                        nxt.append(w + (l,))
        frontier = nxt
    for w in sorted(pieces, key=lambda w: (len(w), w)):
        extendable = len(w) < max_len and any(
            (w + (l,)) in pieces or ((l,) + w) in pieces for l in letters
        )
        if not extendable:
            found.append(w)
    return [is_piece(g, idx, w) for w in found]
