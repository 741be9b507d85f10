"""Labelled directed multigraphs, words over an alphabet, and paths.

A word is a tuple of ``(letter_index, sign)`` pairs with ``sign`` in
``{+1, -1}``.  Letters compare by alphabet index first and sign second, so
plain tuple comparison gives the canonical order used throughout (``-1``
sorts before ``+1`` at equal index).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .errors import BudgetExceeded, GraphFormatError, NotReducedLabelling, WordFormatError

Letter = tuple[int, int]
Word = tuple[Letter, ...]
Step = tuple[int, int]  # (edge id, +1 forward / -1 backward)

DEFAULT_CYCLE_BUDGET = 10**6
BUDGET_CHECK_INTERVAL = 10**4


# ---------------------------------------------------------------- alphabet


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.letters)) != len(self.letters):
            raise GraphFormatError(f"duplicate letters in alphabet {self.letters}")
        for tok in self.letters:
            if not tok or tok.startswith("-") or any(ch.isspace() for ch in tok) or "#" in tok:
                raise GraphFormatError(f"invalid letter token {tok!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def index(self, token: str) -> int:
        try:
            return self.letters.index(token)
        except ValueError:
            raise WordFormatError(f"unknown letter {token!r}") from None

    def restrict(self, keep: Iterable[int]) -> "Alphabet":
        keep = set(keep)
        return Alphabet(tuple(t for i, t in enumerate(self.letters) if i in keep))


# ------------------------------------------------------------------- words


def inverse(w: Sequence[Letter]) -> Word:
    return tuple((x, -s) for x, s in reversed(w))


def is_reduced(w: Sequence[Letter]) -> bool:
    return all(not (w[i][0] == w[i + 1][0] and w[i][1] == -w[i + 1][1]) for i in range(len(w) - 1))


def free_reduce(w: Sequence[Letter]) -> Word:
    """Stack-based free reduction.

    >>> free_reduce(((0, 1), (1, 1), (1, -1), (2, 1)))
    ((0, 1), (2, 1))
    """
    out: list[Letter] = []
    for x, s in w:
        if out and out[-1][0] == x and out[-1][1] == -s:
            out.pop()
        else:
            out.append((x, s))
    return tuple(out)


def is_cyclically_reduced(w: Sequence[Letter]) -> bool:
    if not is_reduced(w):
        return False
    return len(w) < 2 or not (w[0][0] == w[-1][0] and w[0][1] == -w[-1][1])


def cyclic_reduce(w: Sequence[Letter]) -> tuple[Word, Word]:
    """Split a reduced word as ``conjugator * core * conjugator^-1``."""
    w = tuple(w)
    k = 0
    n = len(w)
    while 2 * k + 1 < n and w[k][0] == w[n - 1 - k][0] and w[k][1] == -w[n - 1 - k][1]:
        k += 1
    return w[k:n - k], w[:k]


def rotations(w: Sequence[Letter]) -> Iterator[Word]:
    w = tuple(w)
    for i in range(max(len(w), 1)):
        yield w[i:] + w[:i]


def canonical_cyclic(w: Sequence[Letter]) -> Word:
    """Lexicographically least word among all rotations of ``w`` and ``w^-1``."""
    w = tuple(w)
    if not w:
        return w
    return min(min(rotations(w)), min(rotations(inverse(w))))


def parse_word(text: str, alphabet: Alphabet) -> Word:
    out = []
    for tok in text.split():
        if tok.startswith("-"):
            out.append((alphabet.index(tok[1:]), -1))
        else:
            out.append((alphabet.index(tok), 1))
    return tuple(out)


def format_word(w: Sequence[Letter], alphabet: Alphabet) -> str:
    return " ".join(("-" if s < 0 else "") + alphabet.letters[x] for x, s in w)


# ------------------------------------------------------------------- graph


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    letter: int


@dataclass(frozen=True)
class Component:
    name: str | None
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class PathRef:
    start: int
    steps: tuple[Step, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def vertices(self, g: "LabelledGraph") -> list[int]:
        out = [self.start]
        for e, d in self.steps:
            out.append(g.step_target(e, d))
        return out

    def end(self, g: "LabelledGraph") -> int:
        v = self.start
        for e, d in self.steps:
            v = g.step_target(e, d)
        return v

    def inverse(self, g: "LabelledGraph") -> "PathRef":
        return PathRef(self.end(g), tuple((e, -d) for e, d in reversed(self.steps)))

    def is_closed(self, g: "LabelledGraph") -> bool:
        return self.end(g) == self.start

    def to_dict(self) -> dict:
        return {"start": self.start, "steps": [[e, d] for e, d in self.steps]}


class LabelledGraph:
    """Finite directed multigraph whose edges carry alphabet letters.

    Vertices are dense integers ``0..n-1``.  Components are computed from
    the underlying undirected graph; declared components (from a file) are
    checked against them.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        num_vertices: int,
        edges: Iterable[tuple[int, int, int]],
        components: Sequence[tuple[str | None, Sequence[int]]] | None = None,
        local_ids: Sequence[int] | None = None,
    ):
        self.alphabet = alphabet
        self.num_vertices = num_vertices
        self.edges: tuple[Edge, ...] = tuple(Edge(int(s), int(t), int(x)) for s, t, x in edges)
        for i, e in enumerate(self.edges):
            if not (0 <= e.source < num_vertices and 0 <= e.target < num_vertices):
                raise GraphFormatError(f"edge {i} has an endpoint outside the vertex set")
            if not (0 <= e.letter < len(alphabet)):
                raise GraphFormatError(f"edge {i} has letter index {e.letter} outside the alphabet")

        self._out: list[dict[int, list[int]]] = [dict() for _ in range(num_vertices)]
        self._in: list[dict[int, list[int]]] = [dict() for _ in range(num_vertices)]
        self._incident: list[list[Step]] = [[] for _ in range(num_vertices)]
        for i, e in enumerate(self.edges):
            self._out[e.source].setdefault(e.letter, []).append(i)
            self._in[e.target].setdefault(e.letter, []).append(i)
            self._incident[e.source].append((i, 1))
            self._incident[e.target].append((i, -1))
        for lst in self._incident:
            lst.sort()

        found = self._connected_components()
        if components is None:
            self.components = tuple(Component(None, tuple(c)) for c in found)
        else:
            declared = [Component(name, tuple(vs)) for name, vs in components]
            seen = sorted(v for c in declared for v in c.vertices)
            if seen != list(range(num_vertices)):
                raise GraphFormatError("declared components do not partition the vertex set")
            if sorted(sorted(c.vertices) for c in declared) != sorted(sorted(c) for c in found):
                raise GraphFormatError("declared components differ from the connected components")
            self.components = tuple(declared)
        self._component_of = [0] * num_vertices
        for ci, c in enumerate(self.components):
            for v in c.vertices:
                self._component_of[v] = ci
        if local_ids is None:
            local = [0] * num_vertices
            for c in self.components:
                for k, v in enumerate(c.vertices):
                    local[v] = k
            self.local_ids = tuple(local)
        else:
            self.local_ids = tuple(local_ids)
        self._violations: list[tuple[int, int, str]] | None = None

    # -- structure

    def _connected_components(self) -> list[list[int]]:
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.source), find(e.target)
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for v in range(self.num_vertices):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def __repr__(self) -> str:
        return f"LabelledGraph(V={self.num_vertices}, E={len(self.edges)}, S={list(self.alphabet.letters)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LabelledGraph)
            and self.alphabet == other.alphabet
            and self.num_vertices == other.num_vertices
            and self.edges == other.edges
            and self.components == other.components
            and self.local_ids == other.local_ids
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.num_vertices, self.edges))

    def component_of(self, v: int) -> int:
        return self._component_of[v]

    def component_index(self, name: str) -> int:
        for i, c in enumerate(self.components):
            if c.name == name:
                return i
        raise GraphFormatError(f"no component named {name!r}")

    def incident(self, v: int) -> list[Step]:
        """Steps leaving ``v`` sorted by edge id; a loop contributes two."""
        return self._incident[v]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def step_source(self, e: int, d: int) -> int:
        edge = self.edges[e]
        return edge.source if d > 0 else edge.target

    def step_target(self, e: int, d: int) -> int:
        edge = self.edges[e]
        return edge.target if d > 0 else edge.source

    def step_letter(self, e: int, d: int) -> Letter:
        return (self.edges[e].letter, d)

    def continuation(self, v: int, letter: Letter) -> list[int]:
        x, s = letter
        table = self._out[v] if s > 0 else self._in[v]
        return table.get(x, [])

    def letters_used(self) -> set[int]:
        return {e.letter for e in self.edges}

    def to_networkx(self) -> nx.MultiGraph:
        h = nx.MultiGraph()
        h.add_nodes_from(range(self.num_vertices))
        for i, e in enumerate(self.edges):
            h.add_edge(e.source, e.target, key=i)
        return h

    def subgraph(self, vertices: Iterable[int], edges: Iterable[int] | None = None,
                 alphabet: Alphabet | None = None) -> tuple["LabelledGraph", dict[int, int], dict[int, int]]:
        """Induced (or edge-restricted) subgraph with renumbered ids.

        Returns the subgraph and the old->new maps for vertices and edges.
        """
        vs = sorted(set(vertices))
        vmap = {v: i for i, v in enumerate(vs)}
        if edges is None:
            es = [i for i, e in enumerate(self.edges) if e.source in vmap and e.target in vmap]
        else:
            es = sorted(set(edges))
        emap = {e: i for i, e in enumerate(es)}
        alpha = alphabet or self.alphabet
        if alphabet is None:
            relabel = {i: i for i in range(len(self.alphabet))}
        else:
            relabel = {self.alphabet.index(t): alpha.index(t) for t in alpha.letters}
        new_edges = [(vmap[self.edges[e].source], vmap[self.edges[e].target], relabel[self.edges[e].letter]) for e in es]
        return LabelledGraph(alpha, len(vs), new_edges), vmap, emap

    def component_graph(self, ci: int) -> tuple["LabelledGraph", dict[int, int], dict[int, int]]:
        comp = self.components[ci]
        g, vmap, emap = self.subgraph(comp.vertices)
        g = LabelledGraph(g.alphabet, g.num_vertices, [(e.source, e.target, e.letter) for e in g.edges],
                          components=[(comp.name, list(range(g.num_vertices)))])
        return g, vmap, emap

    # -- labels and reducedness

    def label(self, path: PathRef) -> Word:
        v = path.start
        out = []
        for e, d in path.steps:
            if self.step_source(e, d) != v:
                raise ValueError(f"path is not incident at step {(e, d)}")
            out.append(self.step_letter(e, d))
            v = self.step_target(e, d)
        return tuple(out)

    def reduced_violations(self) -> list[tuple[int, int, str]]:
        if self._violations is None:
            bad = []
            for v in range(self.num_vertices):
                for x, es in sorted(self._out[v].items()):
                    if len(es) > 1:
                        bad.append((v, x, "out"))
                for x, es in sorted(self._in[v].items()):
                    if len(es) > 1:
                        bad.append((v, x, "in"))
            self._violations = bad
        return self._violations

    def require_reduced(self) -> None:
        if self.reduced_violations():
            raise NotReducedLabelling(self.reduced_violations())


def is_reduced_labelling(g: LabelledGraph) -> tuple[bool, list[tuple[int, int, str]]]:
    """True iff no vertex has two out-edges or two in-edges with one letter."""
    bad = g.reduced_violations()
    return (not bad, list(bad))


def read_path(g: LabelledGraph, start: int, w: Sequence[Letter]) -> PathRef | None:
    """The unique path from ``start`` labelled ``w``, or ``None``."""
    g.require_reduced()
    v = start
    steps = []
    for letter in w:
        nxt = g.continuation(v, letter)
        if not nxt:
            return None
        e = nxt[0]
        steps.append((e, letter[1]))
        v = g.step_target(e, letter[1])
    return PathRef(start, tuple(steps))


def read_end(g: LabelledGraph, start: int, w: Sequence[Letter]) -> int | None:
    """Endpoint of reading ``w`` from ``start`` (no reducedness check)."""
    v = start
    for letter in w:
        nxt = g.continuation(v, letter)
        if not nxt:
            return None
        v = g.step_target(nxt[0], letter[1])
    return v


# ------------------------------------------------------------------ cycles


@dataclass(frozen=True)
class Cycle:
    """A simple cycle in canonical position: its label is lex-least."""

    path: PathRef
    word: Word
    edges: frozenset[int] = field(compare=False)

    def __len__(self) -> int:
        return len(self.word)


def _canonical_placement(g: LabelledGraph, start: int, steps: Sequence[Step]) -> tuple[Word, PathRef]:
    path = PathRef(start, tuple(steps))
    verts = path.vertices(g)[:-1]
    best = None
    n = len(steps)
    for seq, vs in ((tuple(steps), verts), (path.inverse(g).steps, path.inverse(g).vertices(g)[:-1])):
        for i in range(n):
            rot = seq[i:] + seq[:i]
            word = tuple(g.step_letter(e, d) for e, d in rot)
            key = (word, vs[i], rot)
            if best is None or key < best:
                best = key
    word, v0, rot = best
    return word, PathRef(v0, rot)


def _blocks(g: LabelledGraph) -> list[set[int]]:
    simple = nx.Graph()
    simple.add_nodes_from(range(g.num_vertices))
    for e in g.edges:
        if e.source != e.target:
            simple.add_edge(e.source, e.target)
    return [set(b) for b in nx.biconnected_components(simple) if len(b) >= 2]


def simple_cycles(g: LabelledGraph, budget: int = DEFAULT_CYCLE_BUDGET) -> list[Cycle]:
    """All simple cycles of the underlying undirected multigraph.

    One representative per cycle up to rotation and inversion, placed so its
    label is lexicographically least.  Enumeration runs a backtracking search
    inside each biconnected block from its least vertex upward, so every
    explored partial path can still close up within the block.
    """
    found: dict[frozenset[int], Cycle] = {}
    steps_taken = 0

    def record(start: int, steps: list[Step]) -> None:
        key = frozenset(e for e, _ in steps)
        if key in found:
            return
        word, path = _canonical_placement(g, start, steps)
        found[key] = Cycle(path, word, key)
        if len(found) > budget:
            raise BudgetExceeded("simple cycle enumeration", budget)

    for i, e in enumerate(g.edges):
        if e.source == e.target:
            record(e.source, [(i, 1)])

    for block in _blocks(g):
        order = sorted(block)
        for s in order:
            allowed = {v for v in block if v >= s}
            on_path = {s}
            steps: list[Step] = []

            def extend(v: int) -> None:
                nonlocal steps_taken
                steps_taken += 1
                if steps_taken % BUDGET_CHECK_INTERVAL == 0 and len(found) > budget:
                    raise BudgetExceeded("simple cycle enumeration", budget)
                for e, d in g.incident(v):
                    if steps and steps[-1][0] == e:
                        continue
                    edge = g.edges[e]
                    if edge.source == edge.target:
                        continue
                    u = g.step_target(e, d)
                    if u == s and steps:
                        record(s, steps + [(e, d)])
                    elif u in allowed and u not in on_path:
                        on_path.add(u)
                        steps.append((e, d))
                        extend(u)
                        steps.pop()
                        on_path.discard(u)

            extend(s)
    return sorted(found.values(), key=lambda c: (len(c.word), c.word, sorted(c.edges)))


def _bfs(g: LabelledGraph, root: int) -> dict[int, int]:
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e, d in g.incident(v):
            u = g.step_target(e, d)
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def distances_from(g: LabelledGraph, root: int) -> dict[int, int]:
    return _bfs(g, root)


def girth_of_vertices(g: LabelledGraph, vertices: Iterable[int]) -> int:
    vertices = list(vertices)
    vs = set(vertices)
    best = 0
    for i, e in enumerate(g.edges):
        if e.source in vs and e.source == e.target:
            return 1
    pairs: dict[tuple[int, int], int] = {}
    for e in g.edges:
        if e.source in vs:
            key = (min(e.source, e.target), max(e.source, e.target))
            pairs[key] = pairs.get(key, 0) + 1
    if any(c > 1 for c in pairs.values()):
        return 2
    for root in vertices:
        dist = {root: 0}
        parent_edge = {root: -1}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for e, d in g.incident(v):
                if e == parent_edge[v]:
                    continue
                u = g.step_target(e, d)
                if u not in dist:
                    dist[u] = dist[v] + 1
                    parent_edge[u] = e
                    queue.append(u)
                else:
                    length = dist[u] + dist[v] + 1
                    if best == 0 or length < best:
                        best = length
    return best


def girth_and_diameter(g: LabelledGraph, component: int = 0) -> tuple[int, int]:
    """Girth (0 for a tree) and diameter of one connected component."""
    vertices = g.components[component].vertices
    girth = girth_of_vertices(g, vertices)
    diameter = 0
    for v in vertices:
        diameter = max(diameter, max(_bfs(g, v).values()))
    return girth, diameter


def spanning_tree_generators(g: LabelledGraph, base: int) -> list[tuple[int, Word]]:
    """Free generators of the fundamental group at ``base``.

    The spanning tree comes from a BFS that scans incident edges in id order;
    each edge outside the tree yields ``tree(base, s) * letter * tree(t, base)``.
    """
    parent: dict[int, Step | None] = {base: None}
    order = [base]
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for e, d in g.incident(v):
            u = g.step_target(e, d)
            if u not in parent:
                parent[u] = (e, d)
                order.append(u)
                queue.append(u)
    tree = {p[0] for p in parent.values() if p is not None}

    def to_vertex(v: int) -> Word:
        out = []
        while parent[v] is not None:
            e, d = parent[v]
            out.append(g.step_letter(e, d))
            v = g.step_source(e, d)
        return tuple(reversed(out))

    comp = set(parent)
    gens = []
    for i, e in enumerate(g.edges):
        if e.source in comp and i not in tree:
            word = to_vertex(e.source) + ((e.letter, 1),) + inverse(to_vertex(e.target))
            gens.append((i, word))
    return gens


# ------------------------------------------------------------- text format


def parse_graph(text: str) -> LabelledGraph:
    alphabet = None
    comps: list[tuple[str | None, list[int]]] = []
    local_maps: list[dict[int, int]] = []
    local_ids: list[int] = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "alphabet":
                if alphabet is not None:
                    raise GraphFormatError("alphabet declared twice")
                alphabet = Alphabet(tuple(parts[1:]))
            elif head == "component":
                if len(parts) > 2:
                    raise GraphFormatError("component takes at most one name")
                comps.append((parts[1] if len(parts) == 2 else None, []))
                local_maps.append({})
            elif head == "v":
                if not comps:
                    comps.append((None, []))
                    local_maps.append({})
                if len(parts) != 2:
                    raise GraphFormatError("expected 'v <id>'")
                lid = int(parts[1])
                if lid < 0 or lid in local_maps[-1]:
                    raise GraphFormatError(f"bad or duplicate vertex id {lid}")
                gid = len(local_ids)
                local_maps[-1][lid] = gid
                comps[-1][1].append(gid)
                local_ids.append(lid)
            elif head == "e":
                if alphabet is None:
                    raise GraphFormatError("edge before alphabet")
                if not comps or len(parts) != 4:
                    raise GraphFormatError("expected 'e <src> <dst> <letter>' inside a component")
                src, dst = local_maps[-1][int(parts[1])], local_maps[-1][int(parts[2])]
                edges.append((src, dst, alphabet.index(parts[3])))
            else:
                raise GraphFormatError(f"unknown directive {head!r}")
        except GraphFormatError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        except (KeyError, ValueError) as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        except WordFormatError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    if alphabet is None:
        raise GraphFormatError("missing alphabet line")
    return LabelledGraph(alphabet, len(local_ids), edges, components=comps, local_ids=local_ids)


def format_graph(g: LabelledGraph) -> str:
    lines = ["alphabet " + " ".join(g.alphabet.letters)]
    edges_by_comp: dict[int, list[int]] = {}
    for i, e in enumerate(g.edges):
        edges_by_comp.setdefault(g.component_of(e.source), []).append(i)
    for ci, comp in enumerate(g.components):
        lines.append("component" + (f" {comp.name}" if comp.name else ""))
        for v in comp.vertices:
            lines.append(f"v {g.local_ids[v]}")
        for i in edges_by_comp.get(ci, []):
            e = g.edges[i]
            lines.append(f"e {g.local_ids[e.source]} {g.local_ids[e.target]} {g.alphabet.letters[e.letter]}")
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> LabelledGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: LabelledGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))


def disjoint_union(graphs: Sequence[LabelledGraph], names: Sequence[str | None] | None = None) -> LabelledGraph:
    """Union over a shared alphabet (the union of letters, first-seen order)."""
    letters: list[str] = []
    for h in graphs:
        for t in h.alphabet.letters:
            if t not in letters:
                letters.append(t)
    alphabet = Alphabet(tuple(letters))
    edges = []
    comps = []
    local = []
    offset = 0
    for k, h in enumerate(graphs):
        remap = {i: alphabet.index(t) for i, t in enumerate(h.alphabet.letters)}
        for e in h.edges:
            edges.append((e.source + offset, e.target + offset, remap[e.letter]))
        for ci, c in enumerate(h.components):
            name = c.name
            if names is not None and len(h.components) == 1:
                name = names[k]
            comps.append((name, [v + offset for v in c.vertices]))
        local.extend(h.local_ids)
        offset += h.num_vertices
    return LabelledGraph(alphabet, offset, edges, components=comps, local_ids=local)
