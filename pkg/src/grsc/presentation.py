"""Presentations read off labelled graphs, Tietze reduction and classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .conditions import check_condition
from .errors import BudgetExceeded, PreconditionFailed
from .graph_core import (
    DEFAULT_CYCLE_BUDGET,
    Alphabet,
    Cycle,
    LabelledGraph,
    Word,
    canonical_cyclic,
    cyclic_reduce,
    format_word,
    free_reduce,
    girth_and_diameter,
    inverse,
    simple_cycles,
    spanning_tree_generators,
)
from .pieces import PieceIndex, piece_distances_from


@dataclass
class Presentation:
    alphabet: Alphabet
    relators: tuple[Word, ...]
    provenance: tuple[dict, ...]
    duplicates: tuple[dict, ...] = ()
    cycles: tuple[Cycle, ...] | None = None  # set when relators come from simple cycles
    max_piece: tuple[int, ...] | None = None

    @classmethod
    def from_words(cls, alphabet: Alphabet, words: Sequence[Word], provenance: Sequence[dict] | None = None) -> "Presentation":
        """Canonicalise, drop empty words and merge conjugate or inverse duplicates."""
        seen: dict[Word, int] = {}
        rels, prov, dups = [], [], []
        for k, w in enumerate(words):
            core, _ = cyclic_reduce(free_reduce(w))
            src = dict(provenance[k]) if provenance else {"input": k}
            if not core:
                dups.append({"dropped": src, "reason": "freely trivial"})
                continue
            key = canonical_cyclic(core)
            if key in seen:
                dups.append({"dropped": src, "same_as": seen[key]})
                continue
            seen[key] = len(rels)
            rels.append(key)
            prov.append(src)
        return cls(alphabet, tuple(rels), tuple(prov), tuple(dups))

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet.letters),
            "relators": [format_word(r, self.alphabet) for r in self.relators],
            "provenance": list(self.provenance),
            "duplicates": list(self.duplicates),
        }

    @property
    def max_relator_length(self) -> int:
        return max((len(r) for r in self.relators), default=0)


def relators_simple_cycles(g: LabelledGraph, budget: int = DEFAULT_CYCLE_BUDGET) -> Presentation:
    cycles = simple_cycles(g, budget)
    prov = [{"component": g.components[g.component_of(c.path.start)].name or g.component_of(c.path.start),
             "cycle": c.path.to_dict()} for c in cycles]
    pres = Presentation.from_words(g.alphabet, [c.word for c in cycles], prov)
    by_key = {}
    for c in cycles:
        by_key.setdefault(canonical_cyclic(c.word), c)
    pres.cycles = tuple(by_key[r] for r in pres.relators)
    return pres


def attach_piece_data(pres: Presentation, g: LabelledGraph, idx: PieceIndex, essential: bool = True) -> Presentation:
    """Record the longest piece on each relator's cycle (used to prune the solver)."""
    if pres.cycles is None:
        raise PreconditionFailed("piece data needs relators read from simple cycles")
    pres.max_piece = tuple(max(idx.extension_lengths(c.word, essential)) for c in pres.cycles)
    return pres


def relators_pi1(g: LabelledGraph, budget: int = DEFAULT_CYCLE_BUDGET) -> Presentation:
    words, prov = [], []
    for ci, comp in enumerate(g.components):
        base = comp.vertices[0]
        for e, w in spanning_tree_generators(g, base):
            words.append(w)
            prov.append({"component": comp.name or ci, "base": base, "edge": e})
    return Presentation.from_words(g.alphabet, words, prov)


def minimal_period(w: Sequence) -> int:
    """Smallest p dividing len(w) with w equal to its rotation by p.

    >>> minimal_period("abab")
    2
    """
    n = len(w)
    if n == 0:
        return 0
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n


def conciseness_and_powers(p: Presentation | Sequence[Word], alphabet: Alphabet | None = None) -> dict:
    """Flag conjugate-or-inverse relator pairs and proper powers."""
    if isinstance(p, Presentation):
        words = list(p.relators)
        alphabet = p.alphabet
        merged = [d for d in p.duplicates if "same_as" in d]
    else:
        words = [tuple(w) for w in p]
        merged = []
    pairs = [[d["dropped"], d["same_as"]] for d in merged]
    keys: dict[Word, int] = {}
    for i, w in enumerate(words):
        core, _ = cyclic_reduce(free_reduce(w))
        k = canonical_cyclic(core)
        if k in keys:
            pairs.append([keys[k], i])
        else:
            keys[k] = i
    powers = []
    for i, w in enumerate(words):
        core, _ = cyclic_reduce(free_reduce(w))
        per = minimal_period(core)
        if core and per < len(core):
            root = core[:per]
            powers.append({"index": i, "root": format_word(root, alphabet) if alphabet else list(root),
                           "exponent": len(core) // per})
    return {"concise": not pairs, "non_concise_pairs": pairs, "proper_powers": powers,
            "no_proper_powers": not powers}


# ------------------------------------------------------------------ Tietze


@dataclass
class TietzeResult:
    graph: LabelledGraph
    alphabet: Alphabet
    audit: list[dict]
    edge_origin: list[int]  # edge id in the reduced graph -> edge id in the input

    def to_dict(self) -> dict:
        return {"alphabet": list(self.alphabet.letters), "removed": self.audit,
                "edges": len(self.graph.edges)}


def _without_edge(g: LabelledGraph, e: int) -> LabelledGraph:
    letter = g.edges[e].letter
    keep_letters = [i for i in range(len(g.alphabet)) if i != letter]
    alphabet = g.alphabet.restrict(keep_letters)
    relabel = {old: new for new, old in enumerate(keep_letters)}
    edges = [(x.source, x.target, relabel[x.letter]) for i, x in enumerate(g.edges) if i != e]
    return LabelledGraph(alphabet, g.num_vertices, edges,
                         components=[(c.name, c.vertices) for c in g.components], local_ids=g.local_ids)


def tietze_reduce(g: LabelledGraph, idx: PieceIndex | None = None, budget: int = DEFAULT_CYCLE_BUDGET,
                  order: Sequence[int] | None = None) -> TietzeResult:
    """Remove, one at a time, a non-piece edge lying on a simple cycle, with its letter.

    A non-piece edge carries the only occurrence of its letter, so each
    removal is a Tietze move.  The least edge id (in input numbering) goes
    first unless ``order`` gives another priority.
    """
    g.require_reduced()
    origin = list(range(len(g.edges)))
    priority = {e: k for k, e in enumerate(order)} if order is not None else None
    audit = []
    cur = g
    while True:
        cycles = simple_cycles(cur, budget)
        on_cycle: dict[int, Cycle] = {}
        for c in cycles:
            for e in sorted(c.edges):
                on_cycle.setdefault(e, c)
        counts: dict[int, int] = {}
        for x in cur.edges:
            counts[x.letter] = counts.get(x.letter, 0) + 1
        candidates = [e for e in on_cycle if counts[cur.edges[e].letter] == 1]
        if not candidates:
            break
        key = (lambda e: priority.get(origin[e], len(priority) + origin[e])) if priority else (lambda e: origin[e])
        e = min(candidates, key=key)
        c = on_cycle[e]
        audit.append({
            "edge": origin[e],
            "letter": cur.alphabet.letters[cur.edges[e].letter],
            "cycle_word": format_word(c.word, cur.alphabet),
            "occurrences": 1,
        })
        cur = _without_edge(cur, e)
        del origin[e]
    return TietzeResult(cur, cur.alphabet, audit, origin)


def replay_tietze(g: LabelledGraph, audit: Sequence[dict]) -> LabelledGraph:
    origin = list(range(len(g.edges)))
    cur = g
    for step in audit:
        e = origin.index(step["edge"])
        if cur.alphabet.letters[cur.edges[e].letter] != step["letter"]:
            raise PreconditionFailed("audit letter does not match the edge")
        cur = _without_edge(cur, e)
        del origin[e]
    return cur


def is_forest(g: LabelledGraph) -> bool:
    return len(g.edges) == g.num_vertices - len(g.components)


# ----------------------------------------------------------- classification


@dataclass
class Classification:
    verdict: str
    rank: int | None = None
    reason: str | None = None
    witness: dict | None = None
    evidence: dict = field(default_factory=dict)
    reduced_alphabet: list[str] = field(default_factory=list)
    audit: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "reason": self.reason,
            "witness": self.witness,
            "evidence": self.evidence,
            "reduced_alphabet": self.reduced_alphabet,
            "removed": self.audit,
        }


def classify(g: LabelledGraph, idx: PieceIndex | None = None, budget: int = DEFAULT_CYCLE_BUDGET,
             witness: bool = True, witness_budget: int = 10**6) -> Classification:
    """Decide trivial / infinite cyclic / free / contains a free subgroup where the evidence allows."""
    g.require_reduced()
    loops = {}
    for i, e in enumerate(g.edges):
        if e.source == e.target:
            loops.setdefault(e.letter, i)
    if len(g.alphabet) == 0 or all(x in loops for x in range(len(g.alphabet))):
        ev = {"loops": {g.alphabet.letters[x]: e for x, e in sorted(loops.items())}}
        return Classification("Trivial", evidence=ev)

    red = tietze_reduce(g, None, budget)
    gp, sp = red.graph, red.alphabet
    base = {"reduced_alphabet": list(sp.letters), "audit": red.audit}
    if is_forest(gp):
        k = len(sp)
        ev = {"forest": True}
        if k == 0:
            return Classification("Trivial", evidence=ev, **base)
        if k == 1:
            return Classification("InfiniteCyclic", rank=1, evidence=ev, **base)
        return Classification("FreeOfRank", rank=k, evidence=ev, **base)

    idx2 = PieceIndex(gp)
    c7 = check_condition(gp, idx2, "C7", budget)
    girth = min(gz for gz in (girth_and_diameter(gp, ci)[0] for ci in range(len(gp.components))) if gz > 0)
    ev = {"forest": False, "C7": {"holds": c7.holds, "witness": c7.witness}, "reduced_girth": girth}
    if not c7.holds:
        gr7 = check_condition(gp, idx2, "Gr7", budget)
        ev["Gr7"] = {"holds": gr7.holds}
        reason = "gr-only" if gr7.holds else "C(7) fails after reduction"
        return Classification("Inconclusive", reason=reason, evidence=ev, **base)
    if len(sp) == 1:
        return Classification("InfiniteCyclic", rank=1, evidence=ev, **base)
    wit = None
    if witness:
        all_pieces = all(idx2.edge_is_piece(e) for e in range(len(gp.edges)))
        if all_pieces:
            try:
                wit = free_subgroup_witness(gp, idx2, budget, search_budget=witness_budget)
            except BudgetExceeded:
                wit = None
                ev["witness_search"] = "budget exceeded"
        else:
            ev["witness_search"] = "some edges of the reduced graph are not pieces"
        if wit is None:
            ev["theorem_only"] = True
    return Classification("ContainsFreeSubgroup", witness=wit, evidence=ev, **base)


# ---------------------------------------------------------- free subgroups


def free_subgroup_witness(g: LabelledGraph, idx: PieceIndex | None = None, budget: int = DEFAULT_CYCLE_BUDGET,
                          search_budget: int = 10**6) -> dict | None:
    """Four disjoint cycles, each with a pair at piece distance 4; alpha = w1 w2, beta = w3 w4.

    Each ``w_i`` is the label of the shorter cycle arc between the pair.
    Returns None when no such configuration exists.
    """
    idx = idx or PieceIndex(g)
    cycles = simple_cycles(g, budget)
    if not cycles:
        raise PreconditionFailed("graph has no cycles")
    for e in range(len(g.edges)):
        if not idx.edge_is_piece(e):
            raise PreconditionFailed(f"edge {e} is not a piece; reduce the graph first")
    dist_cache: dict[int, dict[int, int]] = {}

    def dp(x: int) -> dict[int, int]:
        if x not in dist_cache:
            dist_cache[x] = piece_distances_from(g, idx, x)
        return dist_cache[x]

    usable = []
    for c in cycles:
        verts = c.path.vertices(g)[:-1]
        pair = None
        for i, x in enumerate(verts):
            for j, y in enumerate(verts):
                if dp(x).get(y) == 4:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair:
            usable.append((c, pair))
    chosen: list[tuple[Cycle, tuple[int, int]]] = []
    nodes = 0

    def search(start: int, used: set[int]) -> bool:
        nonlocal nodes
        if len(chosen) == 4:
            return True
        for k in range(start, len(usable)):
            nodes += 1
            if nodes > search_budget:
                raise BudgetExceeded("free subgroup witness search", search_budget)
            c, pair = usable[k]
            vs = set(c.path.vertices(g))
            if vs & used:
                continue
            chosen.append((c, pair))
            if search(k + 1, used | vs):
                return True
            chosen.pop()
        return False

    if not search(0, set()):
        return None
    words, parts = [], []
    for c, (i, j) in chosen:
        n = len(c.word)
        forward = tuple(c.word[(i + k) % n] for k in range((j - i) % n))
        backward = inverse(tuple(c.word[(j + k) % n] for k in range((i - j) % n)))
        w = forward if len(forward) <= len(backward) else backward
        verts = c.path.vertices(g)
        words.append(w)
        parts.append({"cycle": c.path.to_dict(), "cycle_word": format_word(c.word, g.alphabet),
                      "x": verts[i], "y": verts[j], "piece_distance": 4, "word": format_word(w, g.alphabet)})
    alpha = words[0] + words[1]
    beta = words[2] + words[3]
    return {
        "alpha": format_word(alpha, g.alphabet),
        "beta": format_word(beta, g.alphabet),
        "alpha_word": alpha,
        "beta_word": beta,
        "cycles": parts,
    }
