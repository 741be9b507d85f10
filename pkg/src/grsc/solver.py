"""Bounded word problem over graphical presentations.

The search works on cyclic words.  A move picks a rotation ``u t`` of the
current word and a rotation ``u s`` of a relator (or its inverse) sharing
the prefix ``u`` and replaces the word by ``s^-1 t``.  Every diagram for a
nonempty cyclically reduced word has a face sharing at least one edge with
the boundary, and deleting that face is such a move, so exhausting the
moves within an area budget proves nontriviality.

Two pruning rules keep the search finite and stay sound:

* a word with a diagram of area at most ``B`` has length at most ``M * B``
  where ``M`` is the longest relator;
* after a move the remaining budget is also capped by the theorem's area
  bound applied to the new word.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .conditions import ConditionReport, parse_condition
from .diagram import Diagram, bouquet_diagram, fold_boundary, validate
from .errors import LemmaViolation, PreconditionFailed, ReplayFailed
from .graph_core import Word, canonical_cyclic, cyclic_reduce, format_word, free_reduce, inverse
from .presentation import Presentation
from .quotients import QuotientFamily

DEFAULT_NODE_BUDGET = 10**6
DEFAULT_QUOTIENT_DEGREE = 5


@dataclass
class Step:
    """Insert ``inserted`` (a rotation of a relator or its inverse) before ``position``."""

    position: int
    relator: int
    rotation: int
    inverted: bool
    inserted: Word

    def to_dict(self, alphabet=None) -> dict:
        return {
            "position": self.position,
            "relator": self.relator,
            "rotation": self.rotation,
            "inverted": self.inverted,
            "inserted": format_word(self.inserted, alphabet) if alphabet else [list(x) for x in self.inserted],
        }


@dataclass
class WordVerdict:
    verdict: str  # Trivial, Nontrivial, Unknown
    word: Word
    derivation: list[Step] = field(default_factory=list)
    certificate: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def to_dict(self, alphabet=None) -> dict:
        return {
            "verdict": self.verdict,
            "word": format_word(self.word, alphabet) if alphabet else [list(x) for x in self.word],
            "derivation": [s.to_dict(alphabet) for s in self.derivation],
            "certificate": self.certificate,
            "stats": self.stats,
        }


# -------------------------------------------------------------- conditions


def area_bound_for(cond: ConditionReport | str | None) -> tuple[str, str] | None:
    """(theorem tag, bound kind) for a verified condition, or None.

    ``linear`` means 8|w| and ``quadratic`` means 3|w|^2.
    """
    if cond is None:
        return None
    if isinstance(cond, str):
        raise PreconditionFailed("pass a ConditionReport: a bare tag is not a verified condition")
    if not cond.holds:
        raise PreconditionFailed(f"{cond.condition} does not hold")
    c = parse_condition(cond.condition)
    if c.metric:
        if c.ratio <= Fraction(1, 6):
            return (str(c), "linear")
    elif c.n >= 7:
        return (str(c), "linear")
    elif c.n == 6:
        return (str(c), "quadratic")
    raise PreconditionFailed(f"{cond.condition} gives no area bound; need Gr(6), Gr(7) or Gr'(1/6)")


def area_bound(kind: str, length: int) -> int:
    return 8 * length if kind == "linear" else 3 * length * length


# --------------------------------------------------------------- relators


@dataclass(frozen=True)
class _Rot:
    relator: int
    rotation: int
    inverted: bool
    word: Word


def _relator_rotations(relators: Sequence[Word]) -> dict:
    by_first: dict = {}
    for j, r in enumerate(relators):
        for inv in (False, True):
            base = inverse(r) if inv else tuple(r)
            for k in range(len(base)):
                q = base[k:] + base[:k]
                by_first.setdefault(q[0], []).append(_Rot(j, k, inv, q))
    return by_first


def _identify(ins: Word, relators: Sequence[Word]) -> tuple[int, int, bool]:
    for j, r in enumerate(relators):
        for inv in (False, True):
            base = inverse(r) if inv else tuple(r)
            if len(base) != len(ins):
                continue
            for k in range(len(base)):
                if base[k:] + base[:k] == ins:
                    return j, k, inv
    raise ReplayFailed("inserted word is not a relator rotation")


@lru_cache(maxsize=32)
def _quotients(rank: int, relators: tuple, degree: int) -> QuotientFamily:
    return QuotientFamily(rank, relators, degree)


def quotient_family(p: Presentation, degree: int = DEFAULT_QUOTIENT_DEGREE) -> QuotientFamily:
    return _quotients(len(p.alphabet), tuple(p.relators), degree)


# ------------------------------------------------------- linear bookkeeping


def _orientation(core: Word, key: Word) -> tuple[int, bool]:
    """(j, inverted) with key equal to rotation j of core (or of its inverse)."""
    n = len(core)
    for inv in (False, True):
        base = inverse(core) if inv else core
        for j in range(n):
            if base[j:] + base[:j] == key:
                return j, inv
    raise ReplayFailed("state does not match the current word")


def _apply_move(w: Word, key: Word, i: int, q: Word, m: int, relators: Sequence[Word]) -> tuple[Word, Step]:
    """Perform the cyclic move (rotation i of key, relator rotation q, overlap m) on linear word w."""
    core, conj = cyclic_reduce(w)
    n = len(core)
    j, inv = _orientation(core, key)
    if not inv:
        p = (j + i) % n
        ins = inverse(q)
    else:
        p = (n - (j + i + m)) % n
        u, s = q[:m], q[m:]
        ins = s + u
    pos = len(conj) + p
    new = free_reduce(w[:pos] + ins + w[pos:])
    rel, rot, rinv = _identify(ins, relators)
    return new, Step(pos, rel, rot, rinv, ins)


def replay(w: Sequence, steps: Sequence[Step], p: Presentation) -> Word:
    """Apply a derivation; raises ReplayFailed on a bad step or a nonempty end."""
    cur = free_reduce(w)
    for k, st in enumerate(steps):
        if not 0 <= st.relator < len(p.relators):
            raise ReplayFailed(f"step {k}: no relator {st.relator}")
        r = p.relators[st.relator]
        base = inverse(r) if st.inverted else tuple(r)
        if not 0 <= st.rotation < len(base) or base[st.rotation:] + base[:st.rotation] != tuple(st.inserted):
            raise ReplayFailed(f"step {k}: inserted word is not the named relator rotation")
        if not 0 <= st.position <= len(cur):
            raise ReplayFailed(f"step {k}: position out of range")
        cur = free_reduce(cur[:st.position] + tuple(st.inserted) + cur[st.position:])
    if cur:
        raise ReplayFailed("derivation does not end at the empty word")
    return cur


# ------------------------------------------------------------------- greedy


def dehn_greedy(w: Sequence, p: Presentation) -> tuple[Word, list[Step]]:
    """Replace any cyclic subword covering more than half a relator by the shorter rest.

    Each replacement is a valid derivation step, so an empty result proves
    triviality.  A nonempty result proves nothing.
    """
    cur = free_reduce(w)
    rots = _relator_rotations(p.relators)
    steps: list[Step] = []
    while cur:
        core, _ = cyclic_reduce(cur)
        n = len(core)
        move = None
        for i in range(n):
            ci = core[i:] + core[:i]
            for r in rots.get(ci[0], ()):
                q = r.word
                m = 0
                lim = min(n, len(q))
                while m < lim and ci[m] == q[m]:
                    m += 1
                if 2 * m > len(q):
                    move = (i, q, m)
                    break
            if move:
                break
        if move is None:
            break
        i, q, m = move
        cur, st = _apply_move(cur, core, i, q, m, p.relators)
        steps.append(st)
    return cur, steps


# ------------------------------------------------------------------- search


def _search(start: Word, rots: dict, max_rel: int, budget: int, bound_kind: str | None,
            node_budget: int) -> tuple[list | None, dict, bool]:
    """Best-first search from a cyclic word.  Returns (path, stats, exhausted)."""
    key0 = canonical_cyclic(start)
    best: dict[Word, int] = {key0: budget}
    parent: dict[Word, tuple] = {key0: None}
    counter = itertools.count()
    heap = [(len(key0), next(counter), key0, budget)]
    nodes = 0
    max_len = len(key0)
    while heap:
        _, _, key, b = heapq.heappop(heap)
        if best.get(key, -1) > b:
            continue
        nodes += 1
        if nodes > node_budget:
            return None, {"nodes": nodes, "states": len(best), "max_length": max_len}, False
        n = len(key)
        for i in range(n):
            ci = key[i:] + key[:i]
            for r in rots.get(ci[0], ()):
                q = r.word
                m = 1
                lim = min(n, len(q))
                while m < lim and ci[m] == q[m]:
                    m += 1
                new, _ = cyclic_reduce(free_reduce(inverse(q[m:]) + ci[m:]))
                nb = b - 1
                if new and bound_kind is not None:
                    nb = min(nb, area_bound(bound_kind, len(new)))
                if new and (nb <= 0 or len(new) > max_rel * nb):
                    continue
                nkey = canonical_cyclic(new)
                if best.get(nkey, -1) >= nb:
                    continue
                best[nkey] = nb
                parent[nkey] = (key, i, q, m)
                if not new:
                    path = []
                    k = nkey
                    while parent[k] is not None:
                        path.append((k,) + parent[k])
                        k = parent[k][0]
                    path.reverse()
                    return path, {"nodes": nodes, "states": len(best), "max_length": max_len}, False
                max_len = max(max_len, len(new))
                heapq.heappush(heap, (len(new), next(counter), nkey, nb))
    return None, {"nodes": nodes, "states": len(best), "max_length": max_len}, True


def solve(w: Sequence, p: Presentation, cond: ConditionReport | None = None,
          node_budget: int = DEFAULT_NODE_BUDGET, quotients: QuotientFamily | bool | None = True,
          greedy: bool = True) -> WordVerdict:
    """Decide whether ``w`` is trivial, within the area bound of a verified condition.

    ``quotients`` supplies (or, when True, builds) small quotients used as a
    nontriviality certificate before searching.
    """
    bound = area_bound_for(cond)
    w0 = tuple(w)
    word = free_reduce(w0)
    stats: dict = {"input_reduced": word == w0}
    if not word:
        return WordVerdict("Trivial", word, [], {"reason": "freely trivial"}, stats)
    if quotients is True:
        quotients = quotient_family(p)
    if quotients:
        sep = quotients.separates(word)
        if sep is not None:
            return WordVerdict("Nontrivial", word, [], {"method": "quotient", "quotient": sep}, stats)

    steps: list[Step] = []
    cur = word
    if greedy and p.relators:
        cur, steps = dehn_greedy(word, p)
        stats["greedy_steps"] = len(steps)
        if not cur:
            replay(word, steps, p)
            _check_area(word, steps, bound)
            return WordVerdict("Trivial", word, steps, {"method": "greedy"}, stats)

    core, _ = cyclic_reduce(cur)
    max_rel = max((len(r) for r in p.relators), default=0)
    if not p.relators:
        if bound is None:
            return WordVerdict("Unknown", word, [], {"reason": "no relators and no verified condition"}, stats)
        return WordVerdict("Nontrivial", word, [], {"method": "free group", "condition": bound[0]}, stats)
    if bound is not None:
        area = area_bound(bound[1], len(core))
    else:
        area = node_budget  # no theorem: the search can only find derivations
    rots = _relator_rotations(p.relators)
    path, sstats, exhausted = _search(core, rots, max_rel, area, bound[1] if bound else None, node_budget)
    stats.update(sstats)
    if path is not None:
        for key, _parent, i, q, m in path:
            prev = _parent
            cur, st = _apply_move(cur, prev, i, q, m, p.relators)
            steps.append(st)
            if canonical_cyclic(cyclic_reduce(cur)[0]) != key:
                raise ReplayFailed("linear replay diverged from the search")
        replay(word, steps, p)
        _check_area(word, steps, bound)
        return WordVerdict("Trivial", word, steps, {"method": "search"}, stats)
    if exhausted and bound is not None:
        cert = {
            "method": "exhaustive search",
            "condition": bound[0],
            "area_bound": area,
            "area_formula": "8|w|" if bound[1] == "linear" else "3|w|^2",
            "searched_word_length": len(core),
            "length_bound": f"|word| <= {max_rel} * remaining area",
        }
        return WordVerdict("Nontrivial", word, [], cert, stats)
    reason = "node budget exceeded" if not exhausted else "no verified condition for a nontriviality proof"
    return WordVerdict("Unknown", word, [], {"reason": reason, "node_budget": node_budget}, stats)


def _check_area(word: Word, steps: Sequence[Step], bound: tuple[str, str] | None) -> None:
    if bound is not None and len(steps) > area_bound(bound[1], len(word)):
        raise LemmaViolation("derivation longer than the area bound", steps=len(steps), word_length=len(word))


# ------------------------------------------------------------------ diagrams


def derivation_to_diagram(w: Sequence, steps: Sequence[Step], p: Presentation) -> Diagram:
    """Bouquet of conjugated faces read off the derivation, folded along its boundary."""
    word = free_reduce(w)
    replay(word, steps, p)
    pieces = []
    cur = word
    for st in steps:
        stem = cur[:st.position]
        pieces.append((stem, inverse(tuple(st.inserted))))
        cur = free_reduce(cur[:st.position] + tuple(st.inserted) + cur[st.position:])
    if not pieces:
        raise PreconditionFailed("an empty derivation has no diagram")
    d = fold_boundary(bouquet_diagram(pieces, p.alphabet))
    if d.boundary_word() != word:
        raise ReplayFailed("folded diagram does not read the word")
    validate(d)
    return d
