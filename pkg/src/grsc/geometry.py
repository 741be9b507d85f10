"""Cayley-graph balls, embeddings of defining graphs, and lacunarity criteria.

Distances in the Cayley graph are bracketed.  Any quotient of the group is
1-Lipschitz for word length, so the Cayley distance of the fingerprint
quotient gives a lower bound.  The label of a graph path gives an upper
bound, and solver-certified equalities with shorter words sharpen it.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .conditions import ConditionReport, check_condition
from .errors import BallTooSmall, BudgetExceeded, InsufficientData, PreconditionFailed
from .graph_core import LabelledGraph, Word, distances_from, free_reduce, girth_and_diameter, inverse
from .presentation import Presentation, relators_simple_cycles
from .quotients import QuotientFamily
from .solver import quotient_family, solve

DEFAULT_ELEMENT_BUDGET = 200_000


def _letters(rank: int) -> list[tuple[int, int]]:
    return [(x, s) for x in range(rank) for s in (1, -1)]


def reduced_words(rank: int, max_len: int):
    """All reduced words of length <= max_len in shortlex order."""
    layer: list[Word] = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x, s in _letters(rank):
                if w and w[-1] == (x, -s):
                    continue
                u = w + ((x, s),)
                nxt.append(u)
                yield u
        layer = nxt


class CayleyBall:
    """Ball of a given radius about the identity, with elements kept as shortlex-least words.

    When ``materialise`` is False the ball is implicit: membership and
    distances are answered on demand, which is what embedding checks need
    for large radii.
    """

    def __init__(self, p: Presentation, radius: int, cond: ConditionReport | None = None,
                 quotients: QuotientFamily | None = None, node_budget: int = 20_000,
                 element_budget: int = DEFAULT_ELEMENT_BUDGET, materialise: bool = True):
        if radius < 0:
            raise PreconditionFailed("radius must be non-negative")
        self.presentation = p
        self.radius = radius
        self.cond = cond
        self.rank = len(p.alphabet)
        self.free = not p.relators
        self.quotients = None if self.free else (quotients or quotient_family(p))
        self.node_budget = node_budget
        self.unresolved: list[tuple[Word, Word]] = []
        self.elements: list[Word] | None = None
        self.adjacency: list[dict] | None = None
        self._layers: dict | None = None
        self._layer_radius = -1
        if materialise:
            self._build(element_budget)

    @property
    def approximate(self) -> bool:
        return bool(self.unresolved)

    def fingerprint(self, w: Sequence) -> tuple:
        if self.free:
            return free_reduce(w)
        return self.quotients.fingerprint(free_reduce(w))

    def equal(self, u: Sequence, v: Sequence) -> bool | None:
        """True or False when certified, None when the solver gives up."""
        if self.fingerprint(u) != self.fingerprint(v):
            return False
        if self.free:
            return True
        verdict = solve(free_reduce(tuple(u) + inverse(tuple(v))), self.presentation, self.cond,
                        node_budget=self.node_budget, quotients=self.quotients)
        if verdict.verdict == "Trivial":
            return True
        if verdict.verdict == "Nontrivial":
            return False
        self.unresolved.append((tuple(u), tuple(v)))
        return None

    def _build(self, element_budget: int) -> None:
        elements: list[Word] = [()]
        buckets: dict[tuple, list[int]] = {self.fingerprint(()): [0]}
        adjacency: list[dict] = [{}]
        frontier = [0]
        for _ in range(self.radius):
            nxt = []
            for i in frontier:
                for letter in _letters(self.rank):
                    if letter in adjacency[i]:
                        continue
                    u = free_reduce(elements[i] + (letter,))
                    fp = self.fingerprint(u)
                    target = None
                    for j in buckets.get(fp, []):
                        if self.equal(u, elements[j]):
                            target = j
                            break
                    if target is None:
                        target = len(elements)
                        if target >= element_budget:
                            raise BudgetExceeded("Cayley ball elements", element_budget)
                        elements.append(u)
                        adjacency.append({})
                        buckets.setdefault(fp, []).append(target)
                        nxt.append(target)
                    adjacency[i][letter] = target
                    adjacency[target][(letter[0], -letter[1])] = i
            frontier = nxt
        self.elements = elements
        self.adjacency = adjacency

    def __len__(self) -> int:
        if self.elements is None:
            raise PreconditionFailed("implicit ball has no element list")
        return len(self.elements)

    def quotient_distances(self, radius: int) -> dict:
        """Word-length distances in the fingerprint quotient, up to ``radius``."""
        if self._layers is not None and self._layer_radius >= radius:
            return self._layers
        dist = {self.fingerprint(()): 0}
        layer: list[Word] = [()]
        for r in range(1, radius + 1):
            nxt = []
            for w in layer:
                for x, s in _letters(self.rank):
                    if w and w[-1] == (x, -s):
                        continue
                    u = w + ((x, s),)
                    fp = self.fingerprint(u)
                    if fp not in dist:
                        dist[fp] = r
                        nxt.append(u)
            layer = nxt
        self._layers, self._layer_radius = dist, radius
        return dist

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "size": None if self.elements is None else len(self.elements),
            "approximate": self.approximate,
            "unresolved_pairs": len(self.unresolved),
            "quotients": 0 if self.quotients is None else len(self.quotients.reps),
        }


def cayley_ball(p: Presentation, r: int, cond: ConditionReport | None = None, budget: int = DEFAULT_ELEMENT_BUDGET,
                node_budget: int = 20_000) -> CayleyBall:
    return CayleyBall(p, r, cond, node_budget=node_budget, element_budget=budget)


# ------------------------------------------------------------------ embedding


@dataclass
class PairDistance:
    x: int
    y: int
    graph: int
    lower: int
    upper: int
    witness: str | None = None  # how the upper bound was obtained

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "graph": self.graph, "cayley_lower": self.lower,
                "cayley_upper": self.upper, "witness": self.witness}


@dataclass
class EmbeddingReport:
    component: str | int
    base: int
    images: dict[int, Word]
    injective: bool | None
    isometric: bool | None
    pairs: list[PairDistance]
    approximate: bool
    label_check: dict = field(default_factory=dict)

    @property
    def mismatches(self) -> list[PairDistance]:
        return [pd for pd in self.pairs if not (pd.lower == pd.upper == pd.graph)]

    @property
    def distortion(self) -> list[PairDistance]:
        return [pd for pd in self.pairs if pd.upper < pd.graph]

    def to_dict(self, alphabet=None) -> dict:
        from .graph_core import format_word
        fmt = (lambda w: format_word(w, alphabet)) if alphabet else (lambda w: [list(x) for x in w])
        return {
            "component": self.component,
            "base": self.base,
            "images": {str(v): fmt(w) for v, w in sorted(self.images.items())},
            "injective": self.injective,
            "isometric": self.isometric,
            "approximate": self.approximate,
            "pairs_checked": len(self.pairs),
            "mismatches": [pd.to_dict() for pd in self.mismatches],
            "distortion": [pd.to_dict() for pd in self.distortion],
            "label_check": self.label_check,
        }


def _tree_labels(g: LabelledGraph, base: int) -> dict[int, Word]:
    labels = {base: ()}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for e, d in g.incident(v):
            w = g.step_target(e, d)
            if w not in labels:
                labels[w] = labels[v] + (g.step_letter(e, d),)
                queue.append(w)
    return labels


def embed_component(g: LabelledGraph, component: int | str, ball: CayleyBall, base: int | None = None,
                    pairs: Sequence[tuple[int, int]] | None = None,
                    candidates: dict[tuple[int, int], Sequence[Word]] | None = None,
                    lower_radius: int | None = None, candidate_budget: int = 5_000,
                    check_labels: bool = True, isometry: bool = True) -> EmbeddingReport:
    """Compare graph distances in one component with Cayley distances of the images.

    ``candidates`` lists extra words known or suspected to equal the element
    between a pair; each certified equality lowers the upper bound.  With
    ``isometry`` off only injectivity is certified (lower bound 1 per pair),
    which avoids the quotient ball search on large alphabets.
    """
    ci = component if isinstance(component, int) else g.component_index(component)
    comp = g.components[ci]
    base = comp.vertices[0] if base is None else base
    _, diam = girth_and_diameter(g, ci)
    max_rel = ball.presentation.max_relator_length
    if ball.radius < diam + max_rel:
        raise BallTooSmall(f"radius {ball.radius} < diameter {diam} + longest relator {max_rel}")
    images = _tree_labels(g, base)
    label_check = {"edges": 0, "verified": 0, "unknown": 0}
    if check_labels:
        for e in comp_edges(g, ci):
            edge = g.edges[e]
            label_check["edges"] += 1
            ok = ball.equal(images[edge.source] + ((edge.letter, 1),), images[edge.target])
            if ok is False:
                raise PreconditionFailed(f"edge {e} does not map to a Cayley edge: graph is not over this presentation")
            label_check["verified" if ok else "unknown"] += 1
    if pairs is None:
        vs = sorted(comp.vertices)
        pairs = [(x, y) for i, x in enumerate(vs) for y in vs[i + 1:]]
    radius = diam if lower_radius is None else lower_radius
    qdist = ball.quotient_distances(radius) if isometry else {}
    dist_cache: dict[int, dict[int, int]] = {}
    out: list[PairDistance] = []
    tainted = False
    for x, y in pairs:
        if x not in dist_cache:
            dist_cache[x] = distances_from(g, x)
        dg = dist_cache[x][y]
        t = free_reduce(inverse(images[x]) + images[y])
        upper, witness = dg, "graph path"
        if not isometry:
            eq = ball.equal(t, ())
            lower = 1 if eq is False else 0
            if eq:
                upper, witness = 0, "certified equality"
            elif eq is None:
                tainted = True
            out.append(PairDistance(x, y, dg, min(lower, upper), upper, witness))
            continue
        fp = ball.fingerprint(t)
        lower = qdist.get(fp, radius + 1)
        for v in (candidates or {}).get((x, y), ()):
            if len(v) < upper and ball.equal(t, v):
                upper, witness = len(v), "certified equality"
        lower = min(lower, upper)
        if lower < upper:
            # try shorter words whose fingerprint matches, shortest first
            tried = 0
            for v in reduced_words(ball.rank, upper - 1):
                if len(v) < lower:
                    continue
                tried += 1
                if tried > candidate_budget:
                    tainted = True
                    break
                if ball.fingerprint(v) != fp:
                    continue
                eq = ball.equal(t, v)
                if eq:
                    upper, witness = len(v), "certified equality"
                    break
                if eq is None:
                    tainted = True
                    break
            else:
                lower = upper
        out.append(PairDistance(x, y, dg, lower, upper, witness))
    for pd in out:
        if pd.upper > pd.graph:
            raise PreconditionFailed("Cayley distance above graph distance: images are inconsistent")
    injective = all(pd.lower > 0 for pd in out) if out else True
    if not injective and any(pd.upper == 0 for pd in out):
        injective = False
    elif not injective:
        injective = None
    if not isometry:
        isometric = False if any(pd.upper < pd.graph for pd in out) else None
    elif all(pd.lower == pd.graph for pd in out):
        isometric = True
    elif any(pd.upper < pd.graph for pd in out):
        isometric = False
    else:
        isometric = None
    return EmbeddingReport(comp.name if comp.name is not None else ci, base, images, injective, isometric, out,
                           tainted or ball.approximate, label_check)


def comp_edges(g: LabelledGraph, ci: int) -> list[int]:
    vs = set(g.components[ci].vertices)
    return [i for i, e in enumerate(g.edges) if e.source in vs]


# -------------------------------------------------------------- coarse union


def coarse_union_metric(components: Sequence[LabelledGraph | int], m: int, n: int, x: int, y: int) -> int:
    """Distance in the coarse disjoint union; components are indexed from 1.

    ``components`` holds either graphs (needed for same-component distances)
    or bare diameters.
    """
    def diam(k: int) -> int:
        c = components[k - 1]
        if isinstance(c, int):
            return c
        return max(girth_and_diameter(c, ci)[1] for ci in range(len(c.components)))

    if m == n:
        c = components[m - 1]
        if isinstance(c, int):
            raise PreconditionFailed("a graph is needed for distances inside a component")
        d = distances_from(c, x)
        if y not in d:
            raise PreconditionFailed("vertices lie in different components of the graph")
        return d[y]
    return diam(m) + diam(n) + m + n


# ------------------------------------------------------------------ lacunarity


@dataclass
class SparseReport:
    values: list[int]
    K: Fraction
    gaps: list[dict]
    max_ratio: Fraction | None
    verdict: str

    @property
    def gap_found(self) -> bool:
        return bool(self.gaps)

    def to_dict(self) -> dict:
        return {
            "values": self.values,
            "K": str(self.K),
            "gaps": self.gaps,
            "max_ratio": None if self.max_ratio is None else str(self.max_ratio),
            "verdict": self.verdict,
            "note": "a finite prefix can witness gaps but never refute sparseness",
        }


def sparse_check(L: Sequence[int], K: float | Fraction | int) -> SparseReport:
    """Gaps ``[a, aK]`` between consecutive values of a finite prefix."""
    K = Fraction(K)
    if K <= 1:
        raise PreconditionFailed("K must exceed 1")
    values = sorted(set(int(v) for v in L))
    if not values or values[0] <= 0:
        raise PreconditionFailed("values must be positive")
    gaps = []
    ratios = []
    for i in range(len(values) - 1):
        lo, hi = values[i], values[i + 1]
        ratio = Fraction(hi, lo)
        ratios.append(ratio)
        if ratio > K:
            eps = (ratio / K - 1) / 2
            a = lo * (1 + eps)
            gaps.append({"index": i, "low": lo, "high": hi, "ratio": str(ratio), "a": str(a), "aK": str(a * K)})
    n = len(values)
    if n == 1:
        verdict = "vacuous gap beyond the maximum"
    elif gaps:
        verdict = f"gap found up to index {n}"
    else:
        verdict = f"no gap of ratio above {K} up to index {n}"
    return SparseReport(values, K, gaps, max(ratios) if ratios else None, verdict)


@dataclass
class LacunaryReport:
    mode: str
    girths: list[int]
    diameters: list[int]
    ratio_bound: Fraction
    selected: list[int]
    steps: list[dict]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "girths": self.girths,
            "diameters": self.diameters,
            "diameter_girth_bound": str(self.ratio_bound),
            "selected": self.selected,
            "steps": self.steps,
            "notes": self.notes,
        }


def _graph_stats(seq: Sequence[LabelledGraph]) -> tuple[list[int], list[int]]:
    girths, diams = [], []
    for g in seq:
        gs = [girth_and_diameter(g, ci) for ci in range(len(g.components))]
        girths.append(min((x for x, _ in gs if x > 0), default=0))
        diams.append(max(d for _, d in gs))
    return girths, diams


def select_by_girth(girths: Sequence[int], diameters: Sequence[int], C: Fraction | None = None,
                    schedule: Callable[[int], int] = lambda N: N) -> LacunaryReport:
    """Greedy subsequence with ``g_next > schedule(N) * 2C * max prior girth``."""
    ratios = [Fraction(d, g) for g, d in zip(girths, diameters) if g > 0]
    if not ratios:
        raise InsufficientData("no graph with a cycle")
    C = Fraction(C) if C is not None else max(ratios)
    selected = [0]
    steps = [{"index": 0, "girth": girths[0], "rule": "first graph"}]
    N = 1
    k = 1
    while k < len(girths):
        prior = max(girths[i] for i in selected)
        threshold = schedule(N) * 2 * C * prior
        while k < len(girths) and not girths[k] > threshold:
            k += 1
        if k == len(girths):
            report = LacunaryReport("girth", list(girths), list(diameters), C, selected, steps,
                                    ["stalled: no later graph exceeds the next threshold"])
            exc = InsufficientData(f"sequence ends before a girth above {threshold}")
            exc.report = report
            raise exc
        steps.append({"index": k, "girth": girths[k], "N": N, "threshold": str(threshold),
                      "inequality": f"{girths[k]} > {schedule(N)} * 2 * {C} * {prior}"})
        selected.append(k)
        N += 1
        k += 1
    return LacunaryReport("girth", list(girths), list(diameters), C, selected, steps,
                          ["hyperbolicity constant taken as 2 * C * girth, the bound quoted for Gr'(1/6)"])


def _cyclic_words(rank: int, length: int):
    """Cyclically reduced words of one length, one per rotation class (lex-least rotation)."""
    for w in reduced_words_of_length(rank, length):
        if length > 1 and w[0] == (w[-1][0], -w[-1][1]):
            continue
        if all(w <= w[i:] + w[:i] for i in range(1, length)):
            yield w


def reduced_words_of_length(rank: int, length: int):
    letters = _letters(rank)

    def rec(prefix: Word):
        if len(prefix) == length:
            yield prefix
            return
        for x, s in letters:
            if prefix and prefix[-1] == (x, -s):
                continue
            yield from rec(prefix + ((x, s),))

    yield from rec(())


def injectivity_radius_lower_bound(old: Presentation, new: Presentation, max_len: int,
                                   cond_old: ConditionReport | None = None, cond_new: ConditionReport | None = None,
                                   node_budget: int = 20_000, word_budget: int = 200_000) -> dict:
    """Shortest word trivial over ``new`` but not over ``old``, searched up to ``max_len``.

    Returns ``{"found": word or None, "lower_bound": r}`` where every word
    shorter than ``r`` was resolved.
    """
    qo, qn = quotient_family(old), quotient_family(new)
    count = 0
    for length in range(1, max_len + 1):
        for w in _cyclic_words(len(new.alphabet), length):
            count += 1
            if count > word_budget:
                raise BudgetExceeded("injectivity radius word search", word_budget)
            if qn.separates(w):
                continue
            vn = solve(w, new, cond_new, node_budget=node_budget, quotients=qn)
            if vn.verdict == "Nontrivial":
                continue
            if vn.verdict == "Unknown":
                return {"found": None, "lower_bound": length, "stopped": "unresolved word", "word": w}
            if qo.separates(w):
                return {"found": w, "lower_bound": length}
            vo = solve(w, old, cond_old, node_budget=node_budget, quotients=qo)
            if vo.verdict == "Nontrivial":
                return {"found": w, "lower_bound": length}
            if vo.verdict == "Unknown":
                return {"found": None, "lower_bound": length, "stopped": "unresolved word", "word": w}
    return {"found": None, "lower_bound": max_len + 1}


def lacunary_select(seq: Sequence[LabelledGraph], mode: str = "girth", C: Fraction | None = None,
                    cond: ConditionReport | None = None, schedule: Callable[[int], int] = lambda N: N,
                    max_len: int | None = None, budget: int = 200_000) -> LacunaryReport:
    """Pick a subsequence whose union is a candidate for lacunary hyperbolicity.

    ``girth`` mode needs Gr'(1/6) on the union; ``search`` mode needs Gr(7)
    and bounds injectivity radii by word search.
    """
    if cond is not None and not cond.holds:
        raise PreconditionFailed(f"{cond.condition} does not hold on the union")
    girths, diams = _graph_stats(seq)
    if mode == "girth":
        return select_by_girth(girths, diams, C, schedule)
    if mode != "search":
        raise PreconditionFailed(f"unknown mode {mode!r}")
    from .graph_core import disjoint_union

    selected = [0]
    steps = [{"index": 0, "girth": girths[0], "rule": "first graph"}]
    N = 1
    for k in range(1, len(seq)):
        prefix = disjoint_union([seq[i] for i in selected])
        extended = disjoint_union([seq[i] for i in selected] + [seq[k]])
        po, pn = relators_simple_cycles(prefix), relators_simple_cycles(extended)
        delta = 2 * max(diams[i] for i in selected)
        limit = max_len if max_len is not None else girths[k]
        res = injectivity_radius_lower_bound(po, pn, limit, word_budget=budget)
        rho = res["lower_bound"]
        step = {"index": k, "N": N, "delta": delta, "radius_lower_bound": rho,
                "shortest_new_word_found": res["found"] is not None}
        if rho > schedule(N) * delta:
            step["inequality"] = f"{rho} > {schedule(N)} * {delta}"
            steps.append(step)
            selected.append(k)
            N += 1
        else:
            step["rejected"] = True
            steps.append(step)
    return LacunaryReport("search", girths, diams, max(Fraction(d, g) for g, d in zip(girths, diams) if g > 0),
                          selected, steps,
                          ["radius values are lower bounds", "delta is twice the largest diameter in the prefix"])
