"""Generators for the example graphs and the fixtures used by the tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InputError
from .graph_core import (
    Alphabet,
    LabelledGraph,
    Word,
    canonical_cyclic,
    disjoint_union,
    format_word,
    is_cyclically_reduced,
    parse_word,
)

FIGURE1_VERTEX_NAMES = ("X1", "X2", "X3", "X4", "Y1", "Y2", "Y3", "Z1", "Z2", "Z3", "Z4")
FIGURE1_BASE = 4  # Y1, the leftmost vertex


def gen_figure1() -> LabelledGraph:
    """The 11-vertex, 12-edge graph over {a, b, c} with girth 7."""
    alphabet = Alphabet(("a", "b", "c"))
    a, b, c = 0, 1, 2
    x1, x2, x3, x4, y1, y2, y3, z1, z2, z3, z4 = range(11)
    edges = [
        (x1, x2, a), (x2, x3, b), (x3, x4, b), (y1, x1, b),
        (x4, y3, c), (y1, z1, c), (z4, y3, b), (y1, y2, a),
        (y2, y3, a), (z1, z2, a), (z2, z3, c), (z3, z4, c),
    ]
    return LabelledGraph(alphabet, 11, edges, components=[("figure1", list(range(11)))])


def gen_word_cycle(word: Word, alphabet: Alphabet, name: str | None = None) -> LabelledGraph:
    """A cycle graph whose label read from vertex 0 is ``word``."""
    n = len(word)
    if n == 0:
        raise InputError("a cycle needs a non-empty word")
    edges = []
    for i, (x, s) in enumerate(word):
        u, v = i, (i + 1) % n
        edges.append((u, v, x) if s > 0 else (v, u, x))
    return LabelledGraph(alphabet, n, edges, components=[(name, list(range(n)))])


def gen_classical(relators: Sequence[Word], alphabet: Alphabet) -> LabelledGraph:
    """Disjoint union of one cycle per relator, up to cyclic conjugacy and inversion."""
    seen: dict[Word, int] = {}
    cycles = []
    for k, r in enumerate(relators):
        r = tuple(r)
        if not r or not is_cyclically_reduced(r):
            raise InputError(f"relator {format_word(r, alphabet)!r} is not cyclically reduced")
        key = canonical_cyclic(r)
        if key in seen:
            continue
        seen[key] = k
        cycles.append(gen_word_cycle(r, alphabet, name=f"R{len(cycles) + 1}"))
    if not cycles:
        raise InputError("no relators given")
    g = disjoint_union(cycles)
    if g.alphabet != alphabet:
        g = LabelledGraph(alphabet, g.num_vertices,
                          [(e.source, e.target, alphabet.index(g.alphabet.letters[e.letter])) for e in g.edges],
                          components=[(c.name, c.vertices) for c in g.components], local_ids=g.local_ids)
    return g


def gen_cayley_cycle(k: int, letter: str = "a") -> LabelledGraph:
    """Directed k-cycle with every edge labelled ``letter``: the Cayley graph of Z/k."""
    if k < 1:
        raise InputError("k must be positive")
    alphabet = Alphabet((letter,))
    return gen_word_cycle(((0, 1),) * k, alphabet, name=f"Z{k}")


def gen_bouquet(letters: Sequence[str]) -> LabelledGraph:
    """One vertex with a loop for each letter."""
    alphabet = Alphabet(tuple(letters))
    return LabelledGraph(alphabet, 1, [(0, 0, i) for i in range(len(letters))])


# ----------------------------------------------------------- distortion family


def gray_word(k: int, letters: tuple[int, int]) -> Word:
    """Binary reflected Gray code of ``k`` spelled with two positive letters."""
    if k < 1:
        raise ValueError("index must be positive")
    code = k ^ (k >> 1)
    return tuple((letters[int(bit)], 1) for bit in bin(code)[2:])


def default_growth(n: int) -> int:
    return (n + 1) ** 2


@dataclass
class DistortionMember:
    """One graph of the distortion family with its marked vertices and arcs."""

    n: int
    graph: LabelledGraph
    start: int
    eta: int
    nu: int
    long_word: Word      # the shared b-power p_n
    x_word: Word         # second arc from start to eta
    y_word: Word         # second arc from eta to nu

    @property
    def growth(self) -> int:
        return len(self.long_word)


FIGURE5_ALPHABET = Alphabet(("a", "b", "s", "t", "c", "d"))


def _arc_edges(start: int, end: int, word: Word, next_vertex: int) -> tuple[list[tuple[int, int, int]], int]:
    """Edges of a path labelled ``word`` from start to end with fresh inner vertices."""
    edges = []
    cur = start
    for i, (x, s) in enumerate(word):
        if i == len(word) - 1:
            nxt = end
        else:
            nxt = next_vertex
            next_vertex += 1
        edges.append((cur, nxt, x) if s > 0 else (nxt, cur, x))
        cur = nxt
    return edges, next_vertex


def gen_figure5_member(p: int, n: int, f: Callable[[int], int] = default_growth,
                       first_words: Callable[[int], Word] | None = None,
                       second_words: Callable[[int], Word] | None = None) -> DistortionMember:
    """Member ``n`` of the family: a theta-pair of cycles glued at eta.

    Arc words use ``p`` seed words per member, indices ``(n-1)p+1 .. np``,
    so seeds are pairwise distinct across the family.
    """
    if p < 2 or n < 1:
        raise InputError("need p >= 2 and n >= 1")
    alphabet = FIGURE5_ALPHABET
    a, b = (0, 1), (1, 1)
    first_words = first_words or (lambda k: gray_word(k, (2, 3)))
    second_words = second_words or (lambda k: gray_word(k, (4, 5)))
    length = f(n)
    if length < 1:
        raise InputError("growth function must be positive")
    indices = range((n - 1) * p + 1, n * p + 1)
    x_word: Word = ()
    for k in indices:
        x_word += first_words(k) + (a,)
    y_word: Word = ()
    for i, k in enumerate(indices):
        y_word += second_words(k)
        if i < p - 1:
            y_word += (a,)
    y_word += (a,) * length
    long_word = (b,) * length
    start, eta, nu = 0, 1, 2
    nxt = 3
    edges = []
    for s_, t_, w in ((start, eta, long_word), (start, eta, x_word), (eta, nu, long_word), (eta, nu, y_word)):
        es, nxt = _arc_edges(s_, t_, w, nxt)
        edges.extend(es)
    g = LabelledGraph(alphabet, nxt, edges, components=[(f"G{n}", list(range(nxt)))])
    return DistortionMember(n, g, start, eta, nu, long_word, x_word, y_word)


def gen_figure5(p: int, n_max: int, f: Callable[[int], int] = default_growth) -> list[DistortionMember]:
    return [gen_figure5_member(p, n, f) for n in range(1, n_max + 1)]


def figure5_union(members: Sequence[DistortionMember]) -> LabelledGraph:
    return disjoint_union([m.graph for m in members])


# ------------------------------------------------------------------ fixtures


def gen_hexagon_fixture() -> LabelledGraph:
    """A single 6-cycle labelled a b c a^-1 b^-1 c^-1: pieces are single letters."""
    alphabet = Alphabet(("a", "b", "c"))
    return gen_word_cycle(parse_word("a b c -a -b -c", alphabet), alphabet, name="hexagon")


def gen_free_witness_fixture() -> LabelledGraph:
    """Four disjoint 8-cycles over 16 letters, each letter used twice.

    No two-letter word is readable twice, so pieces are single edges and
    piece distance equals graph distance.
    """
    letters = tuple("abcdefghijklmnop")
    alphabet = Alphabet(letters)
    rows = [
        "a b c d e f g h",
        "i j k l m n o p",
        "a c e g i k m o",
        "b d f h j l n p",
    ]
    rows[2] = "a -c e -g i -k m -o"
    rows[3] = "b -h d -n f -p j -l"
    cycles = [gen_word_cycle(parse_word(r, alphabet), alphabet, name=f"C{k + 1}") for k, r in enumerate(rows)]
    return disjoint_union(cycles)


def gen_two_sevens_fixture() -> LabelledGraph:
    """Two copies of a 7-cycle with distinct letters.

    Every word is readable once per copy, so pieces exist only up to swapping
    the copies; the orbit convention decides whether they are essential.
    """
    alphabet = Alphabet(tuple("abcdefg"))
    word = parse_word("a b c d e f g", alphabet)
    return disjoint_union([gen_word_cycle(word, alphabet, "P"), gen_word_cycle(word, alphabet, "Q")])
