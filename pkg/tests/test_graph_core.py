import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import GOLDEN, reduced_graphs, words
from grsc.corpus import gen_cayley_cycle
from grsc.errors import BudgetExceeded, GraphFormatError, NotReducedLabelling, WordFormatError
from grsc.graph_core import (Alphabet, LabelledGraph, canonical_cyclic, cyclic_reduce, disjoint_union,
                             format_graph, format_word, free_reduce, girth_and_diameter, inverse,
                             is_cyclically_reduced, is_reduced, is_reduced_labelling, load_graph, parse_graph,
                             parse_word, read_path, simple_cycles, spanning_tree_generators)

ABC = Alphabet(("a", "b", "c"))


def test_word_round_trip():
    w = parse_word("a a -c -b -b -a -b", ABC)
    assert format_word(w, ABC) == "a a -c -b -b -a -b"
    assert inverse(inverse(w)) == w


def test_unknown_letter_rejected():
    with pytest.raises(WordFormatError):
        parse_word("a z", ABC)


@given(words())
def test_free_reduce_is_idempotent_and_reduced(w):
    r = free_reduce(w)
    assert is_reduced(r)
    assert free_reduce(r) == r
    assert free_reduce(w + inverse(w)) == ()


@given(words())
def test_cyclic_reduce_splits_conjugate(w):
    r = free_reduce(w)
    core, conj = cyclic_reduce(r)
    assert conj + core + inverse(conj) == r
    assert is_cyclically_reduced(core)


@given(words(max_len=6))
def test_canonical_cyclic_invariant_under_rotation_and_inversion(w):
    if not w:
        return
    c = canonical_cyclic(w)
    assert canonical_cyclic(w[1:] + w[:1]) == c
    assert canonical_cyclic(inverse(w)) == c


def test_reduced_labelling_violation_reported():
    g = LabelledGraph(ABC, 3, [(0, 1, 0), (0, 2, 0)])
    ok, bad = is_reduced_labelling(g)
    assert not ok and bad == [(0, 0, "out")]
    with pytest.raises(NotReducedLabelling):
        read_path(g, 0, parse_word("a", ABC))


def test_figure1_shape(figure1):
    assert figure1.num_vertices == 11
    assert len(figure1.edges) == 12
    assert is_reduced_labelling(figure1)[0]
    assert girth_and_diameter(figure1) == (7, 5)


def test_figure1_golden_text(figure1):
    assert format_graph(figure1) == (GOLDEN / "figure1.g").read_text()
    assert load_graph(str(GOLDEN / "figure1.g")) == figure1


def test_parse_comments_and_components():
    text = """alphabet a b   # two letters
component K1
v 0
v 1
e 0 1 a
component K2
v 0
e 0 0 b
"""
    g = parse_graph(text)
    assert [c.name for c in g.components] == ["K1", "K2"]
    assert g.edges[1].source == g.edges[1].target == 2
    assert parse_graph(format_graph(g)) == g


@pytest.mark.parametrize("text", [
    "v 0\n",
    "alphabet a\ncomponent\nv 0\ne 0 1 a\n",
    "alphabet a\ncomponent\nv 0\nv 0\n",
    "alphabet a a\n",
    "alphabet a\nfoo 1\n",
    "alphabet a\ncomponent\nv 0\nv 1\ncomponent\nv 2\ne 0 1 a\n",
])
def test_malformed_graph_text(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_declared_components_must_be_connected():
    text = "alphabet a\ncomponent\nv 0\nv 1\n"
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_read_path_and_label(figure1):
    w = parse_word("a b b", figure1.alphabet)
    p = read_path(figure1, 0, w)
    assert p is not None and figure1.label(p) == w
    assert read_path(figure1, 0, parse_word("c", figure1.alphabet)) is None
    assert p.inverse(figure1).end(figure1) == 0


def _brute_cycle_count(g: LabelledGraph) -> int:
    """Count simple cycles of the underlying multigraph by edge sets."""
    h = nx.MultiGraph()
    h.add_nodes_from(range(g.num_vertices))
    for i, e in enumerate(g.edges):
        h.add_edge(e.source, e.target, key=i)
    loops = sum(1 for e in g.edges if e.source == e.target)
    # parallel edges give 2-cycles; longer cycles through a simple graph view
    pairs = {}
    for e in g.edges:
        if e.source != e.target:
            key = frozenset((e.source, e.target))
            pairs[key] = pairs.get(key, 0) + 1
    twos = sum(c * (c - 1) // 2 for c in pairs.values())
    simple = nx.Graph([tuple(k) for k in pairs])
    longer = 0
    for cyc in nx.simple_cycles(simple):
        if len(cyc) >= 3:
            mult = 1
            for i in range(len(cyc)):
                mult *= pairs[frozenset((cyc[i], cyc[(i + 1) % len(cyc)]))]
            longer += mult
    return loops + twos + longer


@settings(max_examples=60, deadline=None)
@given(reduced_graphs())
def test_simple_cycles_match_networkx(g):
    cycles = simple_cycles(g)
    assert len(cycles) == _brute_cycle_count(g)
    for c in cycles:
        assert c.path.is_closed(g)
        vs = c.path.vertices(g)[:-1]
        assert len(vs) == len(set(vs))
        assert g.label(c.path) == c.word


def test_cycle_words_are_least_placement(figure1):
    for c in simple_cycles(figure1):
        assert c.word == min(canonical_cyclic(c.word), c.word)


def test_cycle_budget_is_an_error():
    g = disjoint_union([gen_cayley_cycle(3, x) for x in "abcd"])
    with pytest.raises(BudgetExceeded):
        simple_cycles(g, budget=2)


def test_tree_has_girth_zero():
    g = LabelledGraph(ABC, 3, [(0, 1, 0), (1, 2, 1)])
    assert girth_and_diameter(g) == (0, 2)
    assert simple_cycles(g) == []


def test_spanning_tree_generators_rank(figure1):
    gens = spanning_tree_generators(figure1, 0)
    assert len(gens) == len(figure1.edges) - figure1.num_vertices + 1
    for _, w in gens:
        assert read_path(figure1, 0, w).is_closed(figure1)


def test_disjoint_union_merges_alphabets():
    g = disjoint_union([gen_cayley_cycle(3, "a"), gen_cayley_cycle(4, "b")])
    assert g.alphabet.letters == ("a", "b")
    assert len(g.components) == 2
    assert girth_and_diameter(g, 1) == (4, 2)
