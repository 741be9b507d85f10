import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import reduced_graphs
from oracles import brute_automorphism_orbits, readable_starts, reduced_words_upto
from grsc.corpus import (gen_cayley_cycle, gen_figure1, gen_free_witness_fixture, gen_hexagon_fixture,
                         gen_two_sevens_fixture, gen_word_cycle)
from grsc.errors import LemmaViolation, NotReducedWord, PreconditionFailed, UndefinedDistance
from grsc.graph_core import Alphabet, LabelledGraph, PathRef, disjoint_union, inverse, parse_word, simple_cycles
from grsc.pieces import (PieceIndex, compute_automorphisms, disjoint_simple_cycles, is_automorphism, is_piece,
                         max_piece_prefix, maximal_pieces, opposite_edge, piece_distance, piece_distances_from)


def test_cayley_cycle_automorphisms():
    auts = compute_automorphisms(gen_cayley_cycle(7))
    assert auts.order == 7
    assert auts.orbits == [tuple(range(7))]


def test_figure1_automorphisms_trivial(figure1):
    auts = compute_automorphisms(figure1)
    assert auts.order == 1
    assert len(auts.orbits) == 11


def test_single_edge_trivial_group():
    g = LabelledGraph(Alphabet(("a",)), 2, [(0, 1, 0)])
    assert compute_automorphisms(g).order == 1


def test_two_copies_swap():
    g = gen_two_sevens_fixture()
    auts = compute_automorphisms(g)
    assert auts.order == 2
    assert all(len(o) == 2 for o in auts.orbits)
    assert all(len(o) == 1 for o in auts.component_orbits)


@settings(max_examples=40, deadline=None)
@given(reduced_graphs(max_vertices=6, max_edges=7))
def test_automorphisms_match_brute_force(g):
    order, orbits = brute_automorphism_orbits(g)
    auts = compute_automorphisms(g)
    assert auts.order == order
    assert sorted(frozenset(o) for o in auts.orbits) == sorted(orbits)
    for perm in auts.generators:
        assert is_automorphism(g, perm)


def test_figure1_single_letters_are_pieces(figure1, figure1_index):
    rep = is_piece(figure1, figure1_index, parse_word("a", figure1.alphabet))
    assert rep.is_piece and len(rep.witness_starts) == 4
    rep = is_piece(figure1, figure1_index, parse_word("a b", figure1.alphabet))
    assert not rep.is_piece and len(rep.witness_starts) == 1


def test_cayley_pieces_are_inessential():
    g = gen_cayley_cycle(7)
    rep = is_piece(g, PieceIndex(g), parse_word("a a", g.alphabet))
    assert rep.is_piece and len(rep.witness_starts) == 7 and not rep.essential


def test_non_reduced_query_rejected(figure1, figure1_index):
    with pytest.raises(NotReducedWord):
        is_piece(figure1, figure1_index, parse_word("a -a", figure1.alphabet))


def test_empty_word_is_not_a_piece(figure1, figure1_index):
    assert not is_piece(figure1, figure1_index, ()).is_piece


CORPUS = [gen_figure1, gen_hexagon_fixture, gen_two_sevens_fixture, lambda: gen_cayley_cycle(5)]


@pytest.mark.parametrize("make", CORPUS)
def test_witnesses_match_edge_scan(make):
    g = make()
    idx = PieceIndex(g)
    for w in reduced_words_upto(len(g.alphabet), 3):
        if w:
            assert idx.witnesses(w) == readable_starts(g, w)


@pytest.mark.parametrize("make", CORPUS)
def test_downward_and_inversion_closure(make):
    g = make()
    idx = PieceIndex(g)
    for w in reduced_words_upto(len(g.alphabet), 4):
        if not w:
            continue
        rep = is_piece(g, idx, w)
        assert rep.is_piece == is_piece(g, idx, inverse(w)).is_piece
        if rep.essential:
            assert rep.is_piece
        if rep.is_piece:
            for i in range(len(w)):
                for j in range(i + 1, len(w) + 1):
                    assert is_piece(g, idx, w[i:j]).is_piece


def test_max_piece_prefix(figure1, figure1_index):
    cyc = simple_cycles(figure1)[0]
    assert max_piece_prefix(figure1, figure1_index, cyc.path.start, cyc.path) == 1
    assert max_piece_prefix(figure1, figure1_index, 0, PathRef(0, ())) == 0
    g = gen_cayley_cycle(7)
    c = simple_cycles(g)[0]
    assert max_piece_prefix(g, PieceIndex(g), c.path.start, c.path) == 7


def test_max_piece_prefix_requires_vertex_on_path(figure1, figure1_index):
    cyc = simple_cycles(figure1)[0]
    off = next(v for v in range(11) if v not in cyc.path.vertices(figure1))
    with pytest.raises(PreconditionFailed):
        max_piece_prefix(figure1, figure1_index, off, cyc.path)


def _brute_piece_distance(g, x, max_len):
    """Fewest pieces over all reduced paths from x of length <= max_len."""
    cache = {}

    def piece(w):
        if w not in cache:
            cache[w] = len(readable_starts(g, w)) >= 2
        return cache[w]

    best = {x: 0}
    stack = [(x, (), None)]
    while stack:
        v, word, last = stack.pop()
        if word:
            dp = [0] + [None] * len(word)
            for i in range(1, len(word) + 1):
                for j in range(i):
                    if dp[j] is not None and piece(word[j:i]) and (dp[i] is None or dp[j] + 1 < dp[i]):
                        dp[i] = dp[j] + 1
            if dp[-1] is not None and dp[-1] < best.get(v, 10**9):
                best[v] = dp[-1]
        if len(word) == max_len:
            continue
        for e, d in g.incident(v):
            if last is not None and last == (e, -d):
                continue
            stack.append((g.step_target(e, d), word + (g.step_letter(e, d),), (e, d)))
    return best


@pytest.mark.parametrize("make,max_len", [(gen_hexagon_fixture, 6), (lambda: gen_cayley_cycle(6), 6),
                                          (gen_free_witness_fixture, 6)])
def test_piece_distance_matches_path_splitting(make, max_len):
    g = make()
    idx = PieceIndex(g)
    for x in g.components[0].vertices:
        oracle = _brute_piece_distance(g, x, max_len)
        assert piece_distances_from(g, idx, x) == oracle


def test_free_witness_pairs_at_distance_four():
    g = gen_free_witness_fixture()
    idx = PieceIndex(g)
    for comp in g.components:
        vs = comp.vertices
        assert piece_distance(g, idx, vs[0], vs[4]) == 4


def test_piece_distance_metric_axioms():
    g = gen_hexagon_fixture()
    idx = PieceIndex(g)
    d = {x: piece_distances_from(g, idx, x) for x in range(g.num_vertices)}
    for x in d:
        assert d[x][x] == 0
        for y in d:
            assert d[x][y] == d[y][x]
            for z in d:
                assert d[x][z] <= d[x][y] + d[y][z]


def test_piece_distance_undefined_on_non_piece_edge(figure1, figure1_index):
    g = gen_word_cycle(parse_word("a b c", Alphabet(("a", "b", "c"))), Alphabet(("a", "b", "c")))
    with pytest.raises(UndefinedDistance):
        piece_distance(g, PieceIndex(g), 0, 1)


def test_opposite_edge_odd_branch():
    g = gen_free_witness_fixture()
    idx = PieceIndex(g)
    cyc = simple_cycles(g)[0]
    for x in cyc.path.vertices(g)[:-1]:
        v = opposite_edge(g, idx, cyc.path, x, 7)
        assert v.branch in ("far-vertex", "opposite-edge")
        dist = piece_distances_from(g, idx, x)
        if v.branch == "far-vertex":
            assert dist[v.y] == 4
        else:
            assert dist[v.y] == dist[v.z] == 3 and v.through_both >= 4


def test_opposite_edge_even_branch():
    g = gen_free_witness_fixture()
    idx = PieceIndex(g)
    cyc = simple_cycles(g)[0]
    x = cyc.path.start
    v = opposite_edge(g, idx, cyc.path, x, 8)
    assert v.branch == "even" and piece_distances_from(g, idx, x)[v.y] == 4


def test_opposite_edge_false_premise_reports_cycle():
    g = gen_hexagon_fixture()
    idx = PieceIndex(g)
    cyc = simple_cycles(g)[0]
    with pytest.raises(LemmaViolation) as info:
        opposite_edge(g, idx, cyc.path, cyc.path.start, 9)
    assert info.value.data["x"] == cyc.path.start


def test_opposite_edge_vertex_off_cycle():
    g = gen_free_witness_fixture()
    cyc = simple_cycles(g)[0]
    off = next(v for v in range(g.num_vertices) if v not in cyc.path.vertices(g))
    with pytest.raises(PreconditionFailed):
        opposite_edge(g, PieceIndex(g), cyc.path, off, 7)


def test_disjoint_simple_cycles():
    assert len(disjoint_simple_cycles(gen_free_witness_fixture())) == 4
    assert len(disjoint_simple_cycles(gen_figure1())) == 1
    tree = LabelledGraph(Alphabet(("a",)), 3, [(0, 1, 0), (1, 2, 0)])
    assert disjoint_simple_cycles(tree) == []


def test_maximal_pieces_on_figure1(figure1, figure1_index):
    found = maximal_pieces(figure1, figure1_index, 4)
    assert found and all(len(p.word) <= 2 for p in found)
    assert all(p.is_piece for p in found)
