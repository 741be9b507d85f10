from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import reduced_graphs
from oracles import brute_automorphism_orbits, lemma_minimum_brute
from grsc.conditions import (check_condition, check_Cn, check_Cprime, check_Gr, check_Grprime, cprime_implies_c,
                             min_circular_segmentation, parse_condition)
from grsc.corpus import gen_cayley_cycle, gen_classical, gen_figure1, gen_two_sevens_fixture
from grsc.errors import InputError, NotReducedLabelling, PreconditionFailed
from grsc.graph_core import Alphabet, LabelledGraph, parse_word, simple_cycles
from grsc.pieces import PieceIndex
from grsc.presentation import relators_pi1


def _brute_circular_cover(ext):
    """Fewest arcs [i, i + ext[i]) covering the circle, over all subsets in size order."""
    import itertools

    n = len(ext)
    if min(ext) == 0:
        return None
    for k in range(1, n + 1):
        for starts in itertools.combinations(range(n), k):
            covered = set()
            for s in starts:
                covered |= {(s + j) % n for j in range(ext[s])}
            if len(covered) == n:
                return k
    return None


@st.composite
def downward_closed_extents(draw):
    # extents of a downward closed family satisfy ext[i+1] >= ext[i] - 1
    n = draw(st.integers(1, 9))
    ext = [draw(st.integers(1, n))]
    for _ in range(n - 1):
        ext.append(draw(st.integers(max(1, ext[-1] - 1), n)))
    # close the circle: position 0 must be consistent with the last one
    ext[0] = max(ext[0], ext[-1] - 1)
    return ext


@given(downward_closed_extents())
def test_greedy_segmentation_is_exact(ext):
    count, segs = min_circular_segmentation(ext)
    assert count == _brute_circular_cover(ext)
    assert sum(length for _, length in segs) == len(ext)
    for off, length in segs:
        assert length <= ext[off]


def test_segmentation_with_gap():
    assert min_circular_segmentation([1, 0, 2]) is None


def test_parse_condition():
    assert str(parse_condition("C7")) == "C7"
    assert parse_condition("Grp:1/6").ratio == Fraction(1, 6)
    with pytest.raises(InputError):
        parse_condition("D7")
    with pytest.raises(InputError):
        parse_condition("Cp:0/6")


def test_figure1_conditions(figure1, figure1_index):
    assert check_Cn(figure1, figure1_index, 7).holds
    assert not check_Cn(figure1, figure1_index, 8).holds
    assert check_Cprime(figure1, figure1_index, Fraction(1, 6)).holds
    assert check_Gr(figure1, figure1_index, 7).holds
    assert check_Grprime(figure1, figure1_index, Fraction(1, 6)).holds


def test_failure_witness_reverifies(figure1, figure1_index):
    rep = check_Cn(figure1, figure1_index, 8)
    wit = rep.witness
    assert len(wit["segments"]) == 7
    pieces = [parse_word(s["word"], figure1.alphabet) for s in wit["segments"]]
    for p in pieces:
        assert len(figure1_index.witnesses(p)) >= 2
    assert sum(len(p) for p in pieces) == len(parse_word(wit["cycle_word"], figure1.alphabet))


def test_cayley_cycle_c2_fails_gr_holds():
    g = gen_cayley_cycle(7)
    idx = PieceIndex(g)
    rep = check_Cn(g, idx, 2)
    assert not rep.holds and len(rep.witness["segments"]) == 1
    assert check_Gr(g, idx, 50).holds


def test_tree_satisfies_everything():
    g = LabelledGraph(Alphabet(("a", "b")), 3, [(0, 1, 0), (1, 2, 1)])
    assert check_Cn(g, None, 100).holds
    assert check_Cprime(g, None, Fraction(1, 100)).holds


def test_classical_conversion_fails_metric(figure1):
    rels = relators_pi1(figure1).relators
    g = gen_classical(rels, figure1.alphabet)
    rep = check_Cprime(g, None, Fraction(1, 6))
    assert not rep.holds
    assert rep.witness["piece_length"] == 2
    assert rep.witness["piece_word"] in ("-a -a", "a a")


def test_strict_inequality_boundary():
    ab = Alphabet(("a", "b"))
    g = gen_classical([parse_word("a a b", ab)], ab)
    rep = check_Cprime(g, None, Fraction(1, 3))
    # the piece a has length exactly one third of the cycle
    assert not rep.holds
    assert check_Cprime(g, None, Fraction(1, 2)).holds


def test_two_copies_orbit_conventions():
    g = gen_two_sevens_fixture()
    assert not check_Cn(g, None, 2).holds
    rep = check_Gr(g, None, 2)
    assert rep.holds
    assert rep.alternate == {"orbit_mode": "component", "holds": False, "witness": rep.alternate["witness"]}


def test_cprime_implies_c():
    g = gen_figure1()
    derived = cprime_implies_c(check_Cprime(g, None, Fraction(1, 6)))
    assert derived.condition == "C7" and derived.holds
    assert check_Cn(g, None, 7).holds
    with pytest.raises(PreconditionFailed):
        cprime_implies_c(check_Cprime(g, None, Fraction(1, 7)))
    with pytest.raises(PreconditionFailed):
        cprime_implies_c(check_Cn(g, None, 7))


def test_not_reduced_rejected():
    g = LabelledGraph(Alphabet(("a",)), 3, [(0, 1, 0), (0, 2, 0)])
    with pytest.raises(NotReducedLabelling):
        check_Cn(g, None, 2)


@settings(max_examples=40, deadline=None)
@given(reduced_graphs(max_vertices=5, max_edges=7), st.integers(2, 8), st.integers(2, 8))
def test_implications_between_conditions(g, n, denom):
    idx = PieceIndex(g)
    ratio = Fraction(1, denom)
    if check_Cprime(g, idx, ratio).holds:
        assert check_Cn(g, idx, denom + 1).holds
    if check_Cn(g, idx, n).holds:
        assert check_Gr(g, idx, n).holds
    if check_Cprime(g, idx, ratio).holds:
        assert check_Grprime(g, idx, ratio).holds


def _package_minimum(g, essential):
    idx = PieceIndex(g)
    rep = check_condition(g, idx, "Gr1" if essential else "C1")
    mins = [s["min_segments"] for s in rep.stats if s["min_segments"] is not None]
    return min(mins) if mins else None


@settings(max_examples=40, deadline=None)
@given(reduced_graphs(max_vertices=5, max_edges=6, letters=2))
def test_simple_cycles_attain_minimum(g):
    assert _package_minimum(g, False) == lemma_minimum_brute(g, 2 * len(g.edges))


@settings(max_examples=30, deadline=None)
@given(reduced_graphs(max_vertices=5, max_edges=6, letters=2))
def test_simple_cycles_attain_essential_minimum(g):
    _, orbits = brute_automorphism_orbits(g)
    assert _package_minimum(g, True) == lemma_minimum_brute(g, 2 * len(g.edges), orbits)


def test_classical_c6_presentation_gives_gr6():
    ab = Alphabet(("a", "b", "c"))
    rels = [parse_word("a b c -a -b -c", ab)]
    g = gen_classical(rels, ab)
    assert check_Gr(g, None, 6).holds
    assert len(simple_cycles(g)) == 1
