import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import reduced_graphs
from oracles import cyclic_class
from grsc.conditions import check_condition
from grsc.corpus import (gen_bouquet, gen_cayley_cycle, gen_figure1, gen_free_witness_fixture, gen_hexagon_fixture,
                         gen_word_cycle)
from grsc.errors import PreconditionFailed
from grsc.graph_core import Alphabet, LabelledGraph, disjoint_union, parse_word
from grsc.presentation import (Presentation, classify, conciseness_and_powers, free_subgroup_witness, is_forest,
                               minimal_period, relators_pi1, relators_simple_cycles, replay_tietze, tietze_reduce)
from grsc.solver import solve

SEVEN = Alphabet(tuple("abcdefg"))


def seven_letter_cycle():
    return gen_word_cycle(parse_word("a b c d e f g", SEVEN), SEVEN)


def infinite_cyclic_fixture():
    """A 2-cycle a b with a pendant a-edge: b is removed and a alone remains."""
    ab = Alphabet(("a", "b"))
    return LabelledGraph(ab, 3, [(0, 1, 0), (1, 0, 1), (1, 2, 0)])


def test_figure1_relators(figure1):
    p = relators_simple_cycles(figure1)
    assert sorted(len(r) for r in p.relators) == [7, 7, 10]
    pi1 = relators_pi1(figure1)
    paper = [parse_word("a a -c -b -b -a -b", figure1.alphabet), parse_word("a a -b -c -c -a -c", figure1.alphabet)]
    assert sorted(cyclic_class(r) for r in pi1.relators) == sorted(cyclic_class(r) for r in paper)


def test_tree_and_loop_presentations():
    tree = LabelledGraph(Alphabet(("a", "b")), 3, [(0, 1, 0), (1, 2, 1)])
    assert relators_simple_cycles(tree).relators == ()
    assert relators_pi1(tree).relators == ()
    loop = gen_bouquet(["a"])
    assert [cyclic_class(r) for r in relators_simple_cycles(loop).relators] == [cyclic_class(((0, 1),))]


def test_pi1_of_disjoint_cycles():
    g = disjoint_union([gen_cayley_cycle(3, x) for x in "abc"])
    assert len(relators_pi1(g).relators) == 3


def test_duplicates_are_merged():
    ab = Alphabet(("a", "b", "c"))
    words = [parse_word(w, ab) for w in ("a b c", "b c a", "-c -b -a", "a -a")]
    p = Presentation.from_words(ab, words)
    assert len(p.relators) == 1 and len(p.duplicates) == 3


def test_minimal_period():
    assert minimal_period("abab") == 2
    assert minimal_period("abc") == 3
    assert minimal_period("aaaa") == 1


def test_conciseness_flags():
    ab = Alphabet(("a", "b", "c"))
    rep = conciseness_and_powers([parse_word("a b a b", ab)], ab)
    assert not rep["no_proper_powers"] and rep["proper_powers"]
    rep = conciseness_and_powers([parse_word("a b c", ab), parse_word("b c a", ab)], ab)
    assert not rep["concise"] and rep["non_concise_pairs"]


@pytest.mark.parametrize("make", [gen_figure1, gen_hexagon_fixture, gen_free_witness_fixture])
def test_pi1_relators_concise_on_c2_graphs(make):
    g = make()
    assert check_condition(g, None, "C2").holds
    rep = conciseness_and_powers(relators_pi1(g))
    assert rep["concise"] and rep["no_proper_powers"]


@pytest.mark.parametrize("make", [gen_figure1, gen_hexagon_fixture])
def test_both_presentations_have_the_same_normal_closure(make):
    g = make()
    simple, pi1 = relators_simple_cycles(g), relators_pi1(g)
    for r in pi1.relators:
        assert solve(r, simple, node_budget=20_000).verdict == "Trivial"
    for r in simple.relators:
        assert solve(r, pi1, node_budget=20_000).verdict == "Trivial"


def test_tietze_on_seven_letter_cycle():
    res = tietze_reduce(seven_letter_cycle())
    assert [a["edge"] for a in res.audit] == [0]
    assert len(res.alphabet) == 6 and is_forest(res.graph)


def test_tietze_leaves_figure1_and_trees_alone(figure1):
    assert tietze_reduce(figure1).audit == []
    tree = LabelledGraph(Alphabet(("a", "b")), 3, [(0, 1, 0), (1, 2, 1)])
    assert tietze_reduce(tree).audit == []


def test_tietze_replay_is_exact(figure1):
    for g in (seven_letter_cycle(), infinite_cyclic_fixture(), figure1):
        res = tietze_reduce(g)
        assert replay_tietze(g, res.audit) == res.graph


@settings(max_examples=40, deadline=None)
@given(reduced_graphs(max_vertices=5, max_edges=7, letters=4), st.randoms(use_true_random=False))
def test_random_tietze_orders_agree_on_verdict(g, rnd):
    canonical = tietze_reduce(g)
    order = list(range(len(g.edges)))
    rnd.shuffle(order)
    other = tietze_reduce(g, order=order)
    assert replay_tietze(g, other.audit) == other.graph
    assert is_forest(other.graph) == is_forest(canonical.graph)
    if is_forest(canonical.graph):
        assert len(other.alphabet) == len(canonical.alphabet)


def test_classify_bouquet_trivial():
    c = classify(gen_bouquet(["a", "b"]))
    assert c.verdict == "Trivial"
    p = relators_simple_cycles(gen_bouquet(["a", "b"]))
    for x in range(2):
        assert solve(((x, 1),), p).verdict == "Trivial"


def test_classify_free_and_cyclic():
    c = classify(seven_letter_cycle())
    assert (c.verdict, c.rank) == ("FreeOfRank", 6)
    c = classify(infinite_cyclic_fixture())
    assert (c.verdict, c.rank) == ("InfiniteCyclic", 1)
    assert c.reduced_alphabet == ["a"]


def test_classify_figure1(figure1):
    c = classify(figure1)
    assert c.verdict == "ContainsFreeSubgroup"
    assert c.evidence["C7"]["holds"] and c.evidence["reduced_girth"] == 7
    assert c.witness is None and c.evidence["theorem_only"]


def test_classify_inconclusive_without_c7():
    c = classify(gen_hexagon_fixture())
    assert c.verdict == "Inconclusive"


def test_free_subgroup_witness():
    g = gen_free_witness_fixture()
    wit = free_subgroup_witness(g)
    assert wit is not None
    assert len(wit["cycles"]) == 4
    assert all(c["piece_distance"] == 4 for c in wit["cycles"])
    assert wit["alpha_word"] == parse_word(wit["cycles"][0]["word"], g.alphabet) + parse_word(
        wit["cycles"][1]["word"], g.alphabet)
    edge_sets = [{e for e, _ in c["cycle"]["steps"]} for c in wit["cycles"]]
    for i in range(4):
        for j in range(i + 1, 4):
            assert not edge_sets[i] & edge_sets[j]


def test_free_subgroup_witness_absent_on_figure1(figure1):
    assert free_subgroup_witness(figure1) is None


def test_free_subgroup_witness_needs_cycles():
    tree = LabelledGraph(Alphabet(("a",)), 2, [(0, 1, 0)])
    with pytest.raises(PreconditionFailed):
        free_subgroup_witness(tree)
