import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import words
from grsc.graph_core import free_reduce, inverse
from grsc.quotients import PermRep, QuotientFamily, RelationLattice, abelian_image, low_index_reps


def lattice_brute(rows, rank, bound=6):
    """Integer combinations of the rows with small coefficients."""
    out = set()
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(rows)):
        out.add(tuple(sum(c * r[k] for c, r in zip(coeffs, rows)) for k in range(rank)))
    return out


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=2))
def test_lattice_membership_matches_combinations(rows):
    lat = RelationLattice(rows, 2)
    span = lattice_brute(rows, 2)
    for v in itertools.product(range(-3, 4), repeat=2):
        if v in span:
            assert lat.contains(v)
    for v in span:
        assert lat.contains(v)


def test_lattice_reduce_is_canonical():
    lat = RelationLattice([[4, 6], [0, 3]], 2)
    assert lat.contains([4, 3])
    assert not lat.contains([2, 0])
    assert lat.reduce([4, 9]) == lat.reduce([0, 0])
    assert lat.reduce([1, 0]) != lat.reduce([0, 0])


def test_subgroup_counts_of_free_group():
    # transitive actions up to relabelling = subgroups of index n: 1, 3, 13, 71
    assert len(low_index_reps(2, [], 1)) == 1
    assert len(low_index_reps(2, [], 2)) == 4
    assert len(low_index_reps(2, [], 3)) == 17
    assert len(low_index_reps(2, [], 4)) == 88


def test_cyclic_group_reps():
    a5 = ((0, 1),) * 5
    assert sorted(r.degree for r in low_index_reps(1, [a5], 6)) == [1, 5]
    assert sorted(r.degree for r in low_index_reps(1, [((0, 1),) * 6], 6)) == [1, 2, 3, 6]


def test_reps_satisfy_relators():
    rels = [((0, 1), (1, 1), (0, -1), (1, -1))]
    for rep in low_index_reps(2, rels, 4):
        assert all(rep.is_identity(r) for r in rels)


def test_perm_rep_action():
    rep = PermRep(3, ((1, 2, 0),))
    assert rep.act(0, ((0, 1),)) == 1
    assert rep.act(0, ((0, -1),)) == 2
    assert rep.is_identity(((0, 1),) * 3)
    assert not rep.is_identity(((0, 1),))


def test_separates_names_a_quotient():
    a5 = ((0, 1),) * 5
    fam = QuotientFamily(1, [a5])
    assert fam.separates(((0, 1),)) == "abelianisation"
    assert fam.separates(a5) is None
    sym = QuotientFamily(2, [], max_degree=3)
    comm = ((0, 1), (1, 1), (0, -1), (1, -1))
    assert sym.separates(comm).startswith("permutation quotient")


@settings(max_examples=60, deadline=None)
@given(words(2, 6), words(2, 6))
def test_fingerprint_is_a_homomorphism_image(u, v):
    fam = QuotientFamily(2, [((0, 1),) * 3, ((1, 1),) * 2], max_degree=4)
    assert fam.fingerprint(u + inverse(u)) == fam.fingerprint(())
    assert fam.fingerprint(u + v) == fam.fingerprint(free_reduce(u + v))
    if fam.fingerprint(u) != fam.fingerprint(v):
        assert fam.separates(u + inverse(v)) is not None


def test_abelian_image():
    assert abelian_image(((0, 1), (1, -1), (0, 1)), 2) == [2, -1]
