import itertools

import pytest
from hypothesis import given, settings, strategies as st

from orbitlimits.exceptions import InvalidPermutation, NotASubgroup, OrderBoundExceeded
from orbitlimits.groups import (
    GroupHom,
    PermGroup,
    Subgroup,
    all_subgroups_bruteforce,
    center,
    centralizer,
    chief_series_under,
    conjugacy_classes_of_subgroups,
    double_cosets,
    is_radical_chain,
    left_coset_reps,
    normalizer,
    op_core,
    radical_p_chains,
    subgroups,
    sylow,
)
from orbitlimits.library import named_group


@pytest.mark.parametrize("name,order", [
    ("D8", 8), ("Q8", 8), ("SD16", 16), ("X27", 27), ("S3", 6), ("S4", 24),
    ("A4", 12), ("E3^2", 9), ("GL(2,3)", 48), ("GL(3,3)", 11232), ("C9", 9),
])
def test_library_orders(name, order):
    assert named_group(name).order == order


def test_identity_is_index_zero_and_inverses():
    G = named_group("S4")
    assert G.elements[0] == tuple(range(4))
    for g in range(G.order):
        assert G.mul(g, G.inv(g)) == 0


def test_composition_convention():
    G = PermGroup([[1, 2, 0], [1, 0, 2]], 3)
    a, b = G.index((1, 2, 0)), G.index((1, 0, 2))
    ab = G.elements[G.mul(a, b)]
    assert ab == tuple((1, 2, 0)[(1, 0, 2)[x]] for x in range(3))


def test_invalid_permutation_rejected():
    with pytest.raises(InvalidPermutation):
        PermGroup([[0, 0, 1]], 3)


def test_order_bound():
    with pytest.raises(OrderBoundExceeded):
        PermGroup([[1, 0, 2, 3, 4, 5], [1, 2, 3, 4, 5, 0]], 6, bound=100)


@pytest.mark.parametrize("name", ["S3", "D8", "Q8", "A4", "C9"])
def test_subgroup_lattice_matches_bruteforce(name):
    G = named_group(name)
    found = {H.elements for H in subgroups(G)}
    assert found == set(all_subgroups_bruteforce(G))


def test_subgroup_counts():
    assert len(subgroups(named_group("S4"))) == 30
    assert len(subgroups(named_group("D8"))) == 10
    assert len(subgroups(named_group("GL(2,3)"))) == 55


def test_sylow_and_core():
    G = named_group("S4")
    P = sylow(G, 2)
    assert P.order == 8
    assert op_core(G, 2).order == 4
    assert op_core(G, 3).order == 1
    assert op_core(named_group("GL(2,3)"), 2).order == 8


def test_normalizer_centralizer_center():
    G = named_group("D8")
    Z = center(G, G.whole)
    assert Z.order == 2
    for H in subgroups(G):
        N = normalizer(G, H)
        assert H.elements <= N.elements
        assert H.is_normal_in(N)
        C = centralizer(G, H)
        assert C.elements <= N.elements


def test_conjugacy_classes_partition():
    G = named_group("S4")
    subs = subgroups(G)
    classes = conjugacy_classes_of_subgroups(G, subs)
    assert len(classes) == 11
    assert sum(len(c) for c in classes) == 30


def test_double_cosets_cover():
    G = named_group("S4")
    P = sylow(G, 2)
    Q = sylow(G, 3)
    reps = double_cosets(G, G.whole, Q, P)
    covered = set()
    for x in reps:
        covered |= {G.mul(G.mul(q, x), y) for q in Q.elements for y in P.elements}
    assert covered == set(range(G.order))


def test_coset_reps_need_subgroup():
    G = named_group("S4")
    with pytest.raises(NotASubgroup):
        left_coset_reps(G, sylow(G, 3), sylow(G, 2))


def test_radical_chains_are_radical():
    G = named_group("GL(2,3)")
    chains = radical_p_chains(G, 3, 1)
    assert chains
    for chain, N in chains:
        assert is_radical_chain(G, 3, list(chain))
    for chain, N in radical_p_chains(named_group("S4"), 2, 2):
        assert chain[0].order == 4


def test_conjugation_hom_laws():
    G = named_group("S4")
    P = sylow(G, 2)
    for g in range(0, G.order, 5):
        f = GroupHom.conjugation(G, P, g)
        assert f.is_homomorphism() and f.is_injective()
        assert f.inverse().compose(f).is_identity()


def test_chief_series_of_extraspecial():
    G = named_group("X27")
    P = G.whole
    trivial = PermGroup([list(range(P.order))], P.order)
    factors = chief_series_under(G, P, trivial, 3)
    assert sorted(F.dim for F in factors) == [1, 1, 1]


perm_strategy = st.permutations(list(range(5))).map(tuple)


@settings(max_examples=30, deadline=None)
@given(st.lists(perm_strategy, min_size=1, max_size=2))
def test_generated_group_is_closed(gens):
    G = PermGroup(gens, 5)
    elems = set(G.elements)
    for a, b in itertools.product(G.elements[:20], repeat=2):
        assert tuple(a[b[x]] for x in range(5)) in elems
    assert 120 % G.order == 0


@settings(max_examples=20, deadline=None)
@given(st.lists(perm_strategy, min_size=1, max_size=2), st.integers(0, 119))
def test_subgroup_intersection_is_subgroup(gens, k):
    G = named_group("S5")
    H = Subgroup(G, PermGroup(gens, 5).elements and [G.index(g) for g in PermGroup(gens, 5).elements])
    K = sylow(G, 2)
    inter = H.intersection(K)
    assert all(G.mul(a, b) in inter.elements for a in inter.elements for b in inter.elements)
