import numpy as np
import pytest

from orbitlimits.cohomology import (
    MackeyH,
    Resolution,
    bar_cohomology_dims,
    cohomology_module,
    h1_dimension_oracle,
    quadratic_action_bound,
    quadratic_action_scan,
)
from orbitlimits.exceptions import HypothesisUnmet, NotPGroup
from orbitlimits.fplinalg import nilpotence_degree
from orbitlimits.library import named_group

from conftest import cohomology, system


# minimal resolution ranks equal dim H^k(S, F_p)
@pytest.mark.parametrize("name,p,ranks", [
    ("D8", 2, [1, 2, 3, 4, 5]),
    ("Q8", 2, [1, 2, 2, 1, 1]),
    ("C4", 2, [1, 1, 1, 1, 1]),
    ("E2^2", 2, [1, 2, 3, 4, 5]),
    ("C3", 3, [1, 1, 1, 1, 1]),
    ("E3^2", 3, [1, 2, 3, 4, 5]),
])
def test_resolution_ranks(name, p, ranks):
    R = Resolution(named_group(name), p, len(ranks) - 1)
    assert R.ranks[:len(ranks)] == ranks
    R.check()


def test_resolution_rejects_non_p_group():
    with pytest.raises(NotPGroup):
        Resolution(named_group("S3"), 2, 1)


@pytest.mark.parametrize("name", ["D8", "Q8", "X27"])
def test_h1_matches_abelianization(name):
    fs = system(name)
    coh = cohomology(name)
    for P in fs.subgroups:
        assert coh.dim(P, 1) == h1_dimension_oracle(fs.S, P, fs.p)


def test_bar_oracle_on_subgroup_of_s4():
    assert bar_cohomology_dims(named_group("S4"), named_group("S4").whole, 2, 2) == [1, 1, 2]
    D8 = named_group("D8")
    assert bar_cohomology_dims(D8, D8.whole, 2, 3) == [1, 2, 3, 4]


def test_restriction_then_transfer_is_index():
    fs = system("D8")
    coh = cohomology("D8", 2)
    for P in fs.subgroups:
        for Q in fs.subgroups:
            if P.elements <= Q.elements:
                for j in range(3):
                    rt = coh.transfer(P, Q, j) @ coh.restriction(P, Q, j) % 2
                    idx = (Q.order // P.order) % 2
                    assert np.array_equal(rt, idx * np.eye(coh.dim(Q, j), dtype=np.int64))


def test_inner_conjugation_acts_trivially():
    fs = system("Q8")
    coh = cohomology("Q8", 2)
    S = fs.S
    for x in range(S.order):
        for j in range(3):
            m = coh.conjugation(x, S.whole, j)
            assert np.array_equal(m % 2, np.eye(coh.dim(S.whole, j), dtype=np.int64))


@pytest.mark.parametrize("name", ["D8", "S4", "X27"])
def test_mackey_axioms(name):
    fs = system(name)
    for j in range(fs.p):
        M = MackeyH(fs, j, cohomology(name))
        assert M.check_axioms() > 0
        assert M.check_fusion_isos() > 0


def test_chain_lift_is_independent_of_choices():
    fs = system("GL(2,3)")
    coh = cohomology("GL(2,3)")
    for P in fs.centric_representatives:
        for phi in fs.automorphisms(P)[:3]:
            a = coh.iso_map(phi, 1)
            b = coh.iso_map(phi, 1, randomize=True)
            assert np.array_equal(a % 2, b % 2)


def test_cohomology_module_of_normal_four_group_in_s4():
    # Out_F(V4) = S3 acts on H^1(V4) = Hom(V4, F_2) as its 2-dim simple module
    fs = system("S4")
    coh = cohomology("S4")
    V = [Q for Q in fs.centric_representatives if fs.out_group(Q)[0].order == 6][0]
    M = cohomology_module(fs, coh, V, 1)
    assert M.dim == 2 and M.check_action()
    from orbitlimits.fplinalg import is_simple
    assert is_simple(M)


def test_quadratic_action_bound_on_extraspecial():
    fs = system("X27")
    coh = cohomology("X27", 2)
    B = [Q for Q in fs.centric_representatives if Q.order == 9][0]
    A = fs.aut_group(B)
    assert A.order == 3
    g = A.generator_indices[0]
    for j, whole in zip(range(3), [1, 2, 2]):
        observed, bound = quadratic_action_bound(fs, coh, B, g, j)
        assert (observed, bound) == (1, j + 1)
        assert nilpotence_degree(cohomology_module(fs, coh, B, j), g) == whole


def test_quadratic_action_hypothesis_enforced():
    fs = system("GL(2,3)")
    coh = cohomology("GL(2,3)")
    Q8 = [Q for Q in fs.centric_representatives if fs.out_group(Q)[0].order == 6][0]
    A = fs.aut_group(Q8)
    # an element of order 3 acts without fixed points on Q8 / Z(Q8)
    g = next(a for a in range(A.order) if A.element_order(a) == 3)
    with pytest.raises(HypothesisUnmet):
        quadratic_action_bound(fs, coh, Q8, g, 1)


@pytest.mark.parametrize("name", ["S4", "GL(2,3)", "X27"])
def test_quadratic_action_scan_has_no_violations(name):
    fs = system(name)
    coh = cohomology(name)
    rows = quadratic_action_scan(fs, coh, fs.p - 1)
    assert rows
    assert all(obs <= bound for _, _, _, obs, bound in rows)
