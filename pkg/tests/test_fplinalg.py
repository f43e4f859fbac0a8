import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbitlimits.exceptions import DimensionMismatch
from orbitlimits.fplinalg import (
    Echelon,
    FpModule,
    Solver,
    Subquotient,
    composition_factors,
    fixed_points,
    gf2_rank,
    gf2_rank_dense,
    hom_space,
    induce,
    inverse,
    is_isomorphic_simple,
    is_simple,
    kernel,
    nilpotence_degree,
    permutation_module,
    rank,
    regular_module,
    relative_trace,
    rref,
    sparse_rank,
)
from orbitlimits.groups import sylow
from orbitlimits.library import named_group

primes = st.sampled_from([2, 3, 5])


def matrices(p, max_side=7):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side)).flatmap(
        lambda mn: st.lists(st.integers(0, p - 1), min_size=mn[0] * mn[1], max_size=mn[0] * mn[1])
        .map(lambda xs: np.array(xs, dtype=np.int64).reshape(mn)))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_rank_nullity(data):
    p = data.draw(primes)
    A = data.draw(matrices(p))
    K = kernel(A, p)
    assert rank(A, p) + K.shape[0] == A.shape[1]
    assert not np.any(A @ K.T % p)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_solver_consistency(data):
    p = data.draw(primes)
    A = data.draw(matrices(p))
    x = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=A.shape[1], max_size=A.shape[1])))
    b = A @ x % p
    sol = Solver(A, p).solve(b)
    assert sol is not None and np.array_equal(A @ sol % p, b)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sparse_and_packed_ranks_agree(data):
    p = data.draw(primes)
    A = data.draw(matrices(p, 9))
    rows = [{j: int(v) for j, v in enumerate(r) if v} for r in A]
    assert sparse_rank(rows, p) == rank(A, p)
    if p == 2:
        assert gf2_rank_dense(A) == rank(A, 2)
        assert gf2_rank([int("".join(map(str, r[::-1])), 2) for r in A]) == rank(A, 2)


def test_rref_pivots_and_inverse():
    A = np.array([[0, 2, 1], [1, 1, 0], [2, 0, 1]])
    R, piv = rref(A, 3)
    assert piv == [0, 1, 2]
    Ai = inverse(A, 3)
    assert np.array_equal(A @ Ai % 3, np.eye(3, dtype=np.int64))


def test_echelon_and_subquotient():
    E = Echelon(4, 2)
    assert E.add([1, 1, 0, 0]) is not None
    assert E.add([1, 1, 0, 0]) is None
    assert E.contains([1, 1, 0, 0]) and not E.contains([0, 0, 1, 0])
    Z = np.eye(4, dtype=np.int64)[:3]
    B = np.array([[1, 1, 0, 0]])
    q = Subquotient(Z, B, 4, 2)
    assert q.dim == 2
    with pytest.raises(DimensionMismatch):
        q.coords([0, 0, 0, 1])


def test_fixed_points_of_regular_module():
    G = named_group("C3")
    R = regular_module(3, G)
    assert fixed_points(R).shape[0] == 1
    assert fixed_points(FpModule.trivial(3, G, 2)).shape[0] == 2


def test_relative_trace_examples():
    G = named_group("C3")
    R = regular_module(3, G)
    assert relative_trace(R, G.whole).shape[0] == 1  # H = G
    assert relative_trace(FpModule.trivial(3, G), G.trivial).shape[0] == 0
    # F_3[C3]/(g-1)^2 is killed by (g-1)^2 and its trace from 1 vanishes
    g = R.matrix(G.generator_indices[0])
    N = (g - np.eye(3, dtype=np.int64)) % 3
    image = (N @ N % 3).T
    Q = R.quotient(image[np.any(image, axis=1)][:1])
    assert Q.dim == 2
    assert relative_trace(Q, G.trivial).shape[0] == 0


def test_trace_does_not_vanish_for_a_normalizing_p_prime_element():
    # S3 over F_3: the transposition normalizes A3 and acts trivially, but
    # [S3 : A3] = 2 is a unit, so the p-element condition cannot be dropped.
    G = named_group("S3")
    V = FpModule.trivial(3, G)
    assert relative_trace(V, sylow(G, 3)).shape[0] == 1


def test_composition_factors_of_regular_modules():
    G = named_group("GL(2,3)")
    f2 = composition_factors(regular_module(2, G))
    assert sorted((V.dim, m) for V, m in f2) == [(1, 16), (2, 16)]
    f3 = composition_factors(regular_module(3, G))
    assert sorted(V.dim for V, _ in f3) == [1, 1, 2, 2, 3, 3]
    assert all(is_simple(V) for V, _ in f3)
    assert sum(V.dim * m for V, m in f3) == 48


def test_isomorphism_of_simples():
    G = named_group("S3")
    fac = composition_factors(permutation_module(3, G, sylow(G, 2)))
    assert sorted((V.dim, m) for V, m in fac) == [(1, 1), (1, 2)]
    a, b = fac[0][0], fac[1][0]
    assert is_isomorphic_simple(a, a) and not is_isomorphic_simple(a, b)
    assert len(hom_space(a, a)) == 1


def test_nilpotence_and_induction():
    G = named_group("C3")
    R = regular_module(3, G)
    assert nilpotence_degree(R, G.generator_indices[0]) == 3
    S4 = named_group("S4")
    H = sylow(S4, 3)
    W = FpModule.trivial(2, H.as_group())
    ind = induce(W, S4, H)
    assert ind.dim == 8 and ind.check_action()


def test_module_json_round_trip():
    G = named_group("S3")
    R = regular_module(2, G)
    R2 = FpModule.from_json(R.to_json(), G)
    assert all(np.array_equal(a, b) for a, b in zip(R.gens, R2.gens))
