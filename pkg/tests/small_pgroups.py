"""Every group of order p^n <= 16, built from multiplication rules.

Used only as an oracle corpus: each group is turned into its left regular
permutation representation.
"""
import itertools

from orbitlimits.groups import PermGroup


def table_group(elements, mul, name):
    idx = {e: i for i, e in enumerate(elements)}
    gens = [[idx[mul(g, x)] for x in elements] for g in elements]
    return PermGroup(gens, len(elements), name=name)


def metacyclic(m, n, r, s, name):
    """``<a, b | a^m, b^n = a^s, b a b^-1 = a^r>``, elements ``a^i b^j``."""
    def mul(x, y):
        (i, j), (k, l) = x, y
        e = i + k * pow(r, j, m)
        t = j + l
        if t >= n:
            t -= n
            e += s
        return e % m, t
    return table_group([(i, j) for i in range(m) for j in range(n)], mul, name)


def abelian(orders, name):
    def mul(x, y):
        return tuple((a + b) % o for a, b, o in zip(x, y, orders))
    return table_group(list(itertools.product(*(range(o) for o in orders))), mul, name)


def times_c2(G, name):
    """``G x C2`` on pairs ``(g, e)``."""
    def mul(x, y):
        return G.mul(x[0], y[0]), (x[1] + y[1]) % 2
    return table_group([(g, e) for g in range(G.order) for e in range(2)], mul, name)


def _c4c2_by_c2():
    # (C4 x C2) : C2 with c a c^-1 = a b and c b c^-1 = b
    def act(v):
        a, b = v
        return a % 4, (b + a) % 2

    def mul(x, y):
        (a1, b1, c1), (a2, b2, c2) = x, y
        n = (a2, b2) if c1 == 0 else act((a2, b2))
        return (a1 + n[0]) % 4, (b1 + n[1]) % 2, (c1 + c2) % 2
    elems = list(itertools.product(range(4), range(2), range(2)))
    return table_group(elems, mul, "(C4xC2):C2")


def _pauli():
    # generated by X, Z and i*I in GL(2, 5), where 2 is a square root of -1
    def mm(A, B):
        return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) % 5 for j in range(2))
                     for i in range(2))
    gens = [((0, 1), (1, 0)), ((1, 0), (0, 4)), ((2, 0), (0, 2))]
    elems = {((1, 0), (0, 1))}
    frontier = list(elems)
    while frontier:
        nxt = []
        for A in frontier:
            for g in gens:
                B = mm(A, g)
                if B not in elems:
                    elems.add(B)
                    nxt.append(B)
        frontier = nxt
    return table_group(sorted(elems), mm, "C4oD8")


def p_groups_up_to_16():
    """``(group, p)`` for every group of order ``p^n <= 16`` up to isomorphism."""
    out = [(abelian((q,), f"C{q}"), q) for q in (2, 3, 5, 7, 11, 13)]
    out += [(abelian((4,), "C4"), 2), (abelian((2, 2), "C2^2"), 2)]
    out += [(abelian((9,), "C9"), 3), (abelian((3, 3), "C3^2"), 3)]
    D8 = metacyclic(4, 2, 3, 0, "D8")
    Q8 = metacyclic(4, 2, 3, 2, "Q8")
    out += [(abelian((8,), "C8"), 2), (abelian((4, 2), "C4xC2"), 2),
            (abelian((2, 2, 2), "C2^3"), 2), (D8, 2), (Q8, 2)]
    out += [(G, 2) for G in [
        abelian((16,), "C16"),
        abelian((4, 4), "C4xC4"),
        abelian((8, 2), "C8xC2"),
        abelian((4, 2, 2), "C4xC2^2"),
        abelian((2, 2, 2, 2), "C2^4"),
        metacyclic(4, 4, 3, 0, "C4:C4"),
        metacyclic(8, 2, 5, 0, "M16"),
        metacyclic(8, 2, 7, 0, "D16"),
        metacyclic(8, 2, 3, 0, "SD16"),
        metacyclic(8, 2, 7, 4, "Q16"),
        times_c2(D8, "C2xD8"),
        times_c2(Q8, "C2xQ8"),
        _pauli(),
        _c4c2_by_c2(),
    ]]
    return out


def fingerprint(G):
    """Isomorphism invariants: element orders, centre, derived subgroup and
    subgroup counts by order."""
    from orbitlimits.groups import center, commutator, subgroups

    orders = sorted(G.element_order(g) for g in range(G.order))
    subs = sorted(H.order for H in subgroups(G))
    return (G.order, tuple(orders), center(G, G.whole).order,
            commutator(G, G.whole, G.whole).order, tuple(subs))
