"""Finite permutation groups and the subgroup machinery used downstream.

Elements are stored as image tuples and addressed by their index in a fixed
breadth-first enumeration (identity is index 0).  Composition is right to
left: ``(a * b)(x) = a(b(x))``.
"""
from __future__ import annotations

from collections import deque
from functools import cached_property
from itertools import combinations

import numpy as np

from .exceptions import (
    InvalidPermutation,
    LatticeBoundExceeded,
    NotPGroup,
    NotASubgroup,
    OrderBoundExceeded,
)

DEFAULT_ORDER_BOUND = 200_000
DEFAULT_LATTICE_ORDER_BOUND = 10_000
DEFAULT_LATTICE_CAP = 50_000
_TABLE_LIMIT = 4096


def compose(a, b):
    """Return ``a o b`` (apply ``b`` first)."""
    return tuple(a[x] for x in b)


def invert(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n):
    return n >= 2 and prime_factors(n) == [n]


def p_part(n, p):
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n, p):
    return p_part(n, p) == n


def _check_perm(perm, degree):
    perm = tuple(int(x) for x in perm)
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise InvalidPermutation(f"not a bijection of 0..{degree - 1}: {perm}")
    return perm


class PermGroup:
    """A finite group given by generating permutations, fully enumerated."""

    def __init__(self, generators, degree, *, name=None, bound=DEFAULT_ORDER_BOUND):
        self.degree = int(degree)
        self.generators = [_check_perm(g, self.degree) for g in generators]
        self.name = name
        identity = tuple(range(self.degree))
        elements = [identity]
        index = {identity: 0}
        # parent[i] = (j, k) with elements[i] = generators[k] o elements[j]
        parent = [None]
        queue = deque([0])
        while queue:
            i = queue.popleft()
            x = elements[i]
            for k, g in enumerate(self.generators):
                y = compose(g, x)
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    parent.append((i, k))
                    if len(elements) > bound:
                        raise OrderBoundExceeded(
                            f"group order exceeds bound {bound}"
                        )
                    queue.append(len(elements) - 1)
        self.elements = elements
        self._index = index
        self.parent = parent
        self._mul_cache = {}

    def __repr__(self):
        label = self.name or "PermGroup"
        return f"<{label} order={self.order} degree={self.degree}>"

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    @property
    def identity(self):
        return 0

    def index(self, perm):
        try:
            return self._index[tuple(perm)]
        except KeyError:
            raise NotASubgroup(f"{perm} is not an element of {self!r}") from None

    def __contains__(self, perm):
        return tuple(perm) in self._index

    @cached_property
    def table(self):
        if self.order > _TABLE_LIMIT:
            return None
        perms = np.array(self.elements, dtype=np.int64).reshape(self.order, self.degree)
        tab = np.empty((self.order, self.order), dtype=np.int32)
        for i in range(self.order):
            prod = perms[i][perms]  # row j holds elements[i] o elements[j]
            tab[i] = [self._index[tuple(r)] for r in prod.tolist()]
        return tab

    def mul(self, i, j):
        tab = self.table
        if tab is not None:
            return int(tab[i, j])
        key = (i, j)
        out = self._mul_cache.get(key)
        if out is None:
            out = self._index[compose(self.elements[i], self.elements[j])]
            if len(self._mul_cache) < 2_000_000:
                self._mul_cache[key] = out
        return out

    @cached_property
    def inverses(self):
        return [self._index[invert(x)] for x in self.elements]

    def inv(self, i):
        return self.inverses[i]

    def conj(self, g, x):
        """Return ``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, i):
        n, y = 1, i
        while y != 0:
            y = self.mul(y, i)
            n += 1
        return n

    def power(self, i, e):
        y = 0
        for _ in range(e):
            y = self.mul(y, i)
        return y

    @cached_property
    def generator_indices(self):
        return [self._index[g] for g in self.generators]

    def word(self, i):
        """Generator indices ``[k1, k2, ...]`` with element = g_k1 o g_k2 o ... ."""
        out = []
        while self.parent[i] is not None:
            j, k = self.parent[i]
            out.append(k)
            i = j
        return out

    @cached_property
    def whole(self):
        return Subgroup(self, range(self.order))

    @cached_property
    def trivial(self):
        return Subgroup(self, [0])


class Subgroup:
    """A subgroup of a :class:`PermGroup`, stored as a set of element indices."""

    __slots__ = ("parent", "elements", "_sorted", "_hash", "_gens")

    def __init__(self, parent, elements, *, check=False):
        self.parent = parent
        self.elements = frozenset(int(x) for x in elements)
        self._sorted = None
        self._hash = None
        self._gens = None
        if check:
            if 0 not in self.elements:
                raise NotASubgroup("identity missing")
            for a in self.elements:
                if parent.inv(a) not in self.elements:
                    raise NotASubgroup("not closed under inverse")
                for b in self.elements:
                    if parent.mul(a, b) not in self.elements:
                        raise NotASubgroup("not closed under product")

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.sorted)

    def __contains__(self, x):
        return x in self.elements

    @property
    def sorted(self):
        if self._sorted is None:
            self._sorted = tuple(sorted(self.elements))
        return self._sorted

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.elements == other.elements
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.elements)
        return self._hash

    def __le__(self, other):
        return self.elements <= other.elements

    def __lt__(self, other):
        return self.elements < other.elements

    def __repr__(self):
        return f"<Subgroup order={self.order} of {self.parent!r}>"

    def key(self):
        """Canonical sort key: order first, then sorted element list."""
        return (self.order, self.sorted)

    @property
    def generators(self):
        """A small generating set, chosen greedily in element order."""
        if self._gens is None:
            gens, current = [], frozenset([0])
            for x in self.sorted:
                if x not in current:
                    gens.append(x)
                    current = closure(self.parent, gens)
                    if len(current) == self.order:
                        break
            self._gens = tuple(gens)
        return self._gens

    def intersection(self, other):
        return Subgroup(self.parent, self.elements & other.elements)

    def is_normal_in(self, other):
        g = self.parent
        return all(
            g.conj(x, h) in self.elements for x in other.generators for h in self.generators
        )

    def as_group(self, name=None):
        """This subgroup as a standalone :class:`PermGroup` on the same points."""
        gens = [self.parent.elements[x] for x in self.generators]
        return PermGroup(gens, self.parent.degree, name=name)


def enumerate_group(generators, degree, bound=DEFAULT_ORDER_BOUND, name=None):
    return PermGroup(generators, degree, name=name, bound=bound)


def closure(G, gens):
    """Element set of the subgroup generated by ``gens``."""
    gens = [g for g in gens if g != 0]
    elems = {0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return frozenset(elems)


def generate(G, gens):
    return Subgroup(G, closure(G, list(gens)))


def join(G, H, x):
    """The subgroup generated by ``H`` and the element ``x``."""
    if x in H.elements:
        return H
    return Subgroup(G, closure(G, list(H.generators) + [x]))


def conjugate(G, H, g):
    """``g H g^-1``."""
    return Subgroup(G, (G.conj(g, h) for h in H.elements))


def _require_sub(H, K):
    if not H.elements <= K.elements:
        raise NotASubgroup("expected a subgroup of the ambient subgroup")


def normalizer(G, H, within=None):
    """``N_K(H)`` where ``K`` is ``within`` (default: all of ``G``)."""
    K = within if within is not None else G.whole
    gens = H.generators
    out = [g for g in K.sorted if all(G.conj(g, h) in H.elements for h in gens)]
    return Subgroup(G, out)


def centralizer(G, H, within=None):
    K = within if within is not None else G.whole
    gens = H.generators
    out = [g for g in K.sorted if all(G.mul(g, h) == G.mul(h, g) for h in gens)]
    return Subgroup(G, out)


def center(G, H=None):
    H = H if H is not None else G.whole
    return centralizer(G, H, within=H)


def commutator(G, A, B):
    """``[A, B]`` as a subgroup."""
    comms = {G.mul(G.mul(G.inv(a), G.inv(b)), G.mul(a, b)) for a in A.elements for b in B.elements}
    return generate(G, comms)


def frattini_p_series_step(G, P, Q, p):
    """``[Q, P] Q^p``: the next term of the lower exponent-p central series."""
    gens = set(commutator(G, Q, P).generators)
    gens.update(G.power(x, p) for x in Q.elements)
    return generate(G, gens)


def is_p_group(H, p):
    return is_p_power(H.order, p)


def subgroups(G, H=None, *, bound=DEFAULT_LATTICE_ORDER_BOUND, cap=DEFAULT_LATTICE_CAP,
              p=None):
    """All subgroups of ``H`` (default ``G``), sorted by (order, elements).

    Built by repeatedly adjoining one element to known subgroups, starting
    from the trivial group.  With ``p`` set, only ``p``-subgroups are kept.
    """
    H = H if H is not None else G.whole
    if H.order > bound:
        raise LatticeBoundExceeded(f"group order {H.order} exceeds lattice bound {bound}")
    candidates = [x for x in H.sorted if x != 0]
    if p is not None:
        candidates = [x for x in candidates if is_p_power(G.element_order(x), p)]
    found = {G.trivial.elements: G.trivial}
    layer = [G.trivial]
    while layer:
        nxt = []
        for K in layer:
            for x in candidates:
                if x in K.elements:
                    continue
                L = Subgroup(G, closure(G, list(K.generators) + [x]))
                if p is not None and not is_p_power(L.order, p):
                    continue
                if L.elements not in found:
                    found[L.elements] = L
                    nxt.append(L)
                    if len(found) > cap:
                        raise LatticeBoundExceeded(f"more than {cap} subgroups")
        layer = nxt
    return sorted(found.values(), key=Subgroup.key)


def conjugacy_classes_of_subgroups(G, subs, within=None):
    """Partition ``subs`` into classes under conjugation by ``within``."""
    K = within if within is not None else G.whole
    lookup = {H.elements: H for H in subs}
    seen, classes = set(), []
    for H in subs:
        if H.elements in seen:
            continue
        cls = {}
        for g in K.sorted:
            C = conjugate(G, H, g)
            if C.elements in lookup and C.elements not in cls:
                cls[C.elements] = lookup[C.elements]
        seen.update(cls)
        classes.append(sorted(cls.values(), key=Subgroup.key))
    return classes


def sylow(G, p, H=None):
    """A Sylow ``p``-subgroup of ``H`` (default ``G``), chosen deterministically.

    Elements of ``p``-power order are adjoined greedily in element order
    while the result stays a ``p``-group; the pass repeats until stable, so the
    result is a maximal ``p``-subgroup, hence Sylow.
    """
    H = H if H is not None else G.whole
    target = p_part(H.order, p)
    P = G.trivial
    if target == 1:
        return P
    pel = [x for x in H.sorted if x != 0 and is_p_power(G.element_order(x), p)]
    changed = True
    while changed and P.order < target:
        changed = False
        for x in pel:
            if x in P.elements:
                continue
            elems = _bounded_closure(G, list(P.generators) + [x], target)
            if elems is not None and is_p_power(len(elems), p):
                P = Subgroup(G, elems)
                changed = True
                if P.order == target:
                    break
    return P


def _bounded_closure(G, gens, bound):
    elems = {0}
    frontier = [0]
    while frontier:
        new = []
        for y in frontier:
            for g in gens:
                z = G.mul(y, g)
                if z not in elems:
                    elems.add(z)
                    if len(elems) > bound:
                        return None
                    new.append(z)
        frontier = new
    return frozenset(elems)


def op_core(G, p, H=None):
    """``O_p(H)``: intersection of all Sylow ``p``-subgroups of ``H``."""
    H = H if H is not None else G.whole
    P = sylow(G, p, H)
    core = set(P.elements)
    for g in H.sorted:
        core &= {G.conj(g, x) for x in P.elements}
        if len(core) == 1:
            break
    return Subgroup(G, core)


def double_cosets(G, R, Q, P):
    """Least-element representatives of the double cosets ``Q x P`` in ``R``."""
    _require_sub(Q, R)
    _require_sub(P, R)
    seen, reps = set(), []
    for x in R.sorted:
        if x in seen:
            continue
        reps.append(x)
        for q in Q.elements:
            qx = G.mul(q, x)
            for y in P.elements:
                seen.add(G.mul(qx, y))
    return reps


def left_coset_reps(G, K, H):
    """Least-element representatives ``g`` of the left cosets ``gH`` in ``K``."""
    _require_sub(H, K)
    seen, reps = set(), []
    for g in K.sorted:
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(g, h) for h in H.elements)
    return reps


def right_coset_reps(G, K, H):
    """Least-element representatives ``g`` of the right cosets ``Hg`` in ``K``."""
    _require_sub(H, K)
    seen, reps = set(), []
    for g in K.sorted:
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(h, g) for h in H.elements)
    return reps


def chain_normalizer(G, chain):
    N = G.whole
    for P in chain:
        N = normalizer(G, P, within=N)
    return N


def radical_p_chains(G, p, m, p_subgroups=None):
    """Radical ``p``-chains ``O_p(G) = P_0 < P_1 < ... < P_m`` with normalizers.

    Returns a list of ``(chain, normalizer)`` where ``chain`` includes ``P_0``.
    """
    P0 = op_core(G, p)
    if p_subgroups is None:
        p_subgroups = subgroups(G, p=p)
    out = []

    def extend(chain, N):
        if len(chain) == m + 1:
            out.append((tuple(chain), N))
            return
        top = chain[-1]
        for P in p_subgroups:
            if not (top.elements < P.elements and P.elements <= N.elements):
                continue
            N2 = normalizer(G, P, within=N)
            if op_core(G, p, N2) == P:
                extend(chain + [P], N2)

    extend([P0], G.whole)
    return out


def is_radical_chain(G, p, chain):
    """Independent re-check of ``P_i = O_p(N_G(P_1, ..., P_i))``."""
    if chain[0] != op_core(G, p):
        return False
    for i in range(1, len(chain)):
        if not chain[i - 1].elements < chain[i].elements:
            return False
        N = G.whole
        for P in chain[1 : i + 1]:
            N = Subgroup(G, [g for g in N.sorted if conjugate(G, P, g) == P])
        if op_core(G, p, N) != chain[i]:
            return False
    return True


class GroupHom:
    """An injective-or-not homomorphism between subgroups of one PermGroup.

    Two homs are equal iff they agree pointwise on the source.
    """

    __slots__ = ("source", "target", "images", "_key")

    def __init__(self, source, target, images):
        self.source = source
        self.target = target
        self.images = dict(images)
        self._key = None

    @classmethod
    def conjugation(cls, G, source, g, target=None):
        images = {x: G.conj(g, x) for x in source.elements}
        if target is None:
            target = Subgroup(G, images.values())
        return cls(source, target, images)

    def __call__(self, x):
        return self.images[x]

    @property
    def key(self):
        if self._key is None:
            self._key = (self.source.elements, tuple(self.images[x] for x in self.source.sorted))
        return self._key

    def __eq__(self, other):
        return isinstance(other, GroupHom) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<GroupHom {self.source.order} -> {self.target.order}>"

    @property
    def image(self):
        return Subgroup(self.source.parent, self.images.values())

    def is_injective(self):
        return len(set(self.images.values())) == len(self.images)

    def is_homomorphism(self):
        G = self.source.parent
        return all(
            self.images[G.mul(a, b)] == G.mul(self.images[a], self.images[b])
            for a in self.source.elements
            for b in self.source.generators
        )

    def compose(self, first):
        """``self o first``."""
        return GroupHom(first.source, self.target,
                        {x: self.images[y] for x, y in first.images.items()})

    def inverse(self):
        return GroupHom(self.image, self.source, {y: x for x, y in self.images.items()})

    def restrict(self, sub, target=None):
        images = {x: self.images[x] for x in sub.elements}
        return GroupHom(sub, target if target is not None else Subgroup(sub.parent, images.values()),
                        images)

    def with_target(self, target):
        return GroupHom(self.source, target, self.images)

    def is_identity(self):
        return all(x == y for x, y in self.images.items())


def chief_series_under(G, P, acting, p):
    """Elementary abelian factors of an ``acting``-invariant series of ``P``.

    ``acting`` is a :class:`PermGroup` permuting the positions of
    ``P.sorted``.  Uses the lower exponent-``p`` central series (characteristic
    in ``P``), writes each factor as an ``F_p``-module, then refines to
    composition factors.  Returns a flat list of simple modules.
    """
    from .fplinalg import FpModule, composition_factors

    if not is_p_group(P, p):
        raise NotPGroup(f"order {P.order} is not a power of {p}")
    pos = {x: i for i, x in enumerate(P.sorted)}
    series = [P]
    while series[-1].order > 1:
        series.append(frattini_p_series_step(G, P, series[-1], p))
    out = []
    for upper, lower in zip(series, series[1:]):
        basis, coords = _factor_coordinates(G, upper, lower, p)
        mats = []
        for a in acting.generators:
            cols = [coords[_coset_key(G, lower, P.sorted[a[pos[x]]])] for x in basis]
            mats.append(np.array(cols, dtype=np.int64).T % p)
        M = FpModule(p, acting, mats)
        for simple, mult in composition_factors(M):
            out.extend([simple] * mult)
    return out


def _coset_key(G, N, x):
    return min(G.mul(x, n) for n in N.elements)


def _factor_coordinates(G, upper, lower, p):
    """Basis elements of ``upper/lower`` and a coset -> coordinate table."""
    basis, current = [], lower
    for x in upper.sorted:
        if x not in current.elements:
            basis.append(x)
            current = join(G, current, x)
            if current.order == upper.order:
                break
    d = len(basis)
    coords = {}
    for exps in np.ndindex(*([p] * d)):
        y = 0
        for x, e in zip(basis, exps):
            y = G.mul(y, G.power(x, e))
        coords[_coset_key(G, lower, y)] = list(exps)
    return basis, coords


def is_subgroup_subset(G, elements):
    """Brute-force closure test, used as an independent oracle in tests."""
    s = set(elements)
    return 0 in s and all(G.mul(a, b) in s for a in s for b in s)


def all_subgroups_bruteforce(G):
    """Every subset closed under products; exponential, only for tiny groups."""
    elems = [x for x in range(G.order) if x != 0]
    out = []
    for r in range(len(elems) + 1):
        for combo in combinations(elems, r):
            if is_subgroup_subset(G, (0,) + combo):
                out.append(frozenset((0,) + combo))
    return out
