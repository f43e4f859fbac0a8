"""Fusion systems ``F_S(G)`` realized by finite permutation groups."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .category import FiniteCategory
from .exceptions import EmptyB, NotPGroup
from .groups import (
    GroupHom,
    PermGroup,
    Subgroup,
    centralizer,
    commutator,
    compose,
    normalizer,
    p_part,
    subgroups,
    sylow,
)


def small_generating_set(perms):
    """Greedy generating set of the group generated by ``perms`` (tuples)."""
    perms = sorted(set(perms))
    if not perms:
        return []
    degree = len(perms[0])
    identity = tuple(range(degree))
    gens, elems = [], {identity}
    for x in perms:
        if x in elems:
            continue
        gens.append(x)
        frontier = list(elems)
        while frontier:
            new = []
            for y in frontier:
                for g in gens:
                    z = compose(g, y)
                    if z not in elems:
                        elems.add(z)
                        new.append(z)
            frontier = new
    return gens


@dataclass
class SaturationReport:
    passed: bool
    failures: list = field(default_factory=list)
    checked: int = 0

    def to_json(self):
        return {"passed": self.passed, "checked": self.checked,
                "failures": [str(f) for f in self.failures]}


class FusionSystem:
    """The fusion system of ``G`` on a Sylow ``p``-subgroup ``S``.

    ``S`` is held as its own :class:`PermGroup`; all subgroups of ``S`` are
    :class:`Subgroup` objects of that group.  Morphisms are conjugation maps
    ``c_g`` (``g`` in ``G``) stored as :class:`GroupHom` and deduplicated as maps.
    """

    def __init__(self, G, p, *, name=None):
        self.G = G
        self.p = p
        self.name = name or G.name
        P = sylow(G, p)
        self.S = P.as_group(name=f"Syl_{p}({self.name})")
        self.subgroups = subgroups(self.S)
        self._lookup = {H.elements: H for H in self.subgroups}
        self.hom_to_S = {}
        self.conjugator = {}
        self._enumerate_homs()

    @classmethod
    def inner(cls, S_group, p, name=None):
        """``F_S(S)`` for a ``p``-group ``S``."""
        if p_part(S_group.order, p) != S_group.order:
            raise NotPGroup(f"order {S_group.order} is not a power of {p}")
        return cls(S_group, p, name=name)

    def __repr__(self):
        return f"<FusionSystem {self.name} p={self.p} |S|={self.S.order}>"

    def subgroup(self, elements):
        return self._lookup[frozenset(elements)]

    # -- morphisms -------------------------------------------------------
    def _enumerate_homs(self):
        G, S = self.G, self.S
        n = G.degree
        garr = np.array(G.elements, dtype=np.int64).reshape(G.order, n)
        ginv = np.array([G.elements[G.inv(i)] for i in range(G.order)], dtype=np.int64).reshape(G.order, n)
        s_index = S._index
        for H in self.subgroups:
            perms = [S.elements[x] for x in H.sorted]
            gen_perms = [S.elements[x] for x in H.generators]
            ok = np.ones(G.order, dtype=bool)
            for x in gen_perms:
                conj = np.take_along_axis(garr, np.asarray(x)[ginv], axis=1)
                ok &= np.array([tuple(r) in s_index for r in conj.tolist()])
            homs = {}
            for g in np.flatnonzero(ok):
                conj = np.take_along_axis(garr[[g]].repeat(len(perms), 0),
                                          np.asarray(perms)[:, ginv[g]], axis=1)
                images = {x: s_index[tuple(r)] for x, r in zip(H.sorted, conj.tolist())}
                phi = GroupHom(H, self.subgroup(images.values()), images)
                if phi.key not in homs:
                    homs[phi.key] = phi
                    self.conjugator[phi.key] = int(g)
            self.hom_to_S[H] = sorted(homs.values(), key=lambda f: f.key[1])

    def homs(self, P, Q):
        """``Hom_F(P, Q)``, with targets set to ``Q``."""
        return [f.with_target(Q) for f in self.hom_to_S[P] if f.target.elements <= Q.elements]

    def isos_from(self, P):
        return list(self.hom_to_S[P])

    def isos(self, P, Q):
        return [f for f in self.hom_to_S[P] if f.target == Q]

    def conjugates(self, P):
        return sorted({f.target for f in self.hom_to_S[P]}, key=Subgroup.key)

    def automorphisms(self, P):
        return self.isos(P, P)

    def inner_automorphisms(self, P):
        S = self.S
        out = {}
        for x in P.sorted:
            f = GroupHom.conjugation(S, P, x, P)
            out.setdefault(f.key, f)
        return list(out.values())

    def auts_by_S(self, P):
        S = self.S
        out = {}
        for x in normalizer(S, P).sorted:
            f = GroupHom.conjugation(S, P, x, P)
            out.setdefault(f.key, f)
        return list(out.values())

    def hom_from_conjugation(self, P, x):
        """``c_x|_P`` for ``x`` in ``S``."""
        return GroupHom.conjugation(self.S, P, x)

    # -- automorphism groups as permutation groups ------------------------
    def aut_perm(self, f):
        """``f`` in ``Aut(P)`` as a permutation of positions in ``P.sorted``."""
        P = f.source
        pos = {x: i for i, x in enumerate(P.sorted)}
        return tuple(pos[f.images[x]] for x in P.sorted)

    def perm_to_aut(self, P, perm):
        return GroupHom(P, P, {x: P.sorted[perm[i]] for i, x in enumerate(P.sorted)})

    def aut_group(self, P):
        """``Aut_F(P)`` as a :class:`PermGroup` on the positions of ``P.sorted``."""
        cache = self.__dict__.setdefault("_aut_cache", {})
        if P not in cache:
            perms = [self.aut_perm(f) for f in self.automorphisms(P)]
            gens = small_generating_set(perms) or [tuple(range(P.order))]
            A = PermGroup(gens, P.order, name=f"Aut_F({P.order})")
            assert A.order == len(perms)
            cache[P] = A
        return cache[P]

    def inn_subgroup(self, P):
        A = self.aut_group(P)
        return Subgroup(A, {A.index(self.aut_perm(f)) for f in self.inner_automorphisms(P)})

    def aut_S_subgroup(self, P):
        A = self.aut_group(P)
        return Subgroup(A, {A.index(self.aut_perm(f)) for f in self.auts_by_S(P)})

    def out_group(self, P):
        """``(Out_F(P), proj)`` where ``proj[i]`` is the image of Aut element ``i``.

        ``Out_F(P)`` is realized as the action of ``Aut_F(P)`` on the cosets of
        ``Inn(P)``; its generators are the images of ``aut_group(P).generators``.
        """
        cache = self.__dict__.setdefault("_out_cache", {})
        if P in cache:
            return cache[P]
        A = self.aut_group(P)
        inn = self.inn_subgroup(P)
        coset_of, reps = {}, []
        for a in range(A.order):
            if a in coset_of:
                continue
            c = len(reps)
            reps.append(a)
            for i in inn.elements:
                coset_of[A.mul(a, i)] = c
        gens = []
        for g in A.generator_indices:
            gens.append(tuple(coset_of[A.mul(g, r)] for r in reps))
        O = PermGroup(gens, len(reps), name=f"Out_F({P.order})")
        proj = []
        for a in range(A.order):
            proj.append(O.index(tuple(coset_of[A.mul(a, r)] for r in reps)))
        cache[P] = (O, proj)
        return cache[P]

    # -- conjugacy classes and centricity -------------------------------
    @cached_property
    def classes(self):
        """F-conjugacy classes; each is a list with the chosen representative first."""
        seen, out = set(), []
        S = self.S
        for H in self.subgroups:
            if H in seen:
                continue
            members = self.conjugates(H)
            seen.update(members)
            rep = max(members, key=lambda Q: (normalizer(S, Q).order, _neg_key(Q)))
            out.append([rep] + [Q for Q in members if Q != rep])
        out.sort(key=lambda c: c[0].key())
        return out

    def class_of(self, P):
        for i, cls in enumerate(self.classes):
            if P in cls:
                return i
        raise KeyError(P)

    def representative(self, P):
        return self.classes[self.class_of(P)][0]

    @cached_property
    def representatives(self):
        return [c[0] for c in self.classes]

    def is_fully_normalized(self, P):
        n = normalizer(self.S, P).order
        return all(normalizer(self.S, Q).order <= n for Q in self.conjugates(P))

    def is_fully_centralized(self, P):
        c = centralizer(self.S, P).order
        return all(centralizer(self.S, Q).order <= c for Q in self.conjugates(P))

    def is_centric(self, P):
        S = self.S
        return all(centralizer(S, Q).elements <= Q.elements for Q in self.conjugates(P))

    @cached_property
    def centric_classes(self):
        return [i for i, c in enumerate(self.classes) if self.is_centric(c[0])]

    @cached_property
    def centric_representatives(self):
        return [self.classes[i][0] for i in self.centric_classes]

    @cached_property
    def noncentric_representatives(self):
        return [c[0] for i, c in enumerate(self.classes) if i not in self.centric_classes]

    def transport(self, P):
        """Chosen F-isomorphism from ``P`` to its class representative (least conjugator)."""
        rep = self.representative(P)
        cands = self.isos(P, rep)
        return min(cands, key=lambda f: self.conjugator[f.key])

    # -- saturation --------------------------------------------------------
    def check_saturation(self):
        p = self.p
        failures, checked = [], 0
        for cls in self.classes:
            P = cls[0]
            checked += 1
            if not self.is_fully_normalized(P):
                failures.append(("representative not fully normalized", P.order))
            if not self.is_fully_centralized(P):
                failures.append(("fully normalized but not fully centralized", P.order))
            n_aut = len(self.automorphisms(P))
            n_auts = len(self.auts_by_S(P))
            if n_auts != p_part(n_aut, p):
                failures.append(("not fully automized", P.order, n_auts, n_aut))
            for Q in cls:
                if not self.is_fully_centralized(Q):
                    continue
                for phi in self.isos(P, Q):
                    checked += 1
                    if not self._extends(phi):
                        failures.append(("extension axiom", P.order, phi.key[1]))
        return SaturationReport(not failures, failures, checked)

    def _extends(self, phi):
        S = self.S
        P, Q = phi.source, phi.target
        inv = phi.inverse()
        aut_s_q = {f.key for f in self.auts_by_S(Q)}
        n_phi = []
        for g in normalizer(S, P).sorted:
            cg = GroupHom.conjugation(S, P, g, P)
            conj = phi.compose(cg).compose(inv.with_target(P))
            if GroupHom(Q, Q, conj.images).key in aut_s_q:
                n_phi.append(g)
        N = self.subgroup(n_phi)
        return any(
            all(psi.images[x] == phi.images[x] for x in P.elements)
            for psi in self.hom_to_S[N]
        )

    # -- collections used by the vanishing argument -----------------------
    @cached_property
    def class_B(self):
        """Normal ``B`` of ``S`` with ``C_S(B) <= B`` and ``[S, B, B] = 1``."""
        S = self.S
        W = S.whole
        out = []
        for B in self.subgroups:
            if not B.is_normal_in(W):
                continue
            if not centralizer(S, B).elements <= B.elements:
                continue
            if commutator(S, commutator(S, W, B), B).order != 1:
                continue
            out.append(B)
        if not out:
            raise EmptyB("no subgroup satisfies the defining conditions")
        return out

    def double_orbit_reps(self, T, Q):
        """Representatives of ``Aut_F(Q) \\ Hom_F(T, Q) / Aut_F(T)``."""
        homs = self.homs(T, Q)
        if not homs:
            return []
        aq = self.automorphisms(Q)
        at = self.automorphisms(T)
        seen, reps = set(), []
        for f in homs:
            if f.key in seen:
                continue
            reps.append(f)
            for a in aq:
                af = a.compose(f)
                for b in at:
                    seen.add(af.compose(b).key)
        return reps

    def set_Q(self, T, centric=None):
        """Pairs ``(Q, alpha, B, beta)`` with ``B & beta(alpha(T)) < B & beta(Q)``."""
        out = []
        centric = centric if centric is not None else self.centric_representatives
        for Q in centric:
            for alpha in self.double_orbit_reps(T, Q):
                U = alpha.image
                witness = None
                for beta in self.isos_from(Q):
                    bq = beta.target.elements
                    bu = frozenset(beta.images[u] for u in U.elements)
                    for B in self.class_B:
                        if B.elements & bu < B.elements & bq:
                            witness = (B, beta)
                            break
                    if witness:
                        break
                if witness:
                    out.append((Q, alpha, witness[0], witness[1]))
        return out

    # -- orbit category ------------------------------------------------------
    def orbit_category(self, centric_only=True):
        """Skeleton of ``O(F)`` (or ``O(F^c)``) on the class representatives."""
        objs = self.centric_representatives if centric_only else self.representatives
        cat = FiniteCategory(list(objs))
        ids = {}
        inn_cache = {Q: self.inner_automorphisms(Q) for Q in objs}

        def canon(f, Q):
            return min(c.compose(f).key for c in inn_cache[Q])

        rep_hom = {}
        for i, P in enumerate(objs):
            for j, Q in enumerate(objs):
                orbits = {}
                for f in self.homs(P, Q):
                    k = canon(f, Q)
                    if k not in orbits:
                        orbits[k] = GroupHom(P, Q, dict(zip(P.sorted, k[1])))
                for k in sorted(orbits, key=lambda k: k[1]):
                    m = cat.add_morphism(i, j, data=orbits[k])
                    ids[(i, j, k)] = m
                    rep_hom[m] = orbits[k]
        cat.identities = []
        for i, P in enumerate(objs):
            ident = GroupHom(P, P, {x: x for x in P.elements})
            cat.identities.append(ids[(i, i, canon(ident, P))])
        for f, mf in enumerate(cat.morphisms):
            for g in cat.morphisms_from(mf.target):
                mg = cat.morphisms[g]
                h = rep_hom[g].compose(rep_hom[f]).with_target(objs[mg.target])
                cat.comp[(g, f)] = ids[(mf.source, mg.target, canon(h, objs[mg.target]))]
        cat.transports = {Q: self.transport(Q) for cls in self.classes for Q in cls
                          if not centric_only or self.is_centric(cls[0])}
        return cat

    # -- reporting -----------------------------------------------------------
    def summary(self):
        sat = self.check_saturation()
        classes = []
        for i, cls in enumerate(self.classes):
            P = cls[0]
            O, _ = self.out_group(P)
            classes.append({
                "index": i,
                "order": P.order,
                "size": len(cls),
                "representative": list(P.sorted),
                "centric": i in self.centric_classes,
                "aut_order": len(self.automorphisms(P)),
                "out_order": O.order,
                "out_generators": [list(g) for g in O.generators],
            })
        return {
            "system": self.name,
            "p": self.p,
            "S_order": self.S.order,
            "n_subgroups": len(self.subgroups),
            "n_classes": len(self.classes),
            "n_centric_classes": len(self.centric_classes),
            "classes": classes,
            "saturation": sat.to_json(),
        }


def _neg_key(Q):
    # max() over (|N_S(Q)|, -key) picks the least element list on ties
    return tuple(-x for x in Q.sorted)


def realize(G, p, name=None):
    if G.order % p:
        raise ValueError(f"{p} does not divide |G| = {G.order}")
    return FusionSystem(G, p, name=name)
