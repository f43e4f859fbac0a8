"""Finite categories given by explicit hom-sets and a composition table."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Morphism:
    source: int
    target: int
    data: object = None
    label: str = ""


@dataclass
class FiniteCategory:
    """Objects ``0..n-1``; morphisms are integer ids into ``morphisms``.

    ``comp[(g, f)]`` is the id of ``g o f`` for ``f: x -> y`` and ``g: y -> z``.
    """

    objects: list
    morphisms: list = field(default_factory=list)
    identities: list = field(default_factory=list)
    comp: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hom = {}
        for i, m in enumerate(self.morphisms):
            self.hom.setdefault((m.source, m.target), []).append(i)

    @property
    def n_objects(self):
        return len(self.objects)

    def homset(self, x, y):
        return self.hom.get((x, y), [])

    def add_morphism(self, source, target, data=None, label=""):
        self.morphisms.append(Morphism(source, target, data, label))
        i = len(self.morphisms) - 1
        self.hom.setdefault((source, target), []).append(i)
        return i

    def compose(self, g, f):
        return self.comp[(g, f)]

    def is_identity(self, f):
        return self.identities[self.morphisms[f].source] == f

    def automorphisms(self, x):
        return self.homset(x, x)

    def check(self):
        """Identities, closure and associativity; returns a list of problems."""
        problems = []
        for x in range(self.n_objects):
            e = self.identities[x]
            for f in self.morphisms_from(x):
                if self.comp.get((f, e)) != f:
                    problems.append(("right identity", x, f))
            for f in self.morphisms_to(x):
                if self.comp.get((e, f)) != f:
                    problems.append(("left identity", x, f))
        for f, mf in enumerate(self.morphisms):
            for g in self.morphisms_from(mf.target):
                gf = self.comp.get((g, f))
                if gf is None:
                    problems.append(("closure", g, f))
                    continue
                for h in self.morphisms_from(self.morphisms[g].target):
                    if self.comp.get((h, gf)) != self.comp.get((self.comp.get((h, g)), f)):
                        problems.append(("associativity", h, g, f))
        return problems

    def morphisms_from(self, x):
        return [i for (s, _), ids in self.hom.items() if s == x for i in ids]

    def morphisms_to(self, y):
        return [i for (_, t), ids in self.hom.items() if t == y for i in ids]

    def is_ei(self):
        """Every endomorphism is an isomorphism (endomorphism monoids are groups)."""
        for x in range(self.n_objects):
            ends = self.automorphisms(x)
            e = self.identities[x]
            for f in ends:
                if not any(self.comp[(g, f)] == e for g in ends):
                    return False
        return True

    def is_isomorphism(self, f):
        m = self.morphisms[f]
        return any(
            self.comp.get((g, f)) == self.identities[m.source]
            for g in self.homset(m.target, m.source)
        )

    def summary(self):
        return {
            "objects": [str(o) for o in self.objects],
            "hom_sizes": {
                f"{x}->{y}": len(self.homset(x, y))
                for x in range(self.n_objects)
                for y in range(self.n_objects)
                if self.homset(x, y)
            },
        }


def one_object_category(G, label="*"):
    """The group ``G`` (a PermGroup) as a category with one object."""
    cat = FiniteCategory([label])
    for g in range(G.order):
        cat.add_morphism(0, 0, data=g)
    cat.identities = [0]
    for g in range(G.order):
        for h in range(G.order):
            cat.comp[(g, h)] = G.mul(g, h)
    return cat


def poset_category(n, relations):
    """Category of a finite poset on ``0..n-1``; ``relations`` lists ``(a, b)`` with ``a <= b``."""
    le = {(i, i) for i in range(n)} | set(relations)
    changed = True
    while changed:
        changed = False
        for a, b in list(le):
            for c, d in list(le):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True
    cat = FiniteCategory(list(range(n)))
    ids = {}
    for a, b in sorted(le):
        ids[(a, b)] = cat.add_morphism(a, b)
    cat.identities = [ids[(i, i)] for i in range(n)]
    for (a, b), f in ids.items():
        for (c, d), g in ids.items():
            if b == c:
                cat.comp[(g, f)] = ids[(a, d)]
    return cat
