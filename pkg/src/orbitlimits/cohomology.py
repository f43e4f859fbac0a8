"""Mod-p cohomology of the subgroups of a p-group from one minimal resolution.

The free module ``F_n = F_p[S]^{r_n}`` has basis ``h e_i`` stored at index
``i * |S| + h``.  A cochain for ``P <= S`` is a ``P``-invariant linear
functional on ``F_n``; restriction is inclusion of invariant functionals and
transfer is a sum of translates.  Maps induced by injective homomorphisms are
computed from explicit equivariant chain lifts.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .exceptions import (
    AxiomViolation,
    DegreeBoundExceeded,
    HypothesisUnmet,
    LiftFailed,
    NotASubgroup,
    NotPGroup,
)
from .fplinalg import (
    Echelon,
    FpModule,
    Solver,
    Subquotient,
    composition_factors,
    gf2_rank_dense,
    kernel,
    nilpotence_degree,
    rank,
    row_space,
)
from .groups import (
    GroupHom,
    chief_series_under,
    double_cosets,
    frattini_p_series_step,
    is_p_power,
    left_coset_reps,
    right_coset_reps,
)

MAX_DEGREE = 16


class Resolution:
    """Minimal free resolution of the trivial module over ``F_p[S]``."""

    def __init__(self, S, p, jmax):
        if not is_p_power(S.order, p):
            raise NotPGroup(f"|S| = {S.order} is not a power of {p}")
        if jmax + 1 > MAX_DEGREE:
            raise DegreeBoundExceeded(f"degree {jmax + 1} exceeds {MAX_DEGREE}")
        self.S = S
        self.p = p
        self.n = S.order
        self.jmax = jmax
        tab = S.table
        self.mul = np.asarray(tab, dtype=np.int64)
        self.ranks = [1]
        self.images = [None]
        self.D = [np.ones((1, self.n), dtype=np.int64)]
        for k in range(1, jmax + 2):
            self._step(k)
        self._solvers = {}

    def left(self, s, v):
        """``s . v`` for ``v`` in ``F_k`` (flat, length ``r * n``)."""
        n = self.n
        v = np.asarray(v).reshape(-1, n)
        out = np.empty_like(v)
        out[:, self.mul[s]] = v
        return out.reshape(-1)

    def left_perm(self, s, r):
        """Index array ``q`` with ``(s . v)[q] = v``."""
        n = self.n
        return (np.arange(r)[:, None] * n + self.mul[s][None, :]).reshape(-1)

    def _differential(self, gens, r_prev):
        n = self.n
        cols = []
        for g in gens:
            for h in range(n):
                cols.append(self.left(h, g))
        return np.array(cols, dtype=np.int64).reshape(-1, r_prev * n).T % self.p

    def _step(self, k):
        p, n = self.p, self.n
        prev = self.D[k - 1]
        r_prev = self.ranks[k - 1]
        K = kernel(prev, p)
        jk = Echelon(r_prev * n, p)
        for v in K:
            for g in self.S.generator_indices:
                jk.add((self.left(g, v) - v) % p)
        gens = []
        for v in K:
            if jk.add(v) is not None:
                gens.append(v)
        D = self._differential(gens, r_prev) if gens else np.zeros((r_prev * n, 0), dtype=np.int64)
        rk = rank(D, p) if D.size else 0
        if rk != K.shape[0]:
            raise LiftFailed(f"resolution not exact at degree {k - 1}")
        self.ranks.append(len(gens))
        self.images.append(np.array(gens, dtype=np.int64).reshape(len(gens), r_prev * n))
        self.D.append(D)

    def dim(self, k):
        return self.ranks[k] * self.n

    def solver(self, k):
        if k not in self._solvers:
            self._solvers[k] = Solver(self.D[k], self.p)
        return self._solvers[k]

    def check(self):
        """``d o d = 0`` and exactness by rank counting; returns a list of problems."""
        p, out = self.p, []
        for k in range(1, len(self.D) - 1):
            if np.any(self.D[k] @ self.D[k + 1] % p):
                out.append(("d^2 != 0", k))
        for k in range(1, len(self.D)):
            rk_in = rank(self.D[k], p) if self.D[k].size else 0
            rk_out = rank(self.D[k - 1], p)
            if rk_in + rk_out != self.dim(k - 1):
                out.append(("not exact", k - 1))
        for k in range(1, len(self.D)):
            for v in self.images[k]:
                # minimality: generator images lie in the augmentation ideal
                # times F_{k-1}; equivalently each block sums to zero.
                if np.any(v.reshape(-1, self.n).sum(axis=1) % p):
                    out.append(("not minimal", k))
        return out


@dataclass
class GradedSpace:
    """``H^j(P)`` with cocycle representatives as invariant functionals."""

    subgroup: object
    degree: int
    quotient: Subquotient

    @property
    def dim(self):
        return self.quotient.dim

    @property
    def basis(self):
        return self.quotient.basis

    def coords(self, f):
        return self.quotient.coords(f)


class Cohomology:
    """``H^*(P, F_p)`` for all subgroups ``P`` of ``S`` with res/tr/iso maps."""

    def __init__(self, S, p, jmax, seed=0):
        self.S = S
        self.p = p
        self.jmax = jmax
        self.res = Resolution(S, p, jmax)
        self.rng = np.random.default_rng(seed)
        self._spaces = {}
        self._orbits = {}
        self._lifts = {}

    # -- cochains ------------------------------------------------------------
    def _orbit_data(self, P, k):
        key = (P.elements, k)
        if key not in self._orbits:
            S, n = self.S, self.res.n
            r = self.res.ranks[k]
            cosets = right_coset_reps(S, S.whole, P)
            label = np.empty(n, dtype=np.int64)
            for c_idx, c in enumerate(cosets):
                for x in P.elements:
                    label[S.mul(x, c)] = c_idx
            m = len(cosets)
            full_label = (np.arange(r)[:, None] * m + label[None, :]).reshape(-1)
            reps = (np.arange(r)[:, None] * n + np.array(cosets)[None, :]).reshape(-1)
            self._orbits[key] = (full_label, reps, r * m)
        return self._orbits[key]

    def _expand(self, P, k, X):
        """Orbit coordinates (rows) -> full functionals (rows)."""
        label, _, _ = self._orbit_data(P, k)
        X = np.asarray(X).reshape(-1, self._orbit_data(P, k)[2])
        return X[:, label]

    def coboundary(self, P, k):
        """Matrix of ``delta: C^k_P -> C^{k+1}_P`` in orbit coordinates."""
        label, _, m = self._orbit_data(P, k)
        _, reps_next, _ = self._orbit_data(P, k + 1)
        D = self.res.D[k + 1]
        E = np.zeros((D.shape[0], m), dtype=np.int64)
        E[np.arange(D.shape[0]), label] = 1
        return (D.T @ E)[reps_next] % self.p

    def space(self, P, j):
        key = (P.elements, j)
        if key not in self._spaces:
            if j > self.jmax:
                raise DegreeBoundExceeded(f"degree {j} > jmax {self.jmax}")
            p = self.p
            Z = kernel(self.coboundary(P, j), p)
            if j > 0:
                B = row_space(self.coboundary(P, j - 1).T, self._orbit_data(P, j)[2], p)
            else:
                B = np.zeros((0, self._orbit_data(P, j)[2]), dtype=np.int64)
            n = self.res.dim(j)
            q = Subquotient(self._expand(P, j, Z), self._expand(P, j, B), n, p)
            self._spaces[key] = GradedSpace(P, j, q)
        return self._spaces[key]

    def dim(self, P, j):
        return self.space(P, j).dim

    # -- structure maps --------------------------------------------------------
    def _coords_matrix(self, target, F):
        """Columns: coordinates in ``target`` of the functionals ``F`` (rows)."""
        if target.dim == 0:
            return np.zeros((0, F.shape[0]), dtype=np.int64)
        if F.shape[0] == 0:
            return np.zeros((target.dim, 0), dtype=np.int64)
        return target.quotient.coords_many(F).T % self.p

    def restriction(self, P, Q, j):
        """``r_P^Q : H^j(Q) -> H^j(P)``."""
        if not P.elements <= Q.elements:
            raise NotASubgroup("restriction needs P <= Q")
        HQ, HP = self.space(Q, j), self.space(P, j)
        return self._coords_matrix(HP, HQ.basis)

    def translate(self, s, F, k):
        """``s . f`` with ``(s . f)(v) = f(s^-1 v)`` for rows ``F`` in degree ``k``."""
        q = self.res.left_perm(self.S.inv(s), self.res.ranks[k])
        F = np.asarray(F).reshape(-1, self.res.dim(k))
        return F[:, q]

    def transfer(self, P, Q, j):
        """``t_P^Q : H^j(P) -> H^j(Q)``."""
        if not P.elements <= Q.elements:
            raise NotASubgroup("transfer needs P <= Q")
        HP, HQ = self.space(P, j), self.space(Q, j)
        total = np.zeros_like(HP.basis)
        for g in left_coset_reps(self.S, Q, P):
            total = total + self.translate(g, HP.basis, j)
        return self._coords_matrix(HQ, total % self.p)

    def conjugation(self, x, P, j):
        """``c_x* : H^j(P) -> H^j(xPx^-1)`` by translating cochains (``x`` in ``S``)."""
        S = self.S
        xP = _conj_subgroup(S, P, x)
        HP, HxP = self.space(P, j), self.space(xP, j)
        return self._coords_matrix(HxP, self.translate(x, HP.basis, j))

    # -- chain lifts -----------------------------------------------------------
    def chain_lift(self, phi, degree, randomize=False):
        """Matrices ``tau_0..tau_degree`` of a ``phi``-equivariant chain map.

        ``tau_k : F_k -> F_k`` with ``tau(x v) = phi(x) tau(v)`` for ``x`` in
        the source of ``phi``, lifting the identity on the trivial module.
        """
        key = (phi.key, degree)
        if not randomize and key in self._lifts:
            return self._lifts[key]
        S, res, p, n = self.S, self.res, self.p, self.res.n
        P = phi.source
        cosets = right_coset_reps(S, S.whole, P)
        decomp = [None] * n
        for c_idx, c in enumerate(cosets):
            for x in P.elements:
                decomp[S.mul(x, c)] = (x, c_idx)
        taus = []
        for k in range(degree + 1):
            r = res.ranks[k]
            N = res.dim(k)
            ys = np.zeros((r, len(cosets), N), dtype=np.int64)
            if k == 0:
                ys[0, :, 0] = 1
                if randomize:
                    K = kernel(res.D[0], p)
                    for c_idx in range(len(cosets)):
                        ys[0, c_idx] = (ys[0, c_idx] + self.rng.integers(p, size=K.shape[0]) @ K) % p
            else:
                prev = taus[k - 1]
                cols = [i * n + c for i in range(r) for c in cosets]
                Z = prev @ res.D[k][:, cols] % p
                Y = res.solver(k).solve_many(Z)
                if Y is None:
                    raise LiftFailed(f"cannot lift chain map in degree {k}")
                if randomize:
                    K = res.solver(k).kernel()
                    if K.shape[0]:
                        Y = (Y + K.T @ self.rng.integers(p, size=(K.shape[0], Y.shape[1]))) % p
                ys = Y.T.reshape(r, len(cosets), N)
            tau = np.zeros((N, N), dtype=np.int64)
            for i in range(r):
                for h in range(n):
                    x, c_idx = decomp[h]
                    tau[:, i * n + h] = res.left(phi.images[x], ys[i, c_idx])
            taus.append(tau % p)
        if not randomize:
            self._lifts[key] = taus
        return taus

    def hom_map(self, phi, j, randomize=False):
        """``H^j(Q) -> H^j(P)`` induced by an injective ``phi: P -> Q``."""
        P, Q = phi.source, phi.target
        if not phi.image.elements <= Q.elements:
            raise NotASubgroup("phi does not land in its target")
        tau = self.chain_lift(phi, j, randomize)[j]
        HQ, HP = self.space(Q, j), self.space(P, j)
        pulled = HQ.basis @ tau % self.p
        return self._coords_matrix(HP, pulled)

    def iso_map(self, phi, j, randomize=False):
        """``iso([phi]) : H^j(phi(P)) -> H^j(P)`` for an isomorphism ``phi``."""
        return self.hom_map(phi.with_target(phi.image), j, randomize)

    def conjugation_lifted(self, x, P, j):
        """``c_x*`` computed as ``iso(c_{x^-1}|_{xPx^-1})`` through chain lifts."""
        S = self.S
        xP = _conj_subgroup(S, P, x)
        back = GroupHom.conjugation(S, xP, S.inv(x), P)
        return self.iso_map(back, j)


def _conj_subgroup(S, P, x):
    from .groups import Subgroup

    return Subgroup(S, (S.conj(x, y) for y in P.elements))


def cohomology_module(fs, coh, P, j):
    """``H^j(P)`` as a module for ``Aut_F(P)`` (a PermGroup on positions of ``P``).

    ``phi`` acts by ``iso(phi^-1)``, so inner automorphisms act trivially.
    """
    A = fs.aut_group(P)
    mats = []
    for perm in A.generators:
        phi = fs.perm_to_aut(P, perm)
        mats.append(coh.iso_map(phi.inverse().with_target(P), j))
    return FpModule(coh.p, A, mats, coh.dim(P, j))


def h1_dimension_oracle(G, P, p):
    """``dim Hom(P, F_p)`` = rank of ``P / [P,P] P^p``."""
    F = frattini_p_series_step(G, P, P, p)
    idx = P.order // F.order
    d = 0
    while idx > 1:
        idx //= p
        d += 1
    return d


def bar_cohomology_dims(G, H, p, jmax):
    """``dim H^j(H, F_p)`` for ``j <= jmax`` from the normalized bar complex.

    ``H`` is a Subgroup of ``G`` (any finite group, trivial coefficients).
    Cochains are functions on ``(H - 1)^j``.  Used as an independent oracle.
    """
    elems = [x for x in H.sorted if x != 0]
    m = len(elems)
    pos = {x: i for i, x in enumerate(elems)}
    mul = np.full((m, m), -1, dtype=np.int64)
    for a, x in enumerate(elems):
        for b, y in enumerate(elems):
            z = G.mul(x, y)
            mul[a, b] = pos.get(z, -1)
    ranks = []
    for n in range(jmax + 1):
        ranks.append(_bar_rank(mul, m, n, p))
    dims = []
    for j in range(jmax + 1):
        c = m**j
        dims.append(c - ranks[j] - (ranks[j - 1] if j else 0))
    return dims


def _bar_rank(mul, m, n, p):
    """Rank of the normalized coboundary ``C^n -> C^{n+1}``."""
    rows_n = m ** (n + 1)
    cols_n = m**n
    if rows_n == 0 or cols_n == 0:
        return 0
    if m == 0:
        return 0
    tup = np.array(list(product(range(m), repeat=n + 1)), dtype=np.int64).reshape(rows_n, n + 1)
    weights = m ** np.arange(n - 1, -1, -1, dtype=np.int64) if n else np.zeros(0, dtype=np.int64)
    row_idx = np.arange(rows_n)
    entries = []  # (rows, cols, sign)
    entries.append((row_idx, tup[:, 1:] @ weights if n else np.zeros(rows_n, dtype=np.int64), 1))
    for i in range(1, n + 1):
        prod_ = mul[tup[:, i - 1], tup[:, i]]
        ok = prod_ >= 0
        merged = np.concatenate([tup[:, : i - 1], prod_[:, None], tup[:, i + 1 :]], axis=1)
        cols = merged[ok] @ weights
        entries.append((row_idx[ok], cols, (-1) ** i))
    entries.append((row_idx, tup[:, :-1] @ weights if n else np.zeros(rows_n, dtype=np.int64), (-1) ** (n + 1)))
    if p == 2:
        M = np.zeros((rows_n, cols_n), dtype=np.uint8)
        for r, c, _ in entries:
            np.bitwise_xor.at(M, (r, c), 1)
        return gf2_rank_dense(M)
    M = np.zeros((rows_n, cols_n), dtype=np.int64)
    for r, c, s in entries:
        np.add.at(M, (r, c), s)
    return rank(M % p, p)


# -- Mackey functor ----------------------------------------------------------


class MackeyH:
    """``H^j(-, F_p)`` as a Mackey functor on the subgroups of ``S``."""

    def __init__(self, fs, j, coh=None, seed=0):
        self.fs = fs
        self.j = j
        self.p = fs.p
        self.coh = coh if coh is not None else Cohomology(fs.S, fs.p, j, seed)

    def value(self, P):
        return self.coh.space(P, self.j)

    def r(self, P, Q):
        return self.coh.restriction(P, Q, self.j)

    def t(self, P, Q):
        return self.coh.transfer(P, Q, self.j)

    def iso(self, phi):
        return self.coh.iso_map(phi, self.j)

    def contravariant(self, phi):
        """``H^j(Q) -> H^j(P)`` for an orbit-category morphism ``[phi]: P -> Q``."""
        return self.coh.hom_map(phi, self.j)

    def check_axioms(self, triples=None):
        """Bivariance, isomorphism axiom and the Mackey formula.

        Returns the number of checked instances; raises :class:`AxiomViolation`
        with a witness on the first failure.
        """
        fs, coh, j, p = self.fs, self.coh, self.j, self.p
        S = fs.S
        subs = fs.subgroups
        count = 0
        for P in subs:
            d = coh.dim(P, j)
            eye = np.eye(d, dtype=np.int64)
            if not np.array_equal(self.r(P, P) % p, eye) or not np.array_equal(self.t(P, P) % p, eye):
                raise AxiomViolation("r_P^P or t_P^P is not the identity", (P.order,))
            # isomorphism axiom: translating cochains agrees with the chain-lift iso map
            for x in range(S.order):
                a = coh.conjugation(x, P, j)
                b = coh.conjugation_lifted(x, P, j)
                count += 1
                if not np.array_equal(a % p, b % p):
                    raise AxiomViolation("c_x* differs from iso(c_x^-1)", (P.order, x))
                if x in P.elements and not np.array_equal(a % p, eye):
                    raise AxiomViolation("inner automorphism acts nontrivially", (P.order, x))
        for R in subs:
            for Q in subs:
                if not Q.elements <= R.elements:
                    continue
                rQR = self.r(Q, R)
                tQR = self.t(Q, R)
                idx = R.order // Q.order
                count += 1
                if np.any((tQR @ rQR - idx * np.eye(rQR.shape[1], dtype=np.int64)) % p):
                    raise AxiomViolation("t o r != index", (Q.order, R.order))
                for P in subs:
                    if not P.elements <= R.elements:
                        continue
                    if triples is not None and (P, Q, R) not in triples:
                        continue
                    if P.elements <= Q.elements:
                        count += 1
                        if np.any((self.r(P, Q) @ rQR - self.r(P, R)) % p):
                            raise AxiomViolation("restriction not functorial", (P.order, Q.order, R.order))
                        if np.any((tQR @ self.t(P, Q) - self.t(P, R)) % p):
                            raise AxiomViolation("transfer not functorial", (P.order, Q.order, R.order))
                    lhs = rQR @ self.t(P, R) % p
                    rhs = np.zeros_like(lhs)
                    for x in double_cosets(S, R, Q, P):
                        xP = _conj_subgroup(S, P, x)
                        I = Q.intersection(xP)
                        term = self.t(I, Q) @ self.r(I, xP) @ coh.conjugation_lifted(x, P, j)
                        rhs = (rhs + term) % p
                    count += 1
                    if not np.array_equal(lhs, rhs):
                        raise AxiomViolation("Mackey formula fails", (P.order, Q.order, R.order))
        return count

    def check_fusion_isos(self):
        """``iso`` is functorial on F-isomorphisms and ``iso(phi) iso(phi^-1) = id``."""
        fs, coh, j, p = self.fs, self.coh, self.j, self.p
        count = 0
        for cls in fs.classes:
            P = cls[0]
            for phi in fs.isos_from(P):
                Q = phi.target
                a = self.iso(phi)
                b = self.iso(phi.inverse().with_target(P))
                count += 1
                if np.any((a @ b - np.eye(coh.dim(P, j), dtype=np.int64)) % p):
                    raise AxiomViolation("iso(phi) iso(phi^-1) != id", (P.order,))
                r1 = coh.iso_map(phi, j, randomize=True)
                if not np.array_equal(a % p, r1 % p):
                    raise AxiomViolation("iso map depends on the chain lift", (P.order,))
                for psi in fs.automorphisms(Q)[:4]:
                    comp = psi.compose(phi).with_target(Q)
                    lhs = self.iso(comp)
                    rhs = a @ self.iso(psi) % p
                    count += 1
                    if not np.array_equal(lhs % p, rhs):
                        raise AxiomViolation("iso not functorial", (P.order,))
        return count


def mackey_functor(fs, j, coh=None, check=True):
    M = MackeyH(fs, j, coh)
    if check:
        M.check_axioms()
    return M


# -- nilpotence under quadratic action ------------------------------------------


def quadratic_action_bound(fs, coh, P, g, j, h=2, n=1):
    """Observed nilpotence of ``g`` (an Aut_F(P) element index) on ``H^j(P)``.

    Checks the hypothesis that ``(g-1)^h`` kills each ``Aut_F(P)``-composition
    factor of ``P`` (coefficients are trivial, so ``n >= 1`` always holds),
    then returns the largest nilpotence degree of ``g`` on a composition
    factor of ``H^j(P)`` together with the bound ``(h-1) j + n``.
    """
    A = fs.aut_group(P)
    if n < 1:
        raise HypothesisUnmet("trivial coefficients need n >= 1")
    for F in chief_series_under(fs.S, P, A, fs.p):
        e = nilpotence_degree(F, g)
        if e is None or e > h:
            raise HypothesisUnmet(f"(g-1)^{h} is not zero on a factor of P")
    M = cohomology_module(fs, coh, P, j)
    observed = 0
    for V, _mult in composition_factors(M):
        e = nilpotence_degree(V, g)
        if e is None:
            raise AxiomViolation("g - 1 not nilpotent on a factor of H^j", (P.order, j))
        observed = max(observed, e)
    return observed, (h - 1) * j + n


def quadratic_action_scan(fs, coh, jmax, h=2, n=1):
    """Every ``(P, g, j)`` with ``(g-1)^h = 0`` on the factors of ``P``.

    ``g`` ranges over non-identity elements of ``Aut_F(P)`` for all class
    representatives ``P``.  Returns rows ``(P, g, j, observed, bound)``.
    """
    rows = []
    for P in fs.representatives:
        if P.order == 1:
            continue
        A = fs.aut_group(P)
        factors = chief_series_under(fs.S, P, A, fs.p)
        good = [g for g in range(1, A.order)
                if all((nilpotence_degree(F, g) or h + 1) <= h for F in factors)]
        if not good:
            continue
        for j in range(jmax + 1):
            M = cohomology_module(fs, coh, P, j)
            simples = [V for V, _ in composition_factors(M)]
            for g in good:
                observed = max((nilpotence_degree(V, g) for V in simples), default=0)
                rows.append((P, g, j, observed, (h - 1) * j + n))
    return rows
