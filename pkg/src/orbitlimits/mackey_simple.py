"""Values and isomorphism maps of the simple Mackey functors ``S_{T,V}``.

All modules for ``Aut_F(Q)`` live on ``fs.aut_group(Q)``; the ``Out_F(Q)``
version reuses the same generator matrices because ``out_group`` lists its
generators as images of the ``Aut_F(Q)`` generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cohomology import Cohomology, cohomology_module
from .exceptions import ActionUndefined, AxiomViolation, DimensionMismatch
from .fplinalg import FpModule, Solver, composition_factors, induce, is_simple, row_space
from .groups import GroupHom, Subgroup, left_coset_reps, normalizer


# -- helpers -------------------------------------------------------------------


def aut_index(fs, phi):
    """Index of the automorphism ``phi`` in ``fs.aut_group(phi.source)``."""
    return fs.aut_group(phi.source).index(fs.aut_perm(phi))


def aut_element(fs, Q, a):
    return fs.perm_to_aut(Q, fs.aut_group(Q).elements[a])


def to_out_module(fs, P, M):
    """An ``Aut_F(P)``-module on which ``Inn(P)`` acts trivially, as an ``Out_F(P)``-module."""
    O, _ = fs.out_group(P)
    eye = np.eye(M.dim, dtype=np.int64)
    for i in fs.inn_subgroup(P).elements:
        if not np.array_equal(M.matrix(i), eye):
            raise ActionUndefined("inner automorphisms act nontrivially")
    return FpModule(M.p, O, M.gens, M.dim, name=M.name)


def inflate(fs, P, V):
    """An ``Out_F(P)``-module as an ``Aut_F(P)``-module."""
    A = fs.aut_group(P)
    _, proj = fs.out_group(P)
    return FpModule(V.p, A, [V.matrix(proj[g]) for g in A.generator_indices], V.dim)


def _inverse_on_image(alpha):
    return {alpha.images[t]: t for t in alpha.source.elements}


def _pull_back(alpha, phi):
    """``alpha^-1 o phi o alpha`` as an automorphism of ``alpha.source``."""
    back = _inverse_on_image(alpha)
    T = alpha.source
    return GroupHom(T, T, {t: back[phi.images[alpha.images[t]]] for t in T.elements})


@dataclass
class SimpleSeed:
    """A pair ``(T, V)``: ``T`` a class representative, ``V`` simple over ``Out_F(T)``."""

    fs: object
    T: Subgroup
    V: FpModule
    label: str = ""

    def __post_init__(self):
        O, _ = self.fs.out_group(self.T)
        if self.V.group is not O:
            raise DimensionMismatch("V must be a module for Out_F(T)")
        self._aut_V = inflate(self.fs, self.T, self.V)

    def check(self):
        return is_simple(self.V) and self.fs.is_fully_normalized(self.T)

    def theta_matrix(self, theta):
        """Action of ``theta`` in ``Aut_F(T)`` on ``V``."""
        return self._aut_V.matrix(aut_index(self.fs, theta))


# -- twisted modules and W_alpha ------------------------------------------------


def twisted_module(seed, alpha):
    """``alpha (x) V`` for ``N_{Aut_F(Q)}(alpha(T))`` with ``phi -> V(alpha^-1 phi alpha)``.

    Returns the module over the stabilizer (a standalone PermGroup); the
    stabilizer as a Subgroup of ``Aut_F(Q)`` is attached as ``.stabilizer``.
    """
    fs = seed.fs
    Q = alpha.target
    A = fs.aut_group(Q)
    U = alpha.image.elements
    H = Subgroup(A, [a for a in range(A.order)
                     if frozenset(aut_element(fs, Q, a).images[u] for u in U) == U])
    Hg = H.as_group()
    mats = [seed.theta_matrix(_pull_back(alpha, fs.perm_to_aut(Q, g))) for g in Hg.generators]
    M = FpModule(seed.V.p, Hg, mats, seed.V.dim)
    M.stabilizer = H
    return M


@dataclass
class WAlpha:
    alpha: GroupHom
    U: Subgroup
    H: Subgroup            # N_{Aut_F(Q)}(U)
    K: Subgroup            # N_{Aut_F(Q)}(U^Q) = H Inn(Q)
    basis: np.ndarray      # rows in V coordinates
    module: FpModule       # over K.as_group()

    @property
    def dim(self):
        return self.basis.shape[0]

    def coords(self, v):
        if self.dim == 0:
            return np.zeros(0, dtype=np.int64)
        x = Solver(self.basis.T, self.module.p).solve(v)
        if x is None:
            raise DimensionMismatch("vector not in W_alpha")
        return x


def w_alpha(seed, alpha):
    """Image of the relative trace from ``U = alpha(T)`` to ``N_Q(U)`` inside ``alpha (x) V``.

    Carries the action of the class stabilizer ``N_{Aut_F(Q)}(U) Inn(Q)``
    where ``h i`` acts as ``h``; raises :class:`AxiomViolation` if that
    action is not well defined.
    """
    fs, p = seed.fs, seed.V.p
    S = fs.S
    Q = alpha.target
    A = fs.aut_group(Q)
    tw = twisted_module(seed, alpha)
    H = tw.stabilizer
    U = alpha.image
    d = seed.V.dim
    NQU = normalizer(S, U, within=Q)
    trace = np.zeros((d, d), dtype=np.int64)
    for x in left_coset_reps(S, NQU, U):
        c = A.index(fs.aut_perm(GroupHom.conjugation(S, Q, x, Q)))
        trace = (trace + tw.matrix_of(A.elements[c])) % p
    basis = row_space(trace.T, d, p)
    inn = fs.inn_subgroup(Q)
    K_elems = {A.mul(h, i) for h in H.elements for i in inn.elements}
    conj_class = {frozenset(S.conj(x, u) for u in U.elements) for x in Q.elements}
    direct = {a for a in range(A.order)
              if frozenset(aut_element(fs, Q, a).images[u] for u in U.elements) in conj_class}
    if K_elems != direct:
        raise AxiomViolation("class stabilizer differs from N(U) Inn(Q)", (Q.order, U.order))
    K = Subgroup(A, K_elems)
    WH = tw.sub(basis) if basis.shape[0] else None
    Kg = K.as_group()
    mats = []
    for g in Kg.generators:
        k = A.index(g)
        found = None
        for i in inn.elements:
            h = A.mul(k, A.inv(i))
            if h not in H.elements:
                continue
            m = WH.matrix_of(A.elements[h]) if WH is not None else np.zeros((0, 0), dtype=np.int64)
            if found is None:
                found = m
            elif not np.array_equal(found, m):
                raise AxiomViolation("W_alpha action depends on the h i factorization", (Q.order, k))
        mats.append(found)
    W = FpModule(p, Kg, mats, basis.shape[0])
    return WAlpha(alpha, U, H, K, basis, W)


# -- values ----------------------------------------------------------------------


@dataclass
class STVBlock:
    w: WAlpha
    induced: FpModule       # over Aut_F(Q)
    reps: list              # coset representatives of Aut_F(Q)/K
    offset: int

    @property
    def dim(self):
        return self.induced.dim

    @property
    def index(self):
        return len(self.reps)


@dataclass
class STVValue:
    """``S_{T,V}(Q) = sum over alpha of Ind W_alpha`` as ``Aut_F(Q)`` and ``Out_F(Q)`` modules."""

    seed: SimpleSeed
    Q: Subgroup
    blocks: list = field(default_factory=list)
    aut_module: FpModule = None
    out_module: FpModule = None

    @property
    def dim(self):
        return sum(b.dim for b in self.blocks)

    def block_for(self, alpha):
        for b in self.blocks:
            if b.w.alpha.key == alpha.key:
                return b
        raise KeyError("alpha is not a chosen representative")


def stv_value(seed, Q):
    fs, p = seed.fs, seed.V.p
    A = fs.aut_group(Q)
    blocks, offset = [], 0
    for alpha in fs.double_orbit_reps(seed.T, Q):
        alpha = alpha.with_target(Q)
        w = w_alpha(seed, alpha)
        reps = left_coset_reps(A, A.whole, w.K)
        ind = induce(w.module, A, w.K, reps)
        blocks.append(STVBlock(w, ind, reps, offset))
        offset += ind.dim
    mats = []
    for k in range(len(A.generators)):
        M = np.zeros((offset, offset), dtype=np.int64)
        for b in blocks:
            s = slice(b.offset, b.offset + b.dim)
            M[s, s] = b.induced.gens[k]
        mats.append(M)
    aut_module = FpModule(p, A, mats, offset)
    value = STVValue(seed, Q, blocks, aut_module, to_out_module(fs, Q, aut_module))
    expected = sum(b.index * b.w.dim for b in blocks)
    if value.dim != expected:
        raise AxiomViolation("induced dimension bookkeeping fails", (Q.order,))
    return value


def stv_iso(src, dst, beta):
    """Matrix of ``iso(beta): S_{T,V}(Q) -> S_{T,V}(Q')`` for an F-isomorphism ``beta``.

    ``src`` and ``dst`` are the :class:`STVValue` of ``Q = beta.source`` and
    ``Q' = beta.target``.  The basis vector ``r (x) (alpha (x) v)`` is sent to
    ``(beta r alpha) (x) v``, rewritten as ``r' k' (x) (alpha' (x) theta v)``.
    """
    seed = src.seed
    fs, p = seed.fs, seed.V.p
    Q2 = dst.Q
    A2 = fs.aut_group(Q2)
    out = np.zeros((dst.dim, src.dim), dtype=np.int64)
    target_images = []
    for b2 in dst.blocks:
        target_images.append((b2, b2.w.U.elements))
    for b in src.blocks:
        d = b.w.dim
        for i, r in enumerate(b.reps):
            phi_r = aut_element(fs, src.Q, r)
            gamma = beta.compose(phi_r.compose(b.w.alpha)).with_target(Q2)
            image = gamma.image.elements
            hit = None
            for b2, U2 in target_images:
                for a2 in range(A2.order):
                    psi = aut_element(fs, Q2, a2)
                    if frozenset(psi.images[u] for u in U2) == image:
                        hit = (b2, a2, psi)
                        break
                if hit:
                    break
            if hit is None:
                raise AxiomViolation("beta alpha lies in no chosen double orbit", (Q2.order,))
            b2, a2, psi = hit
            psi_inv = psi.inverse().with_target(Q2)
            back = _inverse_on_image(b2.w.alpha)
            theta = GroupHom(seed.T, seed.T,
                             {t: back[psi_inv.images[gamma.images[t]]] for t in seed.T.elements})
            Vt = seed.theta_matrix(theta)
            j = next(jj for jj, r2 in enumerate(b2.reps)
                     if A2.mul(A2.inv(r2), a2) in b2.w.K.elements)
            k2 = A2.mul(A2.inv(b2.reps[j]), a2)
            Wk = b2.w.module.matrix_of(A2.elements[k2])
            for c in range(d):
                u = Vt @ b.w.basis[c] % p
                coords = Wk @ b2.w.coords(u) % p
                row = b2.offset + j * b2.w.dim
                out[row:row + b2.w.dim, b.offset + i * d + c] = coords
    return out


def check_stv_iso(src, dst, beta, back=None):
    """Intertwining ``iso(beta) phi = (beta phi beta^-1) iso(beta)`` on generators
    and, when ``back`` (the value at ``beta.source`` reached again) is given,
    invertibility.  Returns the number of checks."""
    fs, p = src.seed.fs, src.seed.V.p
    A1 = fs.aut_group(src.Q)
    M = stv_iso(src, dst, beta)
    binv = beta.inverse().with_target(src.Q)
    n = 0
    for a in A1.generator_indices:
        phi = aut_element(fs, src.Q, a)
        conj = beta.compose(phi.compose(binv)).with_target(dst.Q)
        lhs = M @ src.aut_module.matrix(a) % p
        rhs = dst.aut_module.matrix(aut_index(fs, conj)) @ M % p
        n += 1
        if not np.array_equal(lhs, rhs):
            raise AxiomViolation("iso(beta) does not intertwine", (src.Q.order, a))
    M2 = stv_iso(dst, src, binv)
    n += 1
    if np.any((M2 @ M - np.eye(src.dim, dtype=np.int64)) % p):
        raise AxiomViolation("iso(beta^-1) iso(beta) != id", (src.Q.order,))
    return n


def check_q_trivial(value):
    fs = value.seed.fs
    eye = np.eye(value.dim, dtype=np.int64)
    return all(np.array_equal(value.aut_module.matrix(i), eye)
               for i in fs.inn_subgroup(value.Q).elements)


# -- seeds from cohomology -----------------------------------------------------------


def cohomology_seeds(fs, coh, T, j):
    """``(T, V)`` for each ``Out_F(T)``-composition factor ``V`` of ``H^j(T)``."""
    M = to_out_module(fs, T, cohomology_module(fs, coh, T, j))
    out = []
    for k, (V, mult) in enumerate(composition_factors(M)):
        out.append((SimpleSeed(fs, T, V, label=f"factor{k}"), mult))
    return out


def _class_index(fs, P):
    for i, cls in enumerate(fs.classes):
        if cls[0] == P:
            return i
    return fs.classes.index(next(c for c in fs.classes if P in c))


def verify_zero_blocks(fs, j, coh=None):
    """Every ``(Q, alpha)`` in the collection built from ``B`` gives a zero block."""
    coh = coh or Cohomology(fs.S, fs.p, max(j, 1))
    rows, violations = [], []
    for T in fs.noncentric_representatives:
        collection = fs.set_Q(T)
        for seed, _mult in cohomology_seeds(fs, coh, T, j):
            for Q, alpha, B, beta in collection:
                w = w_alpha(seed, alpha.with_target(Q))
                row = {"T": _class_index(fs, T), "T_order": T.order, "V_dim": seed.V.dim,
                       "V": seed.label, "Q": _class_index(fs, Q), "Q_order": Q.order,
                       "alpha": list(alpha.images[t] for t in T.sorted),
                       "B_order": B.order, "block_dim": w.dim * len(left_coset_reps(
                           fs.aut_group(Q), fs.aut_group(Q).whole, w.K))}
                rows.append(row)
                if row["block_dim"]:
                    violations.append(row)
    return {"j": j, "checked": rows, "violations": violations, "pass": not violations}


def verify_lambda_pruning(fs, j, mmax, coh=None, memory_bound=None):
    """``Lambda^m(Out_F(Q), S_{T,V}(Q)) = 0`` for ``1 <= m <= mmax`` and centric ``Q``."""
    from .limits import lambda_, radical_chain_criterion

    coh = coh or Cohomology(fs.S, fs.p, max(j, 1))
    rows, violations = [], []
    for T in fs.noncentric_representatives:
        for seed, _mult in cohomology_seeds(fs, coh, T, j):
            for Q in fs.centric_representatives:
                value = stv_value(seed, Q)
                if not check_q_trivial(value):
                    raise AxiomViolation("Q acts nontrivially on S_{T,V}(Q)", (Q.order,))
                O, _ = fs.out_group(Q)
                res = lambda_(O, fs.p, value.out_module, mmax, memory_bound=memory_bound)
                crit = [radical_chain_criterion(O, fs.p, value.out_module, m)
                        for m in range(1, mmax + 1)]
                row = {"T": _class_index(fs, T), "V": seed.label, "V_dim": seed.V.dim,
                       "Q": _class_index(fs, Q), "Q_order": Q.order, "dim": value.dim,
                       "lambda": res.dims, "route": res.route, "criterion": crit}
                rows.append(row)
                if any(res.dims[1:]):
                    violations.append(row)
                for m, ok in enumerate(crit, start=1):
                    if ok and res.dims[m]:
                        violations.append(dict(row, criterion_failure=m))
    return {"j": j, "mmax": mmax, "checked": rows, "violations": violations,
            "pass": not violations}
