"""Higher limits of contravariant F_p-linear functors on finite EI categories.

Two engines compute ``lim^i``:

* ``bar``: the normalized cochain complex over identity-free chains;
* ``resolution``: ``Ext^i(constant, F)`` from a projective resolution of the
  constant functor by representable functors ``k Hom(-, x)`` (Yoneda gives
  ``Hom(k Hom(-, x), F) = F(x)``).

Both are exact over F_p.  ``auto`` uses the bar complex unless its predicted
size exceeds the memory bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .category import FiniteCategory
from .exceptions import (
    DimensionMismatch,
    MemoryBoundExceeded,
    OrderingViolation,
)
from .fplinalg import (
    Echelon,
    fixed_points,
    gf2_rank_dense,
    kernel,
    rank,
    relative_trace,
    sparse_rank,
)
from .groups import (
    Subgroup,
    conjugacy_classes_of_subgroups,
    op_core,
    radical_p_chains,
    subgroups,
)

DEFAULT_MEMORY_BOUND = 20_000_000
AUTO_BAR_LIMIT = 2_000_000
DENSE_LIMIT = 6_000_000


# -- functors --------------------------------------------------------------------


@dataclass
class LinearFunctor:
    """Contravariant functor: morphism ``f: x -> y`` gives ``maps[f]: F(y) -> F(x)``."""

    category: FiniteCategory
    dims: list
    maps: dict
    p: int
    name: str = ""

    def matrix(self, f):
        m = self.category.morphisms[f]
        M = self.maps.get(f)
        if M is None:
            return np.zeros((self.dims[m.source], self.dims[m.target]), dtype=np.int64)
        return M

    def check(self):
        """Shapes, identities and ``F(g o f) = F(f) F(g)``; returns a list of problems."""
        cat, p, out = self.category, self.p, []
        for f, m in enumerate(cat.morphisms):
            if self.matrix(f).shape != (self.dims[m.source], self.dims[m.target]):
                out.append(("shape", f))
        for x, e in enumerate(cat.identities):
            if not np.array_equal(self.matrix(e) % p, np.eye(self.dims[x], dtype=np.int64)):
                out.append(("identity", x))
        for (g, f), gf in cat.comp.items():
            if not np.array_equal(self.matrix(gf) % p, self.matrix(f) @ self.matrix(g) % p):
                out.append(("composition", g, f))
        return out

    def euler_terms(self, dims):
        return sum((-1) ** i * d for i, d in enumerate(dims))


def constant_functor(cat, p):
    dims = [1] * cat.n_objects
    maps = {f: np.ones((1, 1), dtype=np.int64) for f in range(len(cat.morphisms))}
    return LinearFunctor(cat, dims, maps, p, name="constant")


@dataclass
class LimitResult:
    dims: list
    imax: int
    engine: str = "bar"
    route: str = "direct"
    chain_counts: list = field(default_factory=list)

    def vanishes(self, lo=1):
        return all(d == 0 for d in self.dims[lo:])

    def to_json(self):
        return {"dims": list(self.dims), "imax": self.imax, "engine": self.engine,
                "route": self.route, "chain_counts": list(self.chain_counts)}


# -- rank helper ---------------------------------------------------------------------


def _rank_from_entries(nrows, ncols, r, c, v, p):
    """Rank over F_p of the matrix with entries summed at ``(r, c)``."""
    if nrows == 0 or ncols == 0 or len(r) == 0:
        return 0
    r, c, v = np.asarray(r), np.asarray(c), np.asarray(v) % p
    if nrows * ncols <= DENSE_LIMIT * (8 if p == 2 else 1):
        if p == 2:
            M = np.zeros((nrows, ncols), dtype=np.uint8)
            np.bitwise_xor.at(M, (r[v == 1], c[v == 1]), 1)
            return gf2_rank_dense(M)
        M = np.zeros((nrows, ncols), dtype=np.int64)
        np.add.at(M, (r, c), v)
        M %= p
        return rank(M.T if ncols > nrows else M, p)
    # sparse elimination on the shorter side
    if ncols < nrows:
        r, c = c, r
        nrows, ncols = ncols, nrows
    order = np.lexsort((c, r))
    r, c, v = r[order], c[order], v[order]
    rows = [dict() for _ in range(nrows)]
    for i, j, x in zip(r.tolist(), c.tolist(), v.tolist()):
        rows[i][j] = (rows[i].get(j, 0) + x) % p
    return sparse_rank(rows, p)


# -- bar engine ------------------------------------------------------------------------


def _chain_counts(cat, nmax):
    """``counts[n][x]`` = number of identity-free ``n``-chains starting at ``x``."""
    nonid = [[f for f in cat.morphisms_from(x) if not cat.is_identity(f)]
             for x in range(cat.n_objects)]
    counts = [[1] * cat.n_objects]
    for _ in range(nmax):
        prev = counts[-1]
        counts.append([sum(prev[cat.morphisms[f].target] for f in nonid[x])
                       for x in range(cat.n_objects)])
    return counts


def predict_bar_size(fun, imax):
    """Predicted storage of the coboundary ``C^imax -> C^{imax+1}`` and its elimination.

    Counts the assembled nonzeros plus ``min(rows, cols)^2`` for the worst-case
    fill-in of exact elimination on the shorter side.
    """
    cat, d = fun.category, fun.dims
    counts = _chain_counts(cat, imax + 1)
    n = imax + 1
    nnz = 0
    for x in range(cat.n_objects):
        for f in cat.morphisms_from(x):
            if cat.is_identity(f):
                continue
            y = cat.morphisms[f].target
            tails = counts[n - 1][y]
            nnz += tails * (d[x] * d[y] + (n + 1) * d[x])
    rows = sum(counts[n][x] * d[x] for x in range(cat.n_objects))
    cols = sum(counts[n - 1][x] * d[x] for x in range(cat.n_objects))
    return nnz + min(rows, cols) ** 2


def max_bar_degree(fun, imax, memory_bound=DEFAULT_MEMORY_BOUND):
    """Largest ``i <= imax`` for which the bar complex fits, or ``-1``."""
    best = -1
    for n in range(imax + 1):
        if predict_bar_size(fun, n) > memory_bound:
            break
        best = n
    return best


def _bar_chains(cat, nmax):
    nonid = [[f for f in cat.morphisms_from(x) if not cat.is_identity(f)]
             for x in range(cat.n_objects)]
    chains = [[(x,) for x in range(cat.n_objects)]]  # degree 0: objects
    first = []
    for x in range(cat.n_objects):
        first.extend((f,) for f in nonid[x])
    if nmax >= 1:
        chains.append(first)
    for _ in range(2, nmax + 1):
        nxt = []
        for ch in chains[-1]:
            y = cat.morphisms[ch[-1]].target
            nxt.extend(ch + (g,) for g in nonid[y])
        chains.append(nxt)
    return chains


def higher_limits_bar(fun, imax, memory_bound=DEFAULT_MEMORY_BOUND):
    cat, p, d = fun.category, fun.p, fun.dims
    for n in range(imax + 1):
        predicted = predict_bar_size(fun, n)
        if predicted > memory_bound:
            raise MemoryBoundExceeded(n + 1, predicted, memory_bound)
    chains = _bar_chains(cat, imax + 1)

    def source(ch, n):
        return ch[0] if n == 0 else cat.morphisms[ch[0]].source

    offsets = []
    for n, chs in enumerate(chains):
        off, table = 0, {}
        for ch in chs:
            table[ch] = off
            off += d[source(ch, n)]
        offsets.append((table, off))
    ranks = []
    for n in range(imax + 1):
        col_table, ncols = offsets[n]
        row_table, nrows = offsets[n + 1]
        R, C, V = [], [], []

        def put(r0, c0, block):
            if block.size == 0:
                return
            ii, jj = np.nonzero(block)
            R.append(ii + r0)
            C.append(jj + c0)
            V.append(block[ii, jj])

        for ch in chains[n + 1]:
            x0 = cat.morphisms[ch[0]].source
            r0 = row_table[ch]
            eye = np.eye(d[x0], dtype=np.int64)
            tail = (cat.morphisms[ch[0]].target,) if n == 0 else ch[1:]
            put(r0, col_table[tail], fun.matrix(ch[0]) % p)
            for i in range(1, n + 1):
                comp = cat.comp[(ch[i], ch[i - 1])]
                if cat.is_identity(comp):
                    continue
                merged = ch[: i - 1] + (comp,) + ch[i + 1 :]
                put(r0, col_table[merged], ((-1) ** i * eye) % p)
            head = (x0,) if n == 0 else ch[:-1]
            put(r0, col_table[head], ((-1) ** (n + 1) * eye) % p)
        if R:
            r, c, v = np.concatenate(R), np.concatenate(C), np.concatenate(V)
        else:
            r = c = v = np.zeros(0, dtype=np.int64)
        ranks.append(_rank_from_entries(nrows, ncols, r, c, v, p))
    dims = []
    for i in range(imax + 1):
        dims.append(offsets[i][1] - ranks[i] - (ranks[i - 1] if i else 0))
    return LimitResult(dims, imax, "bar", "direct", [len(c) for c in chains])


# -- resolution engine -------------------------------------------------------------------


class _Projective:
    """``sum_k k Hom(-, x_k)``; ``basis[y]`` lists ``(k, morphism y -> x_k)``."""

    def __init__(self, cat, tops):
        self.cat = cat
        self.tops = list(tops)
        self.basis = []
        self.pos = []
        for y in range(cat.n_objects):
            b = [(k, f) for k, x in enumerate(self.tops) for f in cat.homset(y, x)]
            self.basis.append(b)
            self.pos.append({kf: i for i, kf in enumerate(b)})
        self._idx = {}

    def dim(self, y):
        return len(self.basis[y])

    def index_map(self, g):
        """Basis index at ``y`` of ``h o g`` for each basis ``h`` at ``x`` (``g: y -> x``)."""
        if g not in self._idx:
            m = self.cat.morphisms[g]
            pos = self.pos[m.source]
            self._idx[g] = np.array([pos[(k, self.cat.comp[(h, g)])]
                                     for k, h in self.basis[m.target]], dtype=np.int64)
        return self._idx[g]

    def pull(self, vec, x, g):
        """``Pi(g)`` on a vector at ``x`` for ``g: y -> x``."""
        y = self.cat.morphisms[g].source
        return np.bincount(self.index_map(g), weights=vec, minlength=self.dim(y)).astype(np.int64)

    def pull_many(self, V, g):
        y = self.cat.morphisms[g].source
        out = np.zeros((V.shape[0], self.dim(y)), dtype=np.int64)
        np.add.at(out, (slice(None), self.index_map(g)), V)
        return out


CANDIDATES = 6


def _resolution_step(cat, prev, maps_prev, p):
    """Generators ``(tops, elems)`` of the kernel of ``prev -> previous term``.

    Objects are handled in order of decreasing in-degree; at each object the
    kernel is filled greedily, preferring (among a few candidates) vectors
    whose automorphism orbit spans the most.
    """
    kernels = [kernel(maps_prev[y], p) for y in range(cat.n_objects)]
    spans = [Echelon(prev.dim(y), p) for y in range(cat.n_objects)]
    tops, elems = [], []
    order = sorted(range(cat.n_objects), key=lambda y: -len(cat.morphisms_to(y)))
    into = {y: cat.morphisms_to(y) for y in range(cat.n_objects)}
    for y in order:
        K = kernels[y]
        autos = cat.homset(y, y)
        while spans[y].dim < K.shape[0]:
            reduced = (K - K[:, spans[y].pivots] @ spans[y].R) % p if spans[y].pivots else K
            cands = np.flatnonzero(np.any(reduced, axis=1))[:CANDIDATES]
            best, best_gain = None, -1
            for c in cands:
                v = K[c]
                gain = rank(np.vstack([prev.pull(v, y, g) for g in autos]) % p, p)
                if gain > best_gain:
                    best, best_gain = v, gain
            tops.append(y)
            elems.append(best % p)
            groups = {}
            for g in into[y]:
                z = cat.morphisms[g].source
                groups.setdefault(z, []).append(prev.pull(best, y, g))
            for z, rows in groups.items():
                spans[z].add_many(np.array(rows) % p)
    for y in range(cat.n_objects):
        if spans[y].dim != kernels[y].shape[0]:
            raise DimensionMismatch("generated subfunctor differs from the kernel")
    return tops, elems


def projective_resolution(cat, p, nmax):
    """Projective resolution of the constant functor up to degree ``nmax``.

    Returns a list of ``(Pi_n, tops_n, elems_n)`` where ``elems_n[k]`` is the
    image in ``Pi_{n-1}`` of the generator of the ``k``-th summand of ``Pi_n``
    (for ``n = 0`` the augmentation sends each generator to ``1``).
    """
    P0 = _Projective(cat, range(cat.n_objects))
    aug = []
    for y in range(cat.n_objects):
        aug.append(np.ones((1, P0.dim(y)), dtype=np.int64))
    out = [(P0, list(range(cat.n_objects)), None)]
    prev, maps = P0, aug
    for _ in range(1, nmax + 1):
        tops, elems = _resolution_step(cat, prev, maps, p)
        P = _Projective(cat, tops)
        maps = []
        for y in range(cat.n_objects):
            cols = [prev.pull(elems[k], tops[k], f) for k, f in P.basis[y]]
            M = np.array(cols, dtype=np.int64).reshape(len(cols), prev.dim(y)).T % p
            maps.append(M)
        out.append((P, tops, elems))
        prev = P
    return out


def higher_limits_resolution(fun, imax, resolution=None):
    cat, p = fun.category, fun.p
    if resolution is None:
        cache = cat.__dict__.setdefault("_resolutions", {})
        best = max((n for (q, n) in cache if q == p and n >= imax + 1), default=None)
        if best is None:
            cache[(p, imax + 1)] = projective_resolution(cat, p, imax + 1)
            best = imax + 1
        resolution = cache[(p, best)]
    res = resolution
    d = fun.dims
    cochain_dims = [sum(d[x] for x in tops) for _, tops, _ in res]
    ranks = []
    for n in range(1, imax + 2):
        P_prev, tops_prev, _ = res[n - 1]
        _, tops, elems = res[n]
        offs_prev = np.cumsum([0] + [d[x] for x in tops_prev])
        offs = np.cumsum([0] + [d[x] for x in tops])
        M = np.zeros((offs[-1], offs_prev[-1]), dtype=np.int64)
        for k, x in enumerate(tops):
            for i in np.flatnonzero(elems[k]):
                l, h = P_prev.basis[x][i]
                M[offs[k]:offs[k + 1], offs_prev[l]:offs_prev[l + 1]] += elems[k][i] * fun.matrix(h)
        ranks.append(rank(M % p, p) if M.size else 0)
    dims = [cochain_dims[i] - ranks[i] - (ranks[i - 1] if i else 0) for i in range(imax + 1)]
    return LimitResult(dims, imax, "resolution", "direct", [len(t) for _, t, _ in res])


def higher_limits(fun, imax, engine="auto", memory_bound=DEFAULT_MEMORY_BOUND):
    """``dim lim^i`` for ``0 <= i <= imax``.

    ``engine`` is ``"bar"``, ``"resolution"`` or ``"auto"``.  The automatic
    choice runs the bar complex only while its predicted size stays below
    both ``memory_bound`` and :data:`AUTO_BAR_LIMIT`; past that the sparse
    elimination is slow and the resolution engine wins.
    """
    if engine == "bar":
        return higher_limits_bar(fun, imax, memory_bound)
    if engine == "resolution":
        return higher_limits_resolution(fun, imax)
    if predict_bar_size(fun, imax) > min(memory_bound, AUTO_BAR_LIMIT):
        return higher_limits_resolution(fun, imax)
    return higher_limits_bar(fun, imax, memory_bound)


def lim0_stable_elements(fun):
    """Dimension and basis of the compatible families ``F(f) x_y = x_x``."""
    cat, p, d = fun.category, fun.p, fun.dims
    offs = np.cumsum([0] + list(d))
    rows = []
    for f, m in enumerate(cat.morphisms):
        if cat.is_identity(f):
            continue
        block = np.zeros((d[m.source], offs[-1]), dtype=np.int64)
        block[:, offs[m.target]:offs[m.target + 1]] += fun.matrix(f)
        block[:, offs[m.source]:offs[m.source + 1]] -= np.eye(d[m.source], dtype=np.int64)
        rows.append(block % p)
    if not rows:
        return int(offs[-1]), np.eye(int(offs[-1]), dtype=np.int64)
    K = kernel(np.vstack(rows), p)
    return K.shape[0], K


# -- atomic functors and filtrations -------------------------------------------------


def atomic_functor(cat, x, V_dim, aut_matrix, p):
    """Functor equal to ``V`` at ``x`` (automorphisms act by ``aut_matrix``), zero elsewhere."""
    dims = [0] * cat.n_objects
    dims[x] = V_dim
    maps = {f: aut_matrix(f) for f in cat.automorphisms(x)}
    return LinearFunctor(cat, dims, maps, p, name=f"atomic@{x}")


def atomic_filtration(fun, order=None):
    """Atomic subquotients of the filtration by initial segments of ``order``.

    Morphisms between distinct objects must go forward in ``order``;
    otherwise :class:`OrderingViolation` is raised.
    """
    cat = fun.category
    order = list(range(cat.n_objects)) if order is None else list(order)
    if sorted(order) != list(range(cat.n_objects)):
        raise OrderingViolation("order must list every object once")
    idx = {x: i for i, x in enumerate(order)}
    for f, m in enumerate(cat.morphisms):
        if m.source != m.target and idx[m.source] > idx[m.target]:
            raise OrderingViolation(f"morphism {f} goes from object {m.source} back to {m.target}")
    pieces = []
    for x in order:
        if fun.dims[x] == 0:
            continue
        pieces.append(atomic_functor(cat, x, fun.dims[x], fun.matrix, fun.p))
    return pieces


# -- Lambda functors -------------------------------------------------------------------


def p_orbit_category(G, p):
    """Skeleton of the ``p``-orbit category: objects are class representatives of
    ``p``-subgroups (the trivial one first); a morphism ``P -> Q`` is a coset
    ``gQ`` with ``g^-1 P g <= Q``.  Morphism data is the least coset element."""
    cache = G.__dict__.setdefault("_p_orbit_categories", {})
    if p in cache:
        return cache[p]
    classes = conjugacy_classes_of_subgroups(G, subgroups(G, p=p))
    reps = [cls[0] for cls in classes]
    reps.sort(key=Subgroup.key)
    cat = FiniteCategory(list(reps))
    ids = {}
    coset_of = []
    for Q in reps:
        table = {}
        for g in range(G.order):
            table[g] = min(G.mul(g, q) for q in Q.elements)
        coset_of.append(table)
    for i, P in enumerate(reps):
        for j, Q in enumerate(reps):
            seen = set()
            for g in range(G.order):
                c = coset_of[j][g]
                if c in seen:
                    continue
                ginv = G.inv(g)
                if all(G.conj(ginv, x) in Q.elements for x in P.generators):
                    seen.add(c)
                    ids[(i, j, c)] = cat.add_morphism(i, j, data=c)
    cat.identities = [ids[(i, i, coset_of[i][0])] for i in range(len(reps))]
    for (i, j, g), f in ids.items():
        for (j2, k, h), gm in ids.items():
            if j2 == j:
                cat.comp[(gm, f)] = ids[(i, k, coset_of[k][G.mul(g, h)])]
    cache[p] = cat
    return cat


def lambda_functor(G, p, M, cat=None):
    """Atomic functor ``F_M`` on the ``p``-orbit category with ``F_M(1) = M``."""
    cat = cat or p_orbit_category(G, p)
    return atomic_functor(cat, 0, M.dim,
                          lambda f: M.matrix(cat.morphisms[f].data), M.p)


def lambda_(G, p, M, mmax, engine="auto", memory_bound=DEFAULT_MEMORY_BOUND, fast=True):
    """``Lambda^m(G, M)`` for ``0 <= m <= mmax``."""
    if fast:
        if G.order % p:
            fixed = fixed_points(M).shape[0] if M.dim else 0
            return LimitResult([fixed] + [0] * mmax, mmax, "fast", "p'-group")
        if op_core(G, p).order > 1:
            return LimitResult([0] * (mmax + 1), mmax, "fast", "O_p nontrivial")
        if M.dim == 0:
            return LimitResult([0] * (mmax + 1), mmax, "fast", "zero module")
    fun = lambda_functor(G, p, M)
    res = higher_limits(fun, mmax, engine, memory_bound)
    res.route = "computed"
    return res


def radical_chain_criterion(G, p, M, m):
    """True if ``tr_1^N(M) = 0`` for the normalizer ``N`` of every radical
    ``p``-chain of length ``m`` starting at the trivial subgroup.

    When ``O_p(G) != 1`` the chains do not start at the trivial subgroup and
    the vanishing follows from the nontrivial ``p``-core instead; this
    returns True.
    """
    if M.dim == 0:
        return True
    if op_core(G, p).order > 1:
        return True
    for _chain, N in radical_p_chains(G, p, m):
        if relative_trace(M, G.trivial, N).shape[0]:
            return False
    return True


# -- functors from cohomology and the vanishing check --------------------------------------


def cohomology_functor(fs, coh, j, cat=None):
    """``H^j(-, F_p)`` on the centric orbit skeleton (contravariant)."""
    cat = cat or fs.orbit_category(centric_only=True)
    dims = [coh.dim(P, j) for P in cat.objects]
    maps = {f: coh.hom_map(m.data, j) for f, m in enumerate(cat.morphisms)}
    return LinearFunctor(cat, dims, maps, fs.p, name=f"H^{j}")


def verify_vanishing(fs, j, imax, coh=None, memory_bound=DEFAULT_MEMORY_BOUND,
                   cross_check=True):
    """Vanishing of ``lim^i H^j`` for ``1 <= i <= imax`` by two routes.

    ``direct``: higher limits of ``H^j`` on the centric orbit skeleton (bar
    complex, or the resolution engine above the memory bound; both are run
    and compared when the bar complex fits and ``cross_check`` is set).
    ``structural``: ``Lambda^m(Out_F(Q), S_{T,V}(Q)) = 0`` for every
    non-centric ``T``, composition factor ``V`` of ``H^j(T)`` and centric
    ``Q``, plus the zero-block check on the collection built from ``B``.
    """
    from .cohomology import Cohomology
    from .mackey_simple import verify_zero_blocks, verify_lambda_pruning

    coh = coh or Cohomology(fs.S, fs.p, max(j, 1))
    fun = cohomology_functor(fs, coh, j)
    problems = fun.check()
    direct = {"functor_problems": [list(map(str, x)) for x in problems]}
    top = max_bar_degree(fun, imax, memory_bound)
    bar = higher_limits_bar(fun, top, memory_bound) if top >= 0 else None
    direct["bar"] = bar.to_json() if bar else {"dims": []}
    if top < imax:
        direct["bar"]["uncomputed_degrees"] = list(range(top + 1, imax + 1))
        direct["bar"]["predicted"] = predict_bar_size(fun, top + 1)
        direct["bar"]["bound"] = memory_bound
    resolution = None
    if top < imax or cross_check:
        resolution = higher_limits_resolution(fun, imax)
        direct["resolution"] = resolution.to_json()
    primary = bar if top == imax else resolution
    direct["dims"] = list(primary.dims)
    direct["engine"] = "bar" if top == imax else (
        "resolution" if top < 0 else f"bar (i <= {top}) + resolution")
    direct["engines_agree"] = (bar is None or resolution is None
                               or bar.dims == resolution.dims[: top + 1])
    stable_dim, _ = lim0_stable_elements(fun)
    direct["lim0_stable_elements"] = stable_dim
    direct["lim0_consistent"] = stable_dim == primary.dims[0]
    direct["pass"] = (primary.vanishes(1) and direct["engines_agree"]
                      and direct["lim0_consistent"] and not problems)

    blocks = verify_zero_blocks(fs, j, coh)
    pruning = verify_lambda_pruning(fs, j, imax, coh, memory_bound)
    structural = {"zero_blocks": {"checked": len(blocks["checked"]),
                                  "violations": blocks["violations"]},
                  "lambda": pruning["checked"],
                  "violations": pruning["violations"],
                  "pass": blocks["pass"] and pruning["pass"]}
    return {
        "system": fs.name, "p": fs.p, "j": j, "imax": imax,
        "in_range": j <= fs.p - 2,
        "direct": direct,
        "structural": structural,
        "agree": direct["pass"] == structural["pass"],
        "pass": direct["pass"] and structural["pass"],
    }
