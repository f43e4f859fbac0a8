"""Exact linear algebra over F_p and finite-group modules over F_p.

Vectors are 1-d ``int64`` numpy arrays with entries in ``[0, p)``.  Module
elements are column vectors: ``g . v = matrix(g) @ v``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ActionUndefined,
    DimensionBoundExceeded,
    DimensionMismatch,
    NotASubgroup,
)
from .groups import left_coset_reps

DEFAULT_DIM_BOUND = 200
EXHAUSTIVE_POINT_LIMIT = 1000
SPARSE_DENSITY_THRESHOLD = 0.25


def _as_array(A, p):
    return np.asarray(A, dtype=np.int64) % p


def rref(A, p):
    """Reduced row echelon form; returns ``(R, pivots)`` with zero rows dropped.

    Pivots are taken at the least column index, and within a column at the
    least row index.
    """
    A = _as_array(A, p).copy()
    if A.ndim != 2:
        raise DimensionMismatch("expected a 2-d matrix")
    m, n = A.shape
    r, pivots = 0, []
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


BLOCKED_RANK_SIZE = 200_000


def rank(A, p):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    if A.size > BLOCKED_RANK_SIZE and min(A.shape) > 64:
        if p == 2:
            return gf2_rank_dense(A % 2)
        return _rank_blocked(A, p)
    return len(rref(A, p)[1])


def kernel(A, p):
    """Basis (as rows) of ``{x : A x = 0}``."""
    A = _as_array(A, p)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for r, c in enumerate(piv):
            out[k, c] = -R[r, f] % p
    return out


def solve(A, b, p):
    """One solution of ``A x = b`` or ``None``."""
    A = _as_array(A, p)
    b = _as_array(b, p)
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"{A.shape} vs {b.shape}")
    sol = Solver(A, p).solve(b)
    return sol


def inverse(A, p):
    A = _as_array(A, p)
    n = A.shape[0]
    R, piv = rref(np.hstack([A, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise DimensionMismatch("matrix is singular")
    return R[:n, n:]


class Solver:
    """Precomputed elimination of ``A`` for repeated solves of ``A x = b``."""

    def __init__(self, A, p):
        self.p = p
        A = _as_array(A, p)
        self.shape = A.shape
        m, n = A.shape
        R, piv = rref(np.hstack([A, np.eye(m, dtype=np.int64)]), p)
        self.pivots = [c for c in piv if c < n]
        r = len(self.pivots)
        self.rank = r
        # E A = [R_top; 0] with E = R[:, n:]
        self._E = R[:, n:]
        self._R = R[:r, :n]
        # Rows of E beyond rank come from the zero rows of the echelon form;
        # the full transform needs those too to detect inconsistency.
        full_E = np.zeros((m, m), dtype=np.int64)
        full_E[: R.shape[0]] = R[:, n:]
        self._consistency = full_E[r : R.shape[0]]

    def solve(self, b):
        """Solution with free variables set to zero, or ``None``."""
        out = self.solve_many(np.asarray(b).reshape(-1, 1))
        return None if out is None else out[:, 0]

    def solve_many(self, B):
        p = self.p
        B = _as_array(B, p)
        if B.shape[0] != self.shape[0]:
            raise DimensionMismatch(f"rhs has {B.shape[0]} rows, expected {self.shape[0]}")
        EB = self._E @ B % p
        if self._consistency.size and np.any(self._consistency @ B % p):
            return None
        if EB.shape[0] > self.rank and np.any(EB[self.rank :]):
            return None
        X = np.zeros((self.shape[1], B.shape[1]), dtype=np.int64)
        X[self.pivots] = EB[: self.rank]
        return X

    def kernel(self):
        n = self.shape[1]
        free = [c for c in range(n) if c not in set(self.pivots)]
        out = np.zeros((len(free), n), dtype=np.int64)
        for k, f in enumerate(free):
            out[k, f] = 1
            for r, c in enumerate(self.pivots):
                out[k, c] = -self._R[r, f] % self.p
        return out


class Echelon:
    """An incrementally grown subspace kept in reduced row echelon form."""

    def __init__(self, n, p, rows=None):
        self.n = n
        self.p = p
        self.R = np.zeros((0, n), dtype=np.int64)
        self.pivots = []
        if rows is not None:
            for v in np.asarray(rows).reshape(-1, n):
                self.add(v)

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, v):
        v = _as_array(v, self.p)
        if self.pivots:
            v = (v - v[self.pivots] @ self.R) % self.p
        return v

    def add(self, v):
        """Add ``v``; return its reduced form if it was new, else ``None``."""
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return None
        c = int(nz[0])
        v = v * pow(int(v[c]), -1, self.p) % self.p
        if self.pivots:
            col = self.R[:, c].copy()
            self.R = (self.R - np.outer(col, v)) % self.p
        self.R = np.vstack([self.R, v])
        self.pivots.append(c)
        return v

    def add_many(self, rows):
        """Add all ``rows`` at once; returns the new dimension."""
        rows = _as_array(rows, self.p).reshape(-1, self.n)
        if self.pivots:
            rows = (rows - rows[:, self.pivots] @ self.R) % self.p
        rows = rows[np.any(rows, axis=1)]
        if rows.shape[0]:
            self.R, self.pivots = rref(np.vstack([self.R, rows]), self.p)
        return self.dim

    def contains(self, v):
        return not np.any(self.reduce(v))

    def coords(self, v):
        """Coordinates of ``v`` in the current basis (``v`` must lie in the span)."""
        v = _as_array(v, self.p)
        return v[self.pivots] if self.pivots else np.zeros(0, dtype=np.int64)

    def basis(self):
        """Basis rows sorted by pivot column."""
        order = np.argsort(self.pivots)
        return self.R[order] if self.pivots else self.R.copy()

    def copy(self):
        out = Echelon(self.n, self.p)
        out.R = self.R.copy()
        out.pivots = list(self.pivots)
        return out


def row_space(rows, n, p):
    """Echelon basis of the span of ``rows``."""
    rows = _as_array(rows, p).reshape(-1, n)
    if rows.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    return rref(rows, p)[0]


class Subquotient:
    """Coordinates on ``Z / B`` for subspaces ``B <= Z`` of ``F_p^n``.

    ``basis`` holds representatives (rows) of a basis of the quotient,
    chosen as the earliest ``Z``-basis vectors independent modulo ``B``.
    """

    def __init__(self, Z, B, n, p):
        self.p = p
        self.n = n
        ech = Echelon(n, p, B)
        self.dim_b = ech.dim
        reps = []
        for z in _as_array(Z, p).reshape(-1, n):
            if ech.add(z) is not None:
                reps.append(z)
        self.basis = np.array(reps, dtype=np.int64).reshape(-1, n)
        self.dim = len(reps)
        stacked = np.vstack([row_space(B, n, p).reshape(-1, n), self.basis]) if n else np.zeros((0, 0))
        self._stack = stacked
        if stacked.shape[0]:
            self._solver = Solver(stacked.T, p)
        else:
            self._solver = None

    def coords(self, v):
        """Quotient coordinates of ``v`` (must lie in ``Z``)."""
        return self.coords_many(np.asarray(v).reshape(1, -1))[0]

    def coords_many(self, V):
        V = _as_array(V, self.p).reshape(-1, self.n)
        if self.dim == 0:
            return np.zeros((V.shape[0], 0), dtype=np.int64)
        X = self._solver.solve_many(V.T)
        if X is None:
            raise DimensionMismatch("vector not in the cocycle space")
        return X[self._stack.shape[0] - self.dim :].T % self.p


@dataclass
class FpMatrix:
    """Matrix over F_p kept dense or sparse depending on density."""

    p: int
    rows: int
    cols: int
    dense: np.ndarray | None = None
    entries: dict = field(default_factory=dict)

    @classmethod
    def from_dense(cls, A, p):
        A = _as_array(A, p)
        m, n = A.shape
        nnz = int(np.count_nonzero(A))
        if m * n and nnz / (m * n) < SPARSE_DENSITY_THRESHOLD:
            r, c = np.nonzero(A)
            return cls(p, m, n, None, {(int(i), int(j)): int(A[i, j]) for i, j in zip(r, c)})
        return cls(p, m, n, A, {})

    @classmethod
    def from_sparse(cls, entries, rows, cols, p):
        ent = {}
        for (i, j), v in entries.items():
            v %= p
            if v:
                ent[(i, j)] = v
        if rows * cols and len(ent) / (rows * cols) >= SPARSE_DENSITY_THRESHOLD:
            return cls(p, rows, cols, None, ent).densify()
        return cls(p, rows, cols, None, ent)

    @property
    def is_sparse(self):
        return self.dense is None

    @property
    def nnz(self):
        return len(self.entries) if self.is_sparse else int(np.count_nonzero(self.dense))

    def to_dense(self):
        if self.dense is not None:
            return self.dense
        A = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (i, j), v in self.entries.items():
            A[i, j] = v
        return A

    def densify(self):
        return FpMatrix(self.p, self.rows, self.cols, self.to_dense(), {})

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        if self.is_sparse:
            for (i, j), v in self.entries.items():
                out[i][j] = v
        else:
            for i, j in zip(*np.nonzero(self.dense)):
                out[i][int(j)] = int(self.dense[i, j])
        return out

    def rank(self):
        if self.rows == 0 or self.cols == 0:
            return 0
        if self.is_sparse:
            return sparse_rank(self.row_dicts(), self.p)
        return rank(self.dense, self.p)


def sparse_rank(rows, p):
    """Rank of a matrix given as a list of ``{col: value}`` rows.

    Incremental elimination; each pivot row is keyed by its least column.
    For ``p = 2`` rows are packed into Python integers.
    """
    if p == 2:
        return gf2_rank([sum(1 << c for c, v in r.items() if v % 2) for r in rows])
    pivots = {}
    rk = 0
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = pow(row[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in row.items()}
                rk += 1
                break
            f = row[c]
            for k, v in piv.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return rk


def gf2_rank(rows):
    """Rank over F_2 of rows packed as integer bitsets."""
    pivots = {}
    rk = 0
    for r in rows:
        while r:
            low = r & -r
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = r
                rk += 1
                break
            r ^= piv
    return rk


def gf2_rank_dense(M):
    """Rank over F_2 of a dense 0/1 matrix.

    Rows are packed into 64-bit words and eliminated eight columns at a time:
    the pivots of a column block give a 256-entry table of row combinations,
    and every remaining row is cleared on that block by one table lookup.
    """
    M = np.asarray(M, dtype=np.uint8) & 1
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return 0
    if cols > rows:
        M = M.T
        rows, cols = cols, rows
    nwords = (cols + 63) // 64
    padded = np.zeros((rows, nwords * 64), dtype=np.uint8)
    padded[:, :cols] = M
    A = np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
    bit_of = (np.arange(256)[:, None] >> np.arange(8)[None, :]) & 1
    rk = 0
    first_word = 0
    for c0 in range(0, cols, 8):
        if A.shape[0] == 0:
            break
        w, shift = divmod(c0, 64)
        w -= first_word
        vals = ((A[:, w] >> np.uint64(shift)) & np.uint64(0xFF)).astype(np.int64)
        uniq, first = np.unique(vals, return_index=True)
        basis = {}
        chosen = []
        for u, i in zip(uniq.tolist(), first.tolist()):
            if u == 0:
                continue
            x, vec = u, A[i].copy()
            while x:
                hb = x.bit_length() - 1
                if hb not in basis:
                    break
                bx, bvec = basis[hb]
                x ^= bx
                vec ^= bvec
            if x:
                basis[x.bit_length() - 1] = (x, vec)
                chosen.append(i)
        if basis:
            # reduce so each pivot bit appears in exactly one basis vector
            for hb in sorted(basis):
                x, vec = basis[hb]
                for other in basis:
                    ox, ovec = basis[other]
                    if other != hb and (ox >> hb) & 1:
                        basis[other] = (ox ^ x, ovec ^ vec)
            table = np.zeros((256, A.shape[1]), dtype=np.uint64)
            for hb, (_x, vec) in basis.items():
                table[bit_of[:, hb] == 1] ^= vec
            A ^= table[vals]
            A = np.delete(A, chosen, axis=0)
            rk += len(basis)
        if (c0 + 8) % 64 == 0 and A.shape[1] > 1:
            A = np.ascontiguousarray(A[:, 1:])
            first_word += 1
    return rk


def _rank_blocked(A, p, block=128):
    """Rank over odd ``p`` by reducing row blocks against the echelon basis
    with one floating-point product per block (exact below the mantissa)."""
    A = np.asarray(A, dtype=np.int64) % p
    if A.shape[1] > A.shape[0]:
        A = A.T
    n = A.shape[1]
    bound = n * (p - 1) ** 2 + p
    if bound < 2**24:
        dtype = np.float32
    elif bound < 2**53:
        dtype = np.float64
    else:
        return len(rref(A, p)[1])
    E = np.zeros((0, n), dtype=dtype)
    piv = []
    for s in range(0, A.shape[0], block):
        B = A[s:s + block].astype(dtype)
        if piv:
            B = np.mod(B - B[:, piv] @ E, p)
        R, new = rref(B.astype(np.int64), p)
        if not new:
            continue
        R = R.astype(dtype)
        if piv:
            E = np.mod(E - E[:, new] @ R, p)
        E = np.vstack([E, R])
        piv += new
        if len(piv) == n:
            break
    return len(piv)


class FpModule:
    """A finite-dimensional ``F_p G`` module for a :class:`PermGroup` ``G``.

    ``gens`` lists the action matrices of ``G.generators`` in order.
    """

    def __init__(self, p, group, gens, dim=None, name=None):
        self.p = p
        self.group = group
        self.gens = [_as_array(m, p) for m in gens]
        if dim is None:
            dim = self.gens[0].shape[0] if self.gens else 0
        self.dim = int(dim)
        if not self.gens:
            self.gens = [np.eye(self.dim, dtype=np.int64) for _ in group.generators]
        if len(self.gens) != len(group.generators):
            raise DimensionMismatch("one matrix per group generator required")
        for m in self.gens:
            if m.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"action matrix of shape {m.shape}, dim {self.dim}")
        self.name = name
        self._mats = {}

    def __repr__(self):
        return f"<FpModule p={self.p} dim={self.dim} over {self.group!r}>"

    @classmethod
    def trivial(cls, p, group, dim=1):
        return cls(p, group, [np.eye(dim, dtype=np.int64) for _ in group.generators], dim)

    @classmethod
    def from_function(cls, p, group, dim, func):
        """Build from ``func(perm) -> matrix`` evaluated on the generators."""
        return cls(p, group, [func(g) for g in group.generators], dim)

    def matrix(self, i):
        """Action matrix of the element with index ``i`` in ``self.group``."""
        m = self._mats.get(i)
        if m is not None:
            return m
        if i == 0:
            m = np.eye(self.dim, dtype=np.int64)
        else:
            j, k = self.group.parent[i]
            m = self.gens[k] @ self.matrix(j) % self.p
        self._mats[i] = m
        return m

    def matrix_of(self, perm):
        try:
            i = self.group.index(perm)
        except NotASubgroup:
            raise ActionUndefined(f"{perm} is not in the acting group") from None
        return self.matrix(i)

    def check_action(self):
        """Verify the matrices define a representation on all element pairs of generators."""
        G = self.group
        for i in range(G.order):
            for k, gi in enumerate(G.generator_indices):
                lhs = self.matrix(G.mul(gi, i))
                rhs = self.gens[k] @ self.matrix(i) % self.p
                if not np.array_equal(lhs, rhs):
                    return False
        return True

    def sub(self, basis):
        """Submodule spanned by the (invariant) echelon rows ``basis``."""
        basis = _as_array(basis, self.p).reshape(-1, self.dim)
        k = basis.shape[0]
        if k == 0:
            return FpModule(self.p, self.group, [np.zeros((0, 0), dtype=np.int64)] * len(self.gens), 0)
        solver = Solver(basis.T, self.p)
        mats = []
        for A in self.gens:
            X = solver.solve_many(A @ basis.T % self.p)
            if X is None:
                raise DimensionMismatch("subspace is not invariant")
            mats.append(X)
        return FpModule(self.p, self.group, mats, k)

    def quotient(self, basis):
        """Quotient by the invariant subspace spanned by ``basis``."""
        ech = Echelon(self.dim, self.p, basis)
        piv = set(ech.pivots)
        comp = [c for c in range(self.dim) if c not in piv]
        mats = []
        for A in self.gens:
            cols = []
            for c in comp:
                cols.append(ech.reduce(A[:, c])[comp])
            mats.append(np.array(cols, dtype=np.int64).reshape(len(comp), len(comp)).T)
        return FpModule(self.p, self.group, mats, len(comp))

    def direct_sum(self, other):
        mats = []
        for A, B in zip(self.gens, other.gens):
            M = np.zeros((self.dim + other.dim,) * 2, dtype=np.int64)
            M[: self.dim, : self.dim] = A
            M[self.dim :, self.dim :] = B
            mats.append(M)
        return FpModule(self.p, self.group, mats, self.dim + other.dim)

    def to_json(self):
        return {
            "p": self.p,
            "dim": self.dim,
            "action": {f"g{k}": m.tolist() for k, m in enumerate(self.gens)},
        }

    @classmethod
    def from_json(cls, data, group):
        mats = [data["action"][f"g{k}"] for k in range(len(group.generators))]
        return cls(data["p"], group, [np.array(m, dtype=np.int64).reshape(data["dim"], data["dim"])
                                      for m in mats], data["dim"])


def fixed_points(V, H=None, elements=None):
    """Basis rows of ``V^H``.  ``H`` is a Subgroup of ``V.group``; or pass
    group element indices via ``elements``."""
    if elements is None:
        elements = H.generators if H is not None else V.group.generator_indices
    blocks = [V.matrix(h) - np.eye(V.dim, dtype=np.int64) for h in elements if h != 0]
    if not blocks:
        return np.eye(V.dim, dtype=np.int64)
    return kernel(np.vstack(blocks), V.p)


def relative_trace(V, H, K=None):
    """Basis of ``tr_H^K(V^H)`` (``K`` defaults to the whole acting group)."""
    G = V.group
    K = K if K is not None else G.whole
    if not H.elements <= K.elements:
        raise NotASubgroup("H must be contained in K")
    fixed = fixed_points(V, H)
    if fixed.shape[0] == 0:
        return fixed
    T = np.zeros((V.dim, V.dim), dtype=np.int64)
    for x in left_coset_reps(G, K, H):
        T = (T + V.matrix(x)) % V.p
    return row_space(fixed @ T.T % V.p, V.dim, V.p)


def spin(V, vectors):
    """Echelon basis of the smallest submodule containing ``vectors``."""
    ech = Echelon(V.dim, V.p)
    queue = []
    for v in _as_array(vectors, V.p).reshape(-1, V.dim):
        w = ech.add(v)
        if w is not None:
            queue.append(w)
    while queue:
        w = queue.pop()
        for A in V.gens:
            u = ech.add(A @ w % V.p)
            if u is not None:
                queue.append(u)
                if ech.dim == V.dim:
                    return ech.basis()
    return ech.basis()


def _transpose_module(V):
    return FpModule(V.p, V.group, [A.T.copy() for A in V.gens], V.dim)


def _projective_points(d, p):
    """Nonzero vectors whose first nonzero entry is 1, in lexicographic order."""
    for lead in range(d):
        for tail in np.ndindex(*([p] * (d - lead - 1))):
            v = np.zeros(d, dtype=np.int64)
            v[lead] = 1
            v[lead + 1 :] = tail
            yield v


def find_submodule(V, rng):
    """A proper nonzero submodule (echelon basis) or ``None`` if ``V`` is simple."""
    d, p = V.dim, V.p
    if d <= 1:
        return None
    if (p**d - 1) // (p - 1) <= EXHAUSTIVE_POINT_LIMIT:
        for v in _projective_points(d, p):
            U = spin(V, v)
            if U.shape[0] < d:
                return U
        return None
    return _meataxe(V, rng)


def _charpoly_factors(A, p):
    from sympy import Poly, symbols
    from sympy.polys.domains import GF
    from sympy.polys.matrices import DomainMatrix

    dom = GF(p)
    M = DomainMatrix([[dom(int(x)) for x in row] for row in A.tolist()], A.shape, dom)
    coeffs = [int(c) % p for c in M.charpoly()]
    x = symbols("x")
    _, factors = Poly(coeffs, x, modulus=p).factor_list()
    out = []
    for f, _mult in factors:
        out.append([int(c) % p for c in f.all_coeffs()])
    out.sort(key=lambda c: (len(c), c))
    return out


def _poly_at_matrix(coeffs, A, p):
    d = A.shape[0]
    out = np.zeros((d, d), dtype=np.int64)
    eye = np.eye(d, dtype=np.int64)
    for c in coeffs:
        out = (out @ A + c * eye) % p
    return out


def _meataxe(V, rng, tries=200):
    """Holt-Rees irreducibility test; returns a proper submodule or ``None``."""
    d, p = V.dim, V.p
    for _ in range(3):
        U = spin(V, rng.integers(p, size=d))
        if 0 < U.shape[0] < d:
            return U
    algebra = list(V.gens)
    VT = _transpose_module(V)
    for _ in range(tries):
        a, b = rng.integers(len(algebra), size=2)
        algebra.append(algebra[a] @ algebra[b] % p)
        coeffs = rng.integers(p, size=len(algebra))
        theta = sum(int(c) * X for c, X in zip(coeffs, algebra)) % p
        for f in _charpoly_factors(theta, p):
            N = kernel(_poly_at_matrix(f, theta, p), p)
            U = spin(V, N[0])
            if U.shape[0] < d:
                return U
            if N.shape[0] != len(f) - 1:
                continue
            NT = kernel(_poly_at_matrix(f, theta.T.copy(), p), p)
            UT = spin(VT, NT[0])
            if UT.shape[0] < d:
                return row_space(kernel(UT, p), d, p)
            return None
    raise RuntimeError("MeatAxe did not find a conclusive algebra element")


def is_simple(V, seed=0):
    return V.dim > 0 and find_submodule(V, np.random.default_rng(seed)) is None


def hom_space(U, V):
    """Basis of ``Hom_G(U, V)`` as a list of ``V.dim x U.dim`` matrices."""
    p = U.p
    m, n = V.dim, U.dim
    if m == 0 or n == 0:
        return []
    rows = []
    for A, B in zip(U.gens, V.gens):
        # X A - B X = 0 with X row-major vec
        rows.append(np.kron(np.eye(m, dtype=np.int64), A.T) - np.kron(B, np.eye(n, dtype=np.int64)))
    K = kernel(np.vstack(rows) % p, p)
    return [k.reshape(m, n) for k in K]


def _trace_signature(V):
    G = V.group
    return tuple(int(np.trace(V.matrix(i)) % V.p) for i in range(G.order))


def is_isomorphic_simple(U, V):
    """Isomorphism test for simple modules over the same group.

    Filters: dimension, then traces on all group elements; the decisive step
    is whether ``Hom_G(U, V)`` is nonzero.
    """
    if U.dim != V.dim:
        return False
    if U.group.order <= 5000 and _trace_signature(U) != _trace_signature(V):
        return False
    return len(hom_space(U, V)) > 0


def composition_series_factors(V, seed=0, bound=DEFAULT_DIM_BOUND):
    """Simple subquotients of a composition series, in series order."""
    if V.dim > bound:
        raise DimensionBoundExceeded(f"module dimension {V.dim} exceeds {bound}")
    rng = np.random.default_rng(seed)
    out = []

    def split(M):
        if M.dim == 0:
            return
        U = find_submodule(M, rng)
        if U is None:
            out.append(M)
            return
        split(M.sub(U))
        split(M.quotient(U))

    split(V)
    return out


def composition_factors(V, seed=0, bound=DEFAULT_DIM_BOUND):
    """Simple composition factors up to isomorphism, with multiplicities."""
    classes = []
    for S in composition_series_factors(V, seed, bound):
        for entry in classes:
            if is_isomorphic_simple(entry[0], S):
                entry[1] += 1
                break
        else:
            classes.append([S, 1])
    classes.sort(key=lambda e: (e[0].dim, _canonical_key(e[0])))
    return [(S, m) for S, m in classes]


def _canonical_key(V):
    if V.group.order <= 5000:
        return _trace_signature(V)
    return ()


def induce(W, G, H, reps=None):
    """Induce ``W`` (a module for ``H``'s standalone group) from ``H <= G``.

    ``H`` is a Subgroup of the PermGroup ``G``; ``W.group`` must contain the
    same permutations.  Returns a module over ``G`` with attribute ``blocks``
    listing the coset representatives (block ``i`` is ``reps[i] (x) W``).
    """
    if not H.elements <= G.whole.elements:
        raise NotASubgroup("H is not a subgroup of G")
    if reps is None:
        reps = left_coset_reps(G, G.whole, H)
    pos = {}
    for i, r in enumerate(reps):
        for h in H.elements:
            pos[G.mul(r, h)] = (i, h)
    d, n = W.dim, len(reps)
    mats = []
    for a in G.generator_indices:
        M = np.zeros((n * d, n * d), dtype=np.int64)
        for i, r in enumerate(reps):
            j, h = pos[G.mul(a, r)]
            M[j * d : (j + 1) * d, i * d : (i + 1) * d] = W.matrix_of(G.elements[h])
        mats.append(M)
    out = FpModule(W.p, G, mats, n * d)
    out.blocks = list(reps)
    return out


def nilpotence_degree(V, g):
    """Least ``e`` with ``(g - 1)^e = 0`` on ``V``, or ``None`` if not nilpotent."""
    if V.dim == 0:
        return 0
    N = (V.matrix(g) - np.eye(V.dim, dtype=np.int64)) % V.p
    P = np.eye(V.dim, dtype=np.int64)
    for e in range(1, V.dim + 1):
        P = P @ N % V.p
        if not P.any():
            return e
    return None


def permutation_module(p, G, H):
    """``F_p[G/H]`` on least-element left coset representatives."""
    W = FpModule.trivial(p, H.as_group())
    return induce(W, G, H)


def regular_module(p, G):
    return permutation_module(p, G, G.trivial)
