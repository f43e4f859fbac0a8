"""Built-in named groups with pinned generator arrays, plus JSON group files."""
from __future__ import annotations

import itertools
import json
import re

from .groups import PermGroup

# Named fusion systems used by the verification suite: name -> (group, prime).
SYSTEMS = {
    "D8": ("D8", 2),
    "Q8": ("Q8", 2),
    "SD16": ("SD16", 2),
    "X27": ("X27", 3),
    "S3": ("S3", 3),
    "S4": ("S4", 2),
    "E3^2": ("E3^2", 3),
    "GL(2,3)": ("GL(2,3)", 2),
    "GL(3,3)": ("GL(3,3)", 3),
}


def cyclic(n):
    return [[(i + 1) % n for i in range(n)]]


def symmetric(n):
    if n == 1:
        return [list(range(1))]
    gens = [[1, 0] + list(range(2, n))]
    if n > 2:
        gens.append([(i + 1) % n for i in range(n)])
    return gens


def alternating(n):
    gens = []
    for k in range(2, n):
        g = list(range(n))
        g[0], g[1], g[k] = g[1], g[k], g[0]
        gens.append(g)
    return gens or [list(range(n))]


def elementary_abelian(p, k):
    """``k`` disjoint ``p``-cycles on ``p*k`` points."""
    gens = []
    for j in range(k):
        g = list(range(p * k))
        for i in range(p):
            g[j * p + i] = j * p + (i + 1) % p
        gens.append(g)
    return gens


def _dihedral8():
    return [[1, 2, 3, 0], [3, 2, 1, 0]]


def _quaternion8():
    # Regular representation on 1, i, j, k, -1, -i, -j, -k (indices 0..7).
    table_i = [1, 4, 3, 6, 5, 0, 7, 2]
    table_j = [2, 7, 4, 1, 6, 3, 0, 5]
    return [table_i, table_j]


def _semidihedral16():
    a = [(i + 1) % 8 for i in range(8)]
    b = [(3 * i) % 8 for i in range(8)]
    return [a, b]


def _extraspecial27():
    # Affine maps (x, y) -> (x + a, y + c x + b) of F_3^2; point (x, y) is 3x + y.
    def perm(f):
        return [3 * f(x, y)[0] + f(x, y)[1] for x in range(3) for y in range(3)]

    return [
        perm(lambda x, y: ((x + 1) % 3, y)),
        perm(lambda x, y: (x, (y + x) % 3)),
    ]


def general_linear(n, q):
    """``GL(n, q)`` (``q`` prime) acting on the nonzero vectors of ``F_q^n``."""
    vectors = [v for v in itertools.product(range(q), repeat=n) if any(v)]
    pos = {v: i for i, v in enumerate(vectors)}

    def act(mat):
        out = []
        for v in vectors:
            w = tuple(sum(mat[r][c] * v[c] for c in range(n)) % q for r in range(n))
            out.append(pos[w])
        return out

    gens = []
    diag = [[int(r == c) for c in range(n)] for r in range(n)]
    diag[0][0] = _primitive_root(q)
    gens.append(act(diag))
    for r in range(n):
        for c in range(n):
            if r != c:
                t = [[int(i == j) for j in range(n)] for i in range(n)]
                t[r][c] = 1
                gens.append(act(t))
    return gens


def _primitive_root(q):
    for g in range(2, q + 1):
        if len({pow(g, e, q) for e in range(1, q)}) == q - 1:
            return g
    return 1


def named_generators(name):
    """``(generators, degree)`` for a library name."""
    fixed = {
        "D8": _dihedral8,
        "Q8": _quaternion8,
        "SD16": _semidihedral16,
        "X27": _extraspecial27,
    }
    if name in fixed:
        gens = fixed[name]()
        return gens, len(gens[0])
    m = re.fullmatch(r"GL\((\d+),(\d+)\)", name.replace(" ", ""))
    if m:
        gens = general_linear(int(m.group(1)), int(m.group(2)))
        return gens, len(gens[0])
    m = re.fullmatch(r"E(\d+)\^(\d+)", name)
    if m:
        gens = elementary_abelian(int(m.group(1)), int(m.group(2)))
        return gens, len(gens[0])
    m = re.fullmatch(r"([CSA])(\d+)", name)
    if m:
        n = int(m.group(2))
        gens = {"C": cyclic, "S": symmetric, "A": alternating}[m.group(1)](n)
        return gens, n
    raise KeyError(f"unknown library group {name!r}")


_cache = {}


def named_group(name):
    if name not in _cache:
        gens, degree = named_generators(name)
        _cache[name] = PermGroup(gens, degree, name=name)
    return _cache[name]


def load_group_file(path):
    """Read ``{"degree": n, "generators": [[...], ...], "name": str}``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return PermGroup(data["generators"], data["degree"], name=data.get("name"))


def group_to_json(G):
    return {"degree": G.degree, "generators": [list(g) for g in G.generators],
            "name": G.name}
