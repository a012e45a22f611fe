"""Built-in algebras, constructed programmatically.

Groups carry ``mul``, ``inv`` and the identity constant ``e``; rings carry
``add``, ``neg``, ``mul``, ``zero`` and ``one``.
"""
from __future__ import annotations

import re
from itertools import product

from .algebra import FiniteAlgebra, OperationTable
from .errors import AlgebraError

MALCEV_ZOO = (
    [f"cyclic({n})" for n in range(2, 9)]
    + ["klein4", "dihedral4", "quaternion8", "sym3"]
    + [f"ring_z({n})" for n in range(2, 7)]
)
NON_MALCEV_ZOO = ["semilattice3", "set(2)", "majority2"]


def _binary(symbol, m, f):
    return OperationTable(symbol, 2, [f(a, b) for a, b in product(range(m), repeat=2)])


def _unary(symbol, m, f):
    return OperationTable(symbol, 1, [f(a) for a in range(m)])


def group_from_table(name: str, mul: list[list[int]]) -> FiniteAlgebra:
    """Group algebra from a Cayley table whose identity is element 0."""
    m = len(mul)
    if any(mul[0][x] != x or mul[x][0] != x for x in range(m)):
        raise AlgebraError("element 0 must be the identity")
    inv = [next(y for y in range(m) if mul[x][y] == 0) for x in range(m)]
    ops = [
        _binary("mul", m, lambda a, b: mul[a][b]),
        _unary("inv", m, lambda a: inv[a]),
        OperationTable("e", 0, (0,)),
    ]
    return FiniteAlgebra(m, ops, name)


def permutation_group(name: str, generators: list[tuple[int, ...]]) -> FiniteAlgebra:
    """Group generated by permutations; elements in lexicographic order."""
    ident = tuple(range(len(generators[0])))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = tuple(p[g[i]] for i in range(len(g)))
                if q not in elems:
                    elems.add(q)
                    nxt.append(q)
        frontier = nxt
    elems = sorted(elems)
    index = {p: i for i, p in enumerate(elems)}
    # (p*q)(i) = p(q(i)): apply q first
    mul = [[index[tuple(p[q[i]] for i in range(len(q)))] for q in elems] for p in elems]
    return group_from_table(name, mul)


def cyclic(n: int) -> FiniteAlgebra:
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    return group_from_table(f"cyclic({n})", mul)


def klein4() -> FiniteAlgebra:
    mul = [[a ^ b for b in range(4)] for a in range(4)]
    return group_from_table("klein4", mul)


def dihedral4() -> FiniteAlgebra:
    """Symmetries of a square, order 8."""
    return permutation_group("dihedral4", [(1, 2, 3, 0), (0, 3, 2, 1)])


def sym3() -> FiniteAlgebra:
    return permutation_group("sym3", [(1, 0, 2), (0, 2, 1)])


def quaternion8() -> FiniteAlgebra:
    # element 2*u + s stands for (-1)**s * unit[u], units 1, i, j, k
    unit_mul = {
        (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
        (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
        (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
        (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
    }

    def mul(a, b):
        ua, sa = divmod(a, 2)
        ub, sb = divmod(b, 2)
        u, s = unit_mul[ua, ub]
        return 2 * u + (s + sa + sb) % 2

    return group_from_table("quaternion8", [[mul(a, b) for b in range(8)] for a in range(8)])


def ring_z(n: int) -> FiniteAlgebra:
    ops = [
        _binary("add", n, lambda a, b: (a + b) % n),
        _unary("neg", n, lambda a: (-a) % n),
        _binary("mul", n, lambda a, b: (a * b) % n),
        OperationTable("zero", 0, (0,)),
        OperationTable("one", 0, (1 % n,)),
    ]
    return FiniteAlgebra(n, ops, f"ring_z({n})")


def affine_z(n: int) -> FiniteAlgebra:
    """The affine space of Z_n: only the ternary x - y + z."""
    table = [(a - b + c) % n for a, b, c in product(range(n), repeat=3)]
    return FiniteAlgebra(n, [OperationTable("p", 3, table)], f"affine_z({n})")


def semilattice3() -> FiniteAlgebra:
    """Meet-semilattice on {0,1,2}: 0 is the bottom, 1 and 2 incomparable."""
    return FiniteAlgebra(3, [_binary("meet", 3, lambda a, b: a if a == b else 0)], "semilattice3")


def plain_set(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(n, [], f"set({n})")


def majority2() -> FiniteAlgebra:
    """Two-element set with both constants and the majority operation."""
    table = [int(a + b + c >= 2) for a, b, c in product(range(2), repeat=3)]
    ops = [OperationTable("maj", 3, table), OperationTable("c0", 0, (0,)), OperationTable("c1", 0, (1,))]
    return FiniteAlgebra(2, ops, "majority2")


_PARAM = {
    "cyclic": (cyclic, 1, 8),
    "ring_z": (ring_z, 1, 6),
    "affine_z": (affine_z, 1, 8),
    "set": (plain_set, 1, 12),
}
_PLAIN = {
    "klein4": klein4,
    "dihedral4": dihedral4,
    "quaternion8": quaternion8,
    "sym3": sym3,
    "semilattice3": semilattice3,
    "majority2": majority2,
}


def zoo(name: str) -> FiniteAlgebra:
    """Look up a built-in algebra such as ``cyclic(4)`` or ``sym3``."""
    name = name.strip()
    if name.startswith("zoo:"):
        name = name[4:]
    if name in _PLAIN:
        return _PLAIN[name]()
    m = re.fullmatch(r"(\w+)\((\d+)\)", name)
    if m and m.group(1) in _PARAM:
        fn, lo, hi = _PARAM[m.group(1)]
        n = int(m.group(2))
        if not lo <= n <= hi:
            raise AlgebraError(f"{m.group(1)}(n) needs {lo} <= n <= {hi}")
        return fn(n)
    raise AlgebraError(f"unknown zoo algebra {name!r}; known: {', '.join(zoo_names())}")


def zoo_names() -> list[str]:
    return [f"{k}(n)" for k in _PARAM] + sorted(_PLAIN)
