"""Partitions, congruence generation and congruence lattices."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .errors import AlgebraError, ResourceLimitError

DEFAULT_MAX_LATTICE = 100_000
DEFAULT_MAX_CARRIER = 12


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if y < x:
            x, y = y, x
        self.parent[y] = x
        return True

    def blocks(self) -> tuple[int, ...]:
        return canonical([self.find(x) for x in range(len(self.parent))])


def canonical(labels: Sequence[int]) -> tuple[int, ...]:
    """Relabel blocks by order of first occurrence."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


@dataclass(frozen=True, order=False)
class Congruence:
    """An equivalence relation on ``{0..m-1}`` as a canonical block array."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.blocks)
        if b != canonical(b):
            raise AlgebraError(f"block array {list(b)} is not in canonical form")
        object.__setattr__(self, "blocks", b)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> Congruence:
        return cls(canonical(labels))

    @classmethod
    def from_partition(cls, parts: Iterable[Iterable[int]], m: int) -> Congruence:
        labels = [-1] * m
        for i, part in enumerate(parts):
            for x in part:
                if not 0 <= x < m or labels[x] != -1:
                    raise AlgebraError(f"invalid partition element {x}")
                labels[x] = i
        if -1 in labels:
            raise AlgebraError("partition does not cover the carrier")
        return cls.from_labels(labels)

    @classmethod
    def parse_blocks(cls, text: str, m: int) -> Congruence:
        """Parse ``"0,1|2,3"``; unlisted elements become singletons."""
        parts = [[int(x) for x in p.split(",") if x.strip()] for p in text.split("|") if p.strip()]
        listed = {x for p in parts for x in p}
        parts += [[x] for x in range(m) if x not in listed]
        return cls.from_partition(parts, m)

    @classmethod
    def zero(cls, m: int) -> Congruence:
        return cls(tuple(range(m)))

    @classmethod
    def one(cls, m: int) -> Congruence:
        return cls((0,) * m)

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def num_blocks(self) -> int:
        return max(self.blocks) + 1

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.blocks, dtype=np.int64)
        a.setflags(write=False)
        return a

    def partition(self) -> list[list[int]]:
        parts: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.blocks):
            parts[b].append(x)
        return parts

    def related(self, a: int, b: int) -> bool:
        return self.blocks[a] == self.blocks[b]

    def pairs(self) -> set[tuple[int, int]]:
        return {(a, b) for part in self.partition() for a in part for b in part}

    def generating_pairs(self) -> list[tuple[int, int]]:
        """A spanning set: each element paired with its block's least element."""
        return [(part[0], x) for part in self.partition() for x in part[1:]]

    def is_zero(self) -> bool:
        return self.num_blocks == self.size

    def is_one(self) -> bool:
        return self.num_blocks == 1

    def __le__(self, other: Congruence) -> bool:
        return all(other.blocks[a] == other.blocks[b] for a, b in self.generating_pairs())

    def __lt__(self, other: Congruence) -> bool:
        return self != other and self <= other

    def meet(self, other: Congruence) -> Congruence:
        _check_same(self, other)
        return Congruence.from_labels(list(zip(self.blocks, other.blocks)))

    def join(self, other: Congruence) -> Congruence:
        """Join as equivalence relations (transitive closure of the union)."""
        _check_same(self, other)
        uf = UnionFind(self.size)
        for a, b in self.generating_pairs() + other.generating_pairs():
            uf.union(a, b)
        return Congruence(uf.blocks())

    def sort_key(self):
        return (-self.num_blocks, self.blocks)

    def __str__(self):
        return "|".join(",".join(map(str, p)) for p in self.partition())


def _check_same(c1: Congruence, c2: Congruence):
    if c1.size != c2.size:
        raise AlgebraError(f"carrier mismatch: {c1.size} vs {c2.size}")


@lru_cache(maxsize=256)
def _translations(alg: FiniteAlgebra) -> list[np.ndarray]:
    """For every operation and argument position, a table T[filling, x]."""
    m = alg.size
    out = []
    for op in alg.operations:
        k = op.arity
        if k == 0:
            continue
        t = op.array.reshape((m,) * k)
        for j in range(k):
            out.append(np.moveaxis(t, j, -1).reshape(-1, m))
    return out


def cg(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Smallest congruence containing ``pairs``.

    Union-find plus unary transports: every pair that merges two classes is
    pushed through each basic operation at each argument position, over all
    fillings of the other positions.
    """
    m = alg.size
    uf = UnionFind(m)
    work = []
    for a, b in pairs:
        if not (0 <= a < m and 0 <= b < m):
            raise AlgebraError(f"pair {(a, b)} outside the carrier")
        if uf.union(a, b):
            work.append((a, b))
    trans = _translations(alg)
    while work:
        a, b = work.pop()
        for T in trans:
            for x, y in zip(T[:, a].tolist(), T[:, b].tolist()):
                if x != y and uf.union(x, y):
                    work.append((x, y))
    return Congruence(uf.blocks())


def is_congruence(alg: FiniteAlgebra, p: Congruence | Sequence[int]) -> bool:
    """Whether the partition is compatible with every basic operation."""
    c = p if isinstance(p, Congruence) else Congruence.from_labels(p)
    if c.size != alg.size:
        raise AlgebraError("partition is over a different carrier")
    blk = c.array
    for a, b in c.generating_pairs():
        for T in _translations(alg):
            if not np.array_equal(blk[T[:, a]], blk[T[:, b]]):
                return False
    return True


def meet(c1: Congruence, c2: Congruence) -> Congruence:
    return c1.meet(c2)


def join(alg: FiniteAlgebra, c1: Congruence, c2: Congruence) -> Congruence:
    _check_same(c1, c2)
    if c1.size != alg.size:
        raise AlgebraError("congruence is over a different carrier")
    return cg(alg, c1.generating_pairs() + c2.generating_pairs())


class CongruenceLattice:
    """All congruences of an algebra in canonical order.

    Order: number of blocks descending, then block array lexicographically;
    index 0 is the equality relation and the last index the full relation.
    """

    def __init__(self, alg: FiniteAlgebra, congruences: Sequence[Congruence]):
        self.alg = alg
        self.congruences = sorted(set(congruences), key=Congruence.sort_key)
        self.index = {c: i for i, c in enumerate(self.congruences)}
        n = len(self.congruences)
        self._meet = np.full((n, n), -1, dtype=np.int64)
        self._join = np.full((n, n), -1, dtype=np.int64)

    def __len__(self):
        return len(self.congruences)

    def __getitem__(self, i: int) -> Congruence:
        return self.congruences[i]

    def __iter__(self):
        return iter(self.congruences)

    @property
    def zero(self) -> Congruence:
        return self.congruences[0]

    @property
    def one(self) -> Congruence:
        return self.congruences[-1]

    def index_of(self, c: Congruence) -> int:
        try:
            return self.index[c]
        except KeyError:
            raise AlgebraError(f"{c} is not a congruence of {self.alg.name}") from None

    def meet_index(self, i: int, j: int) -> int:
        if self._meet[i, j] < 0:
            self._meet[i, j] = self._meet[j, i] = self.index[self[i].meet(self[j])]
        return int(self._meet[i, j])

    def join_index(self, i: int, j: int) -> int:
        if self._join[i, j] < 0:
            self._join[i, j] = self._join[j, i] = self.index[self[i].join(self[j])]
        return int(self._join[i, j])

    def leq(self, i: int, j: int) -> bool:
        return self[i] <= self[j]

    def tables(self) -> tuple[list[list[int]], list[list[int]]]:
        n = len(self)
        return ([[self.meet_index(i, j) for j in range(n)] for i in range(n)],
                [[self.join_index(i, j) for j in range(n)] for i in range(n)])


def con_lattice(alg: FiniteAlgebra, max_size: int = DEFAULT_MAX_LATTICE,
                max_carrier: int = DEFAULT_MAX_CARRIER) -> CongruenceLattice:
    """Principal congruences Cg(a,b), closed under joins."""
    return _con_lattice(alg, max_size, max_carrier)


@lru_cache(maxsize=128)
def _con_lattice(alg, max_size, max_carrier):
    m = alg.size
    if m > max_carrier:
        raise ResourceLimitError(f"carrier of size {m} exceeds the lattice bound {max_carrier}")
    principal = {cg(alg, [(a, b)]) for a, b in combinations(range(m), 2)}
    found = {Congruence.zero(m)} | principal
    frontier = list(principal)
    while frontier:
        nxt = []
        for c, p in product(frontier, principal):
            j = c.join(p)
            if j not in found:
                found.add(j)
                nxt.append(j)
                if len(found) > max_size:
                    raise ResourceLimitError(
                        f"congruence lattice exceeds {max_size} elements", reached=len(found))
        frontier = nxt
    return CongruenceLattice(alg, found)
