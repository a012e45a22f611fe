"""Hypercube combinatorics on 2**n-ary tuples.

Vertex ``k`` of the n-cube is identified with its binary expansion; digit
``i`` is ``(k >> i) & 1``, counted from the right starting at 0, so
``k == sum(2**i * bit(k, i))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlgebraError
from .relation import TupleRelation, uses_int_codes


def bit(k: int, i: int) -> int:
    return (k >> i) & 1


def xor(k: int, l: int) -> int:
    return k ^ l


def band(k: int, l: int) -> int:
    return k & l


def dimension(arity: int) -> int:
    n = arity.bit_length() - 1
    if arity < 1 or 1 << n != arity:
        raise AlgebraError(f"arity {arity} is not a power of two")
    return n


def generator_tuple(i: int, n: int, a: int, b: int) -> tuple[int, ...]:
    """The tuple with ``a`` where digit ``i`` is 0 and ``b`` where it is 1."""
    if not 0 <= i < n:
        raise AlgebraError(f"direction {i} out of range for dimension {n}")
    return tuple(b if bit(k, i) else a for k in range(1 << n))


@dataclass(frozen=True)
class IndexMap:
    """A map ``e: {0..n-1} -> {0..m-1}`` given as the tuple of its values."""

    values: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if any(not 0 <= v < self.target for v in self.values):
            raise AlgebraError(f"index map {self.values} leaves 0..{self.target - 1}")

    @property
    def source(self) -> int:
        return len(self.values)

    @classmethod
    def identity(cls, n: int) -> IndexMap:
        return cls(tuple(range(n)), n)

    @classmethod
    def flip(cls, i: int, n: int) -> IndexMap:
        """``sigma_i: k -> k xor 2**i`` on the vertices of the n-cube."""
        if not 0 <= i < n:
            raise AlgebraError(f"direction {i} out of range for dimension {n}")
        return cls(tuple(k ^ (1 << i) for k in range(1 << n)), 1 << n)

    @classmethod
    def digit(cls, i: int, n: int) -> IndexMap:
        """``d_{i,n}: k -> bit(k, i)``, mapping the n-cube onto {0, 1}."""
        return cls(tuple(bit(k, i) for k in range(1 << n)), 2)

    @classmethod
    def meet_with(cls, k: int, n: int) -> IndexMap:
        """``l -> l & k`` on the vertices of the n-cube."""
        return cls(tuple(l & k for l in range(1 << n)), 1 << n)

    @classmethod
    def permute_directions(cls, sigma: Sequence[int]) -> IndexMap:
        """Vertex map sending digit ``i`` of ``k`` to digit ``sigma[i]``.

        ``Delta(alpha_sigma(0), ...)`` equals ``Delta(alpha_0, ...)`` reindexed
        by this map.
        """
        n = len(sigma)
        vals = []
        for k in range(1 << n):
            vals.append(sum(bit(k, i) << sigma[i] for i in range(n)))
        return cls(tuple(vals), 1 << n)

    def inverse(self) -> IndexMap:
        if sorted(self.values) != list(range(self.target)):
            raise AlgebraError("index map is not a bijection")
        inv = [0] * self.target
        for j, v in enumerate(self.values):
            inv[v] = j
        return IndexMap(tuple(inv), self.source)


def reindex(R: TupleRelation, e: IndexMap) -> TupleRelation:
    """``{ (a[e(0)], ..., a[e(n-1)]) | a in R }``."""
    if e.target != R.arity:
        raise AlgebraError(f"index map targets arity {e.target}, relation has arity {R.arity}")
    rows = R.rows[:, list(e.values)]
    if len(rows):
        rows = np.unique(rows, axis=0)
    return TupleRelation(R.m, e.source, rows)


def face_indices(n: int, i: int, d: int) -> list[int]:
    if n < 1:
        raise AlgebraError("faces need dimension at least 1")
    if not 0 <= i < n or d not in (0, 1):
        raise AlgebraError(f"bad face ({i}, {d}) for dimension {n}")
    return [k for k in range(1 << n) if bit(k, i) == d]


def face_projection(R: TupleRelation, i: int, d: int) -> TupleRelation:
    """Restrict every tuple to the vertices with digit ``i`` equal to ``d``."""
    n = dimension(R.arity)
    idx = face_indices(n, i, d)
    rows = np.unique(R.rows[:, idx], axis=0) if len(R) else np.zeros((0, len(idx)), np.uint8)
    return TupleRelation(R.m, len(idx), rows)


def flip(R: TupleRelation, i: int) -> TupleRelation:
    n = dimension(R.arity)
    if n < 1:
        raise AlgebraError("flips need dimension at least 1")
    return reindex(R, IndexMap.flip(i, n))


def fork_matrix(R: TupleRelation, i: int) -> np.ndarray:
    """Boolean ``m x m`` matrix of the forks of ``R`` at coordinate ``i``.

    Tuples are grouped by their puncture at ``i``; every pair of values seen
    in one group is a fork.
    """
    if not 0 <= i < R.arity:
        raise AlgebraError(f"coordinate {i} out of range for arity {R.arity}")
    m = R.m
    out = np.zeros((m, m), dtype=bool)
    if len(R) == 0:
        return out
    rows = R.rows
    vals = rows[:, i].astype(np.int64)
    if uses_int_codes(m, R.arity):
        key = R.codes() - vals * m ** (R.arity - 1 - i)
    else:
        _, key = np.unique(np.delete(rows, i, axis=1), axis=0, return_inverse=True)
        key = key.ravel()
    order = np.argsort(key, kind="stable")
    key = key[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    masks = np.bitwise_or.reduceat(np.left_shift(1, vals[order]), starts)
    for mask in np.unique(masks).tolist():
        present = [a for a in range(m) if (mask >> a) & 1]
        out[np.ix_(present, present)] = True
    return out


def forks(R: TupleRelation, i: int) -> set[tuple[int, int]]:
    """All pairs ``(c_i, d_i)`` for tuples ``c, d`` of ``R`` agreeing off ``i``."""
    a, b = np.nonzero(fork_matrix(R, i))
    return set(zip(a.tolist(), b.tolist()))


def paired_faces(R: TupleRelation, i: int) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``{ (face_0(a), face_1(a)) | a in R }`` across direction ``i``."""
    n = dimension(R.arity)
    lo, hi = face_indices(n, i, 0), face_indices(n, i, 1)
    rows = R.rows
    return set(zip(map(tuple, rows[:, lo].tolist()), map(tuple, rows[:, hi].tolist())))
