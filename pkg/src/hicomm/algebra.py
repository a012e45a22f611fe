"""Finite algebras given by operation tables."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import AlgebraError

MAX_ARITY = 4


@dataclass(frozen=True, eq=True)
class OperationTable:
    """A basic operation of arity ``k`` stored as a flat table of ``m**k`` values.

    The entry for the argument tuple ``(a_0, ..., a_{k-1})`` sits at the rank
    ``sum(a_j * m**(k-1-j))`` (leftmost argument most significant).
    """

    symbol: str
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if self.arity < 0:
            raise AlgebraError(f"operation {self.symbol!r}: negative arity")

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.table, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def validate(self, m: int) -> None:
        if len(self.table) != m**self.arity:
            raise AlgebraError(
                f"operation {self.symbol!r}: table has {len(self.table)} entries, "
                f"expected {m}**{self.arity} = {m**self.arity}"
            )
        bad = [v for v in self.table if not 0 <= v < m]
        if bad:
            raise AlgebraError(f"operation {self.symbol!r}: entry {bad[0]} outside 0..{m - 1}")

    def rank(self, args: Sequence[int], m: int) -> int:
        r = 0
        for a in args:
            r = r * m + a
        return r

    def apply(self, m: int, *args: np.ndarray) -> np.ndarray:
        """Apply coordinatewise to equally shaped integer arrays."""
        if len(args) != self.arity:
            raise AlgebraError(f"operation {self.symbol!r} takes {self.arity} arguments")
        if self.arity == 0:
            raise AlgebraError("nullary operations have no coordinatewise form")
        idx = np.asarray(args[0], dtype=np.int64)
        for a in args[1:]:
            idx = idx * m + a
        return self.array[idx]


@dataclass(frozen=True)
class FiniteAlgebra:
    """Carrier ``{0, ..., size-1}`` with an ordered list of basic operations."""

    size: int
    operations: tuple[OperationTable, ...]
    name: str = "algebra"
    malcev_term: object = field(default=None, compare=False)
    max_arity: int = field(default=MAX_ARITY, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))
        if self.size < 1:
            raise AlgebraError("algebra size must be positive")
        seen = set()
        for op in self.operations:
            if op.symbol in seen:
                raise AlgebraError(f"duplicate operation symbol {op.symbol!r}")
            seen.add(op.symbol)
            if op.arity > self.max_arity:
                raise AlgebraError(
                    f"operation {op.symbol!r} has arity {op.arity} > {self.max_arity}"
                )
            op.validate(self.size)

    @cached_property
    def _by_symbol(self) -> dict[str, OperationTable]:
        return {op.symbol: op for op in self.operations}

    def op(self, symbol: str) -> OperationTable:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise AlgebraError(f"unknown operation symbol {symbol!r}") from None

    def has_op(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def value(self, symbol: str, *args: int) -> int:
        op = self.op(symbol)
        if len(args) != op.arity:
            raise AlgebraError(f"operation {symbol!r} takes {op.arity} arguments, got {len(args)}")
        return op.table[op.rank(args, self.size)]

    @property
    def elements(self) -> range:
        return range(self.size)

    def with_constants(self) -> FiniteAlgebra:
        """Expansion by every element as a nullary operation ``c0 .. c{m-1}``."""
        extra = [OperationTable(f"c{a}", 0, (a,)) for a in self.elements]
        return self.expand(extra, name=f"{self.name}+constants")

    def expand(self, extra: Iterable[OperationTable], name: str | None = None) -> FiniteAlgebra:
        return FiniteAlgebra(
            self.size,
            self.operations + tuple(extra),
            name or self.name,
            malcev_term=self.malcev_term,
            max_arity=max([self.max_arity] + [op.arity for op in extra]),
        )

    def quotient(self, blocks: Sequence[int]) -> FiniteAlgebra:
        """The quotient by a congruence given as a canonical block array."""
        k = max(blocks) + 1
        reps = [blocks.index(b) for b in range(k)]
        ops = []
        for op in self.operations:
            table = [
                blocks[op.table[op.rank([reps[c] for c in args], self.size)]]
                for args in product(range(k), repeat=op.arity)
            ]
            ops.append(OperationTable(op.symbol, op.arity, table))
        return FiniteAlgebra(k, ops, f"{self.name}/{list(blocks)}",
                             malcev_term=self.malcev_term, max_arity=self.max_arity)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "size": self.size,
            "operations": [
                {"symbol": op.symbol, "arity": op.arity, "table": list(op.table)}
                for op in self.operations
            ],
        }
        if self.malcev_term is not None:
            d["malcev_term"] = str(self.malcev_term)
        return d

    def fingerprint(self) -> str:
        """SHA-256 of the canonical serialization (name excluded)."""
        d = self.to_dict()
        d.pop("name")
        d.pop("malcev_term", None)
        payload = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def __hash__(self):
        return hash((self.size, self.operations))
