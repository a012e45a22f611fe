"""Bounded-arity polymorphisms of Delta relations and largest-clone checks.

All statements here are checked up to an explicit arity bound ``b``; nothing
is claimed about operations of larger arity.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, OperationTable
from .congruence import Congruence, con_lattice
from .delta import check_congruences, delta, delta_generators
from .errors import AlgebraError, ResourceLimitError
from .hypercube import fork_matrix
from .malcev import malcev_term_of
from .relation import DEFAULT_MAX_TUPLES, DENSE_LIMIT, Closure, TupleRelation, decode_codes
from .terms import eval_term_vec, term_arity

TABLE_BUDGET = 1_000_000
_WORK = 1 << 24


def relation_fingerprint(R: TupleRelation) -> str:
    h = hashlib.sha256(f"{R.m}:{R.arity}:".encode())
    h.update(np.ascontiguousarray(np.array(R.tuples(), dtype=np.uint8)).tobytes())
    return h.hexdigest()


@dataclass
class PolymorphismSet:
    """Polymorphisms of arity 1..b, per arity a sorted ``(count, m**k)`` table array."""

    fingerprint: str
    m: int
    b: int
    tables: dict[int, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return sum(len(t) for t in self.tables.values())

    def count(self, k: int) -> int:
        return len(self.tables.get(k, ()))

    def contains(self, table: Sequence[int]) -> bool:
        table = np.asarray(table, dtype=np.uint8)
        k = next((k for k in self.tables if self.m**k == len(table)), None)
        if k is None:
            raise AlgebraError(f"no polymorphisms of the arity of a table with {len(table)} entries")
        return bool((self.tables[k] == table).all(axis=1).any())

    def __contains__(self, table) -> bool:
        return self.contains(table)

    def intersect(self, other: PolymorphismSet) -> PolymorphismSet:
        if (self.m, self.b) != (other.m, other.b):
            raise AlgebraError("polymorphism sets over different carriers or bounds")
        out = {}
        for k, t in self.tables.items():
            codes = _table_codes(t, self.m)
            keep = np.isin(codes, _table_codes(other.tables[k], self.m))
            out[k] = t[keep]
        fp = hashlib.sha256((self.fingerprint + other.fingerprint).encode()).hexdigest()
        return PolymorphismSet(fp, self.m, self.b, out)

    def operations(self, prefix: str = "p") -> list[OperationTable]:
        return [OperationTable(f"{prefix}{k}_{j}", k, tuple(int(x) for x in row))
                for k, t in sorted(self.tables.items()) for j, row in enumerate(t)]

    def to_dict(self) -> dict:
        return {
            "relation": self.fingerprint,
            "size": self.m,
            "arity_bound": self.b,
            "counts": {str(k): len(t) for k, t in sorted(self.tables.items())},
            "tables": {str(k): t.tolist() for k, t in sorted(self.tables.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _table_codes(t: np.ndarray, m: int) -> np.ndarray:
    """Lexicographic rank of each table (the enumeration index)."""
    w = np.array([m ** (t.shape[1] - 1 - j) for j in range(t.shape[1])], dtype=np.int64)
    return t.astype(np.int64) @ w


def _membership(R: TupleRelation):
    """A function mapping an int64 code array to a membership bool array."""
    if R.m**R.arity <= DENSE_LIMIT:
        bits = np.zeros(R.m**R.arity, dtype=bool)
        bits[R.codes()] = True
        return lambda codes: bits[codes]
    return lambda codes: R.contains_rows(decode_codes(codes.ravel(), R.m, R.arity)).reshape(codes.shape)


def preserves(table: Sequence[int], k: int, R: TupleRelation) -> bool:
    """Whether the k-ary table maps every k-tuple of rows of R into R (with early exit)."""
    T = np.asarray(table, dtype=np.int64)
    if k == 0:
        return np.full(R.arity, T[0]) in R
    rows = R.rows.astype(np.int64)
    n = len(rows)
    step = max(1, _WORK // max(1, R.arity))
    total = n**k
    for start in range(0, total, step):
        idx = np.unravel_index(np.arange(start, min(total, start + step)), [n] * k)
        pos = np.zeros((len(idx[0]), R.arity), dtype=np.int64)
        for ix in idx:
            pos = pos * R.m + rows[ix]
        if not R.contains_rows(T[pos]).all():
            return False
    return True


def polymorphisms(R: TupleRelation, b: int, table_budget: int = TABLE_BUDGET) -> PolymorphismSet:
    """All operation tables of arity 1..b preserving R, in lexicographic table order."""
    m, r = R.m, R.arity
    if b < 1:
        raise AlgebraError("arity bound must be at least 1")
    for k in range(1, b + 1):
        if m ** (m**k) > table_budget:
            raise ResourceLimitError(
                f"{m}**{m**k} tables of arity {k} exceed the budget {table_budget}")
    member = _membership(R)
    weights = np.array([m ** (r - 1 - j) for j in range(r)], dtype=np.int64)
    rows = R.rows.astype(np.int64)
    out: dict[int, np.ndarray] = {}
    for k in range(1, b + 1):
        width = m**k
        n_tab = m**width
        # argument pattern per (row k-tuple, coordinate) as a table index
        combos = np.array(list(product(range(len(rows)), repeat=k)), dtype=np.int64).reshape(-1, k)
        pos = np.zeros((len(combos), r), dtype=np.int64)
        for j in range(k):
            pos = pos * m + rows[combos[:, j]]
        pos = np.unique(pos, axis=0)
        step = max(1, _WORK // max(1, pos.size))
        keep = []
        for start in range(0, n_tab, step):
            tabs = decode_codes(np.arange(start, min(n_tab, start + step)), m, width).astype(np.int64)
            ok = np.ones(len(tabs), dtype=bool)
            # check tuple-chunks so that early failures prune later work
            for s in range(0, len(pos), 4096):
                live = np.flatnonzero(ok)
                if not len(live):
                    break
                vals = tabs[live][:, pos[s : s + 4096]]
                ok[live] = member(vals @ weights).all(axis=1)
            keep.append(tabs[ok].astype(np.uint8))
        out[k] = np.concatenate(keep) if keep else np.zeros((0, width), np.uint8)
    return PolymorphismSet(relation_fingerprint(R), m, b, out)


# --------------------------------------------------------------------------
# largest clone checks


def _fork_commutators(alg: FiniteAlgebra, congs: Sequence[Congruence], max_tuples: int):
    """Delta and top-coordinate forks for every non-empty sub-tuple, without
    requiring the congruences to be congruences of ``alg``."""
    out = {}
    n = len(congs)
    for size in range(1, n + 1):
        for I in combinations(range(n), size):
            sub = [congs[i] for i in I]
            R = Closure(alg, 1 << size, max_tuples).run(delta_generators(alg, sub))
            M = fork_matrix(R, R.arity - 1)
            out[I] = (R, M)
    return out


def _matrix_str(M: np.ndarray) -> str:
    m = len(M)
    labels = [int(np.flatnonzero(M[a])[0]) if M[a].any() else a for a in range(m)]
    if (M == (np.array(labels)[:, None] == np.array(labels)[None, :])).all():
        return str(Congruence.from_labels(labels))
    return "non-equivalence " + str(sorted(zip(*map(list, np.nonzero(M)))))


@dataclass
class LargestCloneReport:
    algebra: str
    congs: list[str]
    b: int
    polymorphism_counts: dict[int, int]
    basic_ops_preserved: bool
    basic_ops_failing: list[str]
    closure_unchanged: bool
    commutators_unchanged: bool
    maximality: list[dict]
    maximality_passed: bool
    note: str = ""

    @property
    def passed(self) -> bool:
        return (self.basic_ops_preserved and self.closure_unchanged
                and self.commutators_unchanged and self.maximality_passed)

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "congruences": self.congs,
            "arity_bound": self.b,
            "polymorphism_counts": {str(k): v for k, v in sorted(self.polymorphism_counts.items())},
            "a_basic_operations_preserved": self.basic_ops_preserved,
            "a_failing": self.basic_ops_failing,
            "b_closure_unchanged": self.closure_unchanged,
            "b_commutators_unchanged": self.commutators_unchanged,
            "c_maximality_samples": self.maximality,
            "c_maximality_passed": self.maximality_passed,
            "passed": self.passed,
            "note": self.note,
        }


def check_largest_clone(alg: FiniteAlgebra, congs: Sequence[Congruence], b: int,
                        samples: int = 20, seed: int = 0, max_tuples: int = DEFAULT_MAX_TUPLES,
                        table_budget: int = TABLE_BUDGET) -> LargestCloneReport:
    """Check that Pol(Delta) at arity <= b is the largest clone with the commutators.

    (a) basic operations of arity <= b preserve Delta; (b) adding all found
    polymorphisms leaves Delta and every sub-tuple commutator unchanged;
    (c) adding any sampled non-polymorphism changes Delta and some commutator.
    """
    malcev_term_of(alg)
    congs = check_congruences(alg, congs)
    if not congs:
        raise AlgebraError("need at least one congruence")
    R = delta(alg, congs, max_tuples=max_tuples)
    pol = polymorphisms(R, b, table_budget)
    base = _fork_commutators(alg, congs, max_tuples)

    failing = [op.symbol for op in alg.operations
               if op.arity <= b and not preserves(op.table, op.arity, R)]

    expanded = alg.expand(pol.operations("pol"), name=f"{alg.name}+Pol")
    grown = _fork_commutators(expanded, congs, max_tuples)
    full = tuple(range(len(congs)))
    closure_same = grown[full][0] == R
    comm_same = all(np.array_equal(grown[I][1], base[I][1]) for I in base)

    # every table of arity <= b that is not a polymorphism, sampled without replacement
    rng = np.random.default_rng(seed)
    pool = []
    for k in range(1, b + 1):
        width = alg.size**k
        allcodes = np.arange(alg.size**width)
        polcodes = _table_codes(pol.tables[k], alg.size)
        pool += [(k, int(c)) for c in allcodes[~np.isin(allcodes, polcodes)]]
    picks = rng.choice(len(pool), size=min(samples, len(pool)), replace=False) if pool else []
    results = []
    for p in sorted(int(x) for x in picks):
        k, code = pool[p]
        table = tuple(int(x) for x in decode_codes(np.array([code]), alg.size, alg.size**k)[0])
        g = OperationTable("g", k, table)
        other = _fork_commutators(alg.expand([g], name=f"{alg.name}+g"), congs, max_tuples)
        d_grew = len(other[full][0]) > len(R) and R.issubset(other[full][0])
        changed = [I for I in base if not np.array_equal(other[I][1], base[I][1])]
        results.append({"arity": k, "table": list(table), "delta_grew": bool(d_grew),
                        "delta_size": len(other[full][0]),
                        "changed_commutators": [list(I) for I in changed],
                        "values": {",".join(map(str, I)): _matrix_str(other[I][1]) for I in changed},
                        "passed": bool(d_grew and changed)})
    return LargestCloneReport(
        algebra=alg.name, congs=[str(c) for c in congs], b=b,
        polymorphism_counts={k: len(t) for k, t in pol.tables.items()},
        basic_ops_preserved=not failing, basic_ops_failing=failing,
        closure_unchanged=bool(closure_same), commutators_unchanged=bool(comm_same),
        maximality=results, maximality_passed=bool(results) and all(r["passed"] for r in results),
        note=f"verified up to arity {b} only",
    )


def largest_commutator_preserving_clone(alg: FiniteAlgebra, n_max: int, b: int,
                                        table_budget: int = TABLE_BUDGET,
                                        max_tuples: int = DEFAULT_MAX_TUPLES) -> PolymorphismSet:
    """Intersection of Pol(Delta(t)) over all congruence tuples t of length 1..n_max."""
    q = malcev_term_of(alg)
    L = con_lattice(alg)
    out = None
    count = 0
    for n in range(1, n_max + 1):
        for t in product(L.congruences, repeat=n):
            P = polymorphisms(delta(alg, t, max_tuples=max_tuples), b, table_budget)
            out = P if out is None else out.intersect(P)
            count += 1
    out.meta["tuples"] = count
    out.meta["n_max"] = n_max
    if b >= 3 and term_arity(q) <= 3:
        m = alg.size
        grid = np.array(list(product(range(m), repeat=3)), dtype=np.int64)
        qt = eval_term_vec(alg, q, [grid[:, 0], grid[:, 1], grid[:, 2]])
        out.meta["malcev_term"] = str(q)
        out.meta["malcev_inside"] = out.contains(qt)
    else:
        out.meta["malcev_inside"] = None
    return out
