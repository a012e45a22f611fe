"""Finite relations over a carrier and subpower generation.

``sg_power`` computes the subuniverse of ``A**r`` generated by a set of
r-tuples.  Tuples live in a growing ``uint8`` row buffer; membership is a
dense bitmap over tuple codes when ``m**r <= DENSE_LIMIT`` and a hash set
otherwise.

The closure is driven per operation:

* associative binary operations are closed by breadth-first right
  multiplication with a small set of *essential* generators (every element
  of the closure is a product of them), which is linear in the closure size
  instead of quadratic;
* an operation that is provably preserved by closing under an associative
  operation ``g`` (an operation distributing over ``g``, an endomorphism of
  ``g``, or the inverse map of a group operation ``g``) is not re-run after
  ``g`` adds elements;
* everything else is closed semi-naively: only argument tuples involving at
  least one element not yet seen by that operation are evaluated.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, OperationTable
from .errors import AlgebraError, ResourceLimitError

DENSE_LIMIT = 2**25
DEFAULT_MAX_TUPLES = 5_000_000
_CHUNK = 1 << 20


def _weights(m: int, r: int) -> np.ndarray:
    return np.array([m ** (r - 1 - j) for j in range(r)], dtype=np.int64)


def uses_int_codes(m: int, r: int) -> bool:
    return m**r < 2**62


def encode_rows(rows: np.ndarray, m: int) -> np.ndarray:
    """Lexicographic rank of each row (leftmost coordinate most significant)."""
    r = rows.shape[1]
    if not uses_int_codes(m, r):
        raise AlgebraError(f"{m}**{r} tuples do not fit 64-bit codes")
    return rows.astype(np.int64) @ _weights(m, r)


def decode_codes(codes: np.ndarray, m: int, r: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.shape[0], r), dtype=np.uint8)
    c = codes.copy()
    for j in range(r - 1, -1, -1):
        out[:, j] = c % m
        c //= m
    return out


def all_rows(m: int, r: int) -> np.ndarray:
    """Every tuple of ``A**r`` in lexicographic order."""
    return decode_codes(np.arange(m**r, dtype=np.int64), m, r)


def _row_keys(rows: np.ndarray, m: int):
    if uses_int_codes(m, rows.shape[1]):
        return encode_rows(rows, m)
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    return [bytes(x) for x in rows]


class TupleRelation:
    """An immutable finite set of fixed-arity tuples over ``{0..m-1}``."""

    def __init__(self, m: int, arity: int, rows: np.ndarray):
        rows = np.asarray(rows, dtype=np.uint8).reshape(-1, arity)
        rows.setflags(write=False)
        self.m = m
        self.arity = arity
        self.rows = rows
        self._keyset = None
        self._sorted = None

    @classmethod
    def from_tuples(cls, m: int, arity: int, tuples: Iterable[Sequence[int]]) -> TupleRelation:
        seen = dict.fromkeys(tuple(int(x) for x in t) for t in tuples)
        for t in seen:
            if len(t) != arity or any(not 0 <= x < m for x in t):
                raise AlgebraError(f"tuple {t} is not an element of A^{arity} for |A|={m}")
        rows = np.array(list(seen), dtype=np.uint8).reshape(-1, arity)
        return cls(m, arity, rows)

    @classmethod
    def full(cls, m: int, arity: int) -> TupleRelation:
        return cls(m, arity, all_rows(m, arity))

    def __len__(self):
        return self.rows.shape[0]

    @property
    def size(self) -> int:
        return len(self)

    def _keys(self):
        if self._keyset is None:
            keys = _row_keys(self.rows, self.m)
            self._keyset = set(keys.tolist() if isinstance(keys, np.ndarray) else keys)
        return self._keyset

    def codes(self) -> np.ndarray:
        return encode_rows(self.rows, self.m)

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized membership test for a 2-D array of candidate rows."""
        rows = np.asarray(rows, dtype=np.uint8).reshape(-1, self.arity)
        if uses_int_codes(self.m, self.arity):
            srt = self.sorted_codes()
            q = encode_rows(rows, self.m)
            pos = np.searchsorted(srt, q)
            pos[pos == len(srt)] = 0
            return (srt[pos] == q) if len(srt) else np.zeros(len(q), dtype=bool)
        ks = self._keys()
        return np.array([bytes(x) in ks for x in rows], dtype=bool)

    def sorted_codes(self) -> np.ndarray:
        if self._sorted is None:
            self._sorted = np.sort(self.codes())
        return self._sorted

    def __contains__(self, t) -> bool:
        t = np.asarray(t, dtype=np.int64)
        if t.shape != (self.arity,) or (t < 0).any() or (t >= self.m).any():
            return False
        return bool(self.contains_rows(t.reshape(1, -1))[0])

    def __iter__(self):
        return iter(self.tuples())

    def tuples(self) -> list[tuple[int, ...]]:
        """All tuples in lexicographic order."""
        order = np.lexsort(self.rows.T[::-1]) if len(self) else []
        return [tuple(int(x) for x in row) for row in self.rows[order]]

    def to_set(self) -> frozenset:
        return frozenset(map(tuple, self.rows.tolist()))

    def __eq__(self, other):
        if not isinstance(other, TupleRelation):
            return NotImplemented
        if (self.m, self.arity, len(self)) != (other.m, other.arity, len(other)):
            return False
        if uses_int_codes(self.m, self.arity):
            return bool(np.array_equal(self.sorted_codes(), other.sorted_codes()))
        return self._keys() == other._keys()

    def __hash__(self):
        return hash((self.m, self.arity, len(self)))

    def issubset(self, other: TupleRelation) -> bool:
        return len(self) <= len(other) and bool(other.contains_rows(self.rows).all())

    def __repr__(self):
        return f"TupleRelation(m={self.m}, arity={self.arity}, size={len(self)})"


# --------------------------------------------------------------------------
# closure kernel


class _Membership:
    def __init__(self, m: int, r: int):
        self.int_codes = uses_int_codes(m, r)
        total = m**r
        self.dense = self.int_codes and total <= DENSE_LIMIT
        if self.dense:
            self.bits = np.zeros(total, dtype=bool)
        else:
            self.set = set()

    def contains(self, key) -> bool:
        if self.dense:
            return bool(self.bits[key])
        return key in self.set

    def filter_new(self, keys):
        """Positions of first occurrences of keys not yet present (in order)."""
        if self.int_codes:
            _, first = np.unique(keys, return_index=True)
            first.sort()
            if self.dense:
                return first[~self.bits[keys[first]]]
            s = self.set
            kl = keys[first].tolist()
            return first[np.fromiter((k not in s for k in kl), dtype=bool, count=len(kl))]
        pos = {}
        for i, k in enumerate(keys):
            if k not in pos and k not in self.set:
                pos[k] = i
        return np.fromiter(pos.values(), dtype=np.int64, count=len(pos))

    def add(self, keys):
        if self.dense:
            self.bits[keys] = True
        elif self.int_codes:
            self.set.update(np.asarray(keys).tolist())
        else:
            self.set.update(keys)


class _RowBuffer:
    def __init__(self, r: int, capacity: int = 1024):
        self.buf = np.empty((capacity, r), dtype=np.uint8)
        self.n = 0

    def extend(self, rows: np.ndarray):
        need = self.n + rows.shape[0]
        if need > self.buf.shape[0]:
            cap = max(need, 2 * self.buf.shape[0])
            nb = np.empty((cap, self.buf.shape[1]), dtype=np.uint8)
            nb[: self.n] = self.buf[: self.n]
            self.buf = nb
        self.buf[self.n : need] = rows
        self.n = need

    @property
    def rows(self) -> np.ndarray:
        return self.buf[: self.n]


class _Found(Exception):
    pass


def _is_associative(op: OperationTable, m: int) -> bool:
    t = op.array.reshape(m, m)
    a = np.arange(m)
    x, y, z = np.meshgrid(a, a, a, indexing="ij")
    return bool(np.array_equal(t[t[x, y], z], t[x, t[y, z]]))


def _distributes(h: OperationTable, g: OperationTable, m: int) -> bool:
    """h(x, g(y,z)) = g(h(x,y), h(x,z)) and h(g(y,z), x) = g(h(y,x), h(z,x))."""
    H = h.array.reshape(m, m)
    G = g.array.reshape(m, m)
    a = np.arange(m)
    x, y, z = np.meshgrid(a, a, a, indexing="ij")
    left = np.array_equal(H[x, G[y, z]], G[H[x, y], H[x, z]])
    right = np.array_equal(H[G[y, z], x], G[H[y, x], H[z, x]])
    return bool(left and right)


def _is_endomorphism(u: OperationTable, g: OperationTable, m: int) -> bool:
    U = u.array
    G = g.array.reshape(m, m)
    a = np.arange(m)
    x, y = np.meshgrid(a, a, indexing="ij")
    return bool(np.array_equal(U[G[x, y]], G[U[x], U[y]]))


def _is_group_inverse(u: OperationTable, g: OperationTable, m: int) -> bool:
    G = g.array.reshape(m, m)
    ids = [e for e in range(m) if (G[e] == np.arange(m)).all() and (G[:, e] == np.arange(m)).all()]
    if not ids:
        return False
    e = ids[0]
    U = u.array
    return bool(all(G[x, U[x]] == e and G[U[x], x] == e for x in range(m)))


class _Plan:
    """Per-algebra classification of operations for the closure kernel."""

    def __init__(self, alg: FiniteAlgebra):
        m = alg.size
        ops = list(alg.operations)
        self.nullary = [i for i, op in enumerate(ops) if op.arity == 0]
        assoc = [i for i, op in enumerate(ops) if op.arity == 2 and _is_associative(op, m)]
        # an associative op that distributes over another goes first
        dist = {(h, g) for h in assoc for g in assoc if h != g and _distributes(ops[h], ops[g], m)}
        order = []
        rest = list(assoc)
        while rest:
            pick = next((h for h in rest if not any((g, h) in dist for g in rest if g != h)), rest[0])
            order.append(pick)
            rest.remove(pick)
        self.assoc = order
        self.other = [i for i, op in enumerate(ops) if op.arity >= 1 and i not in assoc]
        # preserved[g] = ops h kept closed when closing under g (if h was closed before)
        self.preserved: dict[int, set[int]] = {g: set() for g in assoc}
        # implied[g] = ops h closed whenever the set is closed under g
        self.implied: dict[int, set[int]] = {g: set() for g in assoc}
        for g in assoc:
            for h, op in enumerate(ops):
                if h == g or op.arity == 0:
                    continue
                if op.arity == 1:
                    if _is_group_inverse(op, ops[g], m):
                        self.implied[g].add(h)
                    elif _is_endomorphism(op, ops[g], m):
                        self.preserved[g].add(h)
                elif op.arity == 2 and _distributes(op, ops[g], m):
                    self.preserved[g].add(h)


@lru_cache(maxsize=256)
def _plan_for(alg: FiniteAlgebra) -> _Plan:
    return _Plan(alg)


class Closure:
    """One subpower-generation run; see module docstring.

    With ``provenance=True`` every stored tuple remembers the operation and
    argument tuples that first produced it.  With ``target`` set the run stops
    as soon as that tuple is generated.
    """

    def __init__(self, alg: FiniteAlgebra, r: int, max_tuples: int = DEFAULT_MAX_TUPLES,
                 provenance: bool = False, target: Sequence[int] | None = None):
        if alg.size > 256:
            raise AlgebraError("carriers above 256 elements are not supported")
        self.alg = alg
        self.m = alg.size
        self.r = r
        self.max_tuples = max_tuples
        self.plan = _plan_for(alg)
        self.store = _RowBuffer(r)
        self.member = _Membership(self.m, r)
        self.total = self.m**r
        self.provenance = provenance
        self.prov: list = []
        self.index: dict = {}
        self.target_key = None
        if target is not None:
            tk = _row_keys(np.asarray([target], dtype=np.uint8), self.m)
            self.target_key = tk.tolist()[0] if isinstance(tk, np.ndarray) else tk[0]
        self.found = False
        self.done = [0] * len(alg.operations)
        self._assoc_state = {g: None for g in self.plan.assoc}

    # -- storage

    def _keys(self, rows):
        return _row_keys(rows, self.m)

    def _insert(self, rows: np.ndarray, origin=None) -> np.ndarray:
        """Add rows to the closure; returns positions (into ``rows``) that were new."""
        if rows.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        keys = self._keys(rows)
        new = self.member.filter_new(keys)
        if len(new) == 0:
            return new
        if self.store.n + len(new) > self.max_tuples:
            raise ResourceLimitError(
                f"closure in A^{self.r} exceeded {self.max_tuples} tuples "
                f"(reached {self.store.n})", reached=self.store.n)
        newkeys = keys[new] if isinstance(keys, np.ndarray) else [keys[i] for i in new]
        base = self.store.n
        self.store.extend(rows[new])
        self.member.add(newkeys)
        if self.provenance:
            kl = newkeys.tolist() if isinstance(newkeys, np.ndarray) else newkeys
            for j, (pos, k) in enumerate(zip(new.tolist(), kl)):
                self.index[k] = base + j
                self.prov.append(origin(pos) if origin else None)
        if self.target_key is not None and self.member.contains(self.target_key):
            self.found = True
            raise _Found
        return new

    def _index_of_rows(self, rows):
        keys = self._keys(rows)
        kl = keys.tolist() if isinstance(keys, np.ndarray) else keys
        return [self.index[k] for k in kl]

    # -- per-operation drivers

    def _run_generic(self, i: int):
        op = self.alg.operations[i]
        k = op.arity
        d, n0 = self.done[i], self.store.n
        if d >= n0:
            return
        for j in range(k):
            ranges = [(0, d)] * j + [(d, n0)] + [(0, n0)] * (k - 1 - j)
            sizes = [hi - lo for lo, hi in ranges]
            total = int(np.prod(sizes))
            if total == 0:
                continue
            step = max(1, _CHUNK // max(1, self.r))
            for start in range(0, total, step):
                flat = np.arange(start, min(total, start + step), dtype=np.int64)
                idx = np.unravel_index(flat, sizes)
                args = [self.store.rows[ix + lo] for ix, (lo, _) in zip(idx, ranges)]
                res = op.apply(self.m, *args).astype(np.uint8)
                origin = None
                if self.provenance:
                    argidx = [ix + lo for ix, (lo, _) in zip(idx, ranges)]
                    origin = lambda p, i=i, a=argidx: (i, tuple(int(x[p]) for x in a))
                self._insert(res, origin)
                if self.store.n == self.total:
                    return
        self.done[i] = n0

    def _run_assoc(self, g: int):
        op = self.alg.operations[g]
        n_before = self.store.n
        d = self.done[g]
        if d >= n_before:
            return
        st = self._assoc_state[g]
        if st is None:
            st = self._assoc_state[g] = {"C": _Membership(self.m, self.r),
                                         "rows": _RowBuffer(self.r), "gens": _RowBuffer(self.r)}
        C, crows, gens = st["C"], st["rows"], st["gens"]
        pending = self.store.rows[d:n_before].copy()
        pkeys = self._keys(pending)
        pk = pkeys.tolist() if isinstance(pkeys, np.ndarray) else pkeys

        def absorb(prod, left_rows=None, right_rows=None):
            keys = self._keys(prod)
            new = C.filter_new(keys)
            if len(new) == 0:
                return prod[:0]
            fresh = prod[new]
            C.add(keys[new] if isinstance(keys, np.ndarray) else [keys[i] for i in new])
            crows.extend(fresh)
            origin = None
            if self.provenance:
                li = self._index_of_rows(left_rows[new])
                ri = self._index_of_rows(right_rows[new])
                origin = lambda p, li=li, ri=ri: (g, (li[p], ri[p]))
            self._insert(fresh, origin)
            return fresh

        for idx, key in enumerate(pk):
            if C.contains(key):
                continue
            p = pending[idx : idx + 1]
            C.add(pkeys[idx : idx + 1] if isinstance(pkeys, np.ndarray) else [key])
            old = crows.rows.copy()
            crows.extend(p)
            gens.extend(p)
            frontier = [p]
            if len(old):
                rp = np.repeat(p, len(old), axis=0)
                frontier.append(absorb(op.apply(self.m, old, rp).astype(np.uint8), old, rp))
            frontier = np.concatenate(frontier)
            while len(frontier):
                G = gens.rows
                step = max(1, _CHUNK // max(1, self.r * len(G)))
                nxt = []
                for s in range(0, len(frontier), step):
                    f = frontier[s : s + step]
                    left = np.repeat(f, len(G), axis=0)
                    right = np.tile(G, (len(f), 1))
                    nxt.append(absorb(op.apply(self.m, left, right).astype(np.uint8), left, right))
                    if self.store.n == self.total:
                        return self._mark_full()
                frontier = np.concatenate(nxt)
        n_after = self.store.n
        self.done[g] = n_after
        for h in self.plan.implied[g]:
            self.done[h] = n_after
        for h in self.plan.preserved[g]:
            if self.done[h] == n_before:
                self.done[h] = n_after

    def _mark_full(self):
        for i in range(len(self.done)):
            self.done[i] = self.store.n

    # -- driver

    def run(self, generators: np.ndarray) -> TupleRelation:
        gens = np.asarray(generators, dtype=np.uint8).reshape(-1, self.r)
        if gens.size and int(gens.max()) >= self.m:
            raise AlgebraError("generator entry outside the carrier")
        ops = self.alg.operations
        try:
            self._insert(gens, (lambda p: ("gen", p)) if self.provenance else None)
            for i in self.plan.nullary:
                c = np.full((1, self.r), ops[i].table[0], dtype=np.uint8)
                self._insert(c, (lambda p, i=i: (i, ())) if self.provenance else None)
                self.done[i] = 0
            work = self.plan.assoc + self.plan.other
            while self.store.n < self.total:
                n = self.store.n
                if all(self.done[i] >= n for i in work):
                    break
                for i in work:
                    if i in self._assoc_state:
                        self._run_assoc(i)
                    else:
                        self._run_generic(i)
                    if self.store.n == self.total:
                        break
        except _Found:
            pass
        return TupleRelation(self.m, self.r, self.store.rows.copy())


def sg_power(alg: FiniteAlgebra, r: int, generators: Iterable[Sequence[int]],
             max_tuples: int = DEFAULT_MAX_TUPLES) -> TupleRelation:
    """Subuniverse of ``alg**r`` generated by ``generators``."""
    gens = [tuple(int(x) for x in t) for t in generators]
    for t in gens:
        if len(t) != r:
            raise AlgebraError(f"generator {t} does not have length {r}")
        if any(not 0 <= x < alg.size for x in t):
            raise AlgebraError(f"generator {t} has an entry outside 0..{alg.size - 1}")
    rows = np.array(gens, dtype=np.uint8).reshape(-1, r)
    return Closure(alg, r, max_tuples).run(rows)


def is_closed(alg: FiniteAlgebra, rel: TupleRelation) -> bool:
    """Brute-force check that ``rel`` is a subuniverse of ``alg**arity``."""
    rows = rel.rows
    for op in alg.operations:
        if op.arity == 0:
            if np.full(rel.arity, op.table[0]) not in rel:
                return False
            continue
        n = len(rows)
        total = n**op.arity
        step = _CHUNK
        for start in range(0, total, step):
            idx = np.unravel_index(np.arange(start, min(total, start + step)), [n] * op.arity)
            res = op.apply(alg.size, *[rows[i] for i in idx])
            if not rel.contains_rows(res).all():
                return False
    return True


def naive_closure(alg: FiniteAlgebra, r: int, generators) -> set[tuple[int, ...]]:
    """Textbook fixpoint over Python tuples; slow, used as a test oracle."""
    cur = {tuple(g) for g in generators}
    for op in alg.operations:
        if op.arity == 0:
            cur.add((op.table[0],) * r)
    m = alg.size
    while True:
        new = set()
        lst = list(cur)
        for op in alg.operations:
            if op.arity == 0:
                continue
            for args in product(lst, repeat=op.arity):
                t = tuple(op.table[op.rank([a[j] for a in args], m)] for j in range(r))
                if t not in cur:
                    new.add(t)
        if not new:
            return cur
        cur |= new
