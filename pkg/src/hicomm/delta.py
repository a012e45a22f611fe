"""Delta relations and higher commutators.

``delta(alg, [a0, ..., a_{n-1}])`` is the subuniverse of ``alg**(2**n)``
generated by the tuples ``generator_tuple(i, n, a, b)`` with ``(a, b)`` in
``a_i``.  Commutators are read off it in two independent ways:

* ``commutator_forks``: the forks at the top coordinate (Mal'cev algebras);
* ``commutator_termcond``: the least congruence modulo which no tuple of the
  relation violates the term condition (any algebra).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .congruence import Congruence, cg, is_congruence
from .errors import AlgebraError, NoMalcevTermError, ResourceLimitError, VerificationError
from .hypercube import face_indices, fork_matrix, generator_tuple
from .malcev import is_malcev_term, malcev_term_of, strong_cube_term
from .relation import DEFAULT_MAX_TUPLES, Closure, TupleRelation
from .terms import Term, eval_term_vec

METHODS = ("forks", "termcond", "both")


def max_dimension(m: int) -> int:
    """Default cap on the number of congruences in a Delta relation."""
    if m <= 3:
        return 4
    if m <= 12:
        return 3
    return 2


class _DeltaCache:
    """Memo of Delta relations keyed by algebra and ordered congruence tuple."""

    def __init__(self, limit: int = 4096):
        self.data: dict = {}
        self.lock = threading.Lock()
        self.limit = limit

    def get(self, key):
        return self.data.get(key)

    def put(self, key, value):
        with self.lock:
            if len(self.data) >= self.limit:
                self.data.pop(next(iter(self.data)))
            self.data.setdefault(key, value)

    def clear(self):
        with self.lock:
            self.data.clear()


DELTA_CACHE = _DeltaCache()


def check_congruences(alg: FiniteAlgebra, congs: Sequence[Congruence]) -> tuple[Congruence, ...]:
    out = []
    for c in congs:
        if not isinstance(c, Congruence):
            c = Congruence.from_labels(c)
        if c.size != alg.size:
            raise AlgebraError(f"congruence {c} is over a carrier of size {c.size}, not {alg.size}")
        if not is_congruence(alg, c):
            raise AlgebraError(f"partition {c} is not a congruence of {alg.name}")
        out.append(c)
    return tuple(out)


def delta_generators(alg: FiniteAlgebra, congs: Sequence[Congruence]) -> np.ndarray:
    n = len(congs)
    gens = []
    for i, c in enumerate(congs):
        for a, b in sorted(c.pairs()):
            gens.append(generator_tuple(i, n, a, b))
    return np.array(gens, dtype=np.uint8).reshape(-1, 1 << n)


def delta(alg: FiniteAlgebra, congs: Sequence[Congruence], max_tuples: int = DEFAULT_MAX_TUPLES,
          max_dim: int | None = None) -> TupleRelation:
    """The 2**n-ary relation Delta(a_0, ..., a_{n-1}); ``A`` as 1-tuples for n = 0."""
    congs = check_congruences(alg, congs)
    n = len(congs)
    if n == 0:
        return TupleRelation.full(alg.size, 1)
    cap = max_dimension(alg.size) if max_dim is None else max_dim
    if n > cap:
        raise ResourceLimitError(
            f"dimension {n} exceeds the cap {cap} for a carrier of size {alg.size}")
    key = (alg, congs)
    hit = DELTA_CACHE.get(key)
    if hit is not None:
        # a cached relation must respect the caller's limit like a fresh closure would
        if len(hit) > max_tuples:
            raise ResourceLimitError(
                f"Delta has {len(hit)} tuples, over the limit {max_tuples}", reached=max_tuples)
        return hit
    R = Closure(alg, 1 << n, max_tuples).run(delta_generators(alg, congs))
    DELTA_CACHE.put(key, R)
    return R


# --------------------------------------------------------------------------
# commutators


def _pairs_to_congruence(alg: FiniteAlgebra, M: np.ndarray, what: str) -> Congruence:
    """Turn a reflexive relation matrix into a Congruence, insisting it already is one."""
    m = alg.size
    if not M[np.arange(m), np.arange(m)].all():
        raise VerificationError(f"{what} is not reflexive")
    if not (M == M.T).all():
        raise VerificationError(f"{what} is not symmetric")
    if (((M.astype(np.int64) @ M.astype(np.int64)) > 0) & ~M).any():
        raise VerificationError(f"{what} is not transitive")
    labels = [int(np.flatnonzero(M[a])[0]) for a in range(m)]
    c = Congruence.from_labels(labels)
    if not is_congruence(alg, c):
        raise VerificationError(f"{what} is not compatible with the operations")
    return c


def commutator_forks(alg: FiniteAlgebra, congs: Sequence[Congruence], q: Term | None = None,
                     **kw) -> Congruence:
    """Forks of Delta at coordinate 2**n - 1 (needs a Mal'cev term)."""
    congs = check_congruences(alg, congs)
    if not congs:
        raise AlgebraError("a commutator needs at least one congruence")
    if q is None:
        malcev_term_of(alg)
    elif not is_malcev_term(alg, q):
        raise NoMalcevTermError(f"{q} is not a Mal'cev term of {alg.name}")
    if len(congs) == 1:
        return congs[0]
    R = delta(alg, congs, **kw)
    return _pairs_to_congruence(alg, fork_matrix(R, R.arity - 1),
                                f"fork set of Delta{tuple(map(str, congs))}")


def termcond_violations(R: TupleRelation, gamma: Congruence) -> np.ndarray:
    """Pairs ``(a_{h-1}, a_{2h-1})`` of tuples breaking the term condition modulo gamma."""
    h = R.arity // 2
    rows = R.rows
    L = gamma.array[rows]
    ok = np.all(L[:, : h - 1] == L[:, h : 2 * h - 1], axis=1) & (L[:, h - 1] != L[:, 2 * h - 1])
    bad = rows[ok][:, [h - 1, 2 * h - 1]].astype(np.int64)
    return np.unique(bad, axis=0) if len(bad) else bad.reshape(0, 2)


def commutator_termcond(alg: FiniteAlgebra, congs: Sequence[Congruence], **kw) -> Congruence:
    """Least gamma such that a_0..a_{n-2} centralize a_{n-1} modulo gamma."""
    congs = check_congruences(alg, congs)
    if not congs:
        raise AlgebraError("a commutator needs at least one congruence")
    if len(congs) == 1:
        return congs[0]
    R = delta(alg, congs, **kw)
    gamma = Congruence.zero(alg.size)
    while True:
        bad = termcond_violations(R, gamma)
        if len(bad) == 0:
            return gamma
        gamma = cg(alg, gamma.generating_pairs() + [tuple(p) for p in bad.tolist()])


def commutator(alg: FiniteAlgebra, congs: Sequence[Congruence], method: str = "forks",
               **kw) -> Congruence:
    if method == "forks":
        return commutator_forks(alg, congs, **kw)
    if method == "termcond":
        return commutator_termcond(alg, congs, **kw)
    if method == "both":
        a = commutator_forks(alg, congs, **kw)
        b = commutator_termcond(alg, congs, **kw)
        if a != b:
            raise VerificationError(f"fork commutator {a} differs from term-condition commutator {b}")
        return a
    raise AlgebraError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def centralizes(alg: FiniteAlgebra, congs: Sequence[Congruence], alpha: Congruence,
                gamma: Congruence, **kw) -> bool:
    """Whether ``congs`` centralize ``alpha`` modulo ``gamma``."""
    allc = check_congruences(alg, list(congs) + [alpha, gamma])
    if len(allc) == 2:
        # n = 1: the condition says alpha itself lies below gamma
        return allc[0] <= allc[1]
    return len(termcond_violations(delta(alg, allc[:-1], **kw), allc[-1])) == 0


# --------------------------------------------------------------------------
# membership through the strong cube term


class CommutatorCache:
    """Commutators of sub-tuples, computed on demand."""

    def __init__(self, alg: FiniteAlgebra, method: str = "forks", **kw):
        self.alg = alg
        self.method = method
        self.kw = kw
        self.values: dict[tuple, Congruence] = {}

    def __call__(self, congs: Sequence[Congruence]) -> Congruence:
        key = tuple(congs)
        if key not in self.values:
            self.values[key] = commutator(self.alg, key, self.method, **self.kw)
        return self.values[key]


def _cube_term(alg: FiniteAlgebra, n: int, terms: dict) -> Term:
    if n not in terms:
        terms[n] = strong_cube_term(alg, n).term
    return terms[n]


def delta_membership_rows(alg: FiniteAlgebra, rows: np.ndarray, congs: Sequence[Congruence],
                          cache: CommutatorCache | None = None, _terms: dict | None = None) -> np.ndarray:
    """Vectorized ``delta_membership`` for a 2-D array of candidate tuples."""
    congs = tuple(congs)
    cache = cache or CommutatorCache(alg)
    terms = {} if _terms is None else _terms
    n = len(congs)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, 1 << n)
    if n == 0:
        return np.ones(len(rows), dtype=bool)
    ok = np.ones(len(rows), dtype=bool)
    for j in range(n):
        sub = congs[:j] + congs[j + 1 :]
        idx = face_indices(n, j, 0)
        live = np.flatnonzero(ok)
        ok[live] = delta_membership_rows(alg, rows[live][:, idx], sub, cache, terms)
    live = np.flatnonzero(ok)
    if len(live):
        top = (1 << n) - 1
        qn = _cube_term(alg, n, terms)
        sub_rows = rows[live]
        val = eval_term_vec(alg, qn, [sub_rows[:, k] for k in range(top)])
        blk = cache(congs).array
        ok[live] = blk[val] == blk[sub_rows[:, top]]
    return ok


def delta_membership(alg: FiniteAlgebra, tup: Sequence[int], congs: Sequence[Congruence],
                     cache: CommutatorCache | None = None) -> bool:
    """Decide ``tup in delta(alg, congs)`` from faces and the strong cube term."""
    congs = check_congruences(alg, congs)
    if len(tup) != 1 << len(congs):
        raise AlgebraError(f"tuple of length {len(tup)} for {len(congs)} congruences")
    if any(not 0 <= x < alg.size for x in tup):
        raise AlgebraError(f"tuple {tuple(tup)} leaves the carrier")
    return bool(delta_membership_rows(alg, np.array([tup]), congs, cache)[0])


# --------------------------------------------------------------------------
# supernilpotence


@dataclass
class SupernilpotenceResult:
    degree: int | None
    kmax: int
    levels: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"degree": self.degree, "kmax": self.kmax, "levels": self.levels}


def supernilpotence_degree(alg: FiniteAlgebra, kmax: int, max_dim: int | None = None,
                           **kw) -> SupernilpotenceResult:
    """Smallest k <= kmax with [1, ..., 1] (k+1 entries) equal to 0.

    Levels within the dimension cap are computed exactly.  Above it the value
    ``[c, 1]`` is used, where ``c`` is the previous level's value: it lies
    below the (k+1)-ary commutator, so a nonzero value settles the level.  A
    zero bound above the cap is inconclusive and raises ResourceLimitError.
    """
    if kmax < 1:
        raise AlgebraError("kmax must be at least 1")
    malcev_term_of(alg)
    m = alg.size
    one, zero = Congruence.one(m), Congruence.zero(m)
    cap = max_dimension(m) if max_dim is None else max_dim
    res = SupernilpotenceResult(None, kmax)
    prev = one
    for k in range(1, kmax + 1):
        n = k + 1
        if n <= cap:
            val = commutator_forks(alg, [one] * n, max_dim=cap, **kw)
            method = "exact"
        else:
            val = commutator_forks(alg, [prev, one], max_dim=cap, **kw)
            method = "lower-bound"
            if val == zero:
                raise ResourceLimitError(
                    f"[1,...,1] with {n} entries is beyond the dimension cap {cap} "
                    "and the lower bound is inconclusive")
        res.levels.append({"k": k, "arity": n, "value": str(val), "method": method})
        if val == zero:
            res.degree = k
            return res
        prev = val
    return res


# --------------------------------------------------------------------------
# joins of Delta relations


def delta_join_check(alg: FiniteAlgebra, congs: Sequence[Congruence], rhos: Sequence[Congruence],
                     **kw) -> bool:
    """Delta(congs, join of rhos) equals the subuniverse generated by the Delta(congs, rho_i)."""
    congs = check_congruences(alg, congs)
    rhos = check_congruences(alg, rhos)
    if not rhos:
        raise AlgebraError("need at least one congruence to join")
    top = rhos[0]
    for r in rhos[1:]:
        top = cg(alg, top.generating_pairs() + r.generating_pairs())
    left = delta(alg, congs + (top,), **kw)
    parts = np.concatenate([delta(alg, congs + (r,), **kw).rows for r in rhos])
    right = Closure(alg, left.arity, kw.get("max_tuples", DEFAULT_MAX_TUPLES)).run(parts)
    return left == right


__all__ = [
    "METHODS", "DELTA_CACHE", "CommutatorCache", "SupernilpotenceResult", "centralizes",
    "check_congruences", "commutator", "commutator_forks", "commutator_termcond", "delta",
    "delta_generators", "delta_join_check", "delta_membership", "delta_membership_rows",
    "max_dimension", "supernilpotence_degree", "termcond_violations",
]
