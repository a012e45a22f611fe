"""Mal'cev term search and strong cube terms."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .algebra import FiniteAlgebra
from .errors import NoMalcevTermError, VerificationError
from .relation import DEFAULT_MAX_TUPLES, Closure
from .terms import App, Term, Var, check_term, eval_term_vec, substitute, term_arity

EXHAUSTIVE_BUDGET = 2**20
SAMPLES = 100_000


@dataclass
class MalcevSearch:
    term: Term | None
    explored: int
    columns: int


def malcev_columns(m: int) -> list[tuple[int, int, int]]:
    """Triples (a,b,b) for all a, b, then (a,a,b) for a != b."""
    cols = [(a, b, b) for a, b in product(range(m), repeat=2)]
    cols += [(a, a, b) for a, b in product(range(m), repeat=2) if a != b]
    return cols


def search_malcev_term(alg: FiniteAlgebra, max_tuples: int = DEFAULT_MAX_TUPLES) -> MalcevSearch:
    """Close the three projections restricted to ``malcev_columns``.

    A Mal'cev term exists iff the closure contains the tuple that picks the
    first entry on (a,b,b)-columns and the last on (a,a,b)-columns; the
    producing term is read off the back-pointers.
    """
    cols = malcev_columns(alg.size)
    gens = np.array([[c[j] for c in cols] for j in range(3)], dtype=np.uint8)
    target = [c[0] if c[1] == c[2] else c[2] for c in cols]
    run = Closure(alg, len(cols), max_tuples=max_tuples, provenance=True, target=target)
    run.run(gens)
    explored = run.store.n
    if not run.found:
        for j in range(3):
            if list(gens[j]) == target:
                return MalcevSearch(Var(j), explored, len(cols))
        return MalcevSearch(None, explored, len(cols))
    key = run._keys(np.array([target], dtype=np.uint8))
    key = key.tolist()[0] if isinstance(key, np.ndarray) else key[0]
    return MalcevSearch(_term_from_provenance(alg, run, run.index[key]), explored, len(cols))


def _term_from_provenance(alg: FiniteAlgebra, run: Closure, idx: int) -> Term:
    memo: dict[int, Term] = {}
    stack = [idx]
    while stack:
        i = stack[-1]
        if i in memo:
            stack.pop()
            continue
        origin = run.prov[i]
        if origin[0] == "gen":
            memo[i] = Var(origin[1])
            stack.pop()
            continue
        op, args = origin
        todo = [a for a in args if a not in memo]
        if todo:
            stack.extend(todo)
            continue
        memo[i] = App(alg.operations[op].symbol, [memo[a] for a in args])
        stack.pop()
    return memo[idx]


def find_malcev_term(alg: FiniteAlgebra, max_tuples: int = DEFAULT_MAX_TUPLES) -> Term | None:
    return search_malcev_term(alg, max_tuples).term


def is_malcev_term(alg: FiniteAlgebra, t: Term) -> bool:
    """Exhaustive check of q(x,y,y) = x and q(x,x,y) = y."""
    if term_arity(t) > 3:
        return False
    check_term(alg, t, 3)
    x, y = np.meshgrid(np.arange(alg.size), np.arange(alg.size), indexing="ij")
    x, y = x.ravel(), y.ravel()
    return bool((eval_term_vec(alg, t, [x, y, y]) == x).all()
                and (eval_term_vec(alg, t, [x, x, y]) == y).all())


@lru_cache(maxsize=128)
def malcev_term_of(alg: FiniteAlgebra) -> Term:
    """The supplied Mal'cev term if it verifies, else a discovered one."""
    if alg.malcev_term is not None:
        if not is_malcev_term(alg, alg.malcev_term):
            raise NoMalcevTermError(f"supplied term {alg.malcev_term} is not a Mal'cev term")
        return alg.malcev_term
    t = find_malcev_term(alg)
    if t is None:
        raise NoMalcevTermError(f"{alg.name} has no Mal'cev term")
    if not is_malcev_term(alg, t):
        raise VerificationError(f"search returned {t}, which fails the Mal'cev identities")
    return t


def has_malcev_term(alg: FiniteAlgebra) -> bool:
    try:
        malcev_term_of(alg)
    except NoMalcevTermError:
        return False
    return True


# --------------------------------------------------------------------------
# strong cube terms


@dataclass
class CubeTermWitness:
    n: int
    term: Term
    verified: bool = False
    method: str = ""
    checked: int = 0
    counterexample: tuple | None = field(default=None, repr=False)


def build_strong_cube_term(q: Term, n: int) -> Term:
    """q_2(x0,x1,x2) = q(x1,x0,x2); q_{k+1} glues two copies of q_k with q_2."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if n == 1:
        return Var(0)
    qn = substitute(q, [Var(1), Var(0), Var(2)])
    q2 = qn
    for k in range(2, n):
        h = 1 << k
        left = substitute(qn, [Var(j) for j in range(h - 1)])
        right = substitute(qn, [Var(h + j) for j in range(h - 1)])
        qn = substitute(q2, [left, Var(h - 1), right])
    return qn


def _class_map(n: int, i: int) -> list[int]:
    """Vertex k -> index of k with digit i deleted."""
    low = (1 << i) - 1
    return [(k & low) | ((k >> (i + 1)) << i) for k in range(1 << n)]


def verify_strong_cube(alg: FiniteAlgebra, witness: CubeTermWitness | Term, n: int | None = None,
                       budget: int = EXHAUSTIVE_BUDGET, samples: int = SAMPLES, seed: int = 0):
    """Check the n strong-cube identities.

    Returns ``(ok, counterexample, method, checked)`` where a counterexample is
    ``(i, x)`` with ``x`` the full 2**n-tuple of vertex values whose first
    2**n - 1 entries make ``q_n`` miss the last one.
    """
    if isinstance(witness, CubeTermWitness):
        term, n = witness.term, witness.n
    else:
        term = witness
    m = alg.size
    top = (1 << n) - 1
    nv = 1 << (n - 1)
    exhaustive = m**nv <= budget
    rng = np.random.default_rng(seed)
    checked = 0
    for i in range(n):
        cls = _class_map(n, i)
        if exhaustive:
            total = m**nv
            chunks = [(s, min(total, s + 65536)) for s in range(0, total, 65536)]
        else:
            chunks = [(s, min(samples, s + 65536)) for s in range(0, samples, 65536)]
        for lo, hi in chunks:
            if exhaustive:
                codes = np.arange(lo, hi, dtype=np.int64)
                vals = np.stack([(codes // m ** (nv - 1 - j)) % m for j in range(nv)])
            else:
                vals = rng.integers(0, m, size=(nv, hi - lo))
            cols = [vals[cls[k]] for k in range(top)]
            got = eval_term_vec(alg, term, cols)
            want = vals[cls[top]]
            bad = np.flatnonzero(got != want)
            checked += hi - lo
            if len(bad):
                x = tuple(int(vals[cls[k], bad[0]]) for k in range(top + 1))
                return False, (i, x), "exhaustive" if exhaustive else "sampled", checked
    return True, None, "exhaustive" if exhaustive else "sampled", checked


def strong_cube_term(alg: FiniteAlgebra, n: int, q: Term | None = None, **kw) -> CubeTermWitness:
    """Build q_n from a Mal'cev term and verify it; raises if verification fails."""
    q = q if q is not None else malcev_term_of(alg)
    w = CubeTermWitness(n, build_strong_cube_term(q, n))
    if n == 1:
        w.verified, w.method = True, "trivial"
        return w
    ok, cex, method, checked = verify_strong_cube(alg, w, **kw)
    w.verified, w.method, w.checked, w.counterexample = ok, method, checked, cex
    if not ok:
        raise VerificationError(f"strong {n}-cube term fails identity {cex[0]} at {cex[1]}")
    return w


def malcev_from_cube_term(qn: Term, n: int) -> Term:
    """q(x,y,z) = q_n(y, ..., y, x, z)."""
    arity = (1 << n) - 1
    args = [Var(1)] * (arity - 2) + [Var(0), Var(2)]
    return substitute(qn, args)
