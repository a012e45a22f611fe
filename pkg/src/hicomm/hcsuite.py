"""The laws HC1-HC8 as executable checks over a congruence lattice.

Every law is evaluated on all congruence tuples of length at most ``n_max``
(sampled when the count exceeds ``budget``), computing both sides with the
chosen commutator method.  Congruences appear in witnesses by their index in
the canonical lattice order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations, product
from typing import Callable

import numpy as np

from .algebra import FiniteAlgebra
from .congruence import Congruence, CongruenceLattice, cg, con_lattice
from .delta import centralizes, commutator
from .malcev import has_malcev_term

LAWS = ("HC1", "HC2", "HC3", "HC4", "HC5", "HC6", "HC7", "HC8")
GENERAL_LAWS = ("HC1", "HC2", "HC3")
DEFAULT_BUDGET = 20_000


@dataclass
class LawResult:
    law: str
    checked: int = 0
    failures: int = 0
    counterexample: dict | None = None
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return self.skipped is None and self.failures == 0

    def fail(self, witness: dict):
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = witness

    def to_dict(self) -> dict:
        d = {"law": self.law, "checked": self.checked, "failures": self.failures,
             "passed": self.passed}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.skipped:
            d["skipped"] = self.skipped
        return d


@dataclass
class HCReport:
    algebra: str
    n_max: int
    method: str
    sampled: bool
    laws: dict[str, LawResult] = field(default_factory=dict)
    values: dict[tuple[int, ...], int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed or r.skipped for r in self.laws.values())

    def value(self, congs: tuple[int, ...]) -> int | None:
        return self.values.get(tuple(congs))

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "n_max": self.n_max,
            "method": self.method,
            "sampled": self.sampled,
            "passed": self.passed,
            "laws": [self.laws[k].to_dict() for k in LAWS if k in self.laws],
            "commutators": [{"congs": list(k), "value": v} for k, v in sorted(self.values.items())],
        }


class _Comm:
    """Commutators by lattice index, memoized."""

    def __init__(self, alg: FiniteAlgebra, L: CongruenceLattice, method: str, kw: dict):
        self.alg, self.L, self.method, self.kw = alg, L, method, kw
        self.memo: dict[tuple[int, ...], int] = {}

    def __call__(self, idx: tuple[int, ...]) -> int:
        idx = tuple(idx)
        if idx not in self.memo:
            c = commutator(self.alg, [self.L[i] for i in idx], self.method, **self.kw)
            self.memo[idx] = self.L.index_of(c)
        return self.memo[idx]


def _tuples(k: int, n: int, budget: int, rng) -> tuple[list[tuple[int, ...]], bool]:
    if k**n <= budget:
        return list(product(range(k), repeat=n)), False
    picks = rng.integers(0, k, size=(budget, n))
    return sorted({tuple(int(x) for x in row) for row in picks}), True


def hc_suite(alg: FiniteAlgebra, n_max: int = 3, method: str | None = None,
             laws: tuple[str, ...] | None = None, budget: int = DEFAULT_BUDGET,
             seed: int = 0, **kw) -> HCReport:
    """Check the HC laws; HC4-HC8 only run when a Mal'cev term exists."""
    malcev = has_malcev_term(alg)
    method = method or ("forks" if malcev else "termcond")
    L = con_lattice(alg)
    K = len(L)
    rng = np.random.default_rng(seed)
    comm = _Comm(alg, L, method, kw)
    meet, join = L.meet_index, L.join_index
    leq = np.array([[L.leq(i, j) for j in range(K)] for i in range(K)])

    tuples: dict[int, list[tuple[int, ...]]] = {}
    sampled = False
    for n in range(1, n_max + 1):
        tuples[n], s = _tuples(K, n, budget, rng)
        sampled |= s

    report = HCReport(alg.name, n_max, method, sampled)
    wanted = laws or LAWS
    for law in wanted:
        res = LawResult(law)
        report.laws[law] = res
        if law not in GENERAL_LAWS and not malcev:
            res.skipped = "no Mal'cev term"
            continue
        _CHECKS[law](res, tuples, comm, L, leq, meet, join, alg, kw)
    report.values = dict(comm.memo)
    return report


def _hc1(res, tuples, comm, L, leq, meet, join, alg, kw):
    for n, ts in tuples.items():
        for t in ts:
            m = t[0]
            for i in t[1:]:
                m = meet(m, i)
            res.checked += 1
            if not leq[comm(t), m]:
                res.fail({"congs": list(t), "commutator": comm(t), "meet": m})


def _hc2(res, tuples, comm, L, leq, meet, join, alg, kw):
    for n, ts in tuples.items():
        for a in ts:
            for b in ts:
                if all(leq[x, y] for x, y in zip(a, b)):
                    res.checked += 1
                    if not leq[comm(a), comm(b)]:
                        res.fail({"alpha": list(a), "beta": list(b),
                                  "values": [comm(a), comm(b)]})


def _hc3(res, tuples, comm, L, leq, meet, join, alg, kw):
    for n, ts in tuples.items():
        if n < 2:
            continue
        for t in ts:
            res.checked += 1
            if not leq[comm(t), comm(t[1:])]:
                res.fail({"congs": list(t), "values": [comm(t), comm(t[1:])]})


def _hc4(res, tuples, comm, L, leq, meet, join, alg, kw):
    for n, ts in tuples.items():
        for t in ts:
            v = comm(t)
            for sigma in permutations(range(n)):
                s = tuple(t[j] for j in sigma)
                res.checked += 1
                if comm(s) != v:
                    res.fail({"congs": list(t), "sigma": list(sigma), "values": [v, comm(s)]})


def _hc5(res, tuples, comm, L, leq, meet, join, alg, kw):
    for n, ts in tuples.items():
        for t in ts:
            v = comm(t)
            cs = [L[i] for i in t]
            for g in range(len(L)):
                res.checked += 1
                lhs = centralizes(alg, cs[:-1], cs[-1], L[g], **kw)
                if lhs != bool(leq[v, g]):
                    res.fail({"congs": list(t), "gamma": g, "centralizes": lhs,
                              "commutator": v})


def _quotient_congruence(eta: Congruence, c: Congruence) -> Congruence:
    """``c / eta`` on the blocks of ``eta`` (requires eta <= c)."""
    labels = [0] * eta.num_blocks
    for x, b in enumerate(eta.blocks):
        labels[b] = c.blocks[x]
    return Congruence.from_labels(labels)


def _hc6(res, tuples, comm, L, leq, meet, join, alg, kw):
    for e in range(len(L)):
        eta = L[e]
        B = alg.quotient(eta.blocks)
        for n, ts in tuples.items():
            for t in ts:
                if not all(leq[e, i] for i in t):
                    continue
                res.checked += 1
                lhs = commutator(B, [_quotient_congruence(eta, L[i]) for i in t], comm.method, **kw)
                rhs = _quotient_congruence(eta, L[join(comm(t), e)])
                if lhs != rhs:
                    res.fail({"eta": e, "congs": list(t), "quotient_value": str(lhs),
                              "expected": str(rhs)})


def _hc7(res, tuples, comm, L, leq, meet, join, alg, kw):
    K = len(L)
    prefixes = {0: [()]}
    prefixes.update({n: ts for n, ts in tuples.items()})
    n_max = max(tuples)
    for n in range(1, n_max + 1):
        for p in prefixes[n - 1]:
            for r1, r2 in combinations_with_replacement(range(K), 2):
                res.checked += 1
                lhs = join(comm(p + (r1,)), comm(p + (r2,)))
                rhs = comm(p + (join(r1, r2),))
                if lhs != rhs:
                    res.fail({"prefix": list(p), "rho": [r1, r2], "values": [lhs, rhs]})


def _hc8(res, tuples, comm, L, leq, meet, join, alg, kw):
    for n, ts in tuples.items():
        for t in ts:
            v = comm(t)
            for i in range(1, n):
                inner = comm(t[:i])
                lhs = comm((inner,) + t[i:])
                res.checked += 1
                if not leq[lhs, v]:
                    res.fail({"congs": list(t), "i": i, "values": [lhs, v]})


_CHECKS: dict[str, Callable] = {
    "HC1": _hc1, "HC2": _hc2, "HC3": _hc3, "HC4": _hc4,
    "HC5": _hc5, "HC6": _hc6, "HC7": _hc7, "HC8": _hc8,
}
