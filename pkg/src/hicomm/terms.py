"""Terms over an algebra's signature and their evaluation.

Text syntax is parenthesized prefix notation::

    term := var | "(" symbol term* ")"
    var  := "x" digits

so ``(+ x0 (+ x1 x2))`` is the ternary sum.  A nullary symbol is written
``(e)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .algebra import FiniteAlgebra
from .errors import AlgebraError


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True, repr=False)
class App:
    symbol: str
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def __str__(self):
        if not self.children:
            return f"({self.symbol})"
        return "(" + " ".join([self.symbol] + [str(c) for c in self.children]) + ")"

    def __repr__(self):
        # str() of a heavily shared term can be exponentially long
        n = term_size(self)
        return f"App({str(self)!r})" if n <= 200 else f"App({self.symbol!r}, size={n})"


Term = Union[Var, App]

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_VAR = re.compile(r"x(\d+)$")


def parse_term(text: str) -> Term:
    tokens = _TOKEN.findall(text)
    if not tokens or "".join(tokens) != re.sub(r"\s+", "", text):
        raise AlgebraError(f"cannot tokenize term {text!r}")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise AlgebraError(f"unexpected end of term {text!r}")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens) or tokens[pos] in "()":
                raise AlgebraError(f"missing operation symbol in {text!r}")
            sym = tokens[pos]
            if _VAR.match(sym):
                raise AlgebraError(f"variable {sym!r} used as an operation symbol in {text!r}")
            pos += 1
            kids = []
            while pos < len(tokens) and tokens[pos] != ")":
                kids.append(parse())
            if pos >= len(tokens):
                raise AlgebraError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return App(sym, kids)
        if tok == ")":
            raise AlgebraError(f"unexpected ')' in {text!r}")
        m = _VAR.match(tok)
        if not m:
            raise AlgebraError(f"bad variable {tok!r} in {text!r} (expected x<digits>)")
        return Var(int(m.group(1)))

    t = parse()
    if pos != len(tokens):
        raise AlgebraError(f"trailing input in term {text!r}")
    return t


def _postorder(t: Term) -> list[App]:
    """Distinct application nodes of ``t`` (by identity), children first."""
    seen: set[int] = set()
    out: list[App] = []
    stack = [(t, False)]
    while stack:
        s, ready = stack.pop()
        if isinstance(s, Var) or (not ready and id(s) in seen):
            continue
        if ready:
            out.append(s)
            continue
        seen.add(id(s))
        stack.append((s, True))
        stack.extend((c, False) for c in reversed(s.children))
    return out


def term_arity(t: Term) -> int:
    """One more than the largest variable index occurring in ``t``."""
    if isinstance(t, Var):
        return t.index + 1
    return max((c.index + 1 for s in _postorder(t) for c in s.children if isinstance(c, Var)),
               default=0)


def term_size(t: Term) -> int:
    """Number of nodes of ``t`` as a tree (shared subterms counted each time)."""
    size: dict[int, int] = {}
    for s in _postorder(t):
        size[id(s)] = 1 + sum(1 if isinstance(c, Var) else size[id(c)] for c in s.children)
    return 1 if isinstance(t, Var) else size[id(t)]


def substitute(t: Term, args: Sequence[Term]) -> Term:
    """Replace each variable ``x_i`` by ``args[i]``; shared subterms stay shared."""
    if isinstance(t, Var):
        return args[t.index]
    new: dict[int, Term] = {}
    for s in _postorder(t):
        new[id(s)] = App(s.symbol, [args[c.index] if isinstance(c, Var) else new[id(c)]
                                    for c in s.children])
    return new[id(t)]


def check_term(alg: FiniteAlgebra, t: Term, nvars: int | None = None) -> None:
    nodes = _postorder(t)
    vars_ = [t] if isinstance(t, Var) else [c for s in nodes for c in s.children if isinstance(c, Var)]
    for v in vars_:
        if v.index < 0 or (nvars is not None and v.index >= nvars):
            raise AlgebraError(f"variable x{v.index} out of range")
    for s in nodes:
        op = alg.op(s.symbol)
        if op.arity != len(s.children):
            raise AlgebraError(
                f"symbol {s.symbol!r} has arity {op.arity} but is applied to {len(s.children)} terms"
            )


def eval_term(alg: FiniteAlgebra, t: Term, assignment: Sequence[int]) -> int:
    """Value of the term operation of ``t`` at ``assignment``."""
    check_term(alg, t, len(assignment))
    if isinstance(t, Var):
        return assignment[t.index]
    val: dict[int, int] = {}
    for s in _postorder(t):
        op = alg.op(s.symbol)
        args = [assignment[c.index] if isinstance(c, Var) else val[id(c)] for c in s.children]
        val[id(s)] = op.table[op.rank(args, alg.size)]
    return val[id(t)]


def eval_term_vec(alg: FiniteAlgebra, t: Term, columns: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate ``t`` on many assignments at once.

    ``columns[i]`` holds the values of ``x_i``; all columns share one shape.
    """
    check_term(alg, t, len(columns))
    cols = [np.asarray(c, dtype=np.int64) for c in columns]
    if isinstance(t, Var):
        return cols[t.index]
    shape = cols[0].shape if cols else ()
    val: dict[int, np.ndarray] = {}
    for s in _postorder(t):
        op = alg.op(s.symbol)
        if op.arity == 0:
            val[id(s)] = np.full(shape, op.table[0], dtype=np.int64)
        else:
            val[id(s)] = op.apply(alg.size, *[cols[c.index] if isinstance(c, Var) else val[id(c)]
                                              for c in s.children])
    return val[id(t)]
