"""JSON algebra files.

Schema::

    {"name": "Z2", "size": 2,
     "operations": [{"symbol": "+", "arity": 2, "table": [0, 1, 1, 0]}],
     "malcev_term": "(+ x0 (+ x1 x2))",      # optional, verified on load
     "with_constants": false}                 # optional

Tables list values in lexicographic order of the argument tuple, leftmost
argument most significant.
"""
from __future__ import annotations

import json
import os
from typing import Any

from .algebra import MAX_ARITY, FiniteAlgebra, OperationTable
from .errors import AlgebraError
from .malcev import is_malcev_term
from .terms import parse_term
from .zoo import zoo

_KEYS = {"name", "size", "operations", "malcev_term", "with_constants"}
_OP_KEYS = {"symbol", "arity", "table"}


def _need(cond: bool, where: str, msg: str):
    if not cond:
        raise AlgebraError(f"{where}: {msg}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def algebra_from_dict(doc: Any, max_arity: int = MAX_ARITY) -> FiniteAlgebra:
    _need(isinstance(doc, dict), "$", "document must be a JSON object")
    extra = set(doc) - _KEYS
    _need(not extra, "$", f"unknown keys {sorted(extra)}")
    _need("size" in doc, "$", "missing 'size'")
    m = doc["size"]
    _need(_is_int(m) and m >= 1, "$.size", "must be a positive integer")
    ops_doc = doc.get("operations", [])
    _need(isinstance(ops_doc, list), "$.operations", "must be a list")
    ops = []
    for i, od in enumerate(ops_doc):
        where = f"$.operations[{i}]"
        _need(isinstance(od, dict), where, "must be an object")
        _need(not set(od) - _OP_KEYS, where, f"unknown keys {sorted(set(od) - _OP_KEYS)}")
        for key in ("symbol", "arity", "table"):
            _need(key in od, where, f"missing {key!r}")
        sym, k, table = od["symbol"], od["arity"], od["table"]
        _need(isinstance(sym, str) and sym and not any(c.isspace() or c in "()" for c in sym),
              f"{where}.symbol", "must be a non-empty string without spaces or parentheses")
        _need(_is_int(k) and 0 <= k <= max_arity, f"{where}.arity",
              f"must be an integer between 0 and {max_arity}")
        _need(isinstance(table, list), f"{where}.table", "must be a list")
        _need(len(table) == m**k, f"{where}.table",
              f"has {len(table)} entries, expected {m}**{k} = {m**k}")
        bad = [j for j, x in enumerate(table) if not (_is_int(x) and 0 <= x < m)]
        _need(not bad, f"{where}.table[{bad[0] if bad else 0}]", f"entry outside 0..{m - 1}")
        ops.append(OperationTable(sym, k, tuple(table)))
    name = doc.get("name", "algebra")
    _need(isinstance(name, str), "$.name", "must be a string")
    alg = FiniteAlgebra(m, ops, name, max_arity=max_arity)
    wc = doc.get("with_constants", False)
    _need(isinstance(wc, bool), "$.with_constants", "must be a boolean")
    if wc:
        alg = alg.with_constants()
    if doc.get("malcev_term") is not None:
        text = doc["malcev_term"]
        _need(isinstance(text, str), "$.malcev_term", "must be a string")
        q = parse_term(text)
        if not is_malcev_term(alg, q):
            raise AlgebraError(f"$.malcev_term: {text} fails q(x,y,y)=x or q(x,x,y)=y")
        alg = FiniteAlgebra(alg.size, alg.operations, alg.name, malcev_term=q,
                            max_arity=alg.max_arity)
    return alg


def parse_algebra(source: str, max_arity: int = MAX_ARITY) -> FiniteAlgebra:
    """Load from ``zoo:<name>``, a file path, or JSON text."""
    s = source.strip()
    if s.startswith("zoo:"):
        return zoo(s)
    if s.startswith("{"):
        text = s
    elif os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        raise AlgebraError(f"{source!r} is neither a zoo name, a file, nor JSON text")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return algebra_from_dict(doc, max_arity)


def algebra_to_dict(alg: FiniteAlgebra) -> dict:
    return alg.to_dict()


def serialize_algebra(alg: FiniteAlgebra) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(alg.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
