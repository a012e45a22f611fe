"""Command line interface: ``hicomm <command> ALGEBRA [options]``.

Every command prints one report (JSON by default).  Exit codes: 0 success,
1 a checked property failed, 2 usage or input error, 3 resource limit hit.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from . import __version__
from .algebra import FiniteAlgebra
from .clones import check_largest_clone, largest_commutator_preserving_clone, polymorphisms
from .congruence import Congruence, CongruenceLattice, con_lattice
from .delta import (METHODS, centralizes, commutator, delta, supernilpotence_degree)
from .errors import AlgebraError, NoMalcevTermError, ResourceLimitError, VerificationError
from .hcsuite import hc_suite
from .io import parse_algebra
from .malcev import is_malcev_term, malcev_from_cube_term, search_malcev_term, strong_cube_term
from .relation import DEFAULT_MAX_TUPLES
from .zoo import MALCEV_ZOO, NON_MALCEV_ZOO, zoo, zoo_names

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hicomm", description="Higher commutators of finite algebras.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_, algebra=True, congs=False):
        s = sub.add_parser(name, help=help_)
        if algebra:
            s.add_argument("algebra", help="zoo:<name>, a JSON file, or JSON text")
            s.add_argument("--with-constants", action="store_true",
                           help="add every element as a nullary operation first")
            s.add_argument("--max-tuples", type=int, default=DEFAULT_MAX_TUPLES)
            s.add_argument("--max-dim", type=int, default=None,
                           help="override the dimension cap for Delta relations")
        if congs:
            s.add_argument("--congs", help="comma-separated canonical congruence indices")
            s.add_argument("--congs-blocks", help='block notation, e.g. "0,1|2,3;0|1|2|3"')
        s.add_argument("--format", choices=("json", "text"), default="json")
        s.add_argument("--timings", action="store_true", help="include wall-clock durations")
        return s

    cmd("con", "list the congruence lattice")
    s = cmd("delta", "size and tuples of Delta", congs=True)
    s.add_argument("--tuples", action="store_true", help="list all tuples")
    s = cmd("commutator", "higher commutator of the given congruences", congs=True)
    s.add_argument("--method", choices=METHODS, default="forks")
    s = cmd("centralizes", "do the first n-1 congruences centralize the last modulo gamma",
            congs=True)
    s.add_argument("--gamma", help="canonical index of gamma")
    s.add_argument("--gamma-blocks", help="gamma in block notation")
    s = cmd("supernilpotence", "least k with [1,...,1] (k+1 entries) = 0")
    s.add_argument("--kmax", type=int, default=3)
    cmd("malcev", "search for a Mal'cev term")
    s = cmd("cube-term", "build and verify a strong n-cube term")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s = cmd("hc-verify", "check HC1-HC8 on all congruence tuples")
    s.add_argument("--n", type=int, default=3, help="largest tuple length")
    s.add_argument("--method", choices=("forks", "termcond"), default=None)
    s.add_argument("--budget", type=int, default=20_000)
    s.add_argument("--seed", type=int, default=0)
    s = cmd("pol-delta", "polymorphisms of Delta up to an arity bound", congs=True)
    s.add_argument("--arity-bound", type=int, default=2)
    s = cmd("largest-clone", "check that Pol(Delta) is the largest commutator-preserving clone",
            congs=True)
    s.add_argument("--arity-bound", type=int, default=2)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--intersection", action="store_true",
                   help="intersect Pol(Delta) over all tuples of length <= --n instead")
    s.add_argument("--n", type=int, default=2)
    s = sub.add_parser("zoo", help="list built-in algebras or print one")
    s.add_argument("name", nargs="?")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.add_argument("--timings", action="store_true")
    return p


# --------------------------------------------------------------------------
# helpers


def _load(args) -> FiniteAlgebra:
    alg = parse_algebra(args.algebra)
    if args.with_constants:
        alg = alg.with_constants()
    return alg


def _congs(args, L: CongruenceLattice, required: bool = True) -> list[Congruence]:
    if args.congs and args.congs_blocks:
        raise UsageError("give either --congs or --congs-blocks, not both")
    if args.congs:
        try:
            idx = [int(x) for x in args.congs.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--congs expects integers, got {args.congs!r}") from None
        bad = [i for i in idx if not 0 <= i < len(L)]
        if bad:
            raise UsageError(f"congruence index {bad[0]} out of range 0..{len(L) - 1}")
        return [L[i] for i in idx]
    if args.congs_blocks:
        out = [Congruence.parse_blocks(part, L.alg.size) for part in args.congs_blocks.split(";")]
        for c in out:
            L.index_of(c)
        return out
    if required:
        raise UsageError("this command needs --congs or --congs-blocks")
    return []


def _cong_entry(L: CongruenceLattice, c: Congruence) -> dict:
    return {"index": L.index.get(c), "blocks": str(c)}


def _kw(args) -> dict:
    kw = {"max_tuples": args.max_tuples}
    if args.max_dim is not None:
        kw["max_dim"] = args.max_dim
    return kw


# --------------------------------------------------------------------------
# commands; each returns (results, ok)


def _cmd_con(args, alg):
    L = con_lattice(alg)
    meet, join = L.tables()
    return {"count": len(L), "congruences": [_cong_entry(L, c) for c in L],
            "meet": meet, "join": join}, True


def _cmd_delta(args, alg):
    L = con_lattice(alg)
    cs = _congs(args, L)
    R = delta(alg, cs, **_kw(args))
    res = {"congruences": [_cong_entry(L, c) for c in cs], "arity": R.arity, "size": len(R)}
    if args.tuples:
        res["tuples"] = [list(t) for t in R.tuples()]
    return res, True


def _cmd_commutator(args, alg):
    L = con_lattice(alg)
    cs = _congs(args, L)
    res = {"congruences": [_cong_entry(L, c) for c in cs], "method": args.method}
    if args.method == "both":
        a = commutator(alg, cs, "forks", **_kw(args))
        b = commutator(alg, cs, "termcond", **_kw(args))
        res.update(forks=_cong_entry(L, a), termcond=_cong_entry(L, b), agree=a == b,
                   value=_cong_entry(L, a))
        return res, a == b
    res["value"] = _cong_entry(L, commutator(alg, cs, args.method, **_kw(args)))
    return res, True


def _cmd_centralizes(args, alg):
    L = con_lattice(alg)
    cs = _congs(args, L)
    if args.gamma is not None and args.gamma_blocks:
        raise UsageError("give either --gamma or --gamma-blocks, not both")
    if args.gamma is not None:
        try:
            g = L[int(args.gamma)]
        except (ValueError, IndexError):
            raise UsageError(f"bad gamma index {args.gamma!r}") from None
    elif args.gamma_blocks:
        g = Congruence.parse_blocks(args.gamma_blocks, alg.size)
        L.index_of(g)
    else:
        raise UsageError("centralizes needs --gamma or --gamma-blocks")
    value = centralizes(alg, cs[:-1], cs[-1], g, **_kw(args))
    return {"congruences": [_cong_entry(L, c) for c in cs], "gamma": _cong_entry(L, g),
            "centralizes": value}, True


def _cmd_supernilpotence(args, alg):
    kw = {"max_tuples": args.max_tuples}
    r = supernilpotence_degree(alg, args.kmax, max_dim=args.max_dim, **kw)
    out = r.to_dict()
    out["degree"] = r.degree if r.degree is not None else f"none up to {args.kmax}"
    return out, True


def _cmd_malcev(args, alg):
    s = search_malcev_term(alg, args.max_tuples)
    res = {"term": None if s.term is None else str(s.term), "columns": s.columns,
           "explored": s.explored}
    if s.term is not None:
        res["verified"] = is_malcev_term(alg, s.term)
        return res, res["verified"]
    return res, True


def _cmd_cube_term(args, alg):
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    w = strong_cube_term(alg, args.n, seed=args.seed)
    back = is_malcev_term(alg, malcev_from_cube_term(w.term, args.n)) if args.n >= 2 else None
    return {"n": w.n, "arity": (1 << w.n) - 1, "verified": w.verified, "method": w.method,
            "checked": w.checked, "malcev_from_cube_term": back,
            "term": str(w.term) if len(str(w.term)) <= 20_000 else None}, w.verified


def _cmd_hc_verify(args, alg):
    r = hc_suite(alg, args.n, method=args.method, budget=args.budget, seed=args.seed,
                 **_kw(args))
    return r.to_dict(), r.passed


def _cmd_pol_delta(args, alg):
    L = con_lattice(alg)
    cs = _congs(args, L)
    P = polymorphisms(delta(alg, cs, **_kw(args)), args.arity_bound)
    out = P.to_dict()
    out["congruences"] = [_cong_entry(L, c) for c in cs]
    out["note"] = f"enumerated up to arity {args.arity_bound}"
    return out, True


def _cmd_largest_clone(args, alg):
    if args.intersection:
        P = largest_commutator_preserving_clone(alg, args.n, args.arity_bound,
                                                max_tuples=args.max_tuples)
        out = P.to_dict()
        out.update(P.meta)
        return out, P.meta.get("malcev_inside") is not False
    L = con_lattice(alg)
    cs = _congs(args, L)
    r = check_largest_clone(alg, cs, args.arity_bound, samples=args.samples, seed=args.seed,
                            max_tuples=args.max_tuples)
    return r.to_dict(), r.passed


def _cmd_zoo(args):
    if args.name:
        alg = zoo(args.name)
        return alg.to_dict() | {"fingerprint": alg.fingerprint()}, True
    return {"names": zoo_names(), "malcev": MALCEV_ZOO, "non_malcev": NON_MALCEV_ZOO}, True


_COMMANDS = {
    "con": _cmd_con, "delta": _cmd_delta, "commutator": _cmd_commutator,
    "centralizes": _cmd_centralizes, "supernilpotence": _cmd_supernilpotence,
    "malcev": _cmd_malcev, "cube-term": _cmd_cube_term, "hc-verify": _cmd_hc_verify,
    "pol-delta": _cmd_pol_delta, "largest-clone": _cmd_largest_clone,
}


def run_command(argv: Sequence[str]) -> tuple[dict, int]:
    """Run one command; returns the report and the exit code."""
    argv = list(argv)
    report: dict = {"command": argv}
    try:
        args = _parser().parse_args(argv)
    except UsageError as exc:
        report["error"] = {"kind": "usage", "message": str(exc)}
        report["exit_code"] = EXIT_USAGE
        return report, EXIT_USAGE
    start = time.perf_counter()
    try:
        if args.command == "zoo":
            results, ok = _cmd_zoo(args)
        else:
            alg = _load(args)
            report["algebra"] = {"name": alg.name, "size": alg.size,
                                 "fingerprint": alg.fingerprint()}
            results, ok = _COMMANDS[args.command](args, alg)
        report["results"] = results
        report["ok"] = bool(ok)
        code = EXIT_OK if ok else EXIT_FAIL
    except UsageError as exc:
        report["error"] = {"kind": "usage", "message": str(exc)}
        code = EXIT_USAGE
    except ResourceLimitError as exc:
        report["error"] = {"kind": "resource", "message": str(exc), "reached": exc.reached}
        code = EXIT_RESOURCE
    except (NoMalcevTermError, VerificationError) as exc:
        report["error"] = {"kind": "property", "message": str(exc)}
        code = EXIT_FAIL
    except AlgebraError as exc:
        report["error"] = {"kind": "input", "message": str(exc)}
        code = EXIT_USAGE
    if getattr(args, "timings", False):
        report["timings"] = {"seconds": round(time.perf_counter() - start, 6)}
    report["exit_code"] = code
    report["_format"] = getattr(args, "format", "json")
    return report, code


def _flat(v: list) -> bool:
    return all(isinstance(x, (int, str, bool, type(None))) for x in v)


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if v and (isinstance(v, dict) or (isinstance(v, list) and not _flat(v))):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict) or (isinstance(v, list) and not _flat(v)):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def render(report: dict) -> str:
    fmt = report.pop("_format", "json")
    if fmt == "text":
        return "\n".join(_text(report))
    return json.dumps(report, sort_keys=True, indent=2)


def main(argv: Sequence[str] | None = None) -> int:
    report, code = run_command(sys.argv[1:] if argv is None else argv)
    print(render(report))
    if "error" in report:
        print(f"hicomm: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
