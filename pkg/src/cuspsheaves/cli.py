"""Command-line entry point.

Exit codes: 0 success (including FAIL verdicts), 1 parse error,
2 invariant violation, 3 mathematical precondition, 4 selftest
disagreement.
"""
from __future__ import annotations

import argparse
import json
import sys

from .cusp import CuspRingContext
from .errors import CuspError, ParseError
from .extension import is_injective, pushout, torsion_search
from .field import Field
from .lattice import decompose, min_generators
from .oracle import oracle_min_generators, oracle_torsion
from .serialize import loads, make_document
from .triples import (SheafModel, from_triple, functor_on_morphism, model_from_lattices,
                      morphism_from_triple, roundtrip_object, strip_series, to_triple)

SELFTEST_FAILURE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load(args, kinds):
    """Parse the input document, applying --field and --precision overrides."""
    text = _read(args.input)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if isinstance(doc, dict):
        if args.field is not None:
            doc["field"] = Field.from_flag(args.field).descriptor()
        if args.precision is not None:
            doc["precision"] = args.precision
    return loads(json.dumps(doc), kinds)


def _emit(args, payload, field, N, report=None, summary=""):
    doc = make_document(payload, field, N)
    if report is not None:
        doc["report"] = report
    if args.json:
        print(json.dumps(doc, sort_keys=True, indent=1))
    else:
        print(summary or json.dumps(doc.get("report", doc["payload"]), sort_keys=True))


def _as_model(obj, kind) -> SheafModel:
    if kind == "sheaf_model":
        return obj
    if kind == "lattice":
        return model_from_lattices([obj], 0)
    return SheafModel(obj.r, 0, (obj,))


# ---------------------------------------------------------------- commands

def cmd_decompose(args):
    M, _, F, N = _load(args, {"lattice"})
    dec = decompose(M)
    _emit(args, dec, F, N, {"min_generators": min_generators(M),
                            "oracle_min_generators": oracle_min_generators(M),
                            "verdict": "PASS" if all(t.g_in_R for t in dec.transcript) else "FAIL"},
          f"a={dec.a} b={dec.b}")


def cmd_semirank(args):
    M, _, F, N = _load(args, {"lattice"})
    dec = decompose(M)
    _emit(args, {"kind": "semirank", "semirank": dec.a, "a": dec.a, "b": dec.b}, F, N,
          summary=f"semirank={dec.a}")


def cmd_torsion_check(args):
    phi, _, F, N = _load(args, {"phimap"})
    P = pushout(phi, CuspRingContext(F, N))
    w = torsion_search(P)
    o = oracle_torsion(P)
    inj = is_injective(phi)
    agree = (w is None) == inj == (o is None)
    payload = {"kind": "torsion_check", "torsion_free": w is None, "injective": inj,
               "witness": None if w is None else [str(x) for x in w.v],
               "oracle_witness": None if o is None else [str(x) for x in o],
               "verdict": "PASS" if agree else "FAIL"}
    _emit(args, payload, F, N, summary=f"torsion_free={w is None} verdict={payload['verdict']}")


def cmd_to_triple(args):
    obj, kind, F, N = _load(args, {"sheaf_model", "lattice", "phimap"})
    S = _as_model(obj, kind)
    T = to_triple(S, theorem_degree=args.theorem_degree)
    back = from_triple(T, theorem_degree=args.theorem_degree)
    ok = back.cusps == S.cusps and back.degree == S.degree
    report = {"E_degree": T.E.degree,
              "degree_formula": "theorem" if args.theorem_degree else "proof",
              "verdict": "PASS" if ok else "FAIL"}
    _emit(args, T, F, N, report, f"E_degree={T.E.degree} verdict={report['verdict']}")


def cmd_from_triple(args):
    T, _, F, N = _load(args, {"triple"})
    S, diags = from_triple(T, theorem_degree=args.theorem_degree, with_diagnostic=True)
    ok = to_triple(S, T.E.trivializations, theorem_degree=args.theorem_degree).cusps == T.cusps
    status = "match" if all(d["match"] for d in diags) else "mismatch"
    report = {"semirank_diagnostic": status, "cusps": diags,
              "degree_formula": "theorem" if args.theorem_degree else "proof",
              "verdict": "PASS" if ok else "FAIL"}
    _emit(args, S, F, N, report, f"degree={S.degree} semirank_diagnostic={status}")


def cmd_roundtrip(args):
    M, _, F, N = _load(args, {"lattice"})
    rep = roundtrip_object(M, theorem_degree=args.theorem_degree)
    _emit(args, {"kind": "roundtrip", **rep.to_dict()}, F, N,
          summary=f"{rep.verdict} start={rep.start_ab} end={rep.end_ab}")


def cmd_morphism_roundtrip(args):
    f, _, F, N = _load(args, {"morphism"})
    f = f.check()
    T, T2 = to_triple(f.source), to_triple(f.target)
    Phi = functor_on_morphism(f, T, T2, check=False)
    back = morphism_from_triple(Phi, f.source, f.target, N)
    bare = functor_on_morphism(morphism_from_triple(strip_series(Phi), f.source, f.target, N),
                               T, T2)
    ok = back.equals(f) and bare.fiber_equal(Phi) and all(c.containment for c in Phi.cusps)
    report = {"functor_then_inverse": back.equals(f),
              "inverse_then_functor": bare.fiber_equal(Phi),
              "containment": [c.containment for c in Phi.cusps],
              "sigma_square": [c.sigma_square for c in Phi.cusps],
              "verdict": "PASS" if ok else "FAIL"}
    _emit(args, Phi, F, N, report, f"{report['verdict']}")


def cmd_selftest(args):
    from .suites import selftest_lines
    field = Field.from_flag(args.field) if args.field else None
    lines, ok = selftest_lines(args.seed, args.cases, field=field, precision=args.precision)
    for line in lines:
        print(line)
    return 0 if ok else SELFTEST_FAILURE


COMMANDS = {
    "decompose": (cmd_decompose, "classify a lattice: (a, b), basis and transcript"),
    "semirank": (cmd_semirank, "semirank of a lattice"),
    "torsion-check": (cmd_torsion_check, "torsion test of a PhiMap pushout"),
    "to-triple": (cmd_to_triple, "model or lattice to triple"),
    "from-triple": (cmd_from_triple, "triple to model, with the semirank diagnostic"),
    "roundtrip": (cmd_roundtrip, "object round trip through triples"),
    "morphism-roundtrip": (cmd_morphism_roundtrip, "morphism round trip through triples"),
    "selftest": (cmd_selftest, "seeded invariant and oracle suites, JSON lines"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cuspsheaves", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=None, metavar="N")
    common.add_argument("--field", default=None, metavar="q|fp:P")
    common.add_argument("--theorem-degree", action="store_true",
                        help="use d - n r - sum(a) for deg E")
    common.add_argument("--json", action="store_true", help="print the full JSON document")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if name == "selftest":
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--cases", type=int, default=10)
        else:
            sp.add_argument("input", nargs="?", default="-", help="document path or - for stdin")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        fn = COMMANDS[args.command][0]
        rc = fn(args)
        return rc or 0
    except CuspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
