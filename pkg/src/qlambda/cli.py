"""Command-line front end: ``qlambda <command> --spec ... [--json] [--precision BITS]``.

Exit codes: 0 success, 1 a verification suite found a counterexample,
2 malformed input or an invalid spec (diagnostics on standard error).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .algebra import m_k
from .errors import InvalidSpec, ParseError, QLambdaError
from .gamma import DEFAULT_PRECISION, parse_spec, validate_spec
from .ktheory import classify, k_groups
from .modular import MatrixElement, sf_unitary
from .parse import parse_algebra_expr, parse_unitary, unitary_formula_text
from .results import (KTheoryOutput, MkOutput, SfOutput, StateOutput, ValidateOutput,
                      VerifyOutput, render_decimal)
from .algebra import state_psi
from .verify import SUITES, run_suite


def _spec_arg(text: str):
    return parse_spec(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit a JSON document instead of text")
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, metavar="BITS",
                        help="bits of precision for decimal renderings (default %d)" % DEFAULT_PRECISION)

    parser = argparse.ArgumentParser(prog="qlambda", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="emit a JSON document instead of text")
    parser.add_argument("--precision", type=int, default=DEFAULT_PRECISION, metavar="BITS")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ktheory", parents=[common], help="K-groups and classification")
    p.add_argument("--spec", required=True)

    p = sub.add_parser("state", parents=[common], help="evaluate the KMS state on an expression")
    p.add_argument("--spec", required=True)
    p.add_argument("--expr", required=True)

    p = sub.add_parser("sf", parents=[common], help="spectral flow of a modular unitary")
    p.add_argument("--spec", required=True)
    p.add_argument("--unitary", required=True, help='"ukm(k,m;j,n)", "ujk(j,k)" or a matrix')

    p = sub.add_parser("mk", parents=[common], help="the integer m_k")
    p.add_argument("--spec", required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="run randomised verification suites")
    p.add_argument("--spec", required=True)
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=20)

    p = sub.add_parser("validate", parents=[common], help="check a lambda spec")
    p.add_argument("--spec", required=True)
    return parser


def _emit(out, as_json: bool):
    if as_json:
        print(json.dumps(out.to_json(), sort_keys=False))
    else:
        print(out.to_text())


def run(args: argparse.Namespace) -> int:
    spec = parse_spec(args.spec)
    bits = args.precision
    if args.command == "validate":
        out = ValidateOutput(spec, validate_spec(spec))
        _emit(out, args.json)
        if not out.report.ok:
            for v in out.report.violations:
                print(f"error: {v.code}: {v.message}", file=sys.stderr)
            return 2
        return 0

    spec.ensure_valid()
    if args.command == "ktheory":
        res = k_groups(spec)
        out = KTheoryOutput(spec, res, classify(res, spec))
    elif args.command == "state":
        x = parse_algebra_expr(args.expr, spec)
        if isinstance(x, MatrixElement):
            val = x.trace_psi()
        else:
            val = state_psi(x)
        dec, err = render_decimal(val.re, bits)
        if not val.is_real():
            im_dec, im_err = render_decimal(val.im, bits)
            dec = f"{dec} + {im_dec}i"
            err = max(err, im_err, key=float)
        out = StateOutput(spec, args.expr, val, dec, err)
    elif args.command == "sf":
        u = parse_unitary(args.unitary, spec)
        val = sf_unitary(u)
        dec, err = render_decimal(val, bits)
        out = SfOutput(spec, args.unitary, val, unitary_formula_text(args.unitary), dec, err)
    elif args.command == "mk":
        out = MkOutput(spec, args.k, m_k(spec, args.k))
    elif args.command == "verify":
        out = VerifyOutput(spec, args.suite, args.seed, args.cases,
                           run_suite(args.suite, spec, args.seed, args.cases))
        _emit(out, args.json)
        if not out.ok:
            first = next(r for r in out.results if r.status == "fail")
            print(f"verify: suite {first.name} failed: {first.counterexample}", file=sys.stderr)
            return 1
        return 0
    else:  # pragma: no cover - argparse enforces the choices
        raise AssertionError(args.command)
    _emit(out, args.json)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        caret = exc.caret()
        if caret:
            print(caret, file=sys.stderr)
        return 2
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        for v in exc.report.violations:
            print(f"  {v.code}: {v.message}", file=sys.stderr)
        return 2
    except QLambdaError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
