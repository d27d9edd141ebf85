"""Command-line front end: ``fireball eval|unfold|bisim|type|check|demo|props``.

Reports go to standard output and errors to standard error.  Exit status is 0
on success, 1 when a verdict is negative (a rejected derivation, a violated
invariant, a program without a derivation) and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .deep import call_deep
from .demo import DEFAULT_BOUND, counterexample_demo
from .derivations import CheckError, SchemaError, check_derivation, derivation_size, deserialize, serialize
from .evaluation import DEFAULT_FUEL, bisimulation_check, plain_evaluate, split_evaluate, unfold
from .multitypes import ctx_types_size
from .props import run_battery
from .syntax import Program, Term, parse_expression, print_term, program_size
from .synthesis import Diverged, type_program

OK, VERDICT_FALSE, USAGE = 0, 1, 2
PROPS_FUEL = 5000


class InputError(Exception):
    pass


def _natural(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {n}")
    return n


def _positive(text: str) -> int:
    n = _natural(text)
    if n == 0:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _program(text: str) -> Program:
    e = _expression(text)
    return e if isinstance(e, Program) else Program(e)


def _expression(text: str) -> Term | Program:
    try:
        return parse_expression(text)
    except ValueError as exc:
        raise InputError(f"cannot parse {text!r}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fireball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a term or program, printing every step")
    p.add_argument("input", help='a term such as "(\\x.x) y" or a program "(t, [x<-y z])"')
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--plain", dest="split", action="store_false", help="plain calculus (default)")
    mode.add_argument("--split", dest="split", action="store_true", help="split calculus")
    p.add_argument("--fuel", type=_natural, default=DEFAULT_FUEL)
    p.set_defaults(split=False)

    p = sub.add_parser("unfold", help="substitute a program's environment into its term")
    p.add_argument("input")

    p = sub.add_parser("bisim", help="compare split evaluation with plain evaluation of the unfolding")
    p.add_argument("input")
    p.add_argument("--fuel", type=_natural, default=DEFAULT_FUEL)

    p = sub.add_parser("type", help="build a tight derivation by evaluating and expanding back")
    p.add_argument("input")
    p.add_argument("--fuel", type=_natural, default=DEFAULT_FUEL)
    p.add_argument("--emit", type=Path, metavar="PATH", help="write the derivation as JSON")

    p = sub.add_parser("check", help="check a derivation file written by 'type --emit'")
    p.add_argument("file", type=Path)

    p = sub.add_parser("demo", help="run a canned demonstration")
    p.add_argument("name", choices=["counterexample"])
    p.add_argument("--max-items", type=_positive, default=DEFAULT_BOUND, help="bound B on multiset cardinality")
    p.add_argument("--max-size", type=_positive, default=DEFAULT_BOUND, help="bound S on type size")

    p = sub.add_parser("props", help="run the randomized invariant battery")
    p.add_argument("--seed", type=_natural, default=0)
    p.add_argument("--count", type=_natural, default=1000)
    p.add_argument("--max-size", type=_positive, default=10)
    p.add_argument("--fuel", type=_natural, default=PROPS_FUEL)
    return parser


def cmd_eval(args) -> int:
    e = _expression(args.input)
    if args.split:
        trace = split_evaluate(e if isinstance(e, Program) else Program(e), args.fuel)
    else:
        if isinstance(e, Program):
            e = unfold(e)
            print(f"unfolded: {print_term(e)}")
        trace = plain_evaluate(e, args.fuel)
    print(trace.render())
    return OK


def cmd_unfold(args) -> int:
    print(print_term(unfold(_program(args.input))))
    return OK


def cmd_bisim(args) -> int:
    report = bisimulation_check(_program(args.input), args.fuel)
    print(report.render())
    return OK if report.ok else VERDICT_FALSE


def cmd_type(args) -> int:
    result = type_program(_program(args.input), args.fuel)
    if isinstance(result, Diverged):
        print(f"no derivation: fuel exhausted after {result.steps} step(s)")
        return VERDICT_FALSE
    d = result.derivation
    eq_q, eq_ty = result.equalities()
    print(d.render())
    print(f"normal form: {result.normal_form}")
    print(
        f"|d|={result.steps}, |q|={program_size(result.normal_form)}, |π|={result.size}, "
        f"|Ty(Γ)|={ctx_types_size(result.ctx)}"
    )
    print(f"|π| = |d| + |q|: {'OK' if eq_q else 'FAILS'}")
    print(f"|π| = |d| + |Ty(Γ)|: {'OK' if eq_ty else 'FAILS'}")
    if args.emit is not None:
        try:
            args.emit.write_bytes(serialize(d))
        except OSError as exc:
            raise InputError(f"cannot write {args.emit}: {exc.strerror}")
        print(f"derivation written to {args.emit}")
    return OK if eq_q and eq_ty else VERDICT_FALSE


def cmd_check(args) -> int:
    try:
        data = args.file.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}")
    try:
        d = deserialize(data)
    except SchemaError as exc:
        raise InputError(f"malformed derivation file: {exc}")
    try:
        check_derivation(d)
    except CheckError as exc:
        print(f"rejected: {exc}")
        return VERDICT_FALSE
    print(f"accepted: {d.judgement}, size {derivation_size(d)}")
    return OK


def cmd_demo(args) -> int:
    report = counterexample_demo(args.max_items, args.max_size)
    print(report.render())
    return OK if report.ok else VERDICT_FALSE


def cmd_props(args) -> int:
    report = run_battery(args.seed, args.count, args.max_size, args.fuel)
    print(report.render())
    return OK if report.ok else VERDICT_FALSE


COMMANDS = {
    "eval": cmd_eval,
    "unfold": cmd_unfold,
    "bisim": cmd_bisim,
    "type": cmd_type,
    "check": cmd_check,
    "demo": cmd_demo,
    "props": cmd_props,
}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return call_deep(COMMANDS[args.command], args)
    except InputError as exc:
        print(f"fireball: error: {exc}", file=sys.stderr)
        return USAGE


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE


if __name__ == "__main__":
    sys.exit(main())
