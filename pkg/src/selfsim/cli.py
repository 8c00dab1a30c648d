"""Command-line interface: ``selfsim <command> [-g GROUP] ...``.

Exit codes: 0 success, 1 a semantic "false" / exceeded cap / failed check,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import catalog, schreier
from .decision import BisimBudget, BudgetExceeded, are_equal, order
from .growth import ActivityError, activity_direct, activity_recursive, ball_sizes, classify_activity
from .machine import MachineError, StructuralError, apply
from .verify import VerifyConfig, available_checks, report_document, run_checks
from .words import WordSyntaxError, a_length, free_reduce, parse_word, shape


class UsageError(Exception):
    pass


def _entry(args):
    try:
        return catalog.resolve(args.group)
    except (KeyError, MachineError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None


def _word(entry, text):
    try:
        return parse_word(entry.machine, text)
    except (WordSyntaxError, KeyError) as exc:
        raise UsageError(f"cannot parse word {text!r}: {exc}") from None


def _budget(args) -> BisimBudget:
    return BisimBudget(max_nodes=args.budget)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_apply(args) -> int:
    e = _entry(args)
    w = _word(e, args.word)
    try:
        vertex = [int(x) for x in args.vertex.replace(" ", "").split(",") if x]
        out = apply(w, vertex)
    except (ValueError, StructuralError) as exc:
        raise UsageError(f"bad vertex {args.vertex!r}: {exc}") from None
    _emit(args, {"word": str(w), "vertex": vertex, "image": out}, ",".join(map(str, out)))
    return 0


def cmd_reduce(args) -> int:
    e = _entry(args)
    w = free_reduce(_word(e, args.word))
    payload = {"reduced": str(w), "length": len(w), "a_length": a_length(w)}
    try:
        s = shape(w)
        payload["shape"] = {"eps1": s.eps1, "eps2": s.eps2, "blocks": [list(b) for b in s.blocks]}
    except ValueError:
        pass
    _emit(args, payload, str(w))
    return 0


def cmd_equal(args) -> int:
    e = _entry(args)
    u, v = _word(e, args.u), _word(e, args.v)
    eq = are_equal(u, v, _budget(args))
    _emit(args, {"u": str(u), "v": str(v), "equal": eq}, "true" if eq else "false")
    return 0 if eq else 1


def cmd_order(args) -> int:
    e = _entry(args)
    w = _word(e, args.word)
    res = order(w, args.cap, _budget(args))
    _emit(args, {"word": str(w), "outcome": res.outcome, "order": res.n, "witness": list(res.witness)}, str(res))
    return 0 if res.is_finite else 1


def cmd_ball(args) -> int:
    e = _entry(args)
    rep = ball_sizes(e.machine, e.generators, args.n, level=args.level, budget=_budget(args))
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    if args.json:
        print(json.dumps(rep.to_json(), sort_keys=True))
    elif not args.csv:
        sys.stdout.write(rep.to_csv())
    return 0


def cmd_activity(args) -> int:
    e = _entry(args)
    w = _word(e, args.word)
    fn = activity_direct if args.direct else activity_recursive
    try:
        values = [fn(w, lv, _budget(args)) for lv in range(1, args.level + 1)]
    except ActivityError as exc:
        raise UsageError(str(exc)) from None
    csv_text = "level,count\n" + "".join(f"{k},{v}\n" for k, v in enumerate(values, start=1))
    if args.csv:
        Path(args.csv).write_text(csv_text)
    if args.json:
        print(json.dumps({"word": str(w), "values": values}, sort_keys=True))
    elif not args.csv:
        sys.stdout.write(csv_text)
    return 0


def cmd_classify(args) -> int:
    e = _entry(args)
    states = [args.state] if args.state else list(e.machine.names)
    out = []
    for s in states:
        if s not in e.machine.index:
            raise UsageError(f"unknown state {s!r}")
        out.append(classify_activity(e.machine, s, levels=args.level or 10, budget=_budget(args)))
    if args.json:
        print(json.dumps([p.to_json() for p in out], sort_keys=True))
    else:
        for p in out:
            extra = f" rate {p.rate:.6f}" if p.rate is not None else f" degree {p.degree}"
            print(f"{p.state}: {p.classification}{extra}")
    return 0


def cmd_schreier(args) -> int:
    e = _entry(args)
    gens = [_word(e, g) for g in args.gens.split(",")] if args.gens else e.generators
    level = 1 if args.level is None else args.level
    try:
        g = schreier.build(e.machine, gens, level)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = schreier.export(g, "json" if args.json else args.format)
    if args.output:
        Path(args.output).write_bytes(data)
        if level <= 5:
            print(f"connected: {str(g.is_connected()).lower()}", file=sys.stderr)
    else:
        sys.stdout.buffer.write(data)
    return 0


def cmd_verify(args) -> int:
    e = _entry(args)
    cfg = VerifyConfig(budget=_budget(args), cap=args.cap, workers=args.workers)
    if args.max_a is not None:
        cfg.contraction_max_a = args.max_a
    checks = [c for c in args.checks.split(",") if c] if args.checks else None
    try:
        results = run_checks(e, checks, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.report:
        Path(args.report).write_text(json.dumps(report_document(results, cfg), indent=1, sort_keys=True) + "\n")
    if args.json:
        print(json.dumps([r.__dict__ for r in results], sort_keys=True))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}")
    failed = [r for r in results if not r.passed]
    if failed and not args.json:
        print(f"\nfirst failure: {failed[0].name}: {failed[0].detail}", file=sys.stderr)
    return 1 if failed else 0


def cmd_catalog(args) -> int:
    if args.name:
        try:
            entry = catalog.resolve(args.name)
        except KeyError as exc:
            raise UsageError(str(exc).strip("'\"")) from None
        print(entry.machine.to_json())
        return 0
    for name in catalog.NAMES:
        e = catalog.load(name)
        if args.json:
            continue
        print(f"{name:<15} d={e.machine.d}  states={','.join(e.machine.names)}  checks={','.join(available_checks(e))}")
    if args.json:
        print(json.dumps({n: catalog.load(n).machine.to_dict() for n in catalog.NAMES}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-g", "--group", default=os.environ.get("SELFSIM_GROUP", "G"),
                        help="catalog name or machine JSON path (default: $SELFSIM_GROUP or G)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=_positive, default=10**6, help="bisimulation node budget")
    common.add_argument("--cap", type=_positive, default=2**20, help="element order cap")
    common.add_argument("--workers", type=_positive, default=1, help="processes for the torsion sweep")

    p = argparse.ArgumentParser(prog="selfsim", description="Computations in automata groups acting on rooted trees.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("apply", parents=[common], help="image of a vertex")
    s.add_argument("word")
    s.add_argument("vertex", help="comma-separated letters, e.g. 1,7")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("reduce", parents=[common], help="free-product normal form")
    s.add_argument("word")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("equal", parents=[common], help="decide equality of two words")
    s.add_argument("u")
    s.add_argument("v")
    s.set_defaults(func=cmd_equal)

    s = sub.add_parser("order", parents=[common], help="verified element order")
    s.add_argument("word")
    s.set_defaults(func=cmd_order)

    s = sub.add_parser("ball", parents=[common], help="ball sizes b(0..n)")
    s.add_argument("-n", type=int, default=10)
    s.add_argument("--level", type=_positive, default=None, help="bucketing level")
    s.add_argument("--csv", metavar="PATH")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("activity", parents=[common], help="activity act(1..L) of a word")
    s.add_argument("word")
    s.add_argument("--level", type=_positive, default=10)
    s.add_argument("--direct", action="store_true", help="enumerate vertices (level <= 6)")
    s.add_argument("--csv", metavar="PATH")
    s.set_defaults(func=cmd_activity)

    s = sub.add_parser("classify", parents=[common], help="bounded/polynomial/exponential activity of states")
    s.add_argument("state", nargs="?")
    s.add_argument("--level", type=_positive, default=None, help="levels of activity to list")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("schreier", parents=[common], help="Schreier graph of a level")
    s.add_argument("--level", type=int, default=None)
    s.add_argument("--format", choices=schreier.FORMATS, default="dot")
    s.add_argument("--gens", help="comma-separated generator words (default: all states)")
    s.add_argument("-o", "--output", metavar="PATH")
    s.set_defaults(func=cmd_schreier)

    s = sub.add_parser("verify", parents=[common], help="run the verification checks")
    s.add_argument("--checks", help="comma-separated subset")
    s.add_argument("--max-a", type=_positive, default=None, help="a-length of the contraction sweep")
    s.add_argument("--report", metavar="PATH", help="write a JSON report with sweep details")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("catalog", parents=[common], help="list catalog machines or dump one as JSON")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_catalog)
    return p


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"selfsim: error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"selfsim: budget exhausted: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
