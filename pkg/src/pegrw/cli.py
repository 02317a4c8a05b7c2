"""Command-line front end.

Exit codes: 0 success (or a clean report), 1 fail (or findings), 2 error,
3 usage, 4 grammar problems, 5 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import bigstep, harness, machine, symbolic
from .errors import (
    BudgetExceeded, EngineError, EnumerationCapExceeded, GrammarCheckError, GrammarSyntaxError,
    NoDeletableSymbols, SolutionCapExceeded, UnsupportedConstruct,
)
from .grammar import Grammar, Kind, Not, Seq, Term, Terminal, check_cut_placement, check_wellformed
from .reader import parse_expr, parse_grammar

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_USAGE, EXIT_GRAMMAR, EXIT_BUDGET = range(6)
_KIND_EXIT = {Kind.SUCCESS: EXIT_OK, Kind.FAIL: EXIT_FAIL, Kind.ERROR: EXIT_ERROR}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _natural(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


# -- helpers ------------------------------------------------------------------

def fixture_dir():
    return resources.files("pegrw") / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-4] for p in fixture_dir().iterdir() if p.name.endswith(".peg"))


def read_grammar_text(ref: str) -> tuple[str, str]:
    """``ref`` is a path, or ``@name`` for a bundled fixture grammar."""
    if ref.startswith("@"):
        res = fixture_dir() / f"{ref[1:]}.peg"
        if not res.is_file():
            raise UsageError(f"no bundled grammar {ref[1:]!r} (have: {', '.join(fixture_names())})")
        return res.read_text(encoding="utf-8"), ref
    path = Path(ref)
    if not path.is_file():
        raise UsageError(f"grammar file not found: {ref}")
    return path.read_text(encoding="utf-8"), ref


def load(ref: str, *, expr: str | None = None, check: bool = True, full: bool = False) -> Grammar:
    text, name = read_grammar_text(ref)
    g = parse_grammar(text, name)
    if expr is not None:
        g = g.with_start(parse_expr(expr))
    if full:
        g = g.with_start(Seq(g.start, Not(Term(Terminal.any()))))
    if check:
        g.check()
    return g


def read_corpus(paths: list[str]) -> tuple[list[str], list[str]]:
    names, texts = [], []
    for ref in paths:
        p = Path(ref)
        if p.is_dir():
            files = sorted(f for f in p.iterdir() if f.is_file())
        elif p.is_file():
            files = [p]
        else:
            raise UsageError(f"corpus entry not found: {ref}")
        for f in files:
            names.append(str(f))
            texts.append(f.read_text(encoding="utf-8"))
    return names, texts


def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _row(**fields) -> None:
    print(json.dumps(fields, ensure_ascii=False))


# -- subcommands --------------------------------------------------------------

def cmd_parse(args) -> int:
    if args.trace and args.bigstep:
        raise UsageError("--trace needs the machine engine")
    if (args.input is None) == (args.file is None):
        raise UsageError("give exactly one of INPUT or -f FILE")
    if args.file == "-":
        x = sys.stdin.read()
    elif args.file is not None:
        x = Path(args.file).read_text(encoding="utf-8")
    else:
        x = args.input
    g = load(args.grammar, expr=args.expr, check=not args.no_check, full=args.full)
    metrics = None
    trace = [] if args.trace else None
    if args.bigstep:
        out = bigstep.eval(g, g.start, x, bigstep.EvalBudget(args.budget))
    else:
        cfg = machine.MachineConfig(simplify=not args.no_simplify, budget=args.budget)
        out, metrics = machine.run(g, g.start, x, cfg, trace=trace)
    consumed = x[: len(x) - len(out.rest)]
    kind = out.kind.name.lower()
    if args.jsonl:
        for rec in trace or ():
            print(json.dumps(rec.as_dict()))
        row = {"outcome": kind, "consumed": consumed, "rest": out.rest}
        if metrics is not None:
            row.update(entry_steps=metrics.entry_steps, total_steps=metrics.total_steps,
                       max_depth=metrics.max_stack_depth)
        print(json.dumps(row, ensure_ascii=False))
    else:
        for rec in trace or ():
            print(f"{rec.index:>6} {rec.rule:<10} pos={rec.pos} depth={rec.depth}")
        print(f"outcome={kind} rest={_q(out.rest)} consumed={_q(consumed)}")
        if metrics is not None:
            print(f"entry_steps={metrics.entry_steps} total_steps={metrics.total_steps} "
                  f"max_depth={metrics.max_stack_depth}")
    return _KIND_EXIT[out.kind]


def cmd_gen(args) -> int:
    g = load(args.grammar, expr=args.expr)
    alphabet = args.alphabet or None
    for n in range(args.min_len, args.max_len + 1):
        try:
            outs = symbolic.search(g, None, n, args.limit, include_fail=args.show_fail)
            capped = False
        except SolutionCapExceeded as exc:
            outs, capped = exc.partial, True
        outs = symbolic.sort_outcomes(outs)
        oks = [o for o in outs if o.kind == "ok"]
        if args.jsonl:
            _row(length=n, solutions=len(oks), capped=capped)
            for o in outs:
                row = dict(length=n, kind=o.kind, consumed=str(o.consumed), remaining=str(o.remaining))
                if alphabet and o.kind == "ok":
                    try:
                        row["instances"] = symbolic.enumerate(o, alphabet, args.cap)
                    except EnumerationCapExceeded as exc:
                        row["instances"], row["truncated"] = exc.partial, True
                _row(**row)
            continue
        if not outs:
            print(f"length {n}: no solutions")
            continue
        print(f"length {n}: {len(oks)} solution{'s' if len(oks) != 1 else ''}"
              + (f" (stopped after {args.limit})" if capped else ""))
        for o in outs:
            tag = "" if o.kind == "ok" else "fail "
            print(f"  {tag}{o}")
            if alphabet and o.kind == "ok":
                try:
                    words = symbolic.enumerate(o, alphabet, args.cap)
                    more = ""
                except EnumerationCapExceeded as exc:
                    words, more = exc.partial, " ..."
                print("    " + (" ".join(_q(w) for w in words) if words else "(no instances)") + more)
    return EXIT_OK


def cmd_bench(args) -> int:
    g = load(args.grammar, expr=args.expr, full=args.full)
    names, texts = read_corpus(args.corpus)
    cfg = machine.MachineConfig(simplify=not args.no_simplify, budget=args.budget)
    recs = harness.bench_batch(g, texts, cfg, names=names, grammar=args.grammar)
    if not args.timings:
        for r in recs:
            r.ms = 0.0
    if args.jsonl:
        if args.jsonl == "-":
            harness.write_jsonl(recs, sys.stdout)
        else:
            with open(args.jsonl, "w", encoding="utf-8") as fp:
                harness.write_jsonl(recs, fp)
    if args.jsonl != "-":
        for r in recs:
            ms = f" ms={r.ms:.3f}" if args.timings else ""
            print(f"{r.file}: {r.outcome} entry_steps={r.entry_steps} total_steps={r.total_steps} "
                  f"max_depth={r.max_depth}{ms}")
        agg = harness.aggregate(recs)
        print(f"total: files={agg['files']} entry_steps={agg['entry_steps']} "
              f"total_steps={agg['total_steps']} max_depth={agg['max_depth']}")
    return EXIT_BUDGET if any(r.outcome == "budget" for r in recs) else EXIT_OK


def cmd_diff(args) -> int:
    plain = load(args.plain, full=args.full)
    annotated = load(args.annotated, full=args.full)
    names, texts = read_corpus(args.corpus)
    cfg = machine.MachineConfig(simplify=not args.no_simplify, budget=args.budget)
    report = harness.diff_grammars(plain, annotated, texts, cfg, names=names)
    if args.jsonl:
        for d in report.entries:
            _row(file=d.name, plain=d.plain.outcome, annotated=d.annotated.outcome,
                 plain_steps=d.plain.entry_steps, annotated_steps=d.annotated.entry_steps,
                 delta=d.delta, agree=d.agree)
        for label, (n, p, a), r in (("rejected", report.rejected, report.reduction_rejected),
                                     ("accepted", report.accepted, report.reduction_accepted)):
            _row(aggregate=True, inputs=label, files=n, plain_steps=p, annotated_steps=a, reduction=r)
    else:
        for line in report.lines():
            print(line)
    if any(d.plain.outcome == "budget" or d.annotated.outcome == "budget" for d in report.entries):
        return EXIT_BUDGET
    return EXIT_OK if report.all_agree else EXIT_FAIL


def cmd_mutate(args) -> int:
    path = Path(args.file)
    if not path.is_file():
        raise UsageError(f"file not found: {args.file}")
    text = path.read_text(encoding="utf-8")
    spec = harness.MutationSpec(frozenset(args.symbols), args.max_del, args.seed, args.variants)
    variants = harness.mutate(text, spec)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, v in enumerate(variants):
            target = out / f"{path.stem}.mut{i:03d}{path.suffix}"
            target.write_text(v, encoding="utf-8")
            if args.jsonl:
                _row(variant=i, path=str(target))
            else:
                print(target)
    else:
        for i, v in enumerate(variants):
            if args.jsonl:
                _row(variant=i, text=v)
            else:
                print(_q(v))
    return EXIT_OK


def cmd_check(args) -> int:
    text, name = read_grammar_text(args.grammar)
    g = parse_grammar(text, name)
    findings = 0

    def report_line(label, status, detail=None):
        if args.jsonl:
            _row(check=label, status=status, **({"detail": detail} if detail else {}))
        else:
            print(f"{label}: {detail or status}")

    for label, report in (("well-formedness", check_wellformed(g)), ("cut placement", check_cut_placement(g))):
        if report.ok:
            report_line(label, "ok")
        else:
            findings += len(report.issues)
            for issue in report:
                report_line(label, "violation", str(issue))
    if args.utp is not None:
        label = "unique token prefix"
        if findings:
            report_line(label, "skipped", "skipped (grammar has static problems)")
        elif not g.lexical:
            raise UsageError("--utp needs a %token declaration")
        else:
            utp = symbolic.utp_check(g, args.utp)
            if utp.clean:
                report_line(label, "ok", f"no violation up to length {args.utp}")
            for v in utp.violations:
                findings += 1
                report_line(label, "violation", str(v))
    return EXIT_FAIL if findings else EXIT_OK


def cmd_fixtures(args) -> int:
    if args.name is None:
        for name in fixture_names():
            print(f"@{name}")
        return EXIT_OK
    text, _ = read_grammar_text("@" + args.name.lstrip("@"))
    sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pegrw", description="PEG engine with cut, throw, catch and try.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grammar_arg(sp):
        sp.add_argument("grammar", help="grammar file, or @name for a bundled one")
        sp.add_argument("-e", "--expr", help="use this expression instead of %%start")

    sp = sub.add_parser("parse", help="run a grammar on one input")
    grammar_arg(sp)
    sp.add_argument("input", nargs="?", help="input text")
    sp.add_argument("-f", "--file", help="read the input from a file ('-' for stdin)")
    eng = sp.add_mutually_exclusive_group()
    eng.add_argument("--machine", action="store_true", help="frame machine (default)")
    eng.add_argument("--bigstep", action="store_true", help="reference interpreter")
    sp.add_argument("--no-simplify", action="store_true", help="disable choice-frame pruning under try")
    sp.add_argument("--trace", action="store_true", help="log every machine transition")
    sp.add_argument("--budget", type=_positive, default=50_000_000, help="step budget")
    sp.add_argument("--no-check", action="store_true", help="skip the static checks")
    sp.add_argument("--full", action="store_true", help="require the whole input to be consumed")
    sp.add_argument("--jsonl", action="store_true", help="JSON-lines output")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("gen", help="symbolic generation of accepted inputs")
    grammar_arg(sp)
    sp.add_argument("--max-len", type=_natural, required=True)
    sp.add_argument("--min-len", type=_natural, default=1)
    sp.add_argument("--alphabet", help="also list concrete instances over these characters")
    sp.add_argument("--limit", type=_positive, help="stop after this many outcomes per length")
    sp.add_argument("--cap", type=_positive, default=1000, help="instances listed per outcome")
    sp.add_argument("--show-fail", action="store_true", help="also list failing outcomes")
    sp.add_argument("--jsonl", action="store_true", help="JSON-lines output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="step counts over a corpus")
    grammar_arg(sp)
    sp.add_argument("corpus", nargs="+", help="files or directories")
    sp.add_argument("--no-simplify", action="store_true")
    sp.add_argument("--budget", type=_positive, default=50_000_000)
    sp.add_argument("--full", action="store_true")
    sp.add_argument("--jsonl", metavar="OUT", help="write JSON lines to OUT ('-' for stdout)")
    sp.add_argument("--timings", action="store_true", help="record wall time (output is then not reproducible)")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("diff", help="compare a grammar with an annotated variant")
    sp.add_argument("plain")
    sp.add_argument("annotated")
    sp.add_argument("corpus", nargs="+")
    sp.add_argument("--no-simplify", action="store_true")
    sp.add_argument("--budget", type=_positive, default=50_000_000)
    sp.add_argument("--full", action="store_true")
    sp.add_argument("--jsonl", action="store_true", help="JSON-lines output")
    sp.set_defaults(func=cmd_diff)

    sp = sub.add_parser("mutate", help="delete random structural characters")
    sp.add_argument("file")
    sp.add_argument("--symbols", default="".join(sorted(harness.JSON_DELETABLE)))
    sp.add_argument("--max-del", type=_positive, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--variants", type=_positive, default=10)
    sp.add_argument("--out-dir", help="write variants here instead of printing them")
    sp.add_argument("--jsonl", action="store_true", help="JSON-lines output")
    sp.set_defaults(func=cmd_mutate)

    sp = sub.add_parser("check", help="static checks and the bounded unique-token-prefix check")
    sp.add_argument("grammar")
    sp.add_argument("--utp", type=_positive, metavar="N")
    sp.add_argument("--jsonl", action="store_true", help="JSON-lines output")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("fixtures", help="list bundled grammars or print one")
    sp.add_argument("name", nargs="?")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # argparse does not match an optional positional given after an option
        if (extra and args.command == "parse" and args.input is None and len(extra) == 1
                and not extra[0].startswith("-")):
            args.input, extra = extra[0], []
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pegrw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrammarSyntaxError as exc:
        print(f"pegrw: syntax error: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR
    except GrammarCheckError as exc:
        for issue in exc.report:
            print(f"pegrw: grammar: {issue}", file=sys.stderr)
        return EXIT_GRAMMAR
    except BudgetExceeded as exc:
        print(f"pegrw: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UnsupportedConstruct as exc:
        print(f"pegrw: unsupported: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR
    except NoDeletableSymbols as exc:
        print(f"pegrw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EngineError as exc:
        print(f"pegrw: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
