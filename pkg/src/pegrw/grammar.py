"""Parsing expressions, grammars, outcomes and the static checks on them."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .charset import FULL, NAMED_CLASSES, CharSet, show as show_charset
from .errors import GrammarCheckError


# -- terminals ----------------------------------------------------------------

@dataclass(frozen=True)
class Terminal:
    kind: str  # "char" | "class" | "any"
    name: str
    dom: CharSet

    def __post_init__(self):
        if self.dom.is_empty:
            raise ValueError(f"terminal {self.name} has an empty domain")

    @classmethod
    def char(cls, c: str) -> "Terminal":
        if len(c) != 1:
            raise ValueError(f"single-character terminal expected, got {c!r}")
        return cls("char", c, CharSet.single(c))

    @classmethod
    def any(cls) -> "Terminal":
        return cls("any", "[.]", FULL)

    @classmethod
    def cls(cls, name: str, dom: CharSet | None = None) -> "Terminal":
        if dom is None:
            dom = NAMED_CLASSES[name]
        if dom.is_full:
            return cls.any()
        return cls("class", name, dom)

    def __str__(self) -> str:
        if self.kind == "char":
            return show_charset(self.dom)
        return self.name


def match_terminal(t: Terminal, c: str) -> bool:
    return c in t.dom


# -- expressions --------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Empty:
    pass


@dataclass(frozen=True, slots=True)
class Term:
    t: Terminal


@dataclass(frozen=True, slots=True)
class NonTerm:
    name: str


@dataclass(frozen=True, slots=True)
class Seq:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Choice:
    first: "Expr"
    second: "Expr"


@dataclass(frozen=True, slots=True)
class Star:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Throw:
    pass


@dataclass(frozen=True, slots=True)
class Cut:
    pass


@dataclass(frozen=True, slots=True)
class Catch:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Try:
    body: "Expr"


# derived forms, removed by desugar()

@dataclass(frozen=True, slots=True)
class And:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Opt:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Plus:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Check:
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Lit:
    text: str


Expr = Union[Empty, Term, NonTerm, Seq, Choice, Star, Not, Throw, Cut, Catch, Try]
SUGAR = (And, Opt, Plus, Check, Lit)
UNARY = (Star, Not, Catch, Try, And, Opt, Plus, Check)
CORE_SYMBOLIC = (Empty, Term, NonTerm, Seq, Choice, Star, Not)

EPS = Empty()
THROW = Throw()
CUT = Cut()


def char(c: str) -> Term:
    return Term(Terminal.char(c))


def lit(text: str) -> Expr:
    return desugar(Lit(text))


def seq(*items: Expr) -> Expr:
    """Right-nested sequence; ``seq()`` is the empty expression."""
    if not items:
        return EPS
    out = items[-1]
    for e in reversed(items[:-1]):
        out = Seq(e, out)
    return out


def choice(*alts: Expr) -> Expr:
    out = alts[-1]
    for e in reversed(alts[:-1]):
        out = Choice(e, out)
    return out


def children(e) -> tuple:
    if isinstance(e, Seq):
        return (e.left, e.right)
    if isinstance(e, Choice):
        return (e.first, e.second)
    if isinstance(e, UNARY):
        return (e.body,)
    return ()


def walk(e) -> Iterator:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def desugar(e):
    if isinstance(e, (Empty, Term, NonTerm, Throw, Cut)):
        return e
    if isinstance(e, Lit):
        if not e.text:
            return EPS
        return seq(*(char(c) for c in e.text))
    if isinstance(e, Seq):
        return Seq(desugar(e.left), desugar(e.right))
    if isinstance(e, Choice):
        return Choice(desugar(e.first), desugar(e.second))
    body = desugar(e.body)
    if isinstance(e, And):
        return Not(Not(body))
    if isinstance(e, Opt):
        return Choice(body, EPS)
    if isinstance(e, Plus):
        return Seq(body, Star(body))
    if isinstance(e, Check):
        return Choice(body, THROW)
    return type(e)(body)


def is_core(e) -> bool:
    return not any(isinstance(n, SUGAR) for n in walk(e))


_PREC = {Choice: 0, Seq: 1, Not: 2, And: 2}


def show_expr(e, prec: int = 0) -> str:
    """Render an expression in grammar-file syntax."""
    if isinstance(e, Empty):
        return "eps"
    if isinstance(e, Term):
        return str(e.t)
    if isinstance(e, NonTerm):
        return e.name
    if isinstance(e, Throw):
        return "throw"
    if isinstance(e, Cut):
        return "^"
    if isinstance(e, Lit):
        return '"' + e.text.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(e, Choice):
        s = f"{show_expr(e.first, 1)} / {show_expr(e.second, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, Seq):
        s = f"{show_expr(e.left, 2)} {show_expr(e.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, (Not, And)):
        op = "!" if isinstance(e, Not) else "&"
        s = op + show_expr(e.body, 3)
        return f"({s})" if prec > 2 else s
    if isinstance(e, (Star, Plus, Opt)):
        op = {Star: "*", Plus: "+", Opt: "?"}[type(e)]
        return show_expr(e.body, 3) + op
    name = {Catch: "catch", Try: "try", Check: "check"}[type(e)]
    return f"{name}({show_expr(e.body)})"


# -- outcomes -----------------------------------------------------------------

class Kind(enum.IntEnum):
    SUCCESS = 0
    FAIL = 1
    ERROR = 2

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Outcome:
    kind: Kind
    rest: str

    @property
    def ok(self) -> bool:
        return self.kind is Kind.SUCCESS

    def consumed(self, x: str) -> str:
        return x[: len(x) - len(self.rest)]

    def __str__(self) -> str:
        return f"{self.kind}({self.rest!r})"


def Success(rest: str) -> Outcome:
    return Outcome(Kind.SUCCESS, rest)


def Fail(rest: str) -> Outcome:
    return Outcome(Kind.FAIL, rest)


def Error(rest: str) -> Outcome:
    return Outcome(Kind.ERROR, rest)


# -- grammars -----------------------------------------------------------------

@dataclass(frozen=True)
class Grammar:
    rules: Mapping[str, Expr]
    start: Expr
    lexical: frozenset = frozenset()
    alphabet: str | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def build(cls, rules: Mapping[str, object] | Iterable[tuple[str, object]] = (),
              start=None, lexical: Iterable[str] = (), alphabet: str | None = None) -> "Grammar":
        """Desugar everything; ``start`` defaults to the first rule."""
        items = list(rules.items() if isinstance(rules, Mapping) else rules)
        table = {name: desugar(e) for name, e in items}
        if start is None:
            if not items:
                raise ValueError("a grammar needs a start expression or at least one rule")
            start = NonTerm(items[0][0])
        return cls(table, desugar(start), frozenset(lexical), alphabet)

    def with_start(self, start) -> "Grammar":
        return Grammar(self.rules, desugar(start), self.lexical, self.alphabet)

    def expressions(self) -> Iterator[tuple[str | None, Expr]]:
        yield from self.rules.items()
        yield None, self.start

    def check(self, cuts: bool = True) -> None:
        """Raise GrammarCheckError unless both static checks pass."""
        report = check_wellformed(self)
        if report.ok and cuts:
            report = check_cut_placement(self)
        if not report.ok:
            raise GrammarCheckError(report)


@dataclass(frozen=True)
class Issue:
    rule: str | None
    tag: str
    detail: str

    def __str__(self) -> str:
        where = self.rule if self.rule is not None else "%start"
        return f"{where}: {self.tag}: {self.detail}"


@dataclass
class Report:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __iter__(self):
        return iter(self.issues)


WellFormednessReport = Report
PlacementReport = Report


def nullable_table(g: Grammar) -> dict[str, bool]:
    """Least fixpoint of the syntactic nullability approximation."""
    table = {name: False for name in g.rules}
    changed = True
    while changed:
        changed = False
        for name, e in g.rules.items():
            if not table[name] and nullable(e, table):
                table[name] = changed = True
    return table


def nullable(e, table: Mapping[str, bool]) -> bool:
    if isinstance(e, (Empty, Not, Throw, Star, Cut)):
        return True
    if isinstance(e, Term):
        return False
    if isinstance(e, NonTerm):
        return table.get(e.name, False)
    if isinstance(e, Seq):
        return nullable(e.left, table) and nullable(e.right, table)
    if isinstance(e, Choice):
        return nullable(e.first, table) or nullable(e.second, table)
    if isinstance(e, (Catch, Try)):
        return nullable(e.body, table)
    raise TypeError(f"not a core expression: {e!r}")


def _heads(e, table) -> set[str]:
    """Nonterminals that may be entered at the current position, before any input is consumed."""
    if isinstance(e, NonTerm):
        return {e.name}
    if isinstance(e, Seq):
        out = _heads(e.left, table)
        if nullable(e.left, table):
            out |= _heads(e.right, table)
        return out
    if isinstance(e, Choice):
        return _heads(e.first, table) | _heads(e.second, table)
    if isinstance(e, (Star, Not, Catch, Try)):
        return _heads(e.body, table)
    return set()


def check_wellformed(g: Grammar) -> Report:
    report = Report()
    for name, e in g.expressions():
        if not is_core(e):
            report.issues.append(Issue(name, "not-desugared", show_expr(e)))
            return report
        for node in walk(e):
            if isinstance(node, NonTerm) and node.name not in g.rules:
                report.issues.append(Issue(name, "undefined", f"nonterminal {node.name} has no rule"))
    for tok in sorted(g.lexical - set(g.rules)):
        report.issues.append(Issue(tok, "undefined", "declared token has no rule"))
    if not report.ok:
        return report

    table = nullable_table(g)
    graph = {name: _heads(e, table) for name, e in g.rules.items()}
    for name in g.rules:
        path = _cycle_from(name, graph)
        if path:
            report.issues.append(Issue(name, "left-recursion", " -> ".join(path)))
    for name, e in g.expressions():
        for node in walk(e):
            if isinstance(node, Star) and nullable(node.body, table):
                report.issues.append(Issue(name, "nullable-star", show_expr(node)))
    return report


def _cycle_from(start: str, graph: Mapping[str, set]) -> list[str] | None:
    parent: dict[str, str] = {}
    stack = [start]
    seen = set()
    while stack:
        node = stack.pop()
        for nxt in sorted(graph.get(node, ())):
            if nxt == start:
                path = [node]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                return list(reversed(path)) + [start]
            if nxt not in seen:
                seen.add(nxt)
                parent[nxt] = node
                stack.append(nxt)
    return None


def check_cut_placement(g: Grammar) -> Report:
    """Cut may only sit in the sequence chain of a choice's first alternative or a star body."""
    report = Report()

    def visit(e, chain_ok: bool, rule):
        if isinstance(e, Cut):
            if not chain_ok:
                report.issues.append(Issue(rule, "ill-placed-cut", "^ outside e1 ^ e2 / e3 or (e1 ^ e2)*"))
        elif isinstance(e, Seq):
            visit(e.left, chain_ok, rule)
            visit(e.right, chain_ok, rule)
        elif isinstance(e, Choice):
            visit(e.first, True, rule)
            visit(e.second, False, rule)
        elif isinstance(e, Star):
            visit(e.body, True, rule)
        else:
            for child in children(e):
                visit(child, False, rule)

    for name, e in g.expressions():
        visit(e, False, name)
    return report


def uses_cut(e) -> bool:
    return any(isinstance(n, Cut) for n in walk(e))


def grammar_uses(g: Grammar, kinds: tuple) -> list[tuple[str | None, Expr]]:
    return [(name, node) for name, e in g.expressions() for node in walk(e) if isinstance(node, kinds)]
