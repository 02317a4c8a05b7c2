"""Symbolic execution of the machine over constrained strings.

A constrained string assigns a character set to every position of an input of
fixed length.  The machine runs on ``tt^n``; a terminal splits the current path
in two (the position is narrowed to ``c /\\ t`` and consumed, or narrowed to
``c /\\ ~t`` and the terminal fails).  Everything else is deterministic.  A path
keeps one constrained string for the whole input, so constraints learned on a
failing branch are still present when a choice falls through to its
alternative, or when a predicate or repetition resumes at its saved position.

The final states of all paths partition the strings of length ``n``: every
instance of an ``ok`` outcome is accepted with exactly that split into
consumed prefix and remaining suffix, and every accepted string is an instance
of some ``ok`` outcome.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .charset import EMPTY, FULL, CharSet, show
from .errors import (
    BudgetExceeded, EnumerationCapExceeded, SolutionCapExceeded, UnsupportedConstruct,
)
from .grammar import CORE_SYMBOLIC, Grammar, NonTerm, show_expr, walk
from .program import CHOICE, EMPTY as N_EMPTY, NOT, NT, SEQ, STAR, TERM, compile_program

Constraint = CharSet
TT = FULL
FF = EMPTY


def conj(c: Constraint, d: Constraint) -> Constraint:
    return c & d


@dataclass(frozen=True)
class ConstrainedString:
    items: tuple
    inconsistent: bool = False

    @classmethod
    def of(cls, items: Iterable[Constraint]) -> "ConstrainedString":
        items = tuple(items)
        if any(c.is_empty for c in items):
            return FF_STRING
        return cls(items)

    @classmethod
    def top(cls, n: int) -> "ConstrainedString":
        return cls((TT,) * n)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __add__(self, other: "ConstrainedString") -> "ConstrainedString":
        if self.inconsistent or other.inconsistent:
            return FF_STRING
        return ConstrainedString(self.items + other.items)

    def admits(self, w: str) -> bool:
        """``w`` is an instance of this string (same length, each char allowed)."""
        return not self.inconsistent and len(w) == len(self.items) and all(
            ch in c for ch, c in zip(w, self.items))

    def __str__(self) -> str:
        if self.inconsistent:
            return "ff"
        if not self.items:
            return "eps"
        return " . ".join(show(c) for c in self.items)


FF_STRING = ConstrainedString((), True)


def pointwise_conj(xs: ConstrainedString, ys: ConstrainedString) -> ConstrainedString:
    if xs.inconsistent or ys.inconsistent:
        return FF_STRING
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    return ConstrainedString.of(c & d for c, d in zip(xs, ys))


@dataclass(frozen=True)
class SymOutcome:
    kind: str  # "ok" | "fail"
    remaining: ConstrainedString
    consumed: ConstrainedString

    @property
    def string(self) -> ConstrainedString:
        return self.consumed + self.remaining

    def __str__(self) -> str:
        return f"{self.consumed} :: {self.remaining}"


# -- the symbolic machine -----------------------------------------------------

EVAL, RES = 0, 1
OK, FAIL = 0, 1
F_SEQ, F_CHOICE, F_STAR, F_NEG = range(4)


@dataclass(frozen=True)
class SymState:
    """Control (``mode``/``node``), position, frame stack and constrained string."""
    mode: int
    node: int  # expression node while evaluating, OK/FAIL once resolved
    pos: int
    stack: tuple | None
    cs: tuple
    steps: int = 0

    def key(self) -> tuple:
        return (self.mode, self.node, self.pos, self.stack, self.cs)

    @property
    def terminal(self) -> bool:
        return self.mode == RES and self.stack is None


def require_core(g: Grammar, e) -> None:
    """Reject operators the symbolic machine has no rules for."""
    seen: set[str] = set()
    todo = [e]
    while todo:
        for node in walk(todo.pop()):
            if not isinstance(node, CORE_SYMBOLIC):
                raise UnsupportedConstruct(
                    f"symbolic search supports only eps, terminals, nonterminals, sequence, "
                    f"choice, * and !; found {show_expr(node)}")
            if isinstance(node, NonTerm) and node.name not in seen:
                seen.add(node.name)
                todo.append(g.rules[node.name])


class SymbolicMachine:
    def __init__(self, g: Grammar, e=None):
        e = g.start if e is None else e
        require_core(g, e)
        self.prog = compile_program(g, e)
        self.kind, self.a, self.b = (arr.tolist() for arr in (self.prog.kind, self.prog.a, self.prog.b))
        self.dom = [t.dom for t in self.prog.terminals]

    def initial(self, n: int, cs: ConstrainedString | None = None) -> SymState:
        items = ConstrainedString.top(n).items if cs is None else cs.items
        return SymState(EVAL, self.prog.root, 0, None, items)

    def successors(self, s: SymState) -> list[SymState]:
        steps = s.steps + 1
        pos, stack, cs = s.pos, s.stack, s.cs
        if s.mode == EVAL:
            node = s.node
            k = self.kind[node]
            if k == TERM:
                if pos >= len(cs):
                    return [SymState(RES, FAIL, pos, stack, cs, steps)]
                c, t = cs[pos], self.dom[self.a[node]]
                out = []
                hit = c & t
                if not hit.is_empty:
                    out.append(SymState(RES, OK, pos + 1, stack, cs[:pos] + (hit,) + cs[pos + 1:], steps))
                miss = c - t
                if not miss.is_empty:
                    out.append(SymState(RES, FAIL, pos, stack, cs[:pos] + (miss,) + cs[pos + 1:], steps))
                return out
            if k == NT:
                return [SymState(EVAL, self.a[node], pos, stack, cs, steps)]
            if k == SEQ:
                frame = (F_SEQ, self.b[node], 0)
            elif k == CHOICE:
                frame = (F_CHOICE, self.b[node], pos)
            elif k == STAR:
                frame = (F_STAR, self.a[node], pos)
            elif k == NOT:
                frame = (F_NEG, 0, pos)
            elif k == N_EMPTY:
                return [SymState(RES, OK, pos, stack, cs, steps)]
            else:
                raise UnsupportedConstruct(f"node kind {k} has no symbolic rule")
            return [SymState(EVAL, self.a[node], pos, (frame, stack), cs, steps)]

        (fk, fn, fp), rest = stack
        res = s.node
        if fk == F_SEQ:
            if res == OK:
                return [SymState(EVAL, fn, pos, rest, cs, steps)]
            return [SymState(RES, res, pos, rest, cs, steps)]
        if fk == F_CHOICE:
            if res == FAIL:
                # the alternative runs on the string strengthened by the failed branch
                return [SymState(EVAL, fn, fp, rest, cs, steps)]
            return [SymState(RES, res, pos, rest, cs, steps)]
        if fk == F_STAR:
            if res == OK:
                return [SymState(EVAL, fn, pos, ((F_STAR, fn, pos), rest), cs, steps)]
            return [SymState(RES, OK, fp, rest, cs, steps)]
        # F_NEG: the learned constraints are kept either way
        return [SymState(RES, FAIL if res == OK else OK, fp, rest, cs, steps)]

    def outcome(self, s: SymState) -> SymOutcome:
        return SymOutcome("ok" if s.node == OK else "fail",
                          ConstrainedString(s.cs[s.pos:]), ConstrainedString(s.cs[:s.pos]))


def search(g: Grammar, e=None, n: int = 0, limit: int | None = None, *,
           include_fail: bool = False, dedup: bool = True,
           path_budget: int = 1_000_000) -> set[SymOutcome]:
    """All symbolic outcomes of ``e`` on inputs of length exactly ``n``.

    Returns the ``ok`` outcomes (plus ``fail`` ones with ``include_fail``).
    Raises SolutionCapExceeded once more than ``limit`` outcomes are found and
    BudgetExceeded if one path runs for more than ``path_budget`` transitions.
    """
    machine = SymbolicMachine(g, e)
    results: set[SymOutcome] = set()
    frontier = deque([machine.initial(n)])
    visited: set = set()
    while frontier:
        s = frontier.popleft()
        if s.terminal:
            if s.node == OK or include_fail:
                results.add(machine.outcome(s))
                if limit is not None and len(results) > limit:
                    raise SolutionCapExceeded(f"more than {limit} solutions", results)
            continue
        if s.steps >= path_budget:
            raise BudgetExceeded(f"symbolic path exceeded {path_budget} steps")
        for child in machine.successors(s):
            if dedup:
                key = child.key()
                if key in visited:
                    continue
                visited.add(key)
            frontier.append(child)
    return results


def search_upto(g: Grammar, e=None, max_len: int = 0, **kw) -> dict[int, set[SymOutcome]]:
    return {n: search(g, e, n, **kw) for n in range(max_len + 1)}


def sort_outcomes(outcomes: Iterable[SymOutcome]) -> list[SymOutcome]:
    return sorted(outcomes, key=lambda o: (o.kind, -len(o.consumed), str(o)))


# -- instances ----------------------------------------------------------------

def _alphabet(alphabet: Iterable[str]) -> list[str]:
    out = list(dict.fromkeys(alphabet))
    if not out:
        raise ValueError("alphabet must be nonempty")
    return out


def enumerate(s: SymOutcome | ConstrainedString, alphabet: Iterable[str], cap: int = 100_000) -> list[str]:  # noqa: A001
    """Concrete instances over ``alphabet``, in lexicographic order of the alphabet as given."""
    cs = s.string if isinstance(s, SymOutcome) else s
    if cs.inconsistent:
        return []
    letters = _alphabet(alphabet)
    choices = [c.restrict(letters) for c in cs]
    out: list[str] = []
    for combo in itertools.product(*choices):
        if len(out) >= cap:
            raise EnumerationCapExceeded(f"more than {cap} instances", out)
        out.append("".join(combo))
    return out


# -- unique token prefix ------------------------------------------------------

@dataclass(frozen=True)
class UtpViolation:
    first: str
    second: str
    length: int
    witness: str
    first_outcome: SymOutcome
    second_outcome: SymOutcome

    def __str__(self) -> str:
        return (f"{self.first} and {self.second} both accept {self.witness!r} "
                f"({self.first_outcome} / {self.second_outcome})")


@dataclass
class UtpReport:
    bound: int
    violations: list[UtpViolation]

    @property
    def clean(self) -> bool:
        return not self.violations


_PREFERRED = "abcdefghijklmnopqrstuvwxyz0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ_.,;:(){}[] "


def utp_check(g: Grammar, n: int, **kw) -> UtpReport:
    """Bounded check that no two tokens accept a common input of length <= n.

    A token only counts as matching when it consumes at least one character.
    A clean report covers lengths up to ``n`` only.
    """
    if not g.lexical:
        raise ValueError("grammar declares no tokens (%token)")
    tokens = sorted(g.lexical)
    oks = {(tok, m): [o for o in search(g, NonTerm(tok), m, **kw)]
           for tok in tokens for m in range(1, n + 1)}
    preferred = (g.alphabet or "") + _PREFERRED
    violations = []
    for a, b in itertools.permutations(tokens, 2):
        for m in range(1, n + 1):
            hit = None
            for oa in oks[a, m]:
                if not len(oa.consumed):
                    continue
                for ob in oks[b, m]:
                    both = pointwise_conj(oa.string, ob.string)
                    if not both.inconsistent:
                        hit = (oa, ob, "".join(c.sample(preferred) for c in both))
                        break
                if hit:
                    break
            if hit:
                violations.append(UtpViolation(a, b, m, hit[2], hit[0], hit[1]))
                break
    return UtpReport(n, violations)
