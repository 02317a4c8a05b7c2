"""Reference interpreter: one inference rule per case, no cleverness.

Covers the natural-semantics rules for the core operators together with the
rules for ``throw``, ``catch`` and ``try``.  The cut operator is only given
meaning by the frame machine and is rejected here.
"""
from __future__ import annotations

import sys
import threading
from contextlib import contextmanager
from dataclasses import dataclass

from .errors import BudgetExceeded, UnsupportedCut
from .grammar import (
    Catch, Choice, Cut, Empty, Grammar, Kind, NonTerm, Not, Outcome, Seq, Star,
    Term, Throw, Try,
)

SUCCESS, FAIL, ERROR = Kind.SUCCESS, Kind.FAIL, Kind.ERROR


@dataclass(frozen=True)
class EvalBudget:
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


DEFAULT_BUDGET = EvalBudget()


@contextmanager
def _deep_recursion(limit: int):
    old = sys.getrecursionlimit()
    if old < limit:
        sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class _Evaluator:
    def __init__(self, g: Grammar, x: str, budget: EvalBudget):
        self.rules = g.rules
        self.x = x
        self.n = len(x)
        self.left = budget.max_steps

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("evaluation budget exhausted")

    def ev(self, e, i: int) -> tuple[Kind, int]:
        self.tick()
        if isinstance(e, Term):
            if i < self.n and self.x[i] in e.t.dom:  # term.1
                return SUCCESS, i + 1
            return FAIL, i                              # term.2, term.3
        if isinstance(e, Seq):
            k, j = self.ev(e.left, i)
            if k is not SUCCESS:                        # seq.2, seq.3
                return k, j
            return self.ev(e.right, j)                  # seq.1
        if isinstance(e, NonTerm):
            return self.ev(self.rules[e.name], i)       # var
        if isinstance(e, Choice):
            k, j = self.ev(e.first, i)
            if k is FAIL:                               # ord.2
                return self.ev(e.second, i)
            return k, j                                 # ord.1, ord.3
        if isinstance(e, Star):
            while True:
                k, j = self.ev(e.body, i)
                if k is FAIL:                           # rep.1
                    return SUCCESS, i
                if k is ERROR:                          # rep.3
                    return ERROR, j
                self.tick()                             # rep.2
                i = j
        if isinstance(e, Not):
            k, _ = self.ev(e.body, i)
            if k is SUCCESS:                            # not.2
                return FAIL, i
            return SUCCESS, i                           # not.1, not.3
        if isinstance(e, Empty):
            return SUCCESS, i                           # empty
        if isinstance(e, Throw):
            return ERROR, i                             # throw
        if isinstance(e, Catch):
            k, j = self.ev(e.body, i)
            return (SUCCESS if k is SUCCESS else FAIL), j   # catch.1-3
        if isinstance(e, Try):
            k, j = self.ev(e.body, i)
            return (SUCCESS if k is SUCCESS else ERROR), j  # try.1-3
        if isinstance(e, Cut):
            raise UnsupportedCut("cut has no big-step rule; use the machine")
        raise TypeError(f"not a core expression: {e!r}")


_SHALLOW = 2_000       # recursion depth that is safe on the calling thread
_FRAME_BYTES = 2_048   # generous C-stack estimate per interpreter frame


def _run_bounded(ev: "_Evaluator", e, limit: int):
    with _deep_recursion(limit):
        try:
            return ev.ev(e, 0)
        except RecursionError:
            raise BudgetExceeded("recursion depth exhausted") from None


def eval_pos(g: Grammar, e, x: str, budget: EvalBudget = DEFAULT_BUDGET) -> tuple[Kind, int]:
    ev = _Evaluator(g, x, budget)
    limit = max(20_000, 8 * len(x) + 1000)
    try:
        # short inputs rarely recurse deeply; try on this thread first
        return _run_bounded(ev, e, min(limit, _SHALLOW + sys.getrecursionlimit()))
    except BudgetExceeded:
        if ev.left < 0:
            raise
    # deep recursion needs a bigger C stack than the calling thread may have
    ev = _Evaluator(g, x, budget)
    box: list = []

    def work():
        try:
            box.append(("ok", _run_bounded(ev, e, limit)))
        except BaseException as exc:  # re-raised on the caller's thread
            box.append(("exc", exc))

    old = threading.stack_size()
    threading.stack_size(min(limit * _FRAME_BYTES, 1 << 30))
    try:
        t = threading.Thread(target=work, name="pegrw-bigstep")
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    tag, val = box[0]
    if tag == "exc":
        raise val
    return val


def eval(g: Grammar, e, x: str, budget: EvalBudget = DEFAULT_BUDGET) -> Outcome:  # noqa: A001
    kind, i = eval_pos(g, e, x, budget)
    return Outcome(kind, x[i:])


def accepts(g: Grammar, x: str, budget: EvalBudget = DEFAULT_BUDGET) -> bool:
    return eval(g, g.start, x, budget).ok
