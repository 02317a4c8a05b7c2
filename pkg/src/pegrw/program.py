"""Flattening of a grammar into integer arrays for the machine kernel."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grammar import (
    Catch, Choice, Cut, Empty, Grammar, NonTerm, Not, Seq, Star, Term, Terminal,
    Throw, Try,
)

# node kinds
EMPTY, TERM, NT, SEQ, CHOICE, STAR, NOT, THROW, CUT, CATCH, TRY = range(11)

_KIND = {Empty: EMPTY, Term: TERM, NonTerm: NT, Seq: SEQ, Choice: CHOICE, Star: STAR,
         Not: NOT, Throw: THROW, Cut: CUT, Catch: CATCH, Try: TRY}


@dataclass
class Program:
    """Node table: ``kind[i]`` with operands ``a[i]``, ``b[i]``.

    SEQ/CHOICE use both operands, unary nodes use ``a``, NT points ``a`` at the
    root of the rule body and TERM points ``a`` at a terminal.  Terminal ``t``
    matches code points in ``[t_lo[k], t_hi[k]]`` for ``t_off[t] <= k < t_off[t+1]``,
    inverted when ``t_neg[t]`` is set.
    """
    kind: np.ndarray
    a: np.ndarray
    b: np.ndarray
    t_off: np.ndarray
    t_lo: np.ndarray
    t_hi: np.ndarray
    t_neg: np.ndarray
    root: int
    exprs: list = field(repr=False)
    terminals: list = field(repr=False)
    names: dict = field(repr=False)  # rule name -> body node

    def arrays(self) -> tuple:
        return (self.kind, self.a, self.b, self.t_off, self.t_lo, self.t_hi, self.t_neg)

    def lists(self) -> tuple:
        cached = self.__dict__.get("_lists")
        if cached is None:
            cached = tuple(arr.tolist() for arr in self.arrays())
            self.__dict__["_lists"] = cached
        return cached


class _Builder:
    def __init__(self, g: Grammar):
        self.g = g
        self.kind: list[int] = []
        self.a: list[int] = []
        self.b: list[int] = []
        self.exprs: list = []
        self.terminals: list[Terminal] = []
        self.term_index: dict[Terminal, int] = {}
        self.fixups: list[tuple[int, str]] = []
        self.rule_root: dict[str, int] = {}

    def node(self, k: int, e) -> int:
        self.kind.append(k)
        self.a.append(-1)
        self.b.append(-1)
        self.exprs.append(e)
        return len(self.kind) - 1

    def emit(self, e) -> int:
        k = _KIND.get(type(e))
        if k is None:
            raise TypeError(f"not a core expression: {e!r}")
        i = self.node(k, e)
        if k == TERM:
            t = self.term_index.get(e.t)
            if t is None:
                t = self.term_index[e.t] = len(self.terminals)
                self.terminals.append(e.t)
            self.a[i] = t
        elif k == NT:
            self.fixups.append((i, e.name))
        elif k == SEQ:
            self.a[i] = self.emit(e.left)
            self.b[i] = self.emit(e.right)
        elif k == CHOICE:
            self.a[i] = self.emit(e.first)
            self.b[i] = self.emit(e.second)
        elif k in (STAR, NOT, CATCH, TRY):
            self.a[i] = self.emit(e.body)
        return i

    def link(self) -> None:
        while self.fixups:
            i, name = self.fixups.pop()
            if name not in self.rule_root:
                if name not in self.g.rules:
                    raise KeyError(f"undefined nonterminal {name}")
                self.rule_root[name] = self.emit(self.g.rules[name])
            self.resolved.append((i, name))

    def build(self, e) -> Program:
        self.resolved: list[tuple[int, str]] = []
        root = self.emit(e)
        self.link()
        for i, name in self.resolved:
            self.a[i] = self.rule_root[name]
        off, lo, hi, neg = [0], [], [], []
        for t in self.terminals:
            for x, y in t.dom.intervals():
                lo.append(x)
                hi.append(y)
            off.append(len(lo))
            neg.append(1 if t.dom.negated else 0)
        i32 = np.int32
        return Program(
            kind=np.array(self.kind, dtype=np.int8),
            a=np.array(self.a, dtype=i32), b=np.array(self.b, dtype=i32),
            t_off=np.array(off, dtype=i32), t_lo=np.array(lo, dtype=i32),
            t_hi=np.array(hi, dtype=i32), t_neg=np.array(neg, dtype=np.int8),
            root=root, exprs=self.exprs, terminals=self.terminals,
            names=dict(self.rule_root),
        )


def compile_program(g: Grammar, e=None) -> Program:
    """Flatten ``e`` (default: the start expression) and every rule it reaches.

    Results are memoised on the grammar, which is immutable.
    """
    if e is None:
        e = g.start
    cache = g._cache.setdefault("programs", {})
    prog = cache.get(e)
    if prog is None:
        prog = cache[e] = _Builder(g).build(e)
    return prog


def encode_input(x: str) -> np.ndarray:
    return np.frombuffer(x.encode("utf-32-le", "surrogatepass"), dtype="<u4").astype(np.int32)
