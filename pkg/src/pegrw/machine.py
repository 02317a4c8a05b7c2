"""Small-step frame machine.

Each pending semantic operator (COMP, CHOICE, STAR, STAR^, NEG, CATCH, TRY)
becomes one frame.  Their second argument is frozen, so evaluation is strictly
left to right and a stack of frames is an exact encoding of the rewrite terms.
Every transition below carries the label of the rewrite rule it implements.

``step`` is the readable reference implementation over immutable states;
``run`` uses the compiled kernel in :mod:`pegrw._kernels` unless a trace is
requested or ``engine="python"`` is passed.  The two are checked against
each other in the test suite, metric for metric.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

from . import _kernels
from .errors import BudgetExceeded, EngineError
from .grammar import (
    Catch, Choice, Cut, Empty, Grammar, Kind, NonTerm, Not, Outcome, Seq, Star,
    Term, Throw, Try,
)
from .program import compile_program

SUCCESS, FAIL, ERROR = Kind.SUCCESS, Kind.FAIL, Kind.ERROR


# -- frames -------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SeqK:
    next: object


@dataclass(frozen=True, slots=True)
class ChoiceK:
    alt: object
    saved: int


@dataclass(frozen=True, slots=True)
class StarK:
    body: object
    saved: int


@dataclass(frozen=True, slots=True)
class StarCommitK:
    body: object


@dataclass(frozen=True, slots=True)
class NegK:
    saved: int


@dataclass(frozen=True, slots=True)
class CatchK:
    pass


@dataclass(frozen=True, slots=True)
class TryK:
    pass


Frame = Union[SeqK, ChoiceK, StarK, StarCommitK, NegK, CatchK, TryK]
# persistent stack: None or (top frame, rest)
Stack = Optional[tuple]


def stack_frames(stack: Stack) -> list:
    """Frames from the top down."""
    out = []
    while stack is not None:
        out.append(stack[0])
        stack = stack[1]
    return out


# -- control and state --------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Eval:
    expr: object
    pos: int


@dataclass(frozen=True, slots=True)
class Resolved:
    kind: Kind
    pos: int


@dataclass(frozen=True)
class StepMetrics:
    entry_steps: int = 0
    total_steps: int = 0
    max_stack_depth: int = 0


@dataclass(frozen=True)
class MachineConfig:
    simplify: bool = True
    budget: int = 50_000_000


DEFAULT_CONFIG = MachineConfig()


@dataclass(frozen=True)
class MachineState:
    control: Union[Eval, Resolved]
    stack: Stack
    depth: int
    input: str
    grammar: Grammar = field(repr=False)
    cfg: MachineConfig = field(repr=False)
    metrics: StepMetrics = StepMetrics()
    rule: str | None = None  # label of the transition that produced this state

    @property
    def terminal(self) -> bool:
        return isinstance(self.control, Resolved) and self.stack is None

    def outcome(self) -> Outcome:
        if not self.terminal:
            raise ValueError("machine has not finished")
        return Outcome(self.control.kind, self.input[self.control.pos:])


@dataclass(frozen=True)
class TraceRecord:
    index: int
    rule: str
    pos: int
    depth: int

    def as_dict(self) -> dict:
        return {"index": self.index, "rule": self.rule, "pos": self.pos, "depth": self.depth}


def inject(g: Grammar, e, x: str, cfg: MachineConfig = DEFAULT_CONFIG) -> MachineState:
    return MachineState(Eval(e, 0), None, 0, x, g, cfg)


def _eval_step(s: MachineState, e, pos: int):
    """Dispatch on the expression under evaluation: (rule, control, stack, depth, pushed)."""
    stack, depth = s.stack, s.depth
    if isinstance(e, Term):
        x = s.input
        if pos >= len(x):
            return "Terminal3", Resolved(FAIL, pos), stack, depth, False
        if x[pos] in e.t.dom:
            return "Terminal12", Resolved(SUCCESS, pos + 1), stack, depth, False
        return "Terminal12", Resolved(FAIL, pos), stack, depth, False
    if isinstance(e, NonTerm):
        return "NTerm", Eval(s.grammar.rules[e.name], pos), stack, depth, False
    if isinstance(e, Seq):
        return "Sequence", Eval(e.left, pos), (SeqK(e.right), stack), depth + 1, True
    if isinstance(e, Choice):
        return "Choice", Eval(e.first, pos), (ChoiceK(e.second, pos), stack), depth + 1, True
    if isinstance(e, Star):
        return "Star", Eval(e.body, pos), (StarK(e.body, pos), stack), depth + 1, True
    if isinstance(e, Not):
        return "Negative", Eval(e.body, pos), (NegK(pos), stack), depth + 1, True
    if isinstance(e, Empty):
        return "empty", Resolved(SUCCESS, pos), stack, depth, False
    if isinstance(e, Throw):
        return "throw", Resolved(ERROR, pos), stack, depth, False
    if isinstance(e, Catch):
        return "Catch", Eval(e.body, pos), (CatchK(), stack), depth + 1, True
    if isinstance(e, Try):
        rule = "Try"
        if s.cfg.simplify:
            # CHOICE(TRY(S), S') = TRY(S), also through nested choices
            while stack is not None and isinstance(stack[0], ChoiceK):
                stack = stack[1]
                depth -= 1
                rule = "Try+simpl"
        return rule, Eval(e.body, pos), (TryK(), stack), depth + 1, True
    if isinstance(e, Cut):
        above = []
        rest = stack
        while rest is not None and not isinstance(rest[0], (ChoiceK, StarK)):
            above.append(rest[0])
            rest = rest[1]
        if rest is None:
            raise EngineError("cut without an enclosing choice or repetition")
        if isinstance(rest[0], ChoiceK):
            rule, rest, depth = "Choice^", rest[1], depth - 1
        else:
            rule, rest = "Star^", (StarCommitK(rest[0].body), rest[1])
        for frame in reversed(above):
            rest = (frame, rest)
        return rule, Resolved(SUCCESS, pos), rest, depth, False
    raise TypeError(f"not a core expression: {e!r}")


def _resolve_step(s: MachineState, kind: Kind, pos: int):
    frame, stack = s.stack
    depth = s.depth - 1
    if isinstance(frame, SeqK):
        if kind is SUCCESS:
            return "Seq1", Eval(frame.next, pos), stack, depth, False
        return ("Seq2" if kind is FAIL else "SeqE"), Resolved(kind, pos), stack, depth, False
    if isinstance(frame, ChoiceK):
        if kind is FAIL:
            return "Choice2", Eval(frame.alt, frame.saved), stack, depth, False
        return ("Choice1" if kind is SUCCESS else "ChoiceE"), Resolved(kind, pos), stack, depth, False
    if isinstance(frame, (StarK, StarCommitK)):
        committed = isinstance(frame, StarCommitK)
        if kind is SUCCESS:
            rule = "Star^" if committed else "Star2"
            return rule, Eval(frame.body, pos), (StarK(frame.body, pos), stack), depth + 1, True
        if kind is ERROR:
            return "StarE", Resolved(ERROR, pos), stack, depth, False
        if committed:
            return "Star^", Resolved(FAIL, pos), stack, depth, False
        return "Star1", Resolved(SUCCESS, frame.saved), stack, depth, False
    if isinstance(frame, NegK):
        if kind is SUCCESS:
            return "Neg2", Resolved(FAIL, frame.saved), stack, depth, False
        return ("Neg1" if kind is FAIL else "NegE"), Resolved(SUCCESS, frame.saved), stack, depth, False
    if isinstance(frame, CatchK):
        rule = {SUCCESS: "Catch1", FAIL: "Catch2", ERROR: "Catch3"}[kind]
        return rule, Resolved(SUCCESS if kind is SUCCESS else FAIL, pos), stack, depth, False
    if isinstance(frame, TryK):
        rule = {SUCCESS: "Try1", FAIL: "Try2", ERROR: "Try3"}[kind]
        return rule, Resolved(SUCCESS if kind is SUCCESS else ERROR, pos), stack, depth, False
    raise TypeError(f"unknown frame {frame!r}")


def step(s: MachineState) -> MachineState:
    """Apply the single rule enabled in ``s``."""
    if s.terminal:
        raise ValueError("terminal state has no successor")
    m = s.metrics
    if m.total_steps >= s.cfg.budget:
        raise BudgetExceeded(f"step budget of {s.cfg.budget} exhausted")
    c = s.control
    if isinstance(c, Eval):
        rule, control, stack, depth, pushed = _eval_step(s, c.expr, c.pos)
        entry = m.entry_steps + 1
    else:
        rule, control, stack, depth, pushed = _resolve_step(s, c.kind, c.pos)
        entry = m.entry_steps
    peak = max(m.max_stack_depth, depth) if pushed else m.max_stack_depth
    metrics = StepMetrics(entry, m.total_steps + 1, peak)
    return replace(s, control=control, stack=stack, depth=depth, metrics=metrics, rule=rule)


def states(s: MachineState) -> Iterator[MachineState]:
    """``s`` and every successor up to and including the terminal state."""
    yield s
    while not s.terminal:
        s = step(s)
        yield s


def run_python(g: Grammar, e, x: str, cfg: MachineConfig = DEFAULT_CONFIG,
               trace: list | None = None) -> tuple[Outcome, StepMetrics]:
    s = inject(g, e, x, cfg)
    while not s.terminal:
        s = step(s)
        if trace is not None:
            trace.append(TraceRecord(s.metrics.total_steps, s.rule, s.control.pos, s.depth))
    return s.outcome(), s.metrics


def run(g: Grammar, e, x: str, cfg: MachineConfig = DEFAULT_CONFIG, *,
        engine: str = "auto", trace: list | None = None) -> tuple[Outcome, StepMetrics]:
    """Run to a terminal state.

    ``engine`` is ``"auto"`` (kernel, or Python when tracing), ``"kernel"``
    or ``"python"``.  Raises BudgetExceeded when ``cfg.budget`` transitions
    are not enough.
    """
    if trace is not None or engine == "python":
        return run_python(g, e, x, cfg, trace)
    if engine not in ("auto", "kernel"):
        raise ValueError(f"unknown engine {engine!r}")
    prog = compile_program(g, e)
    res, pos, entry, total, maxd, status = _kernels.run_program(prog, x, cfg.simplify, cfg.budget)
    if status == _kernels.OVER_BUDGET:
        raise BudgetExceeded(f"step budget of {cfg.budget} exhausted")
    if status == _kernels.STRAY_CUT:
        raise EngineError("cut without an enclosing choice or repetition")
    return Outcome(Kind(res), x[pos:]), StepMetrics(entry, total, maxd)


def accepts(g: Grammar, x: str, cfg: MachineConfig = DEFAULT_CONFIG) -> bool:
    return run(g, g.start, x, cfg)[0].ok
