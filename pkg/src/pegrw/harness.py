"""Corpus tooling: input mutation, batch step counting, grammar diffs and oracles."""
from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

from . import bigstep, machine
from .charset import CharSet
from .errors import BudgetExceeded, EnumerationCapExceeded, GrammarCheckError, NoDeletableSymbols
from .grammar import (
    EPS, THROW, Catch, Choice, Grammar, NonTerm, Not, Outcome, Seq, Star, Term,
    Terminal, Try, char,
)
from .machine import DEFAULT_CONFIG, MachineConfig

JSON_DELETABLE = frozenset("]}:,;()")


# -- mutation -----------------------------------------------------------------

@dataclass(frozen=True)
class MutationSpec:
    """Random deletions of structural characters.

    Positions are drawn with Python's ``random.Random(seed)`` (Mersenne Twister),
    without replacement, so a variant never deletes the same position twice.
    """
    deletable: frozenset = JSON_DELETABLE
    max_deletions: int = 10
    seed: int = 0
    variants: int = 10

    def __post_init__(self):
        object.__setattr__(self, "deletable", frozenset(self.deletable))
        if self.max_deletions < 1:
            raise ValueError("max_deletions must be at least 1")
        if self.variants < 1:
            raise ValueError("variants must be at least 1")


def mutate(text: str, spec: MutationSpec) -> list[str]:
    if not text:
        raise ValueError("cannot mutate empty text")
    positions = [i for i, c in enumerate(text) if c in spec.deletable]
    if not positions:
        raise NoDeletableSymbols(f"text contains none of {''.join(sorted(spec.deletable))!r}")
    rng = random.Random(spec.seed)
    out = []
    for _ in range(spec.variants):
        k = rng.randint(1, min(spec.max_deletions, len(positions)))
        drop = set(rng.sample(positions, k))
        out.append("".join(c for i, c in enumerate(text) if i not in drop))
    return out


# -- benchmarking -------------------------------------------------------------

@dataclass
class BenchRecord:
    file: str
    grammar: str
    outcome: str  # success | fail | error | budget
    entry_steps: int
    total_steps: int
    max_depth: int
    ms: float

    def as_dict(self) -> dict:
        return asdict(self)


def outcome_name(o: Outcome) -> str:
    return o.kind.name.lower()


def bench_one(g: Grammar, x: str, cfg: MachineConfig = DEFAULT_CONFIG, *, file: str = "-",
              grammar: str = "grammar", e=None) -> BenchRecord:
    e = g.start if e is None else e
    t0 = time.perf_counter()
    try:
        out, m = machine.run(g, e, x, cfg)
    except BudgetExceeded:
        ms = (time.perf_counter() - t0) * 1e3
        return BenchRecord(file, grammar, "budget", cfg.budget, cfg.budget, -1, ms)
    ms = (time.perf_counter() - t0) * 1e3
    return BenchRecord(file, grammar, outcome_name(out), m.entry_steps, m.total_steps,
                       m.max_stack_depth, ms)


def bench_batch(g: Grammar, inputs: Sequence[str], cfg: MachineConfig = DEFAULT_CONFIG, *,
                names: Sequence[str] | None = None, grammar: str = "grammar", e=None) -> list[BenchRecord]:
    """One record per input, in input order.  A blown budget is recorded, not raised."""
    if names is None:
        names = [str(i) for i in range(len(inputs))]
    return [bench_one(g, x, cfg, file=name, grammar=grammar, e=e) for name, x in zip(names, inputs)]


def aggregate(records: Sequence[BenchRecord]) -> dict:
    return {
        "aggregate": True,
        "grammar": records[0].grammar if records else None,
        "files": len(records),
        "entry_steps": sum(r.entry_steps for r in records),
        "total_steps": sum(r.total_steps for r in records),
        "max_depth": max((r.max_depth for r in records), default=0),
        "ms": sum(r.ms for r in records),
    }


def write_jsonl(records: Sequence[BenchRecord], fp: TextIO, *, with_aggregate: bool = True,
                timings: bool = True) -> None:
    """``timings=False`` zeroes ``ms`` so that reports are byte-stable."""
    rows = [r.as_dict() for r in records]
    if with_aggregate:
        rows.append(aggregate(records))
    for row in rows:
        if not timings:
            row["ms"] = 0.0
        fp.write(json.dumps(row, sort_keys=False) + "\n")


# -- differential testing -----------------------------------------------------

def reduction(plain: int, annotated: int) -> float:
    """``1 - annotated/plain``; 0 when there is nothing to compare."""
    return 1.0 - annotated / plain if plain else 0.0


@dataclass
class DiffEntry:
    name: str
    plain: BenchRecord
    annotated: BenchRecord

    @property
    def plain_accepts(self) -> bool:
        return self.plain.outcome == "success"

    @property
    def annotated_accepts(self) -> bool:
        # an error raised by an annotation counts as rejection
        return self.annotated.outcome == "success"

    @property
    def agree(self) -> bool:
        return self.plain_accepts == self.annotated_accepts

    @property
    def delta(self) -> int:
        return self.annotated.entry_steps - self.plain.entry_steps


@dataclass
class DiffReport:
    entries: list[DiffEntry] = field(default_factory=list)

    @property
    def disagreements(self) -> list[DiffEntry]:
        return [d for d in self.entries if not d.agree]

    @property
    def all_agree(self) -> bool:
        return not self.disagreements

    def _sums(self, accepted: bool) -> tuple[int, int, int]:
        rows = [d for d in self.entries if d.plain_accepts == accepted]
        return len(rows), sum(d.plain.entry_steps for d in rows), sum(d.annotated.entry_steps for d in rows)

    @property
    def rejected(self) -> tuple[int, int, int]:
        """(count, plain steps, annotated steps) over inputs the plain grammar rejects."""
        return self._sums(False)

    @property
    def accepted(self) -> tuple[int, int, int]:
        return self._sums(True)

    @property
    def reduction_rejected(self) -> float:
        _, p, a = self.rejected
        return reduction(p, a)

    @property
    def reduction_accepted(self) -> float:
        _, p, a = self.accepted
        return reduction(p, a)

    def lines(self) -> list[str]:
        out = []
        for d in self.entries:
            flag = "agree" if d.agree else "DISAGREE"
            out.append(f"{d.name}: plain={d.plain.outcome} annotated={d.annotated.outcome} "
                       f"steps={d.plain.entry_steps}->{d.annotated.entry_steps} delta={d.delta:+d} {flag}")
        for label, (n, p, a), r in (("rejected", self.rejected, self.reduction_rejected),
                                     ("accepted", self.accepted, self.reduction_accepted)):
            out.append(f"{label}: inputs={n} plain={p} annotated={a} reduction={100 * r:.2f}%")
        return out


def diff_grammars(plain: Grammar, annotated: Grammar, corpus: Sequence[str],
                  cfg: MachineConfig = DEFAULT_CONFIG, *, names: Sequence[str] | None = None) -> DiffReport:
    names = list(names) if names is not None else [str(i) for i in range(len(corpus))]
    p = bench_batch(plain, corpus, cfg, names=names, grammar="plain")
    a = bench_batch(annotated, corpus, cfg, names=names, grammar="annotated")
    return DiffReport([DiffEntry(n, rp, ra) for n, rp, ra in zip(names, p, a)])


# -- brute-force oracle -------------------------------------------------------

def all_strings(alphabet: Iterable[str], n: int) -> Iterator[str]:
    letters = list(dict.fromkeys(alphabet))
    return ("".join(t) for t in itertools.product(letters, repeat=n))


def brute_force_language(g: Grammar, alphabet: Iterable[str], n: int, *, all_lengths: bool = False,
                         cap: int = 2_000_000, e=None,
                         budget: bigstep.EvalBudget = bigstep.DEFAULT_BUDGET) -> dict[str, Outcome]:
    """Big-step outcome for every string of length ``n`` (or ``<= n``)."""
    letters = list(dict.fromkeys(alphabet))
    if not letters:
        raise ValueError("alphabet must be nonempty")
    lengths = range(n + 1) if all_lengths else (n,)
    size = sum(len(letters) ** m for m in lengths)
    if size > cap:
        raise EnumerationCapExceeded(f"{size} strings exceed the cap of {cap}", {})
    e = g.start if e is None else e
    return {w: bigstep.eval(g, e, w, budget) for m in lengths for w in all_strings(letters, m)}


def accepted(lang: dict[str, Outcome]) -> set[str]:
    return {w for w, o in lang.items() if o.ok}


# -- random grammars ----------------------------------------------------------

@dataclass(frozen=True)
class GenConfig:
    alphabet: str = "abc"
    max_depth: int = 4
    max_rules: int = 4
    control: bool = False  # also draw throw, catch and try
    classes: bool = True   # also draw two-letter classes and [.]


def _leaf(rng: random.Random, cfg: GenConfig, names: Sequence[str]):
    r = rng.random()
    if r < 0.55:
        return char(rng.choice(cfg.alphabet))
    if r < 0.7 and cfg.classes:
        if rng.random() < 0.3:
            return Term(Terminal.any())
        pair = sorted(rng.sample(cfg.alphabet, 2))
        return Term(Terminal.cls(f"[{''.join(pair)}]", CharSet.of(pair)))
    if r < 0.8:
        return EPS
    if cfg.control and r < 0.85:
        return THROW
    return NonTerm(rng.choice(names)) if names else char(rng.choice(cfg.alphabet))


def random_expr(rng: random.Random, cfg: GenConfig = GenConfig(), names: Sequence[str] = (),
                depth: int | None = None):
    depth = cfg.max_depth if depth is None else depth
    if depth <= 1 or rng.random() < 0.25:
        return _leaf(rng, cfg, names)
    sub = lambda: random_expr(rng, cfg, names, depth - 1)  # noqa: E731
    ops = ["seq", "seq", "choice", "choice", "star", "not"]
    if cfg.control:
        ops += ["catch", "try"]
    op = rng.choice(ops)
    if op == "seq":
        return Seq(sub(), sub())
    if op == "choice":
        return Choice(sub(), sub())
    body = sub()
    return {"star": Star, "not": Not, "catch": Catch, "try": Try}[op](body)


def random_grammar(rng: random.Random, cfg: GenConfig = GenConfig(), tries: int = 1000) -> Grammar:
    """A random grammar that passes both static checks (rejection sampling)."""
    for _ in range(tries):
        names = [f"R{i}" for i in range(rng.randint(1, cfg.max_rules))]
        rules = {name: random_expr(rng, cfg, names) for name in names}
        g = Grammar.build(rules, NonTerm(names[0]))
        try:
            g.check()
        except GrammarCheckError:
            continue
        return g
    raise RuntimeError("could not generate a well-formed grammar")


def agree_language(g1: Grammar, e1, g2: Grammar, e2, alphabet: str, max_len: int) -> list[str]:
    """Strings of length <= max_len accepted by exactly one of the two expressions."""
    out = []
    for m in range(max_len + 1):
        for w in all_strings(alphabet, m):
            if bigstep.eval(g1, e1, w).ok != bigstep.eval(g2, e2, w).ok:
                out.append(w)
    return out


__all__ = [
    "MutationSpec", "mutate", "BenchRecord", "bench_one", "bench_batch", "aggregate",
    "write_jsonl", "reduction", "DiffEntry", "DiffReport", "diff_grammars", "all_strings",
    "brute_force_language", "accepted", "GenConfig", "random_expr", "random_grammar",
    "agree_language",
]
