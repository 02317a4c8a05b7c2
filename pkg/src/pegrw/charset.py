"""Finite and co-finite character sets.

Both terminal domains and symbolic constraints are sets of characters drawn
from an unbounded alphabet (Unicode scalar values).  Every set we ever need is
either finite or the complement of a finite set, so a single frozenset plus a
polarity flag is a complete, canonical representation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class CharSet:
    chars: frozenset
    negated: bool = False  # True: everything except ``chars``

    @classmethod
    def of(cls, chars: Iterable[str]) -> "CharSet":
        return cls(frozenset(chars), False)

    @classmethod
    def excluding(cls, chars: Iterable[str]) -> "CharSet":
        return cls(frozenset(chars), True)

    @classmethod
    def single(cls, c: str) -> "CharSet":
        return cls(frozenset((c,)), False)

    @classmethod
    def range(cls, lo: str, hi: str) -> "CharSet":
        return cls(frozenset(chr(i) for i in range(ord(lo), ord(hi) + 1)), False)

    @classmethod
    def full(cls) -> "CharSet":
        return FULL

    @classmethod
    def empty(cls) -> "CharSet":
        return EMPTY

    def __contains__(self, c: str) -> bool:
        return (c in self.chars) != self.negated

    @property
    def is_empty(self) -> bool:
        return not self.negated and not self.chars

    @property
    def is_full(self) -> bool:
        return self.negated and not self.chars

    @property
    def is_finite(self) -> bool:
        return not self.negated

    def __invert__(self) -> "CharSet":
        return CharSet(self.chars, not self.negated)

    def __and__(self, other: "CharSet") -> "CharSet":
        a, b = self, other
        if not a.negated and not b.negated:
            return CharSet(a.chars & b.chars)
        if a.negated and b.negated:
            return CharSet(a.chars | b.chars, True)
        if a.negated:
            a, b = b, a
        return CharSet(a.chars - b.chars)

    def __or__(self, other: "CharSet") -> "CharSet":
        return ~(~self & ~other)

    def __sub__(self, other: "CharSet") -> "CharSet":
        return self & ~other

    def issubset(self, other: "CharSet") -> bool:
        return (self - other).is_empty

    __le__ = issubset

    def isdisjoint(self, other: "CharSet") -> bool:
        return (self & other).is_empty

    def restrict(self, alphabet: Iterable[str]) -> list[str]:
        """Members of ``alphabet`` in this set, keeping the alphabet's order."""
        return [c for c in alphabet if c in self]

    def sample(self, preferred: Iterable[str] = ()) -> str:
        """Some member, taken from ``preferred`` when possible."""
        if self.is_empty:
            raise ValueError("empty character set has no members")
        for c in preferred:
            if c in self:
                return c
        if not self.negated:
            return min(self.chars)
        code = 0x21
        while chr(code) in self.chars:
            code += 1
        return chr(code)

    def intervals(self) -> list[tuple[int, int]]:
        """Sorted inclusive code-point intervals of ``chars`` (ignores polarity)."""
        out: list[tuple[int, int]] = []
        for code in sorted(map(ord, self.chars)):
            if out and out[-1][1] == code - 1:
                out[-1] = (out[-1][0], code)
            else:
                out.append((code, code))
        return out

    def __iter__(self) -> Iterator[str]:
        if self.negated:
            raise TypeError("cannot iterate a co-finite set")
        return iter(sorted(self.chars))

    def __repr__(self) -> str:
        body = "".join(sorted(self.chars))
        return f"CharSet({'~' if self.negated else ''}{body!r})"


EMPTY = CharSet(frozenset(), False)
FULL = CharSet(frozenset(), True)

DIGITS = CharSet.range("0", "9")
LOWER = CharSet.range("a", "z")
UPPER = CharSet.range("A", "Z")
ALPHA = LOWER | UPPER
WORD = ALPHA | DIGITS | CharSet.single("_")

# Built-in class table; order matters for pretty-printing (widest first).
NAMED_CLASSES: dict[str, CharSet] = {
    "[.]": FULL,
    "[a-zA-Z0-9_]": WORD,
    "[a-zA-Z]": ALPHA,
    "[a-z]": LOWER,
    "[A-Z]": UPPER,
    "[0-9]": DIGITS,
}


def _quote(c: str) -> str:
    esc = {"\n": "\\n", "\t": "\\t", "\r": "\\r", "\\": "\\\\", '"': '\\"'}
    if c in esc:
        return f'"{esc[c]}"'
    if not c.isprintable() or c.isspace() and c != " ":
        return f'"\\x{ord(c):02x}"'
    return f'"{c}"'


def _cover(chars: frozenset) -> list[str]:
    """Split a finite set into named classes and leftover single characters."""
    parts: list[str] = []
    rest = set(chars)
    for name, cls in NAMED_CLASSES.items():
        if cls.is_finite and cls.chars <= rest:
            parts.append(name)
            rest -= cls.chars
    parts.extend(_quote(c) for c in sorted(rest))
    return parts


def show(cs: CharSet) -> str:
    """Compact display: ``"c"``, ``[0-9]``, ``~X``, ``(X /\\ Y)``, ``tt``, ``ff``."""
    if cs.is_empty:
        return "ff"
    if cs.is_full:
        return "tt"
    for name, cls in NAMED_CLASSES.items():
        if cls == cs:
            return name
    if cs.negated:
        parts = ["~" + p for p in _cover(cs.chars)]
    else:
        if len(cs.chars) == 1:
            return _quote(next(iter(cs.chars)))
        # a named class with a few holes reads better than a long list
        best = None
        for name, cls in NAMED_CLASSES.items():
            if cls.is_finite and cs.chars <= cls.chars:
                holes = cls.chars - cs.chars
                if len(holes) < len(cs.chars) and (best is None or len(holes) < len(best[1])):
                    best = (name, holes)
        if best is not None:
            parts = [best[0]] + ["~" + _quote(c) for c in sorted(best[1])]
        else:
            parts = _cover(cs.chars)
            if len(parts) > 1:
                return "{" + ", ".join(parts) + "}"
    if len(parts) == 1:
        return parts[0]
    return "(" + " /\\ ".join(parts) + ")"
