"""Reader for the textual grammar format.

    # comment
    %start  S
    %token  NUM ID
    %alphabet "ab."
    S  <- &(R1 "c") "a"+ R2 ![.] ;
    R1 <- "a" R1? "b" ;

Choice is ``/``, sequence is juxtaposition, prefix ``!`` and ``&``, postfix
``* + ?``.  Atoms: literals (double or single quotes), classes such as
``[0-9]`` or ``[^ \\t]``, ``[.]``, ``eps``, ``throw``, ``^``, ``check(e)``,
``catch(e)``, ``try(e)``, parentheses and nonterminal names.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .charset import NAMED_CLASSES, CharSet
from .errors import GrammarSyntaxError
from .grammar import (
    And, Catch, Check, Choice, CUT, EPS, Grammar, Lit, NonTerm, Not, Opt, Plus,
    Seq, Star, Term, Terminal, THROW, Try,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<directive>%[A-Za-z]+)
  | (?P<arrow><-)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<cls>\[(?:[^\]\\\n]|\\.)*\])
  | (?P<op>[/!&*+?^();])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", '"': '"', "'": "'",
            "]": "]", "[": "[", "-": "-", "^": "^"}
_KEYWORDS = {"eps", "throw", "check", "catch", "try"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str, path: str | None = None) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise GrammarSyntaxError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1, path)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            out.append(Token(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _unescape(body: str, tok: Token, path) -> list[str]:
    chars, i = [], 0
    while i < len(body):
        c = body[i]
        if c != "\\":
            chars.append(c)
            i += 1
            continue
        nxt = body[i + 1] if i + 1 < len(body) else ""
        if nxt == "x":
            digits = body[i + 2:i + 4]
            if not re.fullmatch(r"[0-9A-Fa-f]{2}", digits):
                raise GrammarSyntaxError("bad \\x escape", tok.line, tok.col + i + 1, path)
            chars.append(chr(int(digits, 16)))
            i += 4
        elif nxt in _ESCAPES:
            chars.append(_ESCAPES[nxt])
            i += 2
        else:
            raise GrammarSyntaxError(f"unknown escape \\{nxt}", tok.line, tok.col + i + 1, path)
    return chars


def _class_set(tok: Token, path) -> Terminal:
    text = tok.text
    if text in NAMED_CLASSES:
        return Terminal.cls(text)
    body = text[1:-1]
    negate = body.startswith("^")
    if negate:
        body = body[1:]
    # split into (char, escaped) pairs so that "\-" is a literal dash
    items: list[tuple[str, bool]] = []
    i = 0
    while i < len(body):
        if body[i] == "\\":
            j = i + 4 if body[i + 1:i + 2] == "x" else i + 2
            items.append((_unescape(body[i:j], tok, path)[0], True))
            i = j
        else:
            items.append((body[i], False))
            i += 1
    dom = CharSet.empty()
    k = 0
    while k < len(items):
        c, _ = items[k]
        if k + 2 < len(items) and items[k + 1] == ("-", False):
            hi = items[k + 2][0]
            if ord(hi) < ord(c):
                raise GrammarSyntaxError(f"reversed range {c}-{hi}", tok.line, tok.col, path)
            dom = dom | CharSet.range(c, hi)
            k += 3
        else:
            dom = dom | CharSet.single(c)
            k += 1
    if negate:
        dom = ~dom
    if dom.is_empty:
        raise GrammarSyntaxError("empty character class", tok.line, tok.col, path)
    if dom.is_full:
        return Terminal.any()
    if not dom.negated and len(dom.chars) == 1 and not negate:
        return Terminal.char(next(iter(dom.chars)))
    return Terminal.cls(text, dom)


class _Parser:
    def __init__(self, tokens: list[Token], path):
        self.toks = tokens
        self.i = 0
        self.path = path
        self.stop_line: int | None = None  # directive expressions end at end of line

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise GrammarSyntaxError(msg, tok.line, tok.col, self.path)

    def take(self, kind: str, text: str | None = None) -> Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or tok.kind
            self.fail(f"expected {want!r}, found {got!r}")
        self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.tok
        return tok.kind == kind and (text is None or tok.text == text)

    def starts_primary(self) -> bool:
        tok = self.tok
        if self.stop_line is not None and tok.line != self.stop_line:
            return False
        if tok.kind in ("string", "cls"):
            return True
        if tok.kind == "op":
            return tok.text in "!&^("
        if tok.kind == "ident":
            # `Name <-` begins the next rule
            return self.toks[self.i + 1].kind != "arrow"
        return False

    def expr(self):
        alts = [self.sequence()]
        while self.at("op", "/") and (self.stop_line is None or self.tok.line == self.stop_line):
            self.i += 1
            alts.append(self.sequence())
        out = alts[-1]
        for e in reversed(alts[:-1]):
            out = Choice(e, out)
        return out

    def sequence(self):
        items = []
        while self.starts_primary():
            items.append(self.prefix())
        if not items:
            self.fail(f"expected an expression, found {self.tok.text or self.tok.kind!r}")
        out = items[-1]
        for e in reversed(items[:-1]):
            out = Seq(e, out)
        return out

    def prefix(self):
        if self.at("op", "!"):
            self.i += 1
            return Not(self.prefix())
        if self.at("op", "&"):
            self.i += 1
            return And(self.prefix())
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while self.tok.kind == "op" and self.tok.text in "*+?":
            op = self.take("op").text
            e = {"*": Star, "+": Plus, "?": Opt}[op](e)
        return e

    def primary(self):
        tok = self.tok
        if tok.kind == "string":
            self.i += 1
            return Lit("".join(_unescape(tok.text[1:-1], tok, self.path)))
        if tok.kind == "cls":
            self.i += 1
            return Term(_class_set(tok, self.path))
        if tok.kind == "op" and tok.text == "^":
            self.i += 1
            return CUT
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            saved, self.stop_line = self.stop_line, None
            e = self.expr()
            self.stop_line = saved
            self.take("op", ")")
            return e
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "eps":
                return EPS
            if tok.text == "throw":
                return THROW
            if tok.text in ("check", "catch", "try"):
                self.take("op", "(")
                saved, self.stop_line = self.stop_line, None
                body = self.expr()
                self.stop_line = saved
                self.take("op", ")")
                return {"check": Check, "catch": Catch, "try": Try}[tok.text](body)
            return NonTerm(tok.text)
        self.fail(f"unexpected {tok.text or tok.kind!r}")

    def grammar(self) -> Grammar:
        rules: dict[str, object] = {}
        start = None
        lexical: list[str] = []
        alphabet = None
        while not self.at("eof"):
            tok = self.tok
            if tok.kind == "directive":
                self.i += 1
                self.stop_line = tok.line
                if tok.text == "%start":
                    if start is not None:
                        self.fail("duplicate %start", tok)
                    start = self.expr()
                elif tok.text == "%token":
                    while self.at("ident") and self.tok.line == tok.line:
                        lexical.append(self.take("ident").text)
                elif tok.text == "%alphabet":
                    s = self.take("string")
                    alphabet = "".join(_unescape(s.text[1:-1], s, self.path))
                else:
                    self.fail(f"unknown directive {tok.text}", tok)
                self.stop_line = None
                if self.at("op", ";"):
                    self.i += 1
                continue
            name_tok = self.take("ident")
            if name_tok.text in _KEYWORDS:
                self.fail(f"{name_tok.text!r} is reserved", name_tok)
            if name_tok.text in rules:
                self.fail(f"duplicate rule {name_tok.text}", name_tok)
            self.take("arrow")
            rules[name_tok.text] = self.expr()
            if self.at("op", ";"):
                self.i += 1
            elif not (self.at("eof") or self.at("directive") or self.at("ident")):
                self.fail(f"expected ';' after rule {name_tok.text}")
        if start is None:
            self.fail("missing %start directive")
        return Grammar.build(rules, start, lexical, alphabet)


def parse_expr(text: str):
    """Parse one expression (sugar included, not desugared)."""
    p = _Parser(tokenize(text), None)
    e = p.expr()
    if not p.at("eof"):
        p.fail(f"trailing input {p.tok.text!r}")
    return e


def parse_grammar(text: str, path: str | None = None) -> Grammar:
    return _Parser(tokenize(text, path), path).grammar()


def load_grammar(path) -> Grammar:
    path = Path(path)
    return parse_grammar(path.read_text(encoding="utf-8"), str(path))
