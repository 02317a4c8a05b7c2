import pytest
from hypothesis import given, strategies as st

from conftest import E, G, fixture_grammar
from pegrw import harness
from pegrw.charset import NAMED_CLASSES
from pegrw.errors import GrammarCheckError, GrammarSyntaxError
from pegrw.grammar import (
    EPS, THROW, And, Check, Choice, Lit, NonTerm, Not, Opt, Plus, Seq, Star, Term,
    Terminal, char, check_cut_placement, check_wellformed, desugar, is_core, match_terminal,
    nullable, nullable_table, show_expr, walk,
)
from pegrw.reader import parse_expr, parse_grammar

a, b = char("a"), char("b")


# -- terminals ----------------------------------------------------------------

def test_match_terminal():
    assert match_terminal(Terminal.any(), "a")
    assert match_terminal(Terminal.char("a"), "a")
    assert not match_terminal(Terminal.cls("[0-9]"), "x")
    assert match_terminal(Terminal.cls("[0-9]"), "7")


def test_terminal_domains_never_empty():
    with pytest.raises(ValueError):
        Terminal.cls("[]", NAMED_CLASSES["[0-9]"] - NAMED_CLASSES["[0-9]"])
    with pytest.raises(ValueError):
        Terminal.char("ab")


@given(st.sampled_from(sorted(NAMED_CLASSES)), st.characters(max_codepoint=0x2FF))
def test_match_is_membership(name, c):
    assert match_terminal(Terminal.cls(name), c) == (c in NAMED_CLASSES[name])


# -- desugaring ---------------------------------------------------------------

def test_desugar_rules():
    assert desugar(And(a)) == Not(Not(a))
    assert desugar(Opt(a)) == Choice(a, EPS)
    assert desugar(Plus(a)) == Seq(a, Star(a))
    assert desugar(Check(a)) == Choice(a, THROW)
    assert desugar(Lit("ab")) == Seq(a, b)
    assert desugar(Lit("")) == EPS


def test_desugar_nested():
    e = desugar(parse_expr('&("a"+)? check("ab")'))
    assert is_core(e)
    # prefix operators bind looser than postfix ones
    assert e == Seq(Not(Not(Choice(Seq(a, Star(a)), EPS))), Choice(Seq(a, b), THROW))


@given(st.randoms(use_true_random=False))
def test_desugar_idempotent(rng):
    e = harness.random_expr(rng, harness.GenConfig(control=True), ["A"])
    sugared = Opt(Plus(And(Check(e))))
    once = desugar(sugared)
    assert desugar(once) == once
    assert is_core(once)


# -- reader -------------------------------------------------------------------

def test_reader_precedence():
    assert E('"a" / "b" "c"') == Choice(a, Seq(b, char("c")))
    assert E('!"a"*') == Not(Star(a))
    assert E("(A / B)*") == Star(Choice(NonTerm("A"), NonTerm("B")))


def test_reader_escapes_and_classes():
    assert E(r'"\n\t\x41\"\\"') == E('"\\n" "\\t" "A" "\\"" "\\\\"')
    e = E("[a-cx]")
    assert isinstance(e, Term) and e.t.dom.chars == frozenset("abcx")
    assert E("[.]") == Term(Terminal.any())
    assert "b" not in E("[^ab]").t.dom and "c" in E("[^ab]").t.dom
    assert E("'a'") == a


def test_reader_grammar():
    g = G('%start S\n%token T\n%alphabet "ab"\nS <- T* ;  # comment\nT <- "a" ;\n')
    assert g.start == NonTerm("S")
    assert g.lexical == frozenset({"T"})
    assert g.alphabet == "ab"
    assert g.rules["S"] == Star(NonTerm("T"))


def test_reader_hyphenated_names_and_lenient_semicolon():
    g = G("%start const-exp\nconst-exp <- x\nx <- \"1\"")
    assert set(g.rules) == {"const-exp", "x"}


@pytest.mark.parametrize("text, line, col", [
    ('%start A\nA <- "a" ;\nB <- [b ;\n', 3, 6),
    ("%start A\nA <- ( \"a\" ;\n", 2, 12),
    ("A <- \"a\" ;\n", 2, 1),
    ('%start A\nA <- "\\q" ;\n', 2, 7),
])
def test_reader_errors_have_positions(text, line, col):
    with pytest.raises(GrammarSyntaxError) as info:
        parse_grammar(text)
    assert (info.value.line, info.value.col) == (line, col)


@given(st.randoms(use_true_random=False))
def test_show_expr_round_trips(rng):
    e = harness.random_expr(rng, harness.GenConfig(control=True), ["A", "B"])
    assert E(show_expr(e)) == e


# -- static checks ------------------------------------------------------------

def issues(report):
    return sorted((i.rule, i.tag) for i in report)


def test_left_recursion():
    assert issues(check_wellformed(G('%start A\nA <- A "a" / "b";'))) == [("A", "left-recursion")]
    indirect = G('%start A\nA <- B "a";\nB <- !"x" A / "b";')
    assert ("A", "left-recursion") in issues(check_wellformed(indirect))
    assert check_wellformed(G('%start A\nA <- "a" A / "b";')).ok


def test_nullable_star():
    assert issues(check_wellformed(G('%start A\nA <- ("a"?)*;'))) == [("A", "nullable-star")]
    assert issues(check_wellformed(G("%start A\nA <- (throw)*;"))) == [("A", "nullable-star")]


def test_undefined_nonterminal():
    assert issues(check_wellformed(G("%start A\nA <- B;"))) == [("A", "undefined")]


def test_nullability():
    g = G('%start A\nA <- B "a";\nB <- "b"* ;\nC <- !"a" / throw;')
    t = nullable_table(g)
    assert t == {"A": False, "B": True, "C": True}
    assert not nullable(a, t) and nullable(Seq(EPS, Star(a)), t)


def test_fixture_grammars_are_wellformed():
    for name in ("anbncn", "number", "comment", "ident", "statement", "statement_plain",
                 "json_plain", "json_annotated"):
        fixture_grammar(name).check()


def test_cut_placement():
    ok = [G('%start A\nA <- "a" ^ "b" / "c";'), G('%start A\nA <- ("a" ^ "b")*;'),
          G('%start A\nA <- ("a" ("b" ^ "c")) / "d";')]
    for g in ok:
        assert check_cut_placement(g).ok
    bad = [G('%start A\nA <- ^ "a";'), G('%start A\nA <- "c" / "a" ^ "b";'),
           G('%start A\nA <- !("a" ^) / "b";'), G('%start A\nA <- try("a" ^) / "b";')]
    for g in bad:
        assert issues(check_cut_placement(g)) == [("A", "ill-placed-cut")]


def test_check_raises():
    with pytest.raises(GrammarCheckError) as info:
        G("%start A\nA <- A;").check()
    assert "left-recursion" in str(info.value)


@given(st.randoms(use_true_random=False))
def test_random_grammars_pass_checks(rng):
    g = harness.random_grammar(rng, harness.GenConfig(control=True))
    g.check()
    assert all(n.name in g.rules for _, e in g.expressions() for n in walk(e) if isinstance(n, NonTerm))
