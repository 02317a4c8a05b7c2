import random

import pytest
from hypothesis import given, strategies as st

from conftest import EMPTY_G, E, G, fixture_grammar, grammars
from pegrw import bigstep, harness
from pegrw.bigstep import EvalBudget
from pegrw.errors import BudgetExceeded, UnsupportedCut
from pegrw.grammar import (
    And, Catch, Check, Choice, Empty, Error, Fail, Kind, Lit, NonTerm, Not, Opt, Plus, Seq,
    Success, Term, Throw, Try, desugar,
)

S, F, X = Kind.SUCCESS, Kind.FAIL, Kind.ERROR


def test_sequence_of_nonterminals():
    g = G('%start A B\nA <- "a";\nB <- "b";')
    assert bigstep.eval(g, g.start, "abc") == Success("c")


def test_basic_rules():
    assert bigstep.eval(EMPTY_G, E("eps"), "xy") == Success("xy")
    assert bigstep.eval(EMPTY_G, E("throw"), "abc") == Error("abc")
    assert bigstep.eval(EMPTY_G, E('"a"'), "") == Fail("")
    assert bigstep.eval(EMPTY_G, E('"a"'), "ba") == Fail("ba")
    assert bigstep.eval(EMPTY_G, E('"a"*'), "aab") == Success("b")
    assert bigstep.eval(EMPTY_G, E('!"a"'), "ab") == Fail("ab")


def test_error_propagation():
    assert bigstep.eval(EMPTY_G, E('"a" throw'), "ab") == Error("b")
    assert bigstep.eval(EMPTY_G, E('("a" throw) / "a"'), "ab") == Error("b")
    assert bigstep.eval(EMPTY_G, E('("a" check("b"))*'), "abac") == Error("c")
    assert bigstep.eval(EMPTY_G, E('!("a" throw)'), "ab") == Success("ab")


def test_catch_and_try():
    for x in ("", "zz", "abc"):
        assert bigstep.eval(EMPTY_G, E("catch(throw / eps)"), x) == Fail(x)
        assert bigstep.eval(EMPTY_G, E("catch(throw) / catch(eps)"), x) == Success(x)
    assert bigstep.eval(EMPTY_G, E('try("a" "b")'), "ac") == Error("c")
    assert bigstep.eval(EMPTY_G, E('catch("a" throw)'), "ab") == Fail("b")


def test_comment_grammar():
    g = fixture_grammar("comment")
    assert bigstep.eval(g, g.start, "{ comment *here* *)") == Success("")
    assert bigstep.eval(g, g.start, "(* unclosed *") == Fail("")


def test_accepts_fixtures(anbncn):
    assert bigstep.accepts(anbncn, "aabbcc")
    assert not bigstep.accepts(anbncn, "aabbc")
    assert not bigstep.accepts(anbncn, "aabbccc")
    ident = fixture_grammar("ident")
    assert bigstep.accepts(ident, "bot")
    assert not bigstep.accepts(ident, "and")
    # KEYW raises an error on "bo", which the negation in ID masks
    assert bigstep.eval(ident, NonTerm("KEYW"), "bo") == Error("")
    assert bigstep.eval(ident, ident.start, "bo") == Success("")
    assert bigstep.eval(ident, ident.start, "as") == Fail("as")


def test_cut_is_rejected():
    with pytest.raises(UnsupportedCut):
        bigstep.eval(EMPTY_G, E('"a" ^ "b" / "c"'), "ab")


def test_budget():
    with pytest.raises(BudgetExceeded):
        bigstep.eval(EMPTY_G, E('"a"*'), "a" * 100, EvalBudget(50))
    with pytest.raises(ValueError):
        EvalBudget(0)
    # unchecked left recursion hits the depth guard instead of crashing
    g = G("%start A\nA <- A;")
    with pytest.raises(BudgetExceeded):
        bigstep.eval(g, g.start, "a")


def test_deep_input_does_not_overflow(anbncn):
    k = 3000
    assert bigstep.accepts(anbncn, "a" * k + "b" * k + "c" * k)


# -- an independent oracle for the derived operators ---------------------------

def sugar_eval(g, e, x, i=0):
    """Direct semantics of the sugared operators; core ones defer to bigstep."""
    if isinstance(e, Lit):
        j = i
        for c in e.text:
            if j >= len(x) or x[j] != c:
                return F, j  # fails where the mismatch is found
            j += 1
        return S, j
    if isinstance(e, Opt):
        k, j = sugar_eval(g, e.body, x, i)
        return (S, i) if k is F else (k, j)
    if isinstance(e, Plus):
        k, j = sugar_eval(g, e.body, x, i)
        if k is not S:
            return k, j
        while True:
            k, j2 = sugar_eval(g, e.body, x, j)
            if k is F:
                return S, j
            if k is X:
                return X, j2
            j = j2
    if isinstance(e, And):
        k, _ = sugar_eval(g, e.body, x, i)
        return (S, i) if k is S else (F, i)
    if isinstance(e, Check):
        k, j = sugar_eval(g, e.body, x, i)
        return (X, i) if k is F else (k, j)
    if isinstance(e, Seq):
        k, j = sugar_eval(g, e.left, x, i)
        return sugar_eval(g, e.right, x, j) if k is S else (k, j)
    if isinstance(e, Choice):
        k, j = sugar_eval(g, e.first, x, i)
        return sugar_eval(g, e.second, x, i) if k is F else (k, j)
    if isinstance(e, Not):
        k, _ = sugar_eval(g, e.body, x, i)
        return (F, i) if k is S else (S, i)
    if isinstance(e, Catch):
        k, j = sugar_eval(g, e.body, x, i)
        return (F, j) if k is X else (k, j)
    return bigstep._Evaluator(g, x, bigstep.DEFAULT_BUDGET).ev(e, i)


def sugared(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([Lit("a"), Lit("ab"), Lit("c"), Empty(), Throw(), Term(desugar(Lit("b")).t)])
    op = rng.choice([Opt, Plus, And, Check, Seq, Choice, Catch, Not])
    if op in (Seq, Choice):
        return op(sugared(rng, depth - 1), sugared(rng, depth - 1))
    body = sugared(rng, depth - 1)
    if op is Plus:  # keep repetition bodies consuming
        body = Seq(Lit("a"), body)
    return op(body)


def test_desugar_preserves_outcomes():
    rng = random.Random(11)
    for _ in range(40):
        e = sugared(rng)
        d = desugar(e)
        for w in harness.all_strings("abc", 4):
            for m in range(4):
                assert sugar_eval(EMPTY_G, e, w[:m]) == bigstep.eval_pos(EMPTY_G, d, w[:m]), (e, w[:m])


# -- properties ---------------------------------------------------------------

POP = grammars(40, seed=5, control=True)
inputs = st.text(alphabet="abc", max_size=6)


@given(st.sampled_from(POP), inputs)
def test_suffix_property(g, x):
    out = bigstep.eval(g, g.start, x)
    assert x.endswith(out.rest)
    assert bigstep.eval(g, g.start, x) == out


@given(st.sampled_from(POP), inputs)
def test_error_masked_by_negation(g, x):
    if bigstep.eval(g, g.start, x).kind is X:
        assert bigstep.eval(g, Not(g.start), x) == Success(x)


def accepted(g, e, alphabet="abc", n=5):
    return {w for m in range(n + 1) for w in harness.all_strings(alphabet, m) if bigstep.eval(g, e, w).ok}


@pytest.mark.parametrize("g", POP[:12])
def test_cancellation(g):
    e = g.start
    assert accepted(g, Catch(Try(e))) == accepted(g, e)


@pytest.mark.parametrize("g", POP[:12])
def test_catch_distributes(g):
    e, e2 = g.start, NonTerm(sorted(g.rules)[-1])
    assert accepted(g, Seq(Catch(e), Catch(e2))) == accepted(g, Catch(Seq(e, e2)))
    assert accepted(g, Catch(Not(e))) == accepted(g, Not(Catch(e)))


def test_catch_does_not_distribute_over_choice():
    lhs, rhs = E("catch(throw / eps)"), E("catch(throw) / catch(eps)")
    for w in harness.all_strings("ab", 3):
        assert not bigstep.eval(EMPTY_G, lhs, w).ok
        assert bigstep.eval(EMPTY_G, rhs, w).ok
