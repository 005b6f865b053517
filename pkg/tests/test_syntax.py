import pytest
from hypothesis import given, strategies as st

from yaqbench.corpus import pure_terms, typing_golden
from yaqbench.elaborate import infer
from yaqbench.syntax import (
    UNIT, App, Arrow, Bang, Lam, LetPair, Pair, ParseError, Star, TConst, Tensor, Var,
    alpha_eq, classify, erase, free_vars, from_json, is_pure, parse, parse_judgment,
    parse_term, parse_type, show, to_json,
)

from conftest import types

A, B = TConst("a"), TConst("b")
BIT, QBIT = TConst("bit"), TConst("qbit")


def test_bang_binds_tighter_than_arrow():
    assert parse_type("!bit -o qbit") == Arrow(Bang(BIT), QBIT)


def test_arrow_is_right_associative_and_tensor_tighter():
    assert parse_type("a -o b -o a") == Arrow(A, Arrow(B, A))
    assert parse_type("a * b -o a") == Arrow(Tensor(A, B), A)
    assert parse_type("a * b * a") == Tensor(Tensor(A, B), A)


def test_constructor_mapping():
    t = parse_term("let <x:a, y:b>^2 = p:!!(a * b) in <x:!a, y:!b>^2")
    assert isinstance(t, LetPair) and t.n == 2
    assert parse_term("lam^1 x:qbit. x:qbit") == Lam(1, "x", QBIT, Var("x", QBIT))
    assert parse_term("unit^3") == Star(3)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_term("lam x:a. (")
    assert (exc.value.line, exc.value.col) == (1, 11)


def test_indexed_parse_rejects_pure_term():
    with pytest.raises(ParseError):
        parse_term("lam x. x")


def test_parse_kinds():
    assert parse("a * top", "type") == Tensor(A, UNIT)
    assert is_pure(parse("lam x. x", "pure-term"))


def test_erase_examples():
    assert erase(Star(3)) == Star()
    assert erase(Lam(1, "x", QBIT, Var("x", QBIT))) == Lam(None, "x", None, Var("x"))
    assert erase(Pair(2, Var("x", Bang(BIT)), Star(2))) == Pair(None, Var("x"), Star())


def test_alpha_eq_examples():
    assert alpha_eq(Lam(0, "x", A, Var("x", A)), Lam(0, "y", A, Var("y", A)))
    assert not alpha_eq(Lam(0, "x", A, Var("x", A)), Lam(1, "x", A, Var("x", A)))
    assert not alpha_eq(Lam(0, "x", A, Var("x", A)), Lam(0, "x", Bang(A), Var("x", A)))
    assert not alpha_eq(Lam(0, "x", A, Var("y", A)), Lam(0, "y", A, Var("y", A)))


def test_classify_examples():
    assert classify(Var("x", A)) == "CoreValue"
    lp = parse_term("let <x:a, y:b> = p:a * b in <y:b, x:a>")
    assert classify(lp) == "Value"
    assert classify(App(Var("f", Arrow(A, A)), Var("x", A))) == "Computation"


def test_free_vars_examples():
    assert free_vars(Var("x", A)) == {"x": [A]}
    assert free_vars(Lam(0, "x", A, Var("x", A))) == {}
    fx = App(Var("x", Arrow(A, B)), Var("x", A))
    assert free_vars(fx) == {"x": [Arrow(A, B), A]}


@given(types(max_leaves=8))
def test_type_roundtrip(a):
    assert parse_type(show(a)) == a


@pytest.mark.parametrize("case", pure_terms(), ids=lambda c: c.text)
def test_pure_and_indexed_roundtrip(case):
    assert parse_term(show(case.term), indexed=False) == case.term
    t = infer(case.ctx, case.term, case.ty).term
    back = parse_term(show(t))
    assert back == t
    assert erase(back) == erase(t) == erase(case.term)
    assert from_json(to_json(t)) == t


@pytest.mark.parametrize("case", typing_golden(), ids=lambda c: c.text)
def test_judgment_roundtrip(case):
    ctx, term, ty = parse_judgment(case.text, indexed=case.mode == "check")
    assert term == case.term and ty == case.ty and tuple(ctx) == case.ctx


_TERMS = [c.term for c in pure_terms()]


@given(st.sampled_from(_TERMS), st.sampled_from(_TERMS), st.sampled_from(_TERMS))
def test_alpha_eq_is_an_equivalence(a, b, c):
    assert alpha_eq(a, a)
    assert alpha_eq(a, b) == alpha_eq(b, a)
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)
