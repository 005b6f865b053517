import pytest
from hypothesis import given

from yaqbench.subtyping import (
    BudgetExceeded, all_types, context_subtype, derive, is_subtype, strip, subtype_oracle,
)
from yaqbench.syntax import UNIT, Bang, Tensor, TConst, parse_type

from conftest import types

T = parse_type


@pytest.mark.parametrize("text, bangs, core", [
    ("!!(!a * b)", 2, "!a * b"),
    ("top", 0, "top"),
    ("!top", 1, "top"),
])
def test_strip(text, bangs, core):
    s = strip(T(text))
    assert (s.bangs, s.core) == (bangs, T(core))
    assert s.rebuild() == T(text)


@pytest.mark.parametrize("a, b, expected", [
    ("!bit", "bit", True),
    ("!a", "!!a", True),
    ("a", "!a", False),
    ("bit -o bit", "!bit -o bit", True),
    ("!!(a * a)", "a * a", True),
    ("top", "top", True),
    ("!a * !b", "!(a * b)", False),
    # isomorphic in the syntactic model, but the rules never push a bang inside
    ("!(a * b)", "!a * !b", False),
    ("!(a * b)", "a * b", True),
    ("a -o b", "!(a -o b)", False),
    # the bang on the left is absorbed by the lolli rule (n=1, m=0), then !a <: a
    ("!(a -o b)", "!a -o b", True),
])
def test_examples(a, b, expected):
    assert is_subtype(T(a), T(b)) is expected
    assert subtype_oracle(T(a), T(b)) is expected


def test_derive_records_rule_tree():
    d = derive(T("!(a -o b)"), T("!a -o b"))
    assert d["rule"] == "lolli" and (d["n"], d["m"]) == (1, 0)
    assert [p["rule"] for p in d["premises"]] == ["ax", "ax"]


def test_oracle_budget():
    deep = T("a")
    for _ in range(10):
        deep = Tensor(deep, deep)
    with pytest.raises(BudgetExceeded):
        derive(deep, deep, depth=3)


def test_context_subtype():
    a = TConst("a")
    assert context_subtype([("x", Bang(a))], [("x", a)])
    assert context_subtype([("x", a)], [("x", a)])
    assert not context_subtype([("x", a)], [("x", Bang(a))])
    with pytest.raises(ValueError):
        context_subtype([("x", a)], [("y", a)])


def test_all_types_counts():
    # sizes 1..3 over {a, top}: 2 + 2 + (2 + 8)
    assert len(all_types(3)) == 14
    assert UNIT in all_types(1)


def test_oracle_agrees_exhaustively_on_two_constants():
    ts = all_types(5, constants=("a", "b"))
    bad = [(a, b) for a in ts for b in ts if is_subtype(a, b) != subtype_oracle(a, b)]
    assert not bad


@given(types(max_leaves=8))
def test_reflexive(a):
    assert is_subtype(a, a)


@given(types(max_leaves=4), types(max_leaves=4), types(max_leaves=4))
def test_transitive(a, b, c):
    if is_subtype(a, b) and is_subtype(b, c):
        assert is_subtype(a, c)


@given(types(max_leaves=4))
def test_transitive_through_bangs(a):
    # random triples rarely chain, so also chain through !a and !!a
    for b in (Bang(a), Bang(Bang(a))):
        for c in (a, Bang(a)):
            if is_subtype(b, c) and is_subtype(Bang(b), b):
                assert is_subtype(Bang(b), c)


@given(types(max_leaves=8))
def test_bang_idempotent_up_to_subtyping(a):
    assert is_subtype(Bang(a), Bang(Bang(a)))
    assert is_subtype(Bang(Bang(a)), Bang(a))


@given(types(max_leaves=8))
def test_dereliction_and_no_promotion(a):
    assert is_subtype(Bang(a), a)
    assert is_subtype(a, Bang(a)) == (strip(a).bangs >= 1)
