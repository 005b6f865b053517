import functools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from yaqbench.category.base import nest
from yaqbench.category.finmodel import Dist, FinModel
from yaqbench.category.yaq import YAQ
from yaqbench.corpus import packed_judgments, pure_terms
from yaqbench.elaborate import infer
from yaqbench.semantics import (
    Interpretation, Uninterpretable, completeness_case, denote, interpret, soundness_case,
    substitution_case,
)
from yaqbench.syntax import Bang, TConst, is_value, parse_judgment, parse_term, parse_type
from yaqbench.typecheck import Judgment, TypingError, cast, check

A = TConst("a")


def J(text):
    ctx, term, ty = parse_judgment(text)
    return Judgment(tuple(ctx), term, ty)


@functools.lru_cache(maxsize=None)
def derivations():
    return tuple(infer(c.ctx, c.term, c.ty).derivation for c in pure_terms())


@pytest.fixture(scope="module")
def fin():
    return FinModel()


@pytest.fixture(scope="module")
def yaq():
    return YAQ()


def test_variable_is_identity(fin):
    f = denote(J("x:a |- x:a : a"), fin, "v").arrow
    assert fin.table(f) == [("0", "0"), ("1", "1")]


def test_coin_is_fair(fin):
    f = denote(J("|- coin:top -o bit unit : bit"), fin, "c").arrow
    assert f(())(()) == Dist({0: Fraction(1, 2), 1: Fraction(1, 2)})


def test_banged_pair_is_diagonal_then_m(yaq):
    v = denote(J("x:!a |- <x:!a, x:!a>^1 : !(a * a)"), yaq, "v").arrow
    assert yaq.equal(v, yaq.compose(yaq.d(A), yaq.m(A, A))) == "equal"


def test_explicit_constant_arrows(fin):
    # the signature's constants can be overridden per interpretation
    theta = Interpretation(arrows={"0": lambda M, ty: M.constant("1", ty)})
    f = denote(J("|- 0:!bit : !bit"), fin, "v", theta).arrow
    assert f(()) == 1


def test_quantum_constants_are_rejected(fin):
    with pytest.raises(Uninterpretable):
        denote(J("|- new:bit -o qbit 0:bit : qbit"), fin)
    with pytest.raises(Uninterpretable):
        fin.table(denote(J("x:qbit |- x:qbit : qbit"), fin).arrow)


def test_value_kind_needs_a_value(fin):
    with pytest.raises(TypingError):
        denote(J("f:a -o a, x:a |- f:a -o a x:a : a"), fin, "v")


def test_dummy_placement_does_not_matter(fin, yaq):
    j = J("y:!b, f:!(a -o a), x:a |- f:a -o a x:a : a")
    d1, d2 = check(j, placement="shared"), check(j, placement="minimal")
    ctxs = lambda d: [p.ctx for n in d.nodes() for p in n.premises]  # noqa: E731
    assert ctxs(d1) != ctxs(d2)
    for M in (fin, yaq):
        assert soundness_case(d1, d2, M) == "equal"


def test_value_then_unit(fin, yaq):
    d = check(J("x:!a |- <x:!a, x:a>^0 : !a * a"))
    for M in (fin, yaq):
        c = interpret(d, M, "c").arrow
        v = interpret(d, M, "v").arrow
        assert M.equal(c, M.compose(v, M.eta(d.ty))) == "equal"


def test_beta_is_sound_at_bit(fin):
    left = check(J("x:bit |- (lam y:bit. y:bit) x:bit : bit"))
    right = check(J("x:bit |- x:bit : bit"))
    assert soundness_case(left, right, fin) == "equal"


def test_permeable_pairing_terms_are_sound(fin, yaq):
    ctx = [("t", parse_type("!(a * !(b * c))"))]
    goal = parse_type("!(!(c * b) * a)")
    d1 = infer(ctx, parse_term("let <x, u> = t in let <y, z> = u in <<z, y>, x>", indexed=False), goal)
    d2 = infer(ctx, parse_term("let <x, u> = t in <let <y, z> = u in <z, y>, x>", indexed=False), goal)
    for M in (fin, yaq):
        assert soundness_case(d1.derivation, d2.derivation, M) == "equal"


def test_distinct_terms_have_distinct_denotations(fin):
    d1 = check(J("x:!a, y:!a |- x:a : a"))
    d2 = check(J("x:!a, y:!a |- y:a : a"))
    assert soundness_case(d1, d2, fin) == "distinct"


@pytest.mark.parametrize("text, kind", [
    ("x:a |- x:a : a", "v"),
    ("x:!a |- lam y:a. y:a : a -o a", "v"),
    ("f:a -o a, x:a |- f:a -o a x:a : a", "c"),
    ("x:!(a -o a) * a |- let <f:a -o a, y:a> = x:(a -o a) * a in f:a -o a y:a : a", "c"),
])
def test_completeness_examples(yaq, text, kind):
    assert completeness_case(check(J(text)), yaq, kind) == "equal"


def test_substitution_example(fin, yaq):
    m = check(J("f:!(a -o a), x:a |- f:a -o a x:a : a"))
    v = check(J("w:!a |- w:a : a"))
    for M in (fin, yaq):
        assert substitution_case(m, "x", v, M) == "equal"


def test_substitution_needs_last_variable(fin):
    m = check(J("x:a, f:!(a -o a) |- f:a -o a x:a : a"))
    with pytest.raises(ValueError):
        substitution_case(m, "x", check(J("w:!a |- w:a : a")), fin)


def test_packed_judgments_have_one_variable():
    js = packed_judgments()
    assert len(js) >= 50
    assert all(len(d.ctx) <= 1 for d in js)


_IDX = range(len(pure_terms()))


@settings(max_examples=25)
@given(st.sampled_from(_IDX))
def test_cast_commutes_with_coercions(i):
    d = derivations()[i]
    ctx2 = tuple((x, Bang(a)) for x, a in d.ctx)
    a2 = d.ty.inner if isinstance(d.ty, Bang) else d.ty
    d2 = check(Judgment(ctx2, cast(d, ctx2, a2), a2))
    for M in (FinModel(), YAQ()):
        lhs = interpret(d2, M, "c").arrow
        rhs = M.then(M.coerce_ctx([a for _, a in ctx2], [a for _, a in d.ctx]),
                     interpret(d, M, "c").arrow,
                     M.fmap_T(M.coerce(d.ty, a2)))
        assert M.dom(lhs) == nest([a for _, a in ctx2])
        assert M.equal(lhs, rhs) == "equal"


@settings(max_examples=25)
@given(st.sampled_from([i for i in _IDX if is_value(derivations()[i].term)]))
def test_value_clause_property(i):
    d = derivations()[i]
    for M in (FinModel(), YAQ()):
        c = interpret(d, M, "c").arrow
        v = interpret(d, M, "v").arrow
        assert M.equal(c, M.compose(v, M.eta(d.ty))) == "equal"
