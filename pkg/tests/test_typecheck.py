import functools

import pytest
from hypothesis import given, strategies as st

from yaqbench.acceptance import _value_of
from yaqbench.corpus import pure_terms, typing_golden
from yaqbench.elaborate import infer
from yaqbench.subtyping import context_subtype, is_subtype, strip
from yaqbench.syntax import (
    App, Bang, LetPair, LetUnit, erase, free_vars, fv, is_value, parse_judgment, parse_type,
    subterms,
)
from yaqbench.typecheck import (
    AnnotationMismatch, CastError, Derivation, Judgment, LinearVariableDropped,
    LinearVariableReused, ReplayError, TypingError, all_banged, cast, check, promote,
    replay, substitute,
)


def J(text):
    ctx, term, ty = parse_judgment(text)
    return Judgment(tuple(ctx), term, ty)


@functools.lru_cache(maxsize=None)
def corpus_derivations():
    return tuple(infer(c.ctx, c.term, c.ty).derivation for c in pure_terms())


def _has_elim(t):
    return any(isinstance(s, (App, LetPair, LetUnit)) for s in subterms(t))


def test_banged_value_with_linear_unit_context():
    # let * = V in W is a value and the unit rule lets V consume a linear u,
    # so a banged value does not force a banged context once eliminations appear
    d = check(J("u:top |- let * = u:top in unit^1 : !top"))
    assert is_value(d.term) and not all_banged(d.ctx)


def _unbang_once(a):
    return a.inner if isinstance(a, Bang) else a


# ---------------------------------------------------------------- golden corpus


@pytest.mark.parametrize("case", typing_golden(), ids=lambda c: c.text)
def test_golden(case):
    try:
        if case.mode == "check":
            d = check(Judgment(case.ctx, case.term, case.ty))
        else:
            d = infer(case.ctx, case.term, case.ty).derivation
    except TypingError as exc:
        assert case.expected == type(exc).__name__
        return
    assert case.expected == "accept"
    replay(d)


def test_golden_corpus_size():
    cases = typing_golden()
    assert len(cases) >= 30
    assert any(c.expected == "accept" for c in cases)
    assert len({c.expected for c in cases}) >= 6


# ---------------------------------------------------------------- check


def test_no_cloning():
    with pytest.raises(LinearVariableReused):
        check(J("x:qbit |- <x:qbit, x:qbit> : qbit * qbit"))


def test_banged_pair():
    d = check(J("y:!bit |- <y:!bit, y:!bit>^1 : !(bit * bit)"))
    assert d.rule == "tensor_I"
    replay(d)


def test_dummy_must_be_banged():
    with pytest.raises(LinearVariableDropped):
        check(J("x:qbit |- unit : top"))
    check(J("x:!qbit |- unit : top"))


def test_banged_lambda():
    d = check(J("|- lam^1 x:qbit. x:qbit : !(qbit -o qbit)"))
    assert d.rule == "lam2"


def test_type_mismatch():
    with pytest.raises(AnnotationMismatch):
        check(J("x:a |- x:a : b"))


def test_replay_rejects_tampering():
    d = check(J("y:!bit |- <y:!bit, y:!bit>^1 : !(bit * bit)"))
    bad = Derivation(d.rule, Judgment(d.ctx, d.term, parse_type("bit * bit")), d.premises, d.splits)
    with pytest.raises(ReplayError):
        replay(bad)


# ---------------------------------------------------------------- cast, promote, substitute


def test_cast_examples():
    a = parse_type("a")
    d = check(J("x:a |- x:a : a"))
    assert str(cast(d, [("x", Bang(a))], a)) == "x:a"
    assert str(cast(check(J("|- unit^1 : !top")), [], parse_type("top"))) == "unit"
    lam = check(J("|- lam^2 x:a. x:a : !!(a -o a)"))
    assert str(cast(lam, [], parse_type("!(a -o a)"))) == "lam^1 x:a. x:a"


def test_cast_requires_subtypes():
    d = check(J("x:a |- x:a : a"))
    with pytest.raises(CastError):
        cast(d, None, parse_type("!a"))


def test_promote_examples():
    assert str(promote(check(J("|- unit : top")))) == "unit^1"
    assert str(promote(check(J("x:!a |- x:a : a")))) == "x:!a"
    assert str(promote(check(J("|- lam^1 x:a. x:a : !(a -o a)")))) == "lam^2 x:a. x:a"


def test_promote_rejects_computation():
    with pytest.raises(TypingError):
        promote(check(J("f:a -o a, x:a |- f:a -o a x:a : a")))


def test_substitute_examples():
    m = check(J("x:!bit |- <x:!bit, x:!bit>^1 : !(bit * bit)"))
    v = check(J("|- 0:!bit : !bit"))
    assert str(substitute(m, "x", v)) == "<0:!bit, 0:!bit>^1"
    ident = check(J("x:a -o a |- x:a -o a : a -o a"))
    lam = check(J("|- lam x:a. x:a : a -o a"))
    assert substitute(ident, "x", lam) == lam.term
    dummy = check(J("y:a, x:!c |- y:a : a"))
    assert str(substitute(dummy, "x", check(J("z:!c |- z:!c : !c")))) == "y:a"


def test_substitute_avoids_capture():
    m = check(J("x:!a |- lam^1 y:!b. x:a : !(!b -o a)"))
    v = check(J("y:!a |- y:!a : !a"))
    out = substitute(m, "x", v)
    assert out.var != "y" and fv(out) == {"y"}
    check(Judgment((("y", parse_type("!a")),), out, m.ty))


# ---------------------------------------------------------------- corpus properties


_IDS = [c.text for c in pure_terms()]


@pytest.mark.parametrize("i", range(len(_IDS)), ids=_IDS)
def test_corpus_replays_and_lemmas(i):
    d = corpus_derivations()[i]
    replay(d)
    assert erase(d.term) == erase(pure_terms()[i].term)
    env = dict(d.ctx)
    # each free occurrence is annotated with a supertype of its context entry
    for x, anns in free_vars(d.term).items():
        assert all(is_subtype(env[x], a) for a in anns)
    # a banged value needs a banged context, at least without eliminations
    if is_value(d.term) and strip(d.ty).bangs >= 1 and not _has_elim(d.term):
        assert all_banged(d.ctx)
    # check accepts the elaborated term directly
    check(Judgment(d.ctx, d.term, d.ty))


@given(st.sampled_from(range(len(_IDS))))
def test_cast_preserves_erasure_and_values(i):
    d = corpus_derivations()[i]
    ctx2 = tuple((x, Bang(a)) for x, a in d.ctx)
    a2 = _unbang_once(d.ty)
    assert context_subtype(ctx2, d.ctx)
    out = cast(d, ctx2, a2)
    assert erase(out) == erase(d.term)
    assert is_value(out) == is_value(d.term)
    replay(check(Judgment(ctx2, out, a2)))


@given(st.sampled_from([i for i, d in enumerate(corpus_derivations()) if is_value(d.term)]))
def test_promote_property(i):
    d = corpus_derivations()[i]
    out = promote(d)
    assert erase(out) == erase(d.term)
    assert is_value(out)
    ctx = tuple((x, Bang(a)) for x, a in d.ctx)
    check(Judgment(ctx, out, Bang(d.ty)))


@given(st.sampled_from([i for i, d in enumerate(corpus_derivations()) if d.ctx]))
def test_substitute_property(i):
    d = corpus_derivations()[i]
    x, a = d.ctx[-1]
    vctx, vterm = _value_of(a, {y for y, _ in d.ctx} | fv(d.term))
    v = infer(vctx, vterm, a).derivation
    out = substitute(d, x, v)
    merged = tuple(d.ctx[:-1]) + tuple((y, b) for y, b in v.ctx if y not in dict(d.ctx))
    check(Judgment(merged, out, d.ty))
    if is_value(d.term):
        assert is_value(out)


@pytest.mark.parametrize("i", range(len(_IDS)), ids=_IDS)
def test_placements_differ_only_in_dummies(i):
    d = corpus_derivations()[i]
    j = Judgment(d.ctx, d.term, d.ty)
    shared, minimal = check(j, placement="shared"), check(j, placement="minimal")
    replay(shared)
    replay(minimal)
    for a, b in zip(shared.nodes(), minimal.nodes()):
        assert (a.rule, a.term, a.ty) == (b.rule, b.term, b.ty)
        # whatever one placement drops from a premise is a banged dummy there
        extra = dict(a.ctx).items() - dict(b.ctx).items()
        assert all(isinstance(t, Bang) and x not in fv(a.term) for x, t in extra)
