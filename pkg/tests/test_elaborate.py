import pytest

from yaqbench.corpus import pure_terms, typing_golden
from yaqbench.elaborate import AmbiguousWithoutGoal, NotTypeable, infer, infer_all
from yaqbench.syntax import erase, parse_term, parse_type
from yaqbench.typecheck import Judgment, TypingError, check, replay

P = lambda s: parse_term(s, indexed=False)  # noqa: E731
T = parse_type


def test_identity_at_banged_goal():
    r = infer([], P("lam x. x"), T("!(qbit -o qbit)"))
    assert str(r.term) == "lam^1 x:qbit. x:qbit"
    assert r.ty == T("!(qbit -o qbit)")


def test_no_cloning_is_not_typeable():
    with pytest.raises(NotTypeable):
        infer([("x", T("qbit"))], P("<x, x>"))
    with pytest.raises(NotTypeable):
        infer([("x", T("qbit"))], P("<x, x>"), T("qbit * qbit"))


def test_permeable_pairing_terms():
    ctx = [("t", T("!(a * !(b * c))"))]
    goal = T("!(!(c * b) * a)")
    for text in ("let <x, u> = t in let <y, z> = u in <<z, y>, x>",
                 "let <x, u> = t in <let <y, z> = u in <z, y>, x>"):
        r = infer(ctx, P(text), goal)
        replay(check(Judgment(tuple(ctx), r.term, goal)))


def test_ambiguous_without_goal_reports_candidates():
    with pytest.raises(AmbiguousWithoutGoal) as exc:
        infer([("x", T("!a"))], P("<x, x>"))
    tys = {c.ty for c in exc.value.candidates}
    assert len(tys) > 1 and T("a * a") in tys


def test_infer_all_distinct_and_goal_respected():
    goal = T("!(b * a)")
    p = P("let <y, z> = x in <z, y>")
    rs = infer_all([("x", T("!(a * b)"))], p, goal, k=5)
    assert len({r.term for r in rs}) == len(rs) >= 2
    assert all(r.ty == goal and erase(r.term) == p for r in rs)


def test_bang_bound():
    with pytest.raises(NotTypeable):
        infer([], P("unit"), T("!!!!a"))
    with pytest.raises(NotTypeable):
        infer([], P("unit"), T("!!!top"), max_bang=2)


@pytest.mark.parametrize("case", [c for c in typing_golden() if c.mode == "check" and c.expected == "accept"],
                         ids=lambda c: c.text)
def test_infer_recovers_checked_terms(case):
    r = infer(case.ctx, erase(case.term), case.ty)
    assert r.ty == case.ty
    check(Judgment(case.ctx, r.term, r.ty))


@pytest.mark.parametrize("case", pure_terms(), ids=lambda c: c.text)
def test_infer_is_sound(case):
    for r in infer_all(case.ctx, case.term, case.ty, k=3):
        assert erase(r.term) == erase(case.term)
        assert r.ty == case.ty
        d = check(Judgment(case.ctx, r.term, case.ty))
        replay(d)


def test_rejected_golden_cases_stay_rejected_by_infer():
    for case in typing_golden():
        if case.mode != "check" or case.expected in ("accept", "AnnotationMismatch", "SubtypeFailure"):
            continue
        try:
            infer(case.ctx, erase(case.term), case.ty)
        except TypingError:
            continue
        # a different indexation may exist; the checker must still reject the given one
        with pytest.raises(TypingError):
            check(Judgment(case.ctx, case.term, case.ty))
