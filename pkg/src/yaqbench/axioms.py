"""Schematic instances of the equivalence axioms and their derived rules.

Each row turns a type assignment ``(A, B, C, D)`` into a concrete pair of
judgments.  Metavariables are filled with small terms over context
variables: values become variables, computations become applications
``h c`` of banged functions.  Rows given as pure terms are indexed by
elaboration; the cast rows are written with explicit annotations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .elaborate import infer
from .syntax import (
    App, Arrow, Bang, LetPair, LetUnit, Pair, Star, Tensor, Term, Type, UNIT, Var,
    let, parse_term, parse_type, show,
)
from .typecheck import Derivation, Judgment, cast, check

__all__ = ["AxiomRow", "RowInstance", "ROWS", "ASSIGNMENTS", "instantiate", "all_instances"]


@dataclass(frozen=True)
class RowInstance:
    row: str
    assignment: tuple
    left: Derivation
    right: Derivation

    def describe(self) -> str:
        return f"{self.row}[{', '.join(self.assignment)}]"


@dataclass(frozen=True)
class AxiomRow:
    name: str
    table: str  # "axioms" or "derived"
    build: Callable  # (A, B, C, D) -> (ctx_left, left, ctx_right, right, type, indexed)


#: type assignments for the metavariables A, B, C, D
ASSIGNMENTS = [
    tuple(parse_type(s) for s in row)
    for row in [
        ("a", "b", "c", "d"),
        ("!a", "a * b", "top", "a -o b"),
        ("a -o a", "!b", "!(a * a)", "top"),
        ("top", "!!a", "a", "!a * b"),
    ]
]


def _ctx(**kw) -> tuple:
    return tuple((k, v) for k, v in kw.items())


def _f(a: Type, b: Type) -> Type:
    return Bang(Arrow(a, b))


def _p(text: str) -> Term:
    return parse_term(text, indexed=False)


_ROWS: list[AxiomRow] = []


def _row(name: str, table: str = "axioms"):
    def wrap(fn):
        _ROWS.append(AxiomRow(name, table, fn))
        return fn
    return wrap


def _same(ctx, l, r, ty):
    return ctx, _p(l), ctx, _p(r), ty, False


# ---------------------------------------------------------------- axioms


@_row("beta-lam")
def _(A, B, C, D):
    return _same(_ctx(v=A, f=_f(A, B)), "let x = v in f x", "f v", B)


@_row("beta-tensor")
def _(A, B, C, D):
    return _same(_ctx(v=A, w=B), "let <x, y> = <v, w> in <y, x>", "<w, v>", Tensor(B, A))


@_row("beta-unit")
def _(A, B, C, D):
    return _same(_ctx(m=A), "let * = unit in m", "m", A)


@_row("eta-lam")
def _(A, B, C, D):
    return _same(_ctx(f=Arrow(A, B)), "lam x. f x", "f", Arrow(A, B))


@_row("eta-lam-banged")
def _(A, B, C, D):
    return _same(_ctx(f=_f(A, B)), "lam x. f x", "f", _f(A, B))


@_row("eta-let")
def _(A, B, C, D):
    return _same(_ctx(h=_f(C, A), c=C), "let x = h c in x", "h c", A)


@_row("eta-tensor")
def _(A, B, C, D):
    return _same(_ctx(h=_f(C, Tensor(A, B)), c=C), "let <x, y> = h c in <x, y>", "h c", Tensor(A, B))


@_row("eta-unit")
def _(A, B, C, D):
    return _same(_ctx(h=_f(C, UNIT), c=C), "let * = h c in unit", "h c", UNIT)


@_row("let-assoc")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, A), k=_f(A, B), g=_f(B, D), c=C)
    return _same(ctx, "let y = (let x = h c in k x) in g y", "let x = h c in let y = k x in g y", D)


@_row("let-assoc-pair")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, Tensor(A, B)), k=_f(Tensor(B, A), D), c=C)
    return _same(ctx, "let z = (let <x, y> = h c in <y, x>) in k z",
                 "let <x, y> = h c in let z = <y, x> in k z", D)


@_row("let-exchange")
def _(A, B, C, D):
    ctx = _ctx(v=A, w=B, g=_f(Tensor(A, B), D))
    return _same(ctx, "let x = v in let y = w in g <x, y>", "let y = w in let x = v in g <x, y>", D)


@_row("let-app")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, Arrow(A, B)), k=_f(C, A), c=Bang(C))
    return _same(ctx, "let x = h c in let y = k c in x y", "(h c) (k c)", B)


@_row("let-lam")
def _(A, B, C, D):
    return _same(_ctx(v=D), "let x = v in lam y. <x, y>", "lam y. let x = v in <x, y>", Arrow(A, Tensor(D, A)))


@_row("let-tensor")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, A), k=_f(C, B), c=Bang(C))
    return _same(ctx, "let x = h c in let y = k c in <x, y>", "<h c, k c>", Tensor(A, B))


@_row("cast-app")
def _(A, B, C, D):
    # ⟨f : !(A⊸!D) <: !A⊸D⟩⟨n : !!A <: !A⟩  vs  ⟨⟨f : ... <: A⊸!D⟩⟨n : ... <: A⟩ : !D <: D⟩
    fty, nty = _f(A, Bang(D)), Bang(Bang(A))
    ctx = _ctx(f=fty, n=nty)
    left = App(Var("f", Arrow(Bang(A), D)), Var("n", Bang(A)))
    inner = check(Judgment(ctx, App(Var("f", Arrow(A, Bang(D))), Var("n", A)), Bang(D)))
    return ctx, left, ctx, cast(inner, None, D), D, True


@_row("cast-pair")
def _(A, B, C, D):
    ctx = _ctx(p=Bang(Tensor(A, B)))
    body = Pair(0, Var("y", B), Var("x", A))
    left = LetPair(0, "x", A, "y", B, Var("p", Tensor(A, B)), body)
    inner = check(Judgment(_ctx(x=A, y=B), body, Tensor(B, A)))
    right = LetPair(1, "x", A, "y", B, Var("p", Bang(Tensor(A, B))), cast(inner, _ctx(x=Bang(A), y=Bang(B))))
    return ctx, left, ctx, right, Tensor(B, A), True


@_row("cast-let")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, Bang(A)), g=_f(A, B), c=C)
    m = check(Judgment(_ctx(h=_f(C, Bang(A)), c=C), App(Var("h", Arrow(C, Bang(A))), Var("c", C)), Bang(A)))
    body = App(Var("g", Arrow(A, B)), Var("x", A))
    left = let("x", A, cast(m, None, A), body)
    right = let("x", Bang(A), m.term, body)
    return ctx, left, ctx, right, B, True


@_row("cast-unit")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, Bang(UNIT)), v=A, c=C)
    m = check(Judgment(_ctx(h=_f(C, Bang(UNIT)), c=C), App(Var("h", Arrow(C, Bang(UNIT))), Var("c", C)), Bang(UNIT)))
    left = LetUnit(cast(m, None, UNIT), Var("v", A))
    right = LetUnit(App(Var("h", Arrow(C, UNIT)), Var("c", C)), Var("v", A))
    return ctx, left, ctx, right, A, True


# ---------------------------------------------------------------- derived rules


@_row("let-alpha", "derived")
def _(A, B, C, D):
    return (_ctx(x=A, f=_f(A, B)), _p("let y = x in f y"), _ctx(y=A, f=_f(A, B)), _p("f y"), B, False)


@_row("let-lam-bang", "derived")
def _(A, B, C, D):
    ty = Bang(Arrow(A, Tensor(Bang(C), A)))
    return _same(_ctx(c=Bang(C)), "let x = c in lam y. <x, y>", "lam y. let x = c in <x, y>", ty)


@_row("let-tensor-right", "derived")
def _(A, B, C, D):
    ctx = _ctx(v=A, h=_f(C, D), k=_f(D, B), c=C)
    return _same(ctx, "<v, let x = h c in k x>", "let x = h c in <v, k x>", Tensor(A, B))


@_row("let-tensor-left", "derived")
def _(A, B, C, D):
    ctx = _ctx(v=A, h=_f(C, D), k=_f(D, B), c=C)
    return _same(ctx, "<let x = h c in k x, v>", "let x = h c in <k x, v>", Tensor(B, A))


@_row("let-app-arg", "derived")
def _(A, B, C, D):
    ctx = _ctx(g=_f(B, A), h=_f(C, D), k=_f(D, B), c=C)
    return _same(ctx, "g (let x = h c in k x)", "let x = h c in g (k x)", A)


@_row("let-app-fun", "derived")
def _(A, B, C, D):
    ctx = _ctx(v=A, h=_f(C, D), k=_f(D, Arrow(A, B)), c=C)
    return _same(ctx, "(let x = h c in k x) v", "let x = h c in (k x) v", B)


@_row("let-pair-pattern", "derived")
def _(A, B, C, D):
    ctx = _ctx(h=_f(C, Tensor(A, B)), g=_f(Tensor(B, A), D), c=C)
    return _same(ctx, "g (let <x, y> = h c in <y, x>)", "let <x, y> = h c in g <y, x>", D)


ROWS: dict[str, AxiomRow] = {r.name: r for r in _ROWS}


def _derive(ctx, t: Term, ty: Type, indexed: bool) -> Derivation:
    if indexed:
        return check(Judgment(tuple(ctx), t, ty))
    return infer(list(ctx), t, ty).derivation


def instantiate(row: AxiomRow, assignment: tuple) -> RowInstance:
    ctx_l, l, ctx_r, r, ty, indexed = row.build(*assignment)
    left = _derive(ctx_l, l, ty, indexed)
    right = _derive(ctx_r, r, ty, indexed)
    return RowInstance(row.name, tuple(show(a) for a in assignment), left, right)


def all_instances(assignments: Optional[list] = None) -> list:
    return [instantiate(row, asg) for row in ROWS.values() for asg in (assignments or ASSIGNMENTS)]
