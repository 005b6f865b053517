"""The syntactic category: objects are types, arrows are classes of value judgments.

An arrow ``A → B`` is represented by a checked derivation of
``x:A ⊢ V : B`` with ``V`` a value; two arrows are equal when their
representatives are axiomatically equivalent.  Every structural map is
written out as the corresponding term of the calculus.
"""

from __future__ import annotations

from typing import Mapping, Optional

from ..equivalence import ax_equal
from ..syntax import (
    App, Arrow, Bang, Const, LetPair, LetUnit, Lam, Pair, Star, Tensor, Term, Type,
    UNIT, Var, fresh, let, rename_free, show, subterms,
)
from ..typecheck import Derivation, Judgment, check, promote, substitute
from .base import Model, T

__all__ = ["Morphism", "YAQ", "yaq_structure"]


class Morphism:
    """A value judgment ``var:dom ⊢ term : cod``; its derivation is built on demand."""

    __slots__ = ("dom", "cod", "var", "term", "_deriv", "_signature")

    def __init__(self, dom: Type, cod: Type, var: str, term: Term, deriv: Optional[Derivation] = None,
                 signature: Optional[Mapping[str, Type]] = None):
        self.dom, self.cod, self.var, self.term = dom, cod, var, term
        self._deriv, self._signature = deriv, signature

    @property
    def deriv(self) -> Derivation:
        if self._deriv is None:
            self._deriv = check(Judgment(((self.var, self.dom),), self.term, self.cod), self._signature)
        return self._deriv

    def __str__(self) -> str:
        return f"{self.var}:{show(self.dom)} |- {show(self.term)} : {show(self.cod)}"

    def __repr__(self) -> str:
        return f"Morphism({self})"


def _names(t: Term) -> set:
    out = set()
    for s in subterms(t):
        for attr in ("name", "var", "x", "y"):
            v = getattr(s, attr, None)
            if isinstance(v, str):
                out.add(v)
    return out


def _rename(f: Morphism, new: str) -> Term:
    """The body of ``f`` with its context variable renamed to ``new``."""
    if f.var == new:
        return f.term
    return rename_free(f.term, f.var, new)


def _unit_lam(body: Term, avoid: set) -> Term:
    """``λ⁰⋆.M`` spelled out with a fresh ``⊤`` binder."""
    u = fresh("u", avoid | _names(body))
    return Lam(0, u, UNIT, LetUnit(Var(u, UNIT), body))


class YAQ(Model):
    """Table-of-terms model: structure maps are literal value judgments."""

    name = "yaq"

    def __init__(self, signature: Optional[Mapping[str, Type]] = None, steps: int = 4000, depth: int = 4):
        self.signature = signature
        self.steps, self.depth = steps, depth
        self.last_verdict = None

    def make(self, dom: Type, cod: Type, term: Term, var: str = "x", eager: bool = False) -> Morphism:
        f = Morphism(dom, cod, var, term, signature=self.signature)
        if eager:
            f.deriv  # noqa: B018 - force the check
        return f

    def constant(self, name: str, ty: Type) -> Morphism:
        """``Θ(c)`` in the syntactic model: the constant itself under a dummy ``⊤``."""
        u = "u"
        return self.make(UNIT, ty, LetUnit(Var(u, UNIT), Const(name, ty)), u)

    def dom(self, f): return f.dom
    def cod(self, f): return f.cod

    def id(self, a):
        return self.make(a, a, Var("x", a))

    def compose(self, f, g):
        # x:A ⊢ let y = V in W
        y = fresh("y", _names(f.term) | {f.var})
        w = _rename(g, y)
        return self.make(f.dom, g.cod, let(y, f.cod, f.term, w), f.var)

    def tensor(self, f, g):
        avoid = _names(f.term) | _names(g.term) | {f.var, g.var}
        x = fresh("x", avoid)
        y = fresh("y", avoid | {x})
        z = fresh("z", avoid | {x, y})
        body = Pair(0, _rename(f, x), _rename(g, y))
        a, c = f.dom, g.dom
        term = LetPair(0, x, a, y, c, Var(z, Tensor(a, c)), body)
        return self.make(Tensor(a, c), Tensor(f.cod, g.cod), term, z)

    def alpha(self, a, b, c):
        src = Tensor(a, Tensor(b, c))
        body = LetPair(0, "t", b, "u", c, Var("z", Tensor(b, c)),
                       Pair(0, Pair(0, Var("y", a), Var("t", b)), Var("u", c)))
        term = LetPair(0, "y", a, "z", Tensor(b, c), Var("x", src), body)
        return self.make(src, Tensor(Tensor(a, b), c), term)

    def alpha_inv(self, a, b, c):
        src = Tensor(Tensor(a, b), c)
        body = LetPair(0, "t", a, "u", b, Var("y", Tensor(a, b)),
                       Pair(0, Var("t", a), Pair(0, Var("u", b), Var("z", c))))
        term = LetPair(0, "y", Tensor(a, b), "z", c, Var("x", src), body)
        return self.make(src, Tensor(a, Tensor(b, c)), term)

    def lam(self, a):
        src = Tensor(UNIT, a)
        term = LetPair(0, "y", UNIT, "z", a, Var("x", src), LetUnit(Var("y", UNIT), Var("z", a)))
        return self.make(src, a, term)

    def lam_inv(self, a):
        return self.make(a, Tensor(UNIT, a), Pair(0, Star(0), Var("x", a)))

    def rho(self, a):
        src = Tensor(a, UNIT)
        term = LetPair(0, "y", a, "z", UNIT, Var("x", src), LetUnit(Var("z", UNIT), Var("y", a)))
        return self.make(src, a, term)

    def rho_inv(self, a):
        return self.make(a, Tensor(a, UNIT), Pair(0, Var("x", a), Star(0)))

    def sigma(self, a, b):
        src = Tensor(a, b)
        term = LetPair(0, "y", a, "z", b, Var("x", src), Pair(0, Var("z", b), Var("y", a)))
        return self.make(src, Tensor(b, a), term)

    def eps(self, a):
        return self.make(Bang(a), a, Var("x", a))

    def delta(self, a):
        return self.make(Bang(a), Bang(Bang(a)), Var("x", Bang(Bang(a))))

    def m(self, a, b):
        la, lb = Bang(a), Bang(b)
        term = LetPair(0, "x", la, "y", lb, Var("z", Tensor(la, lb)), Pair(1, Var("x", la), Var("y", lb)))
        return self.make(Tensor(la, lb), Bang(Tensor(a, b)), term, "z")

    def m_inv(self, a, b):
        la, lb = Bang(a), Bang(b)
        src = Bang(Tensor(a, b))
        term = LetPair(1, "x", a, "y", b, Var("z", src), Pair(0, Var("x", la), Var("y", lb)))
        return self.make(src, Tensor(la, lb), term, "z")

    def m_unit(self):
        return self.make(UNIT, Bang(UNIT), LetUnit(Var("z", UNIT), Star(1)), "z")

    def m_unit_inv(self):
        return self.make(Bang(UNIT), UNIT, LetUnit(Var("z", UNIT), Star(0)), "z")

    def d(self, a):
        la = Bang(a)
        return self.make(la, Tensor(la, la), Pair(0, Var("x", la), Var("x", la)))

    def e(self, a):
        return self.make(Bang(a), UNIT, Star(0))

    def eta(self, a):
        return self.make(a, T(a), _unit_lam(Var("x", a), {"x"}))

    def mu(self, a):
        tta = T(T(a))
        inner = App(App(Var("x", tta), Star(0)), Star(0))
        return self.make(tta, T(a), _unit_lam(inner, {"x"}))

    def t(self, a, b):
        tb = T(b)
        body = _unit_lam(Pair(0, Var("x", a), App(Var("y", tb), Star(0))), {"x", "y", "z"})
        term = LetPair(0, "x", a, "y", tb, Var("z", Tensor(a, tb)), body)
        return self.make(Tensor(a, tb), T(Tensor(a, b)), term, "z")

    def fmap_L(self, f):
        return self.make(Bang(f.dom), Bang(f.cod), promote(f.deriv), f.var)

    def fmap_T(self, f):
        # y:TA ⊢ λ⋆. let x = y ⋆ in V
        avoid = _names(f.term) | {f.var}
        y = fresh("y", avoid)
        inner = let(f.var, f.dom, App(Var(y, T(f.dom)), Star(0)), f.term)
        return self.make(T(f.dom), T(f.cod), _unit_lam(inner, avoid | {y}), y)

    def star(self, f):
        # y:TA ⊢ λ⋆. let x = (y ⋆) in (V ⋆)
        avoid = _names(f.term) | {f.var}
        y = fresh("y", avoid)
        inner = let(f.var, f.dom, App(Var(y, T(f.dom)), Star(0)), App(f.term, Star(0)))
        return self.make(T(f.dom), f.cod, _unit_lam(inner, avoid | {y}), y)

    def lolli(self, f, g):
        # z:B⊸C ⊢ λx. let y = z V in W  for f = x:A ⊢ V:B, g = y:C ⊢ W:D
        avoid = _names(f.term) | _names(g.term) | {f.var, g.var}
        x = fresh("x", avoid)
        y = fresh("y", avoid | {x})
        z = fresh("z", avoid | {x, y})
        fun = Arrow(f.cod, g.dom)
        body = let(y, g.dom, App(Var(z, fun), _rename(f, x)), _rename(g, y))
        return self.make(fun, Arrow(f.dom, g.cod), Lam(0, x, f.dom, body), z)

    def phi(self, f):
        # t:A⊗B ⊢ λ⋆. let ⟨x, y⟩ = t in V y
        fun = f.cod
        avoid = _names(f.term) | {f.var}
        y = fresh("y", avoid)
        t = fresh("t", avoid | {y})
        src = Tensor(f.dom, fun.dom)
        body = LetPair(0, f.var, f.dom, y, fun.dom, Var(t, src), App(f.term, Var(y, fun.dom)))
        return self.make(src, T(fun.cod), _unit_lam(body, avoid | {y, t}), t)

    def phi_inv(self, g, b):
        # x:A ⊢ λy. (W[⟨x, y⟩/t]) ⋆
        a = g.dom.left
        avoid = _names(g.term) | {g.var}
        x = fresh("x", avoid)
        y = fresh("y", avoid | {x})
        pair = check(Judgment(((x, a), (y, b)), Pair(0, Var(x, a), Var(y, b)), Tensor(a, b)), self.signature)
        body = substitute(g.deriv, g.var, pair)
        return self.make(a, Arrow(b, g.cod.cod), Lam(0, y, b, App(body, Star(0))), x)

    def equal(self, f, g) -> str:
        v = ax_equal(f.deriv, g.deriv, self.signature, steps=self.steps, depth=self.depth)
        self.last_verdict = v
        return v.status


def yaq_structure(signature: Optional[Mapping[str, Type]] = None) -> YAQ:
    return YAQ(signature)
