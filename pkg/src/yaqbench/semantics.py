"""Denotations of typing derivations in any model.

A context ``x1:A1, ..., xn:An`` denotes the right-nested tensor
``A1 ⊗ (A2 ⊗ (... ⊗ An))`` (``⊤`` when empty).  The value
interpretation of a derivation is an arrow ``⟦Δ⟧ → ⟦A⟧``; the
computational one is an arrow ``⟦Δ⟧ → T⟦A⟧``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .category.base import Model, T, nest
from .category.finmodel import FinModel, Uninterpretable
from .category.yaq import YAQ, _names, _unit_lam
from .syntax import Arrow, Bang, LetPair, LetUnit, Tensor, Type, UNIT, Var, fresh, is_value, let, show
from .subtyping import strip
from .typecheck import DEFAULT_SIGNATURE, Derivation, Judgment, TypingError, check, substitute

__all__ = [
    "Interpretation", "Denotation", "Uninterpretable", "interpret", "denote",
    "soundness_case", "completeness_case", "substitution_case", "finmodel_separates",
]


@dataclass
class Interpretation:
    """Θ: the signature of constants and, optionally, explicit arrows for them.

    ``arrows`` maps a constant name to a callable ``(model, type) -> ⊤ → ⟦A_c⟧``;
    constants without an entry fall back to ``model.constant``.
    """

    signature: Mapping[str, Type] = None
    arrows: Optional[Mapping[str, Callable]] = None

    def __post_init__(self):
        if self.signature is None:
            self.signature = DEFAULT_SIGNATURE

    def constant(self, model: Model, name: str):
        if name not in self.signature:
            raise Uninterpretable(f"constant {name} has no signature")
        ty = self.signature[name]
        if self.arrows and name in self.arrows:
            return self.arrows[name](model, ty)
        if not hasattr(model, "constant"):
            raise Uninterpretable(f"model {model.name} interprets no constants")
        try:
            return model.constant(name, ty)
        except ValueError as exc:
            raise Uninterpretable(str(exc)) from exc


@dataclass
class Denotation:
    kind: str  # "value" or "computational"
    arrow: object
    judgment: Judgment


def _types(ctx) -> list:
    return [a for _, a in ctx]


class _Interp:
    def __init__(self, model: Model, theta: Interpretation):
        self.M = model
        self.theta = theta

    # ---- context plumbing
    def wire(self, ctx, sub):
        """``⟦ctx⟧ → ⟦sub⟧`` where ``sub`` lists names of ``ctx`` (with repeats)."""
        index = {x: i for i, (x, _) in enumerate(ctx)}
        return self.M.wiring(_types(ctx), [index[x] for x, _ in sub])

    def split(self, ctx, left, right):
        """``⟦ctx⟧ → ⟦left⟧ ⊗ ⟦right⟧``, copying shared banged variables."""
        M = self.M
        return M.compose(self.wire(ctx, tuple(left) + tuple(right)),
                         M.split_concat(_types(left), _types(right)))

    # ---- value interpretation
    def value(self, d: Derivation):
        M, r, t = self.M, d.rule, d.term
        if r == "ax1":
            a = dict(d.ctx)[t.name]
            return M.compose(self.wire(d.ctx, ((t.name, a),)), M.coerce(a, t.ann))
        if r == "ax2":
            sig = self.theta.signature[t.name]
            return M.then(self.wire(d.ctx, ()), self.theta.constant(M, t.name), M.coerce(sig, t.ann))
        if r == "unit_I":
            drop = self.wire(d.ctx, ())
            if t.n == 0:
                return drop
            return M.then(drop, M.m_unit(), M.coerce(Bang(UNIT), d.ty))
        if r in ("lam1", "lam2"):
            return self.lam(d)
        if r == "tensor_I":
            l, rr = d.premises
            core, n = self.pair_core(d)
            return M.compose(M.compose(self.split(d.ctx, l.ctx, rr.ctx), M.tensor(self.value(l), self.value(rr))),
                             M.m_n(core.left, core.right, n))
        if r == "app":
            f, a = d.premises
            if f.rule != "lam1":
                raise TypingError("application is not a value", t)
            return self.let_value(d)
        if r == "tensor_E":
            m, body = d.premises
            inh = body.ctx[:-2]
            n = t.n
            head = M.then(self.split(d.ctx, inh, m.ctx),
                          M.tensor(M.id(nest(_types(inh))), self.value(m)),
                          M.tensor(M.id(nest(_types(inh))), M.m_n_inv(t.xann, t.yann, n)),
                          M.assoc_concat(_types(inh), [_b(t.xann, n), _b(t.yann, n)]))
            return M.compose(head, self.value(body))
        if r == "unit_E":
            m, body = d.premises
            inh = body.ctx
            head = M.then(self.split(d.ctx, inh, m.ctx),
                          M.tensor(M.id(nest(_types(inh))), self.value(m)),
                          M.assoc_concat(_types(inh), []))
            return M.compose(head, self.value(body))
        if r == "if":
            raise Uninterpretable("conditionals have no denotation in this semantics")
        raise Uninterpretable(f"no value clause for rule {r}")

    def pair_core(self, d: Derivation):
        s = strip(d.ty)
        return s.core, s.bangs

    def lam_body(self, d: Derivation):
        """``⟦inner⟧ ⊗ A → T B`` for the body of a lambda, plus the inner context."""
        (p,) = d.premises
        inner = p.ctx[:-1]
        a = d.term.ann
        g = self.M.compose(self.M.assoc_concat(_types(inner), [a]), self.comp(p))
        return inner, g

    def lam(self, d: Derivation):
        M = self.M
        inner, g = self.lam_body(d)
        f = M.phi_inv(g, d.term.ann)
        wire = self.wire(d.ctx, inner)
        if d.rule == "lam1":
            return M.compose(wire, f)
        fun = Arrow(d.term.ann, d.premises[0].ty)
        return M.then(wire, M.coalgebra(_types(inner)), M.fmap_L(f), M.coerce(Bang(fun), d.ty))

    def let_value(self, d: Derivation):
        """``let x = V in W`` as a value."""
        M = self.M
        f, a = d.premises
        (body,) = f.premises
        inner = body.ctx[:-1]
        head = M.then(self.split(d.ctx, f.ctx, a.ctx),
                      M.tensor(self.wire(f.ctx, inner), self.value(a)),
                      M.assoc_concat(_types(inner), [f.term.ann]))
        return M.compose(head, self.value(body))

    # ---- computational interpretation
    def comp(self, d: Derivation):
        M, r, t = self.M, d.rule, d.term
        if r in ("ax1", "ax2", "unit_I", "lam1", "lam2"):
            return M.compose(self.value(d), M.eta(d.ty))
        if r == "app":
            f, a = d.premises
            fun = f.ty
            head = M.compose(self.split(d.ctx, f.ctx, a.ctx), M.tensor(self.comp(f), self.comp(a)))
            return M.then(head, M.psi1(fun, fun.dom), M.star(M.app(fun.dom, fun.cod)))
        if r == "tensor_I":
            l, rr = d.premises
            core, n = self.pair_core(d)
            head = M.compose(self.split(d.ctx, l.ctx, rr.ctx), M.tensor(self.comp(l), self.comp(rr)))
            return M.then(head, M.psi1(l.ty, rr.ty), M.fmap_T(M.m_n(core.left, core.right, n)))
        if r == "tensor_E":
            m, body = d.premises
            inh = body.ctx[:-2]
            n = t.n
            ni = nest(_types(inh))
            fix = M.compose(M.tensor(M.id(ni), M.m_n_inv(t.xann, t.yann, n)),
                            M.assoc_concat(_types(inh), [_b(t.xann, n), _b(t.yann, n)]))
            return M.then(self.split(d.ctx, inh, m.ctx), M.tensor(M.id(ni), self.comp(m)),
                          M.t(ni, m.ty), M.fmap_T(fix), M.star(self.comp(body)))
        if r == "unit_E":
            m, body = d.premises
            inh = body.ctx
            ni = nest(_types(inh))
            return M.then(self.split(d.ctx, inh, m.ctx), M.tensor(M.id(ni), self.comp(m)),
                          M.t(ni, UNIT), M.fmap_T(M.assoc_concat(_types(inh), [])), M.star(self.comp(body)))
        if r == "if":
            raise Uninterpretable("conditionals have no denotation in this semantics")
        raise Uninterpretable(f"no computational clause for rule {r}")


def _b(a: Type, n: int) -> Type:
    for _ in range(n):
        a = Bang(a)
    return a


def interpret(d: Derivation, model: Model, kind: str = "c", theta: Optional[Interpretation] = None) -> Denotation:
    """Interpret a derivation; ``kind`` is ``"v"``/``"value"`` or ``"c"``/``"computational"``."""
    theta = theta or Interpretation()
    it = _Interp(model, theta)
    if kind in ("v", "value"):
        if not is_value(d.term):
            raise TypingError("value interpretation of a non-value", d.term)
        return Denotation("value", it.value(d), d.conclusion)
    if kind in ("c", "computational"):
        return Denotation("computational", it.comp(d), d.conclusion)
    raise ValueError(f"unknown kind {kind!r}")


def denote(j: Judgment, model: Model, kind: str = "c", theta: Optional[Interpretation] = None,
           placement: str = "shared") -> Denotation:
    theta = theta or Interpretation()
    return interpret(check(j, theta.signature, placement), model, kind, theta)


def soundness_case(d1: Derivation, d2: Derivation, model: Model,
                   theta: Optional[Interpretation] = None) -> str:
    """Compare the computational denotations of two derivations of one judgment."""
    f = interpret(d1, model, "c", theta).arrow
    g = interpret(d2, model, "c", theta).arrow
    return model.equal(f, g)


def completeness_case(d: Derivation, model=None, kind: str = "c") -> str:
    """Compare ``⟦Δ ⊢ M : B⟧`` in the syntactic model with the term it came from.

    Computationally the expected arrow is ``t:⟦Δ⟧ ⊢ let ⟨x1, ...⟩ = t in λ⋆.M``;
    for values it is ``t:⟦Δ⟧ ⊢ let ⟨x1, ...⟩ = t in V``.
    """
    M = model or YAQ()
    den = interpret(d, M, kind)
    names = {x for x, _ in d.ctx}
    body, ty = d.term, d.ty
    if kind in ("c", "computational"):
        body, ty = _unit_lam(body, names), T(d.ty)
    t, expected = _unpack(d.ctx, body, fresh("t", names | _names(d.term)))
    want = M.make(nest(_types(d.ctx)), ty, expected, t)
    return M.equal(den.arrow, want)


def _unpack(ctx, body, t: str):
    """``let ⟨x1, ⟨x2, ...⟩⟩ = t in body`` over the nested context object."""
    if not ctx:
        return t, LetUnit(Var(t, UNIT), body)
    if len(ctx) == 1:
        x, a = ctx[0]
        return t, let(x, a, Var(t, a), body)

    def go(subject, items, avoid):
        (x, a), rest = items[0], items[1:]
        if len(rest) == 1:
            y, b = rest[0]
            return LetPair(0, x, a, y, b, subject, body)
        r = fresh("r", avoid)
        rest_t = nest([b for _, b in rest])
        return LetPair(0, x, a, r, rest_t, subject, go(Var(r, rest_t), rest, avoid | {r}))

    names = {x for x, _ in ctx} | {t} | _names(body)
    return t, go(Var(t, nest(_types(ctx))), list(ctx), names)


def substitution_case(m: Derivation, x: str, v: Derivation, model: Model,
                      theta: Optional[Interpretation] = None) -> str:
    """Check ``⟦M[V/x]⟧ = Split;(id ⊗ ⟦V⟧ᵛ);⟦M⟧`` with ``x`` last in ``M``'s context.

    ``m`` must be a derivation of ``Γ, x:A ⊢ M`` and ``v`` of ``Γ′ ⊢ V : A``
    where both ``Γ`` and ``Γ′`` are sub-contexts of the substituted result.
    """
    theta = theta or Interpretation()
    if m.ctx[-1][0] != x:
        raise ValueError("the substituted variable must come last")
    gamma = m.ctx[:-1]
    merged = list(gamma) + [(y, b) for y, b in v.ctx if y not in dict(gamma)]
    term = substitute(m, x, v)
    d = check(Judgment(tuple(merged), term, m.ty), theta.signature)
    it = _Interp(model, theta)
    M = model
    a = m.ctx[-1][1]
    lhs = it.comp(d)
    rhs = M.then(it.split(tuple(merged), gamma, v.ctx),
                 M.tensor(M.id(nest(_types(gamma))), it.value(v)),
                 M.assoc_concat(_types(gamma), [a]), it.comp(m))
    return M.equal(lhs, rhs)


_FIN = None


def finmodel_separates(d1: Derivation, d2: Derivation) -> Optional[dict]:
    """A counterexample table entry if the finite model tells ``d1`` and ``d2`` apart."""
    global _FIN
    if _FIN is None:
        _FIN = FinModel()
    try:
        f = interpret(d1, _FIN, "c").arrow
        g = interpret(d2, _FIN, "c").arrow
        cx = _FIN.counterexample(f, g)
    except (Uninterpretable, TypingError):
        return None
    if cx is None:
        return None
    x, fx, gx = cx
    return {"model": "finset", "input": repr(x), "left": repr(fx), "right": repr(gx)}
