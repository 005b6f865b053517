"""Church-style type checking of indexed terms, with derivations.

Besides :func:`check` this module holds the derivation-level operations
on well-typed terms: replay validation, casting along subtypes,
promotion of values to a banged type, and value substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .subtyping import context_subtype, is_subtype, strip
from .syntax import (
    App, Arrow, Bang, Const, If, Lam, LetPair, LetUnit, Pair, Star, TConst,
    Tensor, Term, Type, Unit, UNIT, Var, bang, fresh, fv, is_value, parse_type,
    rename_free, show, to_json,
)

__all__ = [
    "Context", "Judgment", "Derivation", "TypingError", "UnboundVariable",
    "LinearVariableReused", "LinearVariableDropped", "AnnotationMismatch",
    "SubtypeFailure", "NonBangedContextUnderBangedLambda", "BranchContextMismatch",
    "UnknownConstant", "CastError", "DEFAULT_SIGNATURE", "check", "check_quantum",
    "replay", "is_valid", "cast", "promote", "substitute", "all_banged",
]

Context = tuple  # tuple of (name, Type), pairwise distinct names

BIT, QBIT = TConst("bit"), TConst("qbit")


def _sig(**entries: str) -> dict[str, Type]:
    return {k.lstrip("_"): parse_type(v) for k, v in entries.items()}


DEFAULT_SIGNATURE: dict[str, Type] = {
    "0": parse_type("!bit"),
    "1": parse_type("!bit"),
    **_sig(
        new="!(bit -o qbit)",
        meas="!(qbit -o !bit)",
        H="!(qbit -o qbit)", X="!(qbit -o qbit)", Y="!(qbit -o qbit)",
        Z="!(qbit -o qbit)", S="!(qbit -o qbit)", T="!(qbit -o qbit)",
        CNOT="!(qbit * qbit -o qbit * qbit)",
        coin="!(top -o bit)",
    ),
}


# ---------------------------------------------------------------- errors


class TypingError(Exception):
    """A typing rule failed; ``term`` is the offending subterm."""

    def __init__(self, msg: str, term: Optional[Term] = None):
        self.term = term
        where = f" in `{show(term)}`" if term is not None else ""
        super().__init__(f"{type(self).__name__}: {msg}{where}")


class UnboundVariable(TypingError):
    pass


class UnknownConstant(TypingError):
    pass


class LinearVariableReused(TypingError):
    pass


class LinearVariableDropped(TypingError):
    pass


class AnnotationMismatch(TypingError):
    pass


class SubtypeFailure(TypingError):
    pass


class NonBangedContextUnderBangedLambda(TypingError):
    pass


class BranchContextMismatch(TypingError):
    pass


class CastError(TypingError):
    pass


# ---------------------------------------------------------------- judgments


@dataclass(frozen=True)
class Judgment:
    ctx: Context
    term: Term
    ty: Optional[Type]

    def __str__(self) -> str:
        c = ", ".join(f"{x}:{show(a)}" for x, a in self.ctx)
        ty = f" : {show(self.ty)}" if self.ty is not None else ""
        return f"{c} |- {show(self.term)}{ty}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: tuple = ()
    splits: Mapping[str, tuple] = field(default_factory=dict, compare=False, hash=False)

    @property
    def ctx(self) -> Context:
        return self.conclusion.ctx

    @property
    def term(self) -> Term:
        return self.conclusion.term

    @property
    def ty(self) -> Type:
        return self.conclusion.ty

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "ctx": [[x, to_json(a)] for x, a in self.ctx],
            "term": show(self.term),
            "type": to_json(self.ty),
            "splits": {x: list(v) for x, v in sorted(self.splits.items())},
            "premises": [p.to_json() for p in self.premises],
        }

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()


def banged(a: Type) -> bool:
    return isinstance(a, Bang)


def all_banged(ctx: Sequence[tuple[str, Type]]) -> bool:
    return all(banged(a) for _, a in ctx)


# ---------------------------------------------------------------- checking


class _Checker:
    def __init__(self, signature: Mapping[str, Type], placement: str):
        if placement not in ("shared", "minimal"):
            raise ValueError(f"unknown placement {placement!r}")
        self.sig = signature
        self.placement = placement

    def require_banged(self, ctx: Context, t: Term, except_: str = "") -> None:
        for x, a in ctx:
            if x != except_ and not banged(a):
                raise LinearVariableDropped(f"non-duplicable variable {x}:{show(a)} is unused", t)

    def split(self, ctx: Context, t: Term, parts: Sequence[tuple[Term, tuple[str, ...]]]):
        """Route context variables to premises; ``parts`` pairs subterms with their binders."""
        uses = [fv(s) - set(binders) for s, binders in parts]
        routed: list[list[tuple[str, Type]]] = [[] for _ in parts]
        splits: dict[str, tuple] = {}
        for x, a in ctx:
            users = tuple(i for i, u in enumerate(uses) if x in u)
            if len(users) > 1 and not banged(a):
                raise LinearVariableReused(f"variable {x}:{show(a)} used more than once", t)
            if not users and not banged(a):
                raise LinearVariableDropped(f"non-duplicable variable {x}:{show(a)} is unused", t)
            if banged(a) and self.placement == "shared":
                targets = tuple(range(len(parts)))
            else:
                targets = users or (0,)
            for i in targets:
                routed[i].append((x, a))
            splits[x] = targets
        out = []
        for (s, binders), sub in zip(parts, routed):
            out.append(tuple((x, a) for x, a in sub if x not in binders))
        return out, splits

    def run(self, ctx: Context, t: Term) -> Derivation:
        names = [x for x, _ in ctx]
        if len(set(names)) != len(names):
            raise TypingError(f"context binds a variable twice: {names}", t)
        if isinstance(t, Var):
            env = dict(ctx)
            if t.name not in env:
                raise UnboundVariable(f"variable {t.name} is not in the context", t)
            if t.ann is None:
                raise AnnotationMismatch("variable occurrence lacks an annotation", t)
            if not is_subtype(env[t.name], t.ann):
                raise SubtypeFailure(f"{show(env[t.name])} is not a subtype of {show(t.ann)}", t)
            self.require_banged(ctx, t, except_=t.name)
            return Derivation("ax1", Judgment(ctx, t, t.ann))
        if isinstance(t, Const):
            if t.name not in self.sig:
                raise UnknownConstant(f"no signature for constant {t.name}", t)
            if t.ann is None:
                raise AnnotationMismatch("constant lacks an annotation", t)
            if not is_subtype(self.sig[t.name], t.ann):
                raise SubtypeFailure(f"{show(self.sig[t.name])} is not a subtype of {show(t.ann)}", t)
            self.require_banged(ctx, t)
            return Derivation("ax2", Judgment(ctx, t, t.ann))
        if isinstance(t, Star):
            if t.n is None:
                raise AnnotationMismatch("unit lacks an index", t)
            self.require_banged(ctx, t)
            return Derivation("unit_I", Judgment(ctx, t, bang(UNIT, t.n)))
        if isinstance(t, Lam):
            if t.ann is None or t.n is None:
                raise AnnotationMismatch("lambda lacks annotation or index", t)
            if t.n >= 1 and not all_banged(ctx):
                bad = [x for x, a in ctx if not banged(a)]
                raise NonBangedContextUnderBangedLambda(
                    f"lambda with index {t.n} under non-duplicable {bad}", t)
            inner = tuple((x, a) for x, a in ctx if x != t.var)
            if len(inner) != len(ctx) and not banged(dict(ctx)[t.var]):
                raise LinearVariableDropped(f"variable {t.var} is shadowed while unused", t)
            body = self.run(inner + ((t.var, t.ann),), t.body)
            ty = Arrow(t.ann, body.ty)
            rule = "lam1" if t.n == 0 else "lam2"
            return Derivation(rule, Judgment(ctx, t, bang(ty, t.n)), (body,),
                              {x: (0,) for x, _ in inner})
        if isinstance(t, App):
            (c1, c2), splits = self.split(ctx, t, [(t.fn, ()), (t.arg, ())])
            f = self.run(c1, t.fn)
            a = self.run(c2, t.arg)
            if not isinstance(f.ty, Arrow):
                raise AnnotationMismatch(f"function has type {show(f.ty)}, not A -o B", t)
            if f.ty.dom != a.ty:
                raise AnnotationMismatch(
                    f"argument has type {show(a.ty)}, function expects {show(f.ty.dom)}", t)
            return Derivation("app", Judgment(ctx, t, f.ty.cod), (f, a), splits)
        if isinstance(t, Pair):
            if t.n is None:
                raise AnnotationMismatch("pair lacks an index", t)
            (c1, c2), splits = self.split(ctx, t, [(t.left, ()), (t.right, ())])
            l, r = self.run(c1, t.left), self.run(c2, t.right)
            comps = []
            for d in (l, r):
                s = strip(d.ty)
                if s.bangs < t.n:
                    raise AnnotationMismatch(
                        f"pair index {t.n} but component has type {show(d.ty)}", t)
                comps.append(bang(s.core, s.bangs - t.n))
            return Derivation("tensor_I", Judgment(ctx, t, bang(Tensor(*comps), t.n)), (l, r), splits)
        if isinstance(t, LetUnit):
            (c1, c2), splits = self.split(ctx, t, [(t.subject, ()), (t.body, ())])
            m = self.run(c1, t.subject)
            if m.ty != UNIT:
                raise AnnotationMismatch(f"let * expects top, got {show(m.ty)}", t)
            n = self.run(c2, t.body)
            return Derivation("unit_E", Judgment(ctx, t, n.ty), (m, n), splits)
        if isinstance(t, LetPair):
            if t.n is None or t.xann is None or t.yann is None:
                raise AnnotationMismatch("pair pattern lacks annotation or index", t)
            if t.x == t.y:
                raise TypingError("pair pattern binds the same variable twice", t)
            (c1, c2), splits = self.split(ctx, t, [(t.subject, ()), (t.body, (t.x, t.y))])
            m = self.run(c1, t.subject)
            want = bang(Tensor(t.xann, t.yann), t.n)
            if m.ty != want:
                raise AnnotationMismatch(f"pattern expects {show(want)}, subject has {show(m.ty)}", t)
            body_ctx = c2 + ((t.x, bang(t.xann, t.n)), (t.y, bang(t.yann, t.n)))
            n = self.run(body_ctx, t.body)
            return Derivation("tensor_E", Judgment(ctx, t, n.ty), (m, n), splits)
        if isinstance(t, If):
            return self.run_if(ctx, t)
        raise TypingError(f"cannot type term of kind {type(t).__name__}", t)

    def run_if(self, ctx: Context, t: If) -> Derivation:
        cond_fv, then_fv, else_fv = fv(t.cond), fv(t.then), fv(t.else_)
        c1, c2, c3, splits = [], [], [], {}
        for x, a in ctx:
            in_p = x in cond_fv
            in_m, in_n = x in then_fv, x in else_fv
            if not banged(a):
                if in_p and (in_m or in_n):
                    raise LinearVariableReused(f"variable {x}:{show(a)} used more than once", t)
                if in_m != in_n:
                    raise LinearVariableDropped(f"variable {x}:{show(a)} used in one branch only", t)
                if not (in_p or in_m):
                    raise LinearVariableDropped(f"non-duplicable variable {x}:{show(a)} is unused", t)
                targets = (0,) if in_p else (1, 2)
            elif self.placement == "shared":
                targets = (0, 1, 2)
            else:
                targets = tuple(i for i, u in enumerate((in_p, in_m, in_n)) if u) or (0,)
            for i in targets:
                (c1, c2, c3)[i].append((x, a))
            splits[x] = targets
        p = self.run(tuple(c1), t.cond)
        if p.ty != BIT:
            raise AnnotationMismatch(f"condition has type {show(p.ty)}, expected bit", t)
        m, n = self.run(tuple(c2), t.then), self.run(tuple(c3), t.else_)
        if m.ty != n.ty:
            raise BranchContextMismatch(f"branches have types {show(m.ty)} and {show(n.ty)}", t)
        if {x for x, a in c2 if not banged(a)} != {x for x, a in c3 if not banged(a)}:
            raise BranchContextMismatch("branches use different linear variables", t)
        return Derivation("if", Judgment(ctx, t, m.ty), (p, m, n), splits)


def check(j: Judgment, signature: Optional[Mapping[str, Type]] = None,
          placement: str = "shared") -> Derivation:
    """Derive ``j`` with the rules of the type system.

    ``placement`` picks where banged variables go in a context split:
    ``"shared"`` copies them into every premise, ``"minimal"`` sends them
    only to the premises that use them.  When ``j.ty`` is ``None`` the
    synthesized type is accepted.
    """
    d = _Checker(DEFAULT_SIGNATURE if signature is None else signature, placement).run(
        tuple(j.ctx), j.term)
    if j.ty is not None and d.ty != j.ty:
        raise AnnotationMismatch(f"term has type {show(d.ty)}, expected {show(j.ty)}", j.term)
    return d


def check_quantum(j: Judgment, placement: str = "shared") -> Derivation:
    """Check against the quantum signature, including the ``if`` rule."""
    return check(j, DEFAULT_SIGNATURE, placement)


def is_valid(j: Judgment, signature=None) -> bool:
    try:
        check(j, signature)
        return True
    except TypingError:
        return False


# ---------------------------------------------------------------- replay


class ReplayError(AssertionError):
    pass


def _fail(d: Derivation, msg: str):
    raise ReplayError(f"{d.rule} at `{show(d.term)}`: {msg}")


def replay(d: Derivation, signature: Optional[Mapping[str, Type]] = None) -> None:
    """Re-validate every node of ``d`` against its rule instance.

    Works only from the stored judgments, so it is independent of the
    checker's bookkeeping.
    """
    sig = DEFAULT_SIGNATURE if signature is None else signature
    for node in d.nodes():
        _replay_node(node, sig)


def _replay_node(d: Derivation, sig) -> None:
    ctx, t, ty = d.ctx, d.term, d.ty
    env = dict(ctx)
    prem = d.premises

    def others_banged(keep=()):
        for x, a in ctx:
            if x not in keep and not banged(a):
                _fail(d, f"{x} is not banged")

    def covers(binders: Sequence[tuple[str, ...]], shared: Sequence[Sequence[int]] = ()):
        seen: dict[str, list[int]] = {}
        for i, (p, bs) in enumerate(zip(prem, binders)):
            for x, a in p.ctx:
                if x in bs:
                    continue
                if env.get(x) != a:
                    _fail(d, f"premise {i} binds {x} differently")
                seen.setdefault(x, []).append(i)
        for x, a in ctx:
            where = seen.get(x, [])
            if not where:
                _fail(d, f"{x} vanished from the premises")
            if len(where) > 1 and not banged(a) and sorted(where) not in [list(s) for s in shared]:
                _fail(d, f"linear {x} shared between premises {where}")

    if d.rule == "ax1":
        if not isinstance(t, Var) or t.name not in env or not is_subtype(env[t.name], t.ann) or ty != t.ann:
            _fail(d, "bad axiom instance")
        others_banged((t.name,))
    elif d.rule == "ax2":
        if not isinstance(t, Const) or not is_subtype(sig[t.name], t.ann) or ty != t.ann:
            _fail(d, "bad constant instance")
        others_banged()
    elif d.rule == "unit_I":
        if not isinstance(t, Star) or ty != bang(UNIT, t.n):
            _fail(d, "bad unit instance")
        others_banged()
    elif d.rule in ("lam1", "lam2"):
        if not isinstance(t, Lam) or len(prem) != 1 or prem[0].term != t.body:
            _fail(d, "bad lambda shape")
        if (t.n == 0) != (d.rule == "lam1"):
            _fail(d, "rule does not match index")
        if t.n >= 1:
            others_banged()
        p = prem[0]
        if p.ctx[-1] != (t.var, t.ann):
            _fail(d, "bound variable missing from premise")
        covers([(t.var,)])
        if ty != bang(Arrow(t.ann, p.ty), t.n):
            _fail(d, "wrong conclusion type")
    elif d.rule == "app":
        if not isinstance(t, App) or (prem[0].term, prem[1].term) != (t.fn, t.arg):
            _fail(d, "bad application shape")
        covers([(), ()])
        if prem[0].ty != Arrow(prem[1].ty, ty):
            _fail(d, "function and argument types disagree")
    elif d.rule == "tensor_I":
        if not isinstance(t, Pair) or (prem[0].term, prem[1].term) != (t.left, t.right):
            _fail(d, "bad pair shape")
        covers([(), ()])
        s = strip(ty)
        if s.bangs != t.n or not isinstance(s.core, Tensor):
            _fail(d, "wrong pair type")
        if (prem[0].ty, prem[1].ty) != (bang(s.core.left, t.n), bang(s.core.right, t.n)):
            _fail(d, "component types do not carry the pair index")
    elif d.rule == "unit_E":
        if not isinstance(t, LetUnit) or prem[0].ty != UNIT or prem[1].ty != ty:
            _fail(d, "bad let-unit instance")
        covers([(), ()])
    elif d.rule == "tensor_E":
        if not isinstance(t, LetPair):
            _fail(d, "bad let-pair shape")
        if prem[0].ty != bang(Tensor(t.xann, t.yann), t.n) or prem[1].ty != ty:
            _fail(d, "bad let-pair types")
        if prem[1].ctx[-2:] != ((t.x, bang(t.xann, t.n)), (t.y, bang(t.yann, t.n))):
            _fail(d, "pattern variables missing from premise")
        covers([(), (t.x, t.y)])
    elif d.rule == "if":
        if not isinstance(t, If) or prem[0].ty != BIT or prem[1].ty != ty or prem[2].ty != ty:
            _fail(d, "bad if instance")
        covers([(), (), ()], shared=[(1, 2)])
    else:
        _fail(d, "unknown rule")


# ---------------------------------------------------------------- casting


def _restrict(premise: Derivation, parent_ctx: Context, new_ctx: Mapping[str, Type],
              binders: tuple[str, ...] = ()) -> Context:
    names = {x for x, _ in parent_ctx}
    return tuple((x, new_ctx[x] if x in names and x not in binders else a)
                 for x, a in premise.ctx)


def cast(d: Derivation, ctx2: Optional[Sequence[tuple[str, Type]]] = None,
         a2: Optional[Type] = None) -> Term:
    """Re-index ``d.term`` so that it has type ``a2`` under ``ctx2``.

    Requires ``ctx2 <: d.ctx`` pointwise and ``d.ty <: a2``; the result
    has the same erasure and is a value whenever ``d.term`` is.
    """
    ctx2 = tuple(d.ctx if ctx2 is None else ctx2)
    a2 = d.ty if a2 is None else a2
    if not context_subtype(ctx2, d.ctx):
        raise CastError("target context is not a subcontext", d.term)
    if not is_subtype(d.ty, a2):
        raise CastError(f"{show(d.ty)} is not a subtype of {show(a2)}", d.term)
    return _cast(d, dict(ctx2), a2)


def _cast(d: Derivation, env: Mapping[str, Type], a2: Type) -> Term:
    t, rule = d.term, d.rule
    if rule == "ax1":
        return Var(t.name, a2)
    if rule == "ax2":
        return Const(t.name, a2)
    if rule == "unit_I":
        return Star(strip(a2).bangs)
    if rule in ("lam1", "lam2"):
        s = strip(a2)
        (p,) = d.premises
        sub = dict(zip((x for x, _ in p.ctx[:-1]), (env[x] for x, _ in p.ctx[:-1])))
        sub[t.var] = s.core.dom
        return Lam(s.bangs, t.var, s.core.dom, _cast(p, sub, s.core.cod))
    if rule == "app":
        f, a = d.premises
        fn = _cast(f, _sub_env(f, env), Arrow(f.ty.dom, a2))
        return App(fn, _cast(a, _sub_env(a, env), a.ty))
    if rule == "tensor_I":
        s = strip(a2)
        l, r = d.premises
        return Pair(s.bangs, _cast(l, _sub_env(l, env), bang(s.core.left, s.bangs)),
                    _cast(r, _sub_env(r, env), bang(s.core.right, s.bangs)))
    if rule == "unit_E":
        m, n = d.premises
        return LetUnit(_cast(m, _sub_env(m, env), m.ty), _cast(n, _sub_env(n, env), a2))
    if rule == "tensor_E":
        m, n = d.premises
        benv = _sub_env(n, env, (t.x, t.y))
        return LetPair(t.n, t.x, t.xann, t.y, t.yann, _cast(m, _sub_env(m, env), m.ty),
                       _cast(n, benv, a2))
    if rule == "if":
        p, m, n = d.premises
        return If(_cast(p, _sub_env(p, env), p.ty), _cast(m, _sub_env(m, env), a2),
                  _cast(n, _sub_env(n, env), a2))
    raise CastError(f"unknown rule {rule}", t)


def _sub_env(p: Derivation, env: Mapping[str, Type], binders: tuple[str, ...] = ()) -> dict:
    return {x: (a if x in binders else env[x]) for x, a in p.ctx}


# ---------------------------------------------------------------- promotion


def promote(d: Derivation) -> Term:
    """The value ``V'`` with ``!Δ ⊢ V' : !A`` for a value derivation ``Δ ⊢ V : A``."""
    if not is_value(d.term):
        raise TypingError("only values can be promoted", d.term)
    return _promote(d)


def _bang_env(ctx: Context) -> dict:
    return {x: Bang(a) for x, a in ctx}


def _promote(d: Derivation) -> Term:
    t, rule = d.term, d.rule
    if rule == "ax1":
        return Var(t.name, Bang(t.ann))
    if rule == "ax2":
        return Const(t.name, Bang(t.ann))
    if rule == "unit_I":
        return Star(t.n + 1)
    if rule in ("lam1", "lam2"):
        (p,) = d.premises
        env = _bang_env(p.ctx[:-1])
        env[t.var] = t.ann
        return Lam(t.n + 1, t.var, t.ann, _cast(p, env, p.ty))
    if rule == "tensor_I":
        l, r = d.premises
        return Pair(t.n + 1, _promote(l), _promote(r))
    if rule == "tensor_E":
        m, n = d.premises
        return LetPair(t.n + 1, t.x, t.xann, t.y, t.yann, _promote(m), _promote(n))
    if rule == "unit_E":
        m, n = d.premises
        return LetUnit(_cast(m, _bang_env(m.ctx), UNIT), _promote(n))
    if rule == "app":
        f, a = d.premises
        if f.rule != "lam1":
            raise TypingError("application is not a value", t)
        (body,) = f.premises
        lam = f.term
        return App(Lam(0, lam.var, Bang(lam.ann), _promote(body)), _promote(a))
    raise TypingError(f"cannot promote rule {rule}", t)


# ---------------------------------------------------------------- substitution


def substitute(m: Derivation, x: str, v: Derivation) -> Term:
    """``M[V/x]``: each free ``x^{A'}`` becomes ``V`` cast to ``A'``.

    Bound variables of ``M`` that clash with free variables of ``V`` are
    renamed first.
    """
    if not is_value(v.term):
        raise TypingError("only values may be substituted", v.term)
    avoid = fv(v.term) | {x}
    cache: dict[Type, Term] = {}

    def image(ann: Type) -> Term:
        if ann not in cache:
            cache[ann] = cast(v, v.ctx, ann)
        return cache[ann]

    return _subst(m.term, x, image, avoid)


def subst_fn(t: Term, x: str, image, avoid: set) -> Term:
    """Capture-avoiding replacement of free ``x^A`` by ``image(A)``."""
    return _subst(t, x, image, avoid | {x})


def _subst(t: Term, x: str, image, avoid: set) -> Term:
    if isinstance(t, Var):
        return image(t.ann) if t.name == x else t
    if isinstance(t, (Const, Star)):
        return t
    if isinstance(t, Lam):
        if t.var == x:
            return t
        if t.var in avoid:
            v = fresh(t.var, avoid | fv(t.body))
            t = Lam(t.n, v, t.ann, rename_free(t.body, t.var, v))
        return Lam(t.n, t.var, t.ann, _subst(t.body, x, image, avoid))
    if isinstance(t, App):
        return App(_subst(t.fn, x, image, avoid), _subst(t.arg, x, image, avoid))
    if isinstance(t, Pair):
        return Pair(t.n, _subst(t.left, x, image, avoid), _subst(t.right, x, image, avoid))
    if isinstance(t, LetUnit):
        return LetUnit(_subst(t.subject, x, image, avoid), _subst(t.body, x, image, avoid))
    if isinstance(t, If):
        return If(*(_subst(c, x, image, avoid) for c in (t.cond, t.then, t.else_)))
    if isinstance(t, LetPair):
        subject = _subst(t.subject, x, image, avoid)
        if x in (t.x, t.y):
            return LetPair(t.n, t.x, t.xann, t.y, t.yann, subject, t.body)
        body, bx, by = t.body, t.x, t.y
        if bx in avoid:
            nx = fresh(bx, avoid | fv(body) | {by})
            body, bx = rename_free(body, bx, nx), nx
        if by in avoid:
            ny = fresh(by, avoid | fv(body) | {bx})
            body, by = rename_free(body, by, ny), ny
        return LetPair(t.n, bx, t.xann, by, t.yann, subject, _subst(body, x, image, avoid))
    return t
