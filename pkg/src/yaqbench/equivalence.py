"""Axiomatic equivalence of typed terms.

Equivalence does not depend on the indexation of a term, so the decision
procedure works on erasures.  Normal forms are computed by evaluation into
a small semantic domain (closures, pairs, the unit and neutral atoms) with
call-by-value let-insertion for effectful applications, followed by
reification at the term's type and a pass of eta contractions.  Two terms
with alpha-equal normal forms are equal.  Failing that, a bounded search
over single rewrite steps looks for a common reduct, and a finite model
can separate terms that are genuinely different.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Callable, Mapping, Optional, Sequence

from .syntax import (
    App, Arrow, Bang, Const, If, Lam, LetPair, LetUnit, Pair, Star, TConst, Tensor,
    Term, Type, Unit, UNIT, Var, alpha_eq, children, erase, fresh, fv, is_let,
    is_value, let, nameless, rename_free, show,
)
from .subtyping import BudgetExceeded, strip
from .elaborate import NotTypeable, infer, infer_all
from .typecheck import DEFAULT_SIGNATURE, Derivation, Judgment, TypingError, check, subst_fn

__all__ = [
    "EquivVerdict", "normal_form", "normalize", "ax_equal", "ax_equal_terms",
    "indexation_independent", "rewrite_steps", "unbang", "DEFAULT_BFS_DEPTH",
    "DEFAULT_STEPS",
]

DEFAULT_STEPS = 2000
DEFAULT_BFS_DEPTH = 6
DEFAULT_BFS_NODES = 4000


def unbang(a: Type) -> Type:
    """The type with every exponential removed."""
    a = strip(a).core
    if isinstance(a, Arrow):
        return Arrow(unbang(a.dom), unbang(a.cod))
    if isinstance(a, Tensor):
        return Tensor(unbang(a.left), unbang(a.right))
    return a


# ---------------------------------------------------------------- semantic domain


@dataclass(frozen=True)
class _Neu:
    term: Term  # a variable or constant of atomic type


@dataclass(frozen=True)
class _Pair:
    left: object
    right: object


class _UnitV:
    pass


_UNIT = _UnitV()


@dataclass(frozen=True)
class _Fun:
    apply: Callable  # (argument, emitter) -> result
    ty: Type


class _Emitter:
    """Collects the let-bindings produced while evaluating one computation."""

    def __init__(self, names):
        self.binds: list[tuple] = []
        self.names = names

    def close(self, result: Term) -> Term:
        t = result
        for b in reversed(self.binds):
            if b[0] == "app":
                _, r, fn, arg = b
                t = let(r, None, App(fn, arg), t)
            elif b[0] == "pair":
                _, subj, x, y = b
                t = LetPair(None, x, None, y, None, subj, t)
            elif b[0] == "unit":
                t = LetUnit(b[1], t)
            else:
                _, r, cond, c1, c2 = b
                t = let(r, None, If(cond, c1, c2), t)
        return t


class _Budget:
    def __init__(self, steps: int):
        self.left = steps

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("normalization step budget exhausted")


class _NbE:
    def __init__(self, types: Mapping[int, Type], avoid: set, steps: int):
        self.types = types
        self.ids = count(1)
        self.avoid = set(avoid)
        self.budget = _Budget(steps)

    def name(self, base: str) -> str:
        while True:
            n = f"{base}{next(self.ids)}"
            if n not in self.avoid:
                self.avoid.add(n)
                return n

    # reflection turns a neutral term of type a into a semantic value
    def reflect(self, t: Term, a: Type, em: _Emitter):
        if isinstance(a, Tensor):
            x, y = self.name("p"), self.name("q")
            em.binds.append(("pair", t, x, y))
            return _Pair(self.reflect(Var(x), a.left, em), self.reflect(Var(y), a.right, em))
        if isinstance(a, Unit):
            em.binds.append(("unit", t))
            return _UNIT
        if isinstance(a, Arrow):
            def call(arg, em2, t=t, a=a):
                r = self.name("r")
                em2.binds.append(("app", r, t, self.reify(arg, a.dom)))
                return self.reflect(Var(r), a.cod, em2)
            return _Fun(call, a)
        return _Neu(t)

    def reify(self, v, a: Type) -> Term:
        if isinstance(a, Tensor):
            return Pair(None, self.reify(v.left, a.left), self.reify(v.right, a.right))
        if isinstance(a, Unit):
            return Star()
        if isinstance(a, Arrow):
            x = self.name("x")
            em = _Emitter(self)
            arg = self.reflect(Var(x), a.dom, em)
            res = v.apply(arg, em)
            return Lam(None, x, None, em.close(self.reify(res, a.cod)))
        return v.term

    def eval(self, t: Term, env: Mapping[str, object], em: _Emitter):
        self.budget.tick()
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return env[("const", t.name)]
        if isinstance(t, Star):
            return _UNIT
        if isinstance(t, Lam):
            dom = unbang(t.ann)

            def call(arg, em2, t=t, env=env):
                return self.eval(t.body, {**env, t.var: arg}, em2)
            return _Fun(call, dom)
        if isinstance(t, App):
            f = self.eval(t.fn, env, em)
            a = self.eval(t.arg, env, em)
            return f.apply(a, em)
        if isinstance(t, Pair):
            l = self.eval(t.left, env, em)
            return _Pair(l, self.eval(t.right, env, em))
        if isinstance(t, LetUnit):
            self.eval(t.subject, env, em)
            return self.eval(t.body, env, em)
        if isinstance(t, LetPair):
            p = self.eval(t.subject, env, em)
            return self.eval(t.body, {**env, t.x: p.left, t.y: p.right}, em)
        if isinstance(t, If):
            c = self.eval(t.cond, env, em)
            ty = self.types[id(t)]
            branches = []
            for b in (t.then, t.else_):
                em2 = _Emitter(self)
                branches.append(em2.close(self.reify(self.eval(b, env, em2), ty)))
            r = self.name("r")
            em.binds.append(("if", r, c.term, *branches))
            return self.reflect(Var(r), ty, em)
        raise TypeError(f"cannot evaluate {t!r}")


# ---------------------------------------------------------------- eta contraction


def _contract(t: Term) -> Term:
    """Bottom-up eta contractions: let-eta, pair-eta, unit-eta and lambda-eta."""
    if isinstance(t, (Var, Const, Star)):
        return t
    if isinstance(t, Lam):
        body = _contract(t.body)
        if (isinstance(body, App) and isinstance(body.arg, Var) and body.arg.name == t.var and is_value(body.fn) and t.var not in fv(body.fn)):
            return body.fn
        return Lam(t.n, t.var, t.ann, body)
    if isinstance(t, App):
        fn, arg = _contract(t.fn), _contract(t.arg)
        if isinstance(fn, Lam) and fn.n in (0, None) and isinstance(fn.body, Var) \
                and fn.body.name == fn.var:
            return arg
        return App(fn, arg)
    if isinstance(t, Pair):
        return Pair(t.n, _contract(t.left), _contract(t.right))
    if isinstance(t, LetPair):
        subj, body = _contract(t.subject), _contract(t.body)
        if (isinstance(body, Pair) and isinstance(body.left, Var) and isinstance(body.right, Var)
                and body.left.name == t.x and body.right.name == t.y and t.x != t.y):
            return subj
        return LetPair(t.n, t.x, t.xann, t.y, t.yann, subj, body)
    if isinstance(t, LetUnit):
        subj, body = _contract(t.subject), _contract(t.body)
        if isinstance(body, Star):
            return subj
        return LetUnit(subj, body)
    if isinstance(t, If):
        return If(*(_contract(c) for c in children(t)))
    return t


# ---------------------------------------------------------------- normal forms


def _all_names(t: Term) -> set:
    out = set()
    for s in _walk(t):
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, Lam):
            out.add(s.var)
        elif isinstance(s, LetPair):
            out |= {s.x, s.y}
    return out


def _walk(t: Term):
    yield t
    for c in children(t):
        yield from _walk(c)


def normal_form(d: Derivation, signature: Optional[Mapping[str, Type]] = None,
                steps: int = DEFAULT_STEPS, contract: bool = True) -> Term:
    """The erased normal form of the judgment derived by ``d``.

    With ``contract`` off the eta contractions are skipped; the result is
    then longer but keeps the bangs the original judgment needs.
    """
    sig = DEFAULT_SIGNATURE if signature is None else signature
    types = {id(n.term): unbang(n.ty) for n in d.nodes()}
    avoid = _all_names(d.term) | {x for x, _ in d.ctx}
    nbe = _NbE(types, avoid, steps)
    em = _Emitter(nbe)
    env: dict = {}
    for x, a in d.ctx:
        env[x] = nbe.reflect(Var(x), unbang(a), em)
    consts = sorted({s.name for s in _walk(d.term) if isinstance(s, Const)})
    for c in consts:
        env[("const", c)] = nbe.reflect(Const(c), unbang(sig[c]), em)
    v = nbe.eval(d.term, env, em)
    out = em.close(nbe.reify(v, unbang(d.ty)))
    return _contract(out) if contract else out


def normalize(d: Derivation, signature: Optional[Mapping[str, Type]] = None,
              steps: int = DEFAULT_STEPS) -> Term:
    """An indexed normal form of ``d``, typed at the same judgment.

    The erased normal form is re-indexed by elaboration, which also checks
    that it is well typed at the original context and type.  An eta
    contraction can drop a bang the judgment needs (``let * = u in unit``
    at ``!top`` becomes ``u``), so the uncontracted form is the fallback.
    """
    try:
        return infer(d.ctx, normal_form(d, signature, steps), d.ty, signature).term
    except NotTypeable:
        return infer(d.ctx, normal_form(d, signature, steps, contract=False), d.ty, signature).term


# ---------------------------------------------------------------- one-step rewriting


def _subst_pure(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``t[v/x]`` on erased terms."""
    return subst_fn(t, x, lambda _ann: v, set(fv(v)))


def _pattern_vars(kind, t) -> set:
    if kind == "x":
        return {t.fn.var}
    if kind == "pair":
        return {t.x, t.y}
    return set()


def _let_view(t: Term):
    """(kind, subject, rebuild(subject, body), body) for the three let forms."""
    if is_let(t):
        lam = t.fn
        return ("x", t.arg, lambda s, b, lam=lam: App(Lam(lam.n, lam.var, lam.ann, b), s), lam.body)
    if isinstance(t, LetPair):
        return ("pair", t.subject,
                lambda s, b, t=t: LetPair(t.n, t.x, t.xann, t.y, t.yann, s, b), t.body)
    if isinstance(t, LetUnit):
        return ("unit", t.subject, lambda s, b: LetUnit(s, b), t.body)
    return None


def _root_steps(t: Term, names: set):
    """Single rewrites at the root, with their row names, in both orientations."""
    out = []
    lv = _let_view(t)
    # beta rows
    if is_let(t) and is_value(t.arg):
        out.append(("beta-lam", _subst_pure(t.fn.body, t.fn.var, t.arg)))
    if isinstance(t, LetPair) and isinstance(t.subject, Pair) and is_value(t.subject):
        y2 = fresh(t.y, names | fv(t.subject.left) | fv(t.body))
        body = rename_free(t.body, t.y, y2) if t.y != y2 else t.body
        b = _subst_pure(body, t.x, t.subject.left)
        out.append(("beta-tensor", _subst_pure(b, y2, t.subject.right)))
    if isinstance(t, LetUnit) and isinstance(t.subject, Star):
        out.append(("beta-unit", t.body))
    # eta rows
    if isinstance(t, Lam) and isinstance(t.body, App) and isinstance(t.body.arg, Var) \
            and t.body.arg.name == t.var and is_value(t.body.fn) and t.var not in fv(t.body.fn):
        out.append(("eta-lam", t.body.fn))
    if is_let(t) and isinstance(t.fn.body, Var) and t.fn.body.name == t.fn.var:
        out.append(("eta-let", t.arg))
    if (isinstance(t, LetPair) and isinstance(t.body, Pair) and isinstance(t.body.left, Var)
            and isinstance(t.body.right, Var) and t.body.left.name == t.x
            and t.body.right.name == t.y and t.x != t.y):
        out.append(("eta-tensor", t.subject))
    if isinstance(t, LetUnit) and isinstance(t.body, Star):
        out.append(("eta-unit", t.subject))
    if lv:
        kind, subj, mk, body = lv
        inner = _let_view(subj)
        # let -1 = (let -2 = M in N) in P  ->  let -2 = M in let -1 = N in P
        if inner:
            k2, m, mk2, n = inner
            if not (_pattern_vars(k2, subj) & fv(body)):
                out.append(("let-assoc", mk2(m, mk(n, body))))
        # exchange of adjacent value lets
        inner_b = _let_view(body)
        if inner_b and is_value(subj) and is_value(inner_b[1]):
            k2, w, mk2, m = inner_b
            v1, v2 = _pattern_vars(kind, t), _pattern_vars(k2, body)
            if not (v1 & fv(w)) and not (v1 & v2) and not (v2 & fv(subj)):
                out.append(("let-exchange", mk2(w, mk(subj, m))))
        # let x = V in lam y. M  ->  lam y. let x = V in M
        if kind == "x" and is_value(subj) and isinstance(body, Lam) and body.var not in fv(subj) \
                and body.var != t.fn.var:
            out.append(("let-lam", Lam(body.n, body.var, body.ann, mk(subj, body.body))))
        # reverse of let-assoc
        if inner_b:
            k2, n, mk2, p = inner_b
            v1 = _pattern_vars(kind, t)
            if not (v1 & fv(p)):
                out.append(("let-assoc-rev", mk2(mk(subj, n), p)))
        # let x = M in let y = N in x y  ->  M N
        if kind == "x" and inner_b and inner_b[0] == "x":
            x, y = t.fn.var, body.fn.var
            inner_body = body.fn.body
            if (isinstance(inner_body, App) and isinstance(inner_body.fn, Var)
                    and inner_body.fn.name == x and isinstance(inner_body.arg, Var)
                    and inner_body.arg.name == y and x != y and x not in fv(body.arg)):
                out.append(("let-app-rev", App(subj, body.arg)))
            if (isinstance(inner_body, Pair) and isinstance(inner_body.left, Var)
                    and inner_body.left.name == x and isinstance(inner_body.right, Var)
                    and inner_body.right.name == y and x != y and x not in fv(body.arg)):
                out.append(("let-tensor-rev", Pair(inner_body.n, subj, body.arg)))
    if isinstance(t, Lam) and is_let(t.body) and is_value(t.body.arg) \
            and t.var not in fv(t.body.arg) and t.var != t.body.fn.var:
        lam = t.body.fn
        out.append(("let-lam-rev", App(Lam(lam.n, lam.var, lam.ann,
                                           Lam(t.n, t.var, t.ann, lam.body)), t.body.arg)))
    # sequentialization of applications and pairs
    if isinstance(t, App) and not is_let(t) and not (is_value(t.fn) and is_value(t.arg)):
        x = fresh("f", names)
        y = fresh("a", names | {x})
        out.append(("let-app", let(x, None, t.fn, let(y, None, t.arg, App(Var(x), Var(y))))))
    if isinstance(t, Pair) and not is_value(t):
        x = fresh("l", names)
        y = fresh("r", names | {x})
        out.append(("let-tensor", let(x, None, t.left, let(y, None, t.right,
                                                        Pair(t.n, Var(x), Var(y))))))
    # derived rows: floating a let out of pairs and applications
    if isinstance(t, Pair):
        lv_r, lv_l = _let_view(t.right), _let_view(t.left)
        if lv_r and is_value(t.left) and not (_pattern_vars(lv_r[0], t.right) & fv(t.left)):
            out.append(("let-tensor-right", lv_r[2](lv_r[1], Pair(t.n, t.left, lv_r[3]))))
        if lv_l and is_value(t.right) and not (_pattern_vars(lv_l[0], t.left) & fv(t.right)):
            out.append(("let-tensor-left", lv_l[2](lv_l[1], Pair(t.n, lv_l[3], t.right))))
    if isinstance(t, App) and not is_let(t):
        lv_a, lv_f = _let_view(t.arg), _let_view(t.fn)
        if lv_a and is_value(t.fn) and not (_pattern_vars(lv_a[0], t.arg) & fv(t.fn)):
            out.append(("let-app-arg", lv_a[2](lv_a[1], App(t.fn, lv_a[3]))))
        if lv_f and is_value(t.arg) and not (_pattern_vars(lv_f[0], t.fn) & fv(t.arg)):
            out.append(("let-app-fun", lv_f[2](lv_f[1], App(lv_f[3], t.arg))))
    return out


def rewrite_steps(t: Term) -> list[tuple[str, Term]]:
    """Every single-step rewrite of ``t`` under the congruence closure."""
    names = _all_names(t)
    out = list(_root_steps(t, names))
    if isinstance(t, Lam):
        out += [(r, Lam(t.n, t.var, t.ann, b)) for r, b in rewrite_steps(t.body)]
    elif isinstance(t, App):
        out += [(r, App(f, t.arg)) for r, f in rewrite_steps(t.fn)]
        out += [(r, App(t.fn, a)) for r, a in rewrite_steps(t.arg)]
    elif isinstance(t, Pair):
        out += [(r, Pair(t.n, l, t.right)) for r, l in rewrite_steps(t.left)]
        out += [(r, Pair(t.n, t.left, x)) for r, x in rewrite_steps(t.right)]
    elif isinstance(t, LetPair):
        out += [(r, LetPair(t.n, t.x, t.xann, t.y, t.yann, s, t.body))
                for r, s in rewrite_steps(t.subject)]
        out += [(r, LetPair(t.n, t.x, t.xann, t.y, t.yann, t.subject, b))
                for r, b in rewrite_steps(t.body)]
    elif isinstance(t, LetUnit):
        out += [(r, LetUnit(s, t.body)) for r, s in rewrite_steps(t.subject)]
        out += [(r, LetUnit(t.subject, b)) for r, b in rewrite_steps(t.body)]
    elif isinstance(t, If):
        for i, c in enumerate(children(t)):
            for r, c2 in rewrite_steps(c):
                parts = list(children(t))
                parts[i] = c2
                out.append((r, If(*parts)))
    return out


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class EquivVerdict:
    status: str  # "equal" | "not-proved" | "distinct"
    trace: tuple = ()
    evidence: Optional[dict] = None
    budget: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.status == "equal"

    def to_json(self) -> dict:
        out = {"status": self.status, "trace": [list(s) for s in self.trace]}
        if self.evidence is not None:
            out["evidence"] = self.evidence
        if self.budget is not None:
            out["budget"] = self.budget
        return out


def _bfs(a: Term, b: Term, depth: int, typeable: Callable[[Term], bool], max_nodes: int):
    """Bidirectional breadth-first search for a common rewrite of ``a`` and ``b``."""
    visited = 0
    seen = [{nameless(a): (None, None)}, {nameless(b): (None, None)}]
    frontier = [[a], [b]]
    for level in range(depth):
        side = level % 2
        nxt = []
        for t in frontier[side]:
            for rule, u in rewrite_steps(t):
                key = nameless(u)
                if key in seen[side]:
                    continue
                visited += 1
                if visited > max_nodes:
                    return None
                if not typeable(u):
                    continue
                seen[side][key] = (nameless(t), rule)
                if key in seen[1 - side]:
                    return _path(seen, key, side)
                nxt.append(u)
        frontier[side] = nxt
    return None


def _path(seen, key, side):
    def walk(s, k):
        out = []
        while seen[s][k][0] is not None:
            prev, rule = seen[s][k]
            out.append(rule)
            k = prev
        return out
    left = walk(0, key)[::-1]
    right = walk(1, key)
    return tuple(("forward", r) for r in left) + tuple(("backward", r) for r in right)


def _model_distinct(d1: Derivation, d2: Derivation) -> Optional[dict]:
    try:
        from .semantics import finmodel_separates
    except ImportError:  # pragma: no cover
        return None
    return finmodel_separates(d1, d2)


def ax_equal(d1: Derivation, d2: Derivation, signature: Optional[Mapping[str, Type]] = None,
             steps: int = DEFAULT_STEPS, depth: int = DEFAULT_BFS_DEPTH,
             use_model: bool = True, max_nodes: int = DEFAULT_BFS_NODES) -> EquivVerdict:
    """Decide ``d1.term ≈ d2.term`` at their common judgment."""
    if d1.ty != d2.ty or [a for _, a in d1.ctx] != [a for _, a in d2.ctx]:
        raise ValueError("judgments differ: "
                         f"{Judgment(d1.ctx, d1.term, d1.ty)} vs {Judgment(d2.ctx, d2.term, d2.ty)}")
    if [x for x, _ in d1.ctx] != [x for x, _ in d2.ctx]:
        d2 = _rename_ctx(d2, [x for x, _ in d1.ctx], signature)
    budget = {"steps": steps, "depth": depth, "nodes": max_nodes}
    try:
        n1 = normal_form(d1, signature, steps)
        n2 = normal_form(d2, signature, steps)
    except BudgetExceeded:
        return EquivVerdict("not-proved", (("budget", "normalize"),), budget=budget)
    if alpha_eq(n1, n2):
        return EquivVerdict("equal", (("normalize", show(n1)),))

    def typeable(u: Term) -> bool:
        try:
            infer_all(d1.ctx, u, d1.ty, 1, signature)
            return True
        except (TypingError, BudgetExceeded):
            return False

    if use_model:
        # a separating finite model is sound evidence and much cheaper than search
        ev = _model_distinct(d1, d2)
        if ev is not None:
            return EquivVerdict("distinct", (("normal-forms", show(n1), show(n2)),), evidence=ev)
    path = _bfs(erase(d1.term), erase(d2.term), depth, typeable, max_nodes)
    if path is not None:
        return EquivVerdict("equal", path)
    return EquivVerdict("not-proved", (("normal-forms", show(n1), show(n2)),), budget=budget)


def _rename_ctx(d: Derivation, names: Sequence[str], signature) -> Derivation:
    t = d.term
    old = [x for x, _ in d.ctx]
    tmp = [fresh(f"_{x}", _all_names(t) | set(names) | set(old)) for x in old]
    for o, m in zip(old, tmp):
        t = rename_free(t, o, m)
    for m, n in zip(tmp, names):
        t = rename_free(t, m, n)
    ctx = tuple((n, a) for n, (_, a) in zip(names, d.ctx))
    return check(Judgment(ctx, t, d.ty), signature)


def ax_equal_terms(ctx, m: Term, n: Term, ty: Type, signature=None, **kw) -> EquivVerdict:
    """``ax_equal`` on two indexed terms at a shared judgment."""
    d1 = check(Judgment(tuple(ctx), m, ty), signature)
    d2 = check(Judgment(tuple(ctx), n, ty), signature)
    return ax_equal(d1, d2, signature, **kw)


def indexation_independent(p: Term, ctx, ty: Type, k: int = 5, signature=None) -> bool:
    """Whether every pair among up to ``k`` indexations of ``p`` is proved equal."""
    rs = infer_all(ctx, p, ty, k, signature)
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            if ax_equal(rs[i].derivation, rs[j].derivation, signature).status != "equal":
                return False
    return True
