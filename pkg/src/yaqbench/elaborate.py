"""Elaboration: find indexations of an erased term.

Type shapes are found first by unification with all bangs ignored.  Every
node of every shape then gets an integer bang variable, the typing rules
become linear constraints over those variables (with a few disjunctions
coming from subtyping and from banged lambdas), and a small bounded
finite-domain solver enumerates solutions, smallest bangs first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Iterator, Mapping, Optional, Sequence

from .syntax import (
    App, Arrow, Bang, Const, If, Lam, LetPair, LetUnit, Pair, Star, TConst,
    Tensor, Term, Type, Unit, UNIT, Var, bang, erase, fv, show,
)
from .subtyping import strip
from .typecheck import DEFAULT_SIGNATURE, Derivation, Judgment, TypingError, check

__all__ = ["NotTypeable", "AmbiguousWithoutGoal", "InferResult", "infer", "infer_all",
           "MAX_BANG"]

MAX_BANG = 16


class NotTypeable(TypingError):
    pass


class AmbiguousWithoutGoal(TypingError):
    def __init__(self, msg: str, candidates: Sequence["InferResult"], term=None):
        self.candidates = list(candidates)
        super().__init__(msg, term)


@dataclass(frozen=True)
class InferResult:
    term: Term
    ty: Type
    derivation: Derivation


# ---------------------------------------------------------------- shapes


class _SVar:
    __slots__ = ("id",)

    def __init__(self, i: int):
        self.id = i

    def __repr__(self):
        return f"?{self.id}"


class _Shapes:
    """Bang-free type shapes with unification."""

    def __init__(self):
        self.sub: dict[int, object] = {}
        self.ids = count()

    def fresh(self):
        return _SVar(next(self.ids))

    def resolve(self, s):
        while isinstance(s, _SVar) and s.id in self.sub:
            s = self.sub[s.id]
        return s

    def of_type(self, a: Type):
        a = strip(a).core
        if isinstance(a, TConst):
            return ("const", a.name)
        if isinstance(a, Unit):
            return ("unit",)
        if isinstance(a, Arrow):
            return ("arrow", self.of_type(a.dom), self.of_type(a.cod))
        return ("tensor", self.of_type(a.left), self.of_type(a.right))

    def occurs(self, v: _SVar, s) -> bool:
        s = self.resolve(s)
        if isinstance(s, _SVar):
            return s.id == v.id
        return any(self.occurs(v, c) for c in s[1:] if not isinstance(c, str))

    def unify(self, a, b, where: Term) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, _SVar) and isinstance(b, _SVar) and a.id == b.id:
            return
        if isinstance(a, _SVar) or isinstance(b, _SVar):
            v, s = (a, b) if isinstance(a, _SVar) else (b, a)
            if self.occurs(v, s):
                raise NotTypeable("infinite type", where)
            self.sub[v.id] = s
            return
        if a[0] != b[0] or (a[0] == "const" and a[1] != b[1]):
            raise NotTypeable(f"shape mismatch {self.show(a)} vs {self.show(b)}", where)
        for x, y in zip(a[1:], b[1:]):
            if not isinstance(x, str):
                self.unify(x, y, where)

    def final(self, s):
        s = self.resolve(s)
        if isinstance(s, _SVar):
            return ("unit",)  # unconstrained shapes default to the unit type
        if s[0] in ("arrow", "tensor"):
            return (s[0], self.final(s[1]), self.final(s[2]))
        return s

    def show(self, s) -> str:
        s = self.resolve(s)
        if isinstance(s, _SVar):
            return repr(s)
        if s[0] == "const":
            return s[1]
        if s[0] == "unit":
            return "top"
        op = "-o" if s[0] == "arrow" else "*"
        return f"({self.show(s[1])} {op} {self.show(s[2])})"


# ---------------------------------------------------------------- linear forms


@dataclass(frozen=True)
class Lin:
    """``const + sum(coef * var)`` over bang variables."""
    const: int
    terms: tuple = ()  # sorted ((var, coef), ...)

    @staticmethod
    def var(v: int) -> "Lin":
        return Lin(0, ((v, 1),))

    def __add__(self, other) -> "Lin":
        if isinstance(other, int):
            return Lin(self.const + other, self.terms)
        acc = dict(self.terms)
        for v, c in other.terms:
            acc[v] = acc.get(v, 0) + c
        return Lin(self.const + other.const, tuple(sorted((v, c) for v, c in acc.items() if c)))

    def __neg__(self) -> "Lin":
        return Lin(-self.const, tuple((v, -c) for v, c in self.terms))

    def __sub__(self, other) -> "Lin":
        return self + (-other if isinstance(other, Lin) else -other)

    def value(self, env: Mapping[int, int]) -> int:
        return self.const + sum(c * env[v] for v, c in self.terms)


@dataclass(frozen=True)
class _Node:
    """A type template: a shape whose every node carries a bang count."""
    bangs: Lin
    kind: str
    name: str = ""
    kids: tuple = ()

    def rebang(self, delta) -> "_Node":
        return _Node(self.bangs + delta, self.kind, self.name, self.kids)

    def build(self, env) -> Type:
        if self.kind == "const":
            core = TConst(self.name)
        elif self.kind == "unit":
            core = UNIT
        elif self.kind == "arrow":
            core = Arrow(self.kids[0].build(env), self.kids[1].build(env))
        else:
            core = Tensor(self.kids[0].build(env), self.kids[1].build(env))
        return bang(core, self.bangs.value(env))


# An atom is (Lin, op) with op in {"==", ">="} meaning lin op 0.
# A constraint is a tuple of alternatives, each a tuple of atoms.


class _Constraints:
    def __init__(self):
        self.nvars = 0
        self.cons: list[tuple] = []

    def fresh(self) -> Lin:
        v = self.nvars
        self.nvars += 1
        return Lin.var(v)

    def template(self, shape) -> _Node:
        kind = shape[0]
        kids = tuple(self.template(k) for k in shape[1:]) if kind in ("arrow", "tensor") else ()
        return _Node(self.fresh(), kind, shape[1] if kind == "const" else "", kids)

    def require(self, *alternatives) -> None:
        self.cons.append(tuple(tuple(alt) for alt in alternatives))

    def eq(self, a: _Node, b: _Node) -> None:
        self.require([(a.bangs - b.bangs, "==")])
        for x, y in zip(a.kids, b.kids):
            self.eq(x, y)

    def sub(self, a: _Node, b: _Node) -> None:
        self.require([(b.bangs, "==")], [(a.bangs - 1, ">=")])
        if a.kind == "arrow":
            self.sub(b.kids[0], a.kids[0])
            self.sub(a.kids[1], b.kids[1])
        elif a.kind == "tensor":
            self.sub(a.kids[0], b.kids[0])
            self.sub(a.kids[1], b.kids[1])


def _known(a: Type) -> _Node:
    s = strip(a)
    c = s.core
    if isinstance(c, TConst):
        return _Node(Lin(s.bangs), "const", c.name)
    if isinstance(c, Unit):
        return _Node(Lin(s.bangs), "unit")
    kind = "arrow" if isinstance(c, Arrow) else "tensor"
    kids = (c.dom, c.cod) if isinstance(c, Arrow) else (c.left, c.right)
    return _Node(Lin(s.bangs), kind, "", tuple(_known(k) for k in kids))


# ---------------------------------------------------------------- linearity


def _occ(x: str, t: Term) -> Optional[int]:
    """Occurrences of ``x`` along one evaluation path; ``None`` when branches disagree."""
    if isinstance(t, Var):
        return int(t.name == x)
    if isinstance(t, (Const, Star)):
        return 0
    if isinstance(t, Lam):
        return 0 if t.var == x else _occ(x, t.body)
    if isinstance(t, If):
        p, m, n = _occ(x, t.cond), _occ(x, t.then), _occ(x, t.else_)
        if None in (p, m, n) or m != n:
            return None
        return p + m
    if isinstance(t, LetPair):
        s = _occ(x, t.subject)
        b = 0 if x in (t.x, t.y) else _occ(x, t.body)
        return None if s is None or b is None else s + b
    parts = [_occ(x, c) for c in ((t.fn, t.arg) if isinstance(t, App) else
                                 (t.left, t.right) if isinstance(t, Pair) else
                                 (t.subject, t.body))]
    return None if None in parts else sum(parts)


def _linear_ok(x: str, t: Term) -> bool:
    return _occ(x, t) == 1


def _free(t: Term) -> set:
    return fv(t)


# ---------------------------------------------------------------- generation


class _Gen:
    def __init__(self, signature: Mapping[str, Type]):
        self.sig = signature
        self.shapes = _Shapes()
        self.skel: dict[int, object] = {}  # id(term node) -> shape, plus binder keys
        self.cs = _Constraints()
        self.out: dict[int, dict] = {}  # id(term node) -> annotation templates

    # pass 1: shapes
    def shape(self, env: dict, t: Term):
        S = self.shapes
        if isinstance(t, Var):
            if t.name not in env:
                raise NotTypeable(f"unbound variable {t.name}", t)
            s = env[t.name]
        elif isinstance(t, Const):
            if t.name not in self.sig:
                raise NotTypeable(f"no signature for constant {t.name}", t)
            s = S.of_type(self.sig[t.name])
        elif isinstance(t, Star):
            s = ("unit",)
        elif isinstance(t, Lam):
            a = S.fresh()
            self.skel[(id(t), "x")] = a
            s = ("arrow", a, self.shape({**env, t.var: a}, t.body))
        elif isinstance(t, App):
            f = self.shape(env, t.fn)
            a = self.shape(env, t.arg)
            r = S.fresh()
            S.unify(f, ("arrow", a, r), t)
            s = r
        elif isinstance(t, Pair):
            s = ("tensor", self.shape(env, t.left), self.shape(env, t.right))
        elif isinstance(t, LetUnit):
            S.unify(self.shape(env, t.subject), ("unit",), t)
            s = self.shape(env, t.body)
        elif isinstance(t, LetPair):
            if t.x == t.y:
                raise NotTypeable("pattern binds the same variable twice", t)
            a, b = S.fresh(), S.fresh()
            self.skel[(id(t), "x")], self.skel[(id(t), "y")] = a, b
            S.unify(self.shape(env, t.subject), ("tensor", a, b), t)
            s = self.shape({**env, t.x: a, t.y: b}, t.body)
        elif isinstance(t, If):
            S.unify(self.shape(env, t.cond), ("const", "bit"), t)
            s = self.shape(env, t.then)
            S.unify(s, self.shape(env, t.else_), t)
        else:
            raise NotTypeable(f"cannot elaborate {type(t).__name__}", t)
        self.skel[id(t)] = s
        return s

    def tmpl(self, key) -> _Node:
        return self.cs.template(self.shapes.final(self.skel[key]))

    def linear(self, x: str, ty: _Node, scope: Term) -> None:
        if not _linear_ok(x, scope):
            self.cs.require([(ty.bangs - 1, ">=")])

    # pass 2: constraints; returns the synthesized template
    def gen(self, env: dict, t: Term) -> _Node:
        cs, ann = self.cs, self.out.setdefault(id(t), {})
        if isinstance(t, Var):
            a = ann["ann"] = self.tmpl(id(t))
            cs.sub(env[t.name], a)
            return a
        if isinstance(t, Const):
            a = ann["ann"] = self.tmpl(id(t))
            cs.sub(_known(self.sig[t.name]), a)
            return a
        if isinstance(t, Star):
            n = ann["n"] = cs.fresh()
            return _Node(n, "unit")
        if isinstance(t, Lam):
            n = ann["n"] = cs.fresh()
            a = ann["ann"] = self.tmpl((id(t), "x"))
            self.linear(t.var, a, t.body)
            free = sorted(_free(t))
            if free:
                cs.require([(n, "==")], [(env[x].bangs - 1, ">=") for x in free])
            body = self.gen({**env, t.var: a}, t.body)
            return _Node(n, "arrow", "", (a, body))
        if isinstance(t, App):
            f = self.gen(env, t.fn)
            a = self.gen(env, t.arg)
            cs.require([(f.bangs, "==")])
            cs.eq(f.kids[0], a)
            return f.kids[1]
        if isinstance(t, Pair):
            n = ann["n"] = cs.fresh()
            l, r = self.gen(env, t.left), self.gen(env, t.right)
            cs.require([(l.bangs - n, ">=")])
            cs.require([(r.bangs - n, ">=")])
            return _Node(n, "tensor", "", (l.rebang(-n), r.rebang(-n)))
        if isinstance(t, LetUnit):
            s = self.gen(env, t.subject)
            cs.require([(s.bangs, "==")])
            return self.gen(env, t.body)
        if isinstance(t, LetPair):
            n = ann["n"] = cs.fresh()
            a = ann["xann"] = self.tmpl((id(t), "x"))
            b = ann["yann"] = self.tmpl((id(t), "y"))
            s = self.gen(env, t.subject)
            cs.eq(s, _Node(n, "tensor", "", (a, b)))
            xa, yb = a.rebang(n), b.rebang(n)
            self.linear(t.x, xa, t.body)
            self.linear(t.y, yb, t.body)
            return self.gen({**env, t.x: xa, t.y: yb}, t.body)
        if isinstance(t, If):
            c = self.gen(env, t.cond)
            cs.require([(c.bangs, "==")])
            m, e = self.gen(env, t.then), self.gen(env, t.else_)
            cs.eq(m, e)
            return m
        raise NotTypeable(f"cannot elaborate {type(t).__name__}", t)

    def rebuild(self, t: Term, env: Mapping[int, int]) -> Term:
        a = self.out.get(id(t), {})

        def ty(key):
            return a[key].build(env)

        if isinstance(t, Var):
            return Var(t.name, ty("ann"))
        if isinstance(t, Const):
            return Const(t.name, ty("ann"))
        if isinstance(t, Star):
            return Star(a["n"].value(env))
        if isinstance(t, Lam):
            return Lam(a["n"].value(env), t.var, ty("ann"), self.rebuild(t.body, env))
        if isinstance(t, App):
            return App(self.rebuild(t.fn, env), self.rebuild(t.arg, env))
        if isinstance(t, Pair):
            return Pair(a["n"].value(env), self.rebuild(t.left, env), self.rebuild(t.right, env))
        if isinstance(t, LetUnit):
            return LetUnit(self.rebuild(t.subject, env), self.rebuild(t.body, env))
        if isinstance(t, LetPair):
            return LetPair(a["n"].value(env), t.x, ty("xann"), t.y, ty("yann"),
                           self.rebuild(t.subject, env), self.rebuild(t.body, env))
        return If(self.rebuild(t.cond, env), self.rebuild(t.then, env), self.rebuild(t.else_, env))


# ---------------------------------------------------------------- solving


class _Solver:
    """Bounded finite-domain search with interval propagation."""

    def __init__(self, nvars: int, cons: Sequence[tuple], bound: int, node_budget: int):
        self.n = nvars
        self.bound = bound
        self.hard = [alts[0] for alts in cons if len(alts) == 1]
        self.disj = [alts for alts in cons if len(alts) > 1]
        self.budget = node_budget
        self.watch: dict[int, list] = {}
        for atoms in self.hard:
            for lin, _ in atoms:
                for v, _ in lin.terms:
                    self.watch.setdefault(v, []).append(atoms)

    @staticmethod
    def _range(lin: Lin, lo, hi):
        mn = mx = lin.const
        for v, c in lin.terms:
            if c > 0:
                mn += c * lo[v]
                mx += c * hi[v]
            else:
                mn += c * hi[v]
                mx += c * lo[v]
        return mn, mx

    def _tighten_ge(self, lin: Lin, lo, hi) -> Optional[bool]:
        changed = False
        for v, c in lin.terms:
            _, mx = self._range(lin, lo, hi)
            if mx < 0:
                return None
            if c > 0:
                rest_max = mx - c * hi[v]
                new_lo = _ceil_div(-rest_max, c)
                if new_lo > lo[v]:
                    lo[v], changed = new_lo, True
            else:
                rest_max = mx - c * lo[v]
                new_hi = _floor_div(rest_max, -c)
                if new_hi < hi[v]:
                    hi[v], changed = new_hi, True
            if lo[v] > hi[v]:
                return None
        _, mx = self._range(lin, lo, hi)
        return None if mx < 0 else changed

    def _atom(self, lin, op, lo, hi) -> Optional[bool]:
        r = self._tighten_ge(lin, lo, hi)
        if r is None or op == ">=":
            return r
        r2 = self._tighten_ge(-lin, lo, hi)
        return None if r2 is None else (r or r2)

    def _status(self, atoms, lo, hi) -> str:
        """'true' if entailed, 'false' if impossible, else 'open'."""
        entailed = True
        for lin, op in atoms:
            mn, mx = self._range(lin, lo, hi)
            if mx < 0 or (op == "==" and mn > 0):
                return "false"
            if not (mn >= 0 and (op == ">=" or mx == 0)):
                entailed = False
        return "true" if entailed else "open"

    def propagate(self, lo, hi, disj) -> Optional[list]:
        while True:
            changed = False
            for atoms in self.hard:
                for lin, op in atoms:
                    r = self._atom(lin, op, lo, hi)
                    if r is None:
                        return None
                    changed = changed or r
            live = []
            for alts in disj:
                open_ = []
                done = False
                for alt in alts:
                    st = self._status(alt, lo, hi)
                    if st == "true":
                        done = True
                        break
                    if st == "open":
                        open_.append(alt)
                if done:
                    continue
                if not open_:
                    return None
                if len(open_) == 1:
                    for lin, op in open_[0]:
                        r = self._atom(lin, op, lo, hi)
                        if r is None:
                            return None
                        changed = changed or r
                live.append(tuple(open_))
            disj = live
            if not changed:
                return disj

    def solve(self) -> Iterator[dict]:
        lo = [0] * self.n
        hi = [self.bound] * self.n
        disj = self.propagate(lo, hi, self.disj)
        if disj is None:
            return
        yield from self._search(lo, hi, disj)

    def _search(self, lo, hi, disj):
        self.budget -= 1
        if self.budget < 0:
            raise _Exhausted()
        free = [v for v in range(self.n) if lo[v] < hi[v]]
        if not free:
            yield dict(enumerate(lo))
            return
        v = min(free, key=lambda i: (hi[i] - lo[i], i))
        for val in range(lo[v], hi[v] + 1):
            lo2, hi2 = lo[:], hi[:]
            lo2[v] = hi2[v] = val
            d2 = self.propagate(lo2, hi2, disj)
            if d2 is not None:
                yield from self._search(lo2, hi2, d2)


class _Exhausted(Exception):
    pass


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _floor_div(a: int, b: int) -> int:
    return a // b


# ---------------------------------------------------------------- entry points


def _max_bang(types) -> int:
    best = 0
    stack = list(types)
    while stack:
        a = stack.pop()
        if a is None:
            continue
        s = strip(a)
        best = max(best, s.bangs)
        c = s.core
        if isinstance(c, Arrow):
            stack += [c.dom, c.cod]
        elif isinstance(c, Tensor):
            stack += [c.left, c.right]
    return best


def infer_all(ctx: Sequence[tuple[str, Type]], p: Term, goal: Optional[Type] = None,
              k: int = 1, signature: Optional[Mapping[str, Type]] = None,
              max_bang: int = MAX_BANG, node_budget: int = 200_000) -> list[InferResult]:
    """Up to ``k`` distinct indexations of ``p`` that check under ``ctx``.

    The result types equal ``goal`` when it is given.  Raises
    :class:`NotTypeable` when the bounded search finds nothing.
    """
    sig = DEFAULT_SIGNATURE if signature is None else signature
    ctx = tuple(ctx)
    p = erase(p)
    g = _Gen(sig)
    shape_env = {x: g.shapes.of_type(a) for x, a in ctx}
    root = g.shape(shape_env, p)
    if goal is not None:
        g.shapes.unify(root, g.shapes.of_type(goal), p)
    env = {}
    for x, a in ctx:
        env[x] = _known(a)
        if not _linear_ok(x, p) and not isinstance(a, Bang):
            raise NotTypeable(f"non-duplicable variable {x}:{show(a)} is not used exactly once", p)
    ty = g.gen(env, p)
    if goal is not None:
        g.cs.eq(ty, _known(goal))
    base = _max_bang([a for _, a in ctx] + [goal]) + 1
    bounds = sorted({min(max_bang, b) for b in (base, 2 * base, max_bang)})
    found: dict = {}
    for bound in bounds:
        solver = _Solver(g.cs.nvars, g.cs.cons, bound, node_budget)
        try:
            for env_ in solver.solve():
                term = g.rebuild(p, env_)
                if term in found:
                    continue
                d = check(Judgment(ctx, term, goal), sig)
                found[term] = InferResult(term, d.ty, d)
                if len(found) >= k:
                    return list(found.values())
        except _Exhausted:
            if found:
                return list(found.values())
            from .subtyping import BudgetExceeded
            raise BudgetExceeded(f"elaboration search exceeded {node_budget} nodes")
        if found:
            return list(found.values())
    raise NotTypeable(f"no indexation with bangs up to {bounds[-1]}", p)


def infer(ctx: Sequence[tuple[str, Type]], p: Term, goal: Optional[Type] = None,
          signature: Optional[Mapping[str, Type]] = None, max_bang: int = MAX_BANG) -> InferResult:
    """One indexation of ``p``; without a goal the result type must be forced."""
    if goal is not None:
        return infer_all(ctx, p, goal, 1, signature, max_bang)[0]
    cands = infer_all(ctx, p, None, 4, signature, max_bang)
    types = {c.ty for c in cands}
    if len(types) > 1:
        raise AmbiguousWithoutGoal(
            "result type is not determined: " + ", ".join(sorted(show(t) for t in types)),
            cands, p)
    return cands[0]
