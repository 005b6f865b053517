"""A degenerate finite model: sets, exact finite distributions, ``L = id``.

Carriers of first-order types are finite and enumerated exhaustively.
Function types ``A ⊸ B`` denote Kleisli maps ``A → Dist(B)``; that set is
infinite, so its carrier is a finite sample (all deterministic maps up
to a cap, plus the uniformly random one).  Arrow equality compares on
every carrier element of the domain and is therefore exact whenever the
domain is first order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

from ..syntax import Arrow, Bang, TConst, Tensor, Type, UNIT, Unit, show
from .base import Model, T

__all__ = ["Dist", "KFun", "FinArrow", "FinModel", "finmodel", "Uninterpretable"]

_CARRIER_CAP = 16
_MAX_INPUTS = 2048
_ONE = Fraction(1)


class Uninterpretable(ValueError):
    """A type or constant outside what the finite model can express."""


class Dist:
    """A finitely supported probability distribution with rational weights."""

    __slots__ = ("items", "_key")

    def __init__(self, weights: Mapping):
        acc: dict = {}
        for k, w in weights.items():
            w = Fraction(w)
            if w < 0:
                raise ValueError("negative probability")
            if w:
                acc[k] = acc.get(k, Fraction(0)) + w
        if sum(acc.values()) != 1:
            raise ValueError("probabilities must sum to 1")
        self.items = acc
        self._key = None

    @classmethod
    def _trusted(cls, acc: dict) -> "Dist":
        d = object.__new__(cls)
        d.items, d._key = acc, None
        return d

    @staticmethod
    def point(x) -> "Dist":
        return Dist._trusted({x: _ONE})

    @staticmethod
    def uniform(xs) -> "Dist":
        xs = list(xs)
        return Dist({x: Fraction(1, len(xs)) for x in xs})

    def bind(self, f: Callable[[object], "Dist"]) -> "Dist":
        if len(self.items) == 1:
            (x,) = self.items
            return f(x)
        out: dict = {}
        for x, p in self.items.items():
            for y, q in f(x).items.items():
                out[y] = out[y] + p * q if y in out else p * q
        return Dist._trusted(out)

    def map(self, f) -> "Dist":
        out: dict = {}
        for x, p in self.items.items():
            y = f(x)
            out[y] = out[y] + p if y in out else p
        return Dist._trusted(out)

    def key(self):
        if self._key is None:
            self._key = frozenset(self.items.items())
        return self._key

    def __eq__(self, other):
        return isinstance(other, Dist) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = ", ".join(f"{_fmt(k)}: {v}" for k, v in self.items.items())
        return "{" + inner + "}"


class KFun:
    """An element of ``A ⊸ B``: a Kleisli map compared by its table on the carrier of ``A``."""

    __slots__ = ("model", "dom", "fn", "label", "_table", "_memo")

    def __init__(self, model: "FinModel", dom: Type, fn: Callable[[object], Dist], label: str = ""):
        self.model, self.dom, self.fn, self.label = model, dom, fn, label
        self._table = None
        self._memo: dict = {}

    def __call__(self, x) -> Dist:
        try:
            return self._memo[x]
        except KeyError:
            out = self._memo[x] = self.fn(x)
            return out

    def table(self) -> tuple:
        if self._table is None:
            self._table = tuple(self(a) for a in self.model.carrier(self.dom))
        return self._table

    def __eq__(self, other):
        # carriers are shared by types that differ only in bangs, so compare stripped domains
        return (isinstance(other, KFun) and _strip_all(self.dom) == _strip_all(other.dom)
                and self.table() == other.table())

    def __hash__(self):
        if self._table is None:
            self.table()
        return hash(self._table)

    def __repr__(self):
        if self.label:
            return self.label
        pairs = zip(self.model.carrier(self.dom), self.table())
        return "fun{" + ", ".join(f"{_fmt(a)} -> {d!r}" for a, d in pairs) + "}"


def _fmt(x) -> str:
    if x == ():
        return "*"
    if isinstance(x, tuple):
        return "(" + ", ".join(_fmt(y) for y in x) + ")"
    return repr(x)


@dataclass(frozen=True)
class FinArrow:
    dom: Type
    cod: Type
    fn: Callable = field(compare=False)
    label: str = field(default="", compare=False)

    def __call__(self, x):
        return self.fn(x)


def _strip_all(a: Type) -> Type:
    while isinstance(a, Bang):
        a = a.inner
    if isinstance(a, Arrow):
        return Arrow(_strip_all(a.dom), _strip_all(a.cod))
    if isinstance(a, Tensor):
        return Tensor(_strip_all(a.left), _strip_all(a.right))
    return a


class FinModel(Model):
    """Finite sets with the distribution monad; the comonad is the identity."""

    name = "finset"

    def __init__(self, theta: Optional[Mapping[str, list]] = None,
                 constants: Optional[Mapping[str, Callable[[], object]]] = None, seed: int = 0):
        self.theta = {"a": [0, 1], "b": [0, 1], "c": [0, 1], "bit": [0, 1],
                      "s1": [0], "s2": [0, 1], "s3": [0, 1, 2]}
        self.theta.update(theta or {})
        self.seed = seed
        self._carriers: dict = {}
        self.constants = dict(self._default_constants())
        self.constants.update(constants or {})

    def _default_constants(self):
        unit_dom = UNIT
        coin = lambda: KFun(self, unit_dom, lambda _u: Dist.uniform([0, 1]), label="coin")
        return {"0": lambda: 0, "1": lambda: 1, "coin": coin}

    # ---- carriers
    def carrier(self, a: Type) -> list:
        a = _strip_all(a)
        got = self._carriers.get(a)
        if got is None:
            got = self._build_carrier(a)
            self._carriers[a] = got
        return got

    def _build_carrier(self, a: Type) -> list:
        if isinstance(a, Unit):
            return [()]
        if isinstance(a, TConst):
            if a.name == "qbit":
                raise Uninterpretable("qbit has no finite carrier")
            return list(self.theta.get(a.name, [0, 1]))
        if isinstance(a, Tensor):
            return list(itertools.product(self.carrier(a.left), self.carrier(a.right)))
        if isinstance(a, Arrow):
            dom, cod = self.carrier(a.dom), self.carrier(a.cod)
            total = len(cod) ** len(dom)
            if total <= _CARRIER_CAP:
                tables = list(itertools.product(cod, repeat=len(dom)))
            else:
                rng = random.Random(f"{self.seed}:{show(a)}")
                tables = [tuple(rng.choice(cod) for _ in dom) for _ in range(_CARRIER_CAP)]
            out = [self._table_fun(a.dom, dom, tbl) for tbl in tables]
            uniform = Dist.uniform(cod)
            out.append(KFun(self, a.dom, lambda _x: uniform))
            return list(dict.fromkeys(out))
        raise TypeError(a)

    def _table_fun(self, dom_t: Type, dom: list, tbl: tuple) -> KFun:
        lookup = {x: Dist.point(y) for x, y in zip(dom, tbl)}
        return KFun(self, dom_t, lambda x: lookup[x])

    def constant(self, name: str, ty: Type) -> FinArrow:
        """``Θ(c): ⊤ → ⟦A_c⟧``."""
        if name not in self.constants:
            raise Uninterpretable(f"constant {name} has no finite interpretation")
        make = self.constants[name]
        return FinArrow(UNIT, ty, lambda _u: make(), label=name)

    # ---- arrows
    def _arr(self, dom, cod, fn, label=""):
        return FinArrow(dom, cod, fn, label)

    def dom(self, f): return f.dom
    def cod(self, f): return f.cod

    def id(self, a):
        return self._arr(a, a, lambda x: x, "id")

    def compose(self, f, g):
        return self._arr(f.dom, g.cod, lambda x: g(f(x)))

    def tensor(self, f, g):
        return self._arr(Tensor(f.dom, g.dom), Tensor(f.cod, g.cod), lambda p: (f(p[0]), g(p[1])))

    def alpha(self, a, b, c):
        return self._arr(Tensor(a, Tensor(b, c)), Tensor(Tensor(a, b), c), lambda p: ((p[0], p[1][0]), p[1][1]))

    def alpha_inv(self, a, b, c):
        return self._arr(Tensor(Tensor(a, b), c), Tensor(a, Tensor(b, c)), lambda p: (p[0][0], (p[0][1], p[1])))

    def lam(self, a):
        return self._arr(Tensor(UNIT, a), a, lambda p: p[1])

    def lam_inv(self, a):
        return self._arr(a, Tensor(UNIT, a), lambda x: ((), x))

    def rho(self, a):
        return self._arr(Tensor(a, UNIT), a, lambda p: p[0])

    def rho_inv(self, a):
        return self._arr(a, Tensor(a, UNIT), lambda x: (x, ()))

    def sigma(self, a, b):
        return self._arr(Tensor(a, b), Tensor(b, a), lambda p: (p[1], p[0]))

    def eps(self, a):
        return self._arr(Bang(a), a, lambda x: x)

    def delta(self, a):
        return self._arr(Bang(a), Bang(Bang(a)), lambda x: x)

    def m(self, a, b):
        return self._arr(Tensor(Bang(a), Bang(b)), Bang(Tensor(a, b)), lambda p: p)

    def m_inv(self, a, b):
        return self._arr(Bang(Tensor(a, b)), Tensor(Bang(a), Bang(b)), lambda p: p)

    def m_unit(self):
        return self._arr(UNIT, Bang(UNIT), lambda x: x)

    def m_unit_inv(self):
        return self._arr(Bang(UNIT), UNIT, lambda x: x)

    def d(self, a):
        return self._arr(Bang(a), Tensor(Bang(a), Bang(a)), lambda x: (x, x))

    def e(self, a):
        return self._arr(Bang(a), UNIT, lambda _x: ())

    def _thunk(self, dist_of: Callable[[], Dist]) -> KFun:
        return KFun(self, UNIT, lambda _u: dist_of())

    def eta(self, a):
        return self._arr(a, T(a), lambda x: self._thunk(lambda: Dist.point(x)))

    def mu(self, a):
        return self._arr(T(T(a)), T(a), lambda k: self._thunk(lambda: k(()).bind(lambda k2: k2(()))))

    def t(self, a, b):
        return self._arr(Tensor(a, T(b)), T(Tensor(a, b)),
                         lambda p: self._thunk(lambda: p[1](()).map(lambda y: (p[0], y))))

    def fmap_L(self, f):
        return self._arr(Bang(f.dom), Bang(f.cod), f.fn)

    def fmap_T(self, f):
        return self._arr(T(f.dom), T(f.cod), lambda k: self._thunk(lambda: k(()).map(f.fn)))

    def star(self, f):
        return self._arr(T(f.dom), f.cod,
                         lambda k: self._thunk(lambda: k(()).bind(lambda x: f(x)(()))))

    def lolli(self, f, g):
        # (B ⊸ C) → (A ⊸ D) for f: A → B, g: C → D
        return self._arr(Arrow(f.cod, g.dom), Arrow(f.dom, g.cod),
                         lambda h: KFun(self, f.dom, lambda x: h(f(x)).map(g.fn)))

    def phi(self, f):
        fun = f.cod
        return self._arr(Tensor(f.dom, fun.dom), T(fun.cod),
                         lambda p: self._thunk(lambda: f(p[0])(p[1])))

    def phi_inv(self, g, b):
        a = g.dom.left
        return self._arr(a, Arrow(b, g.cod.cod), lambda x: KFun(self, b, lambda y: g((x, y))(())))

    # ---- equality
    def counterexample(self, f, g):
        """The first domain element where ``f`` and ``g`` differ, or ``None``."""
        xs = self.carrier(f.dom)
        if len(xs) > _MAX_INPUTS:
            # only reachable for higher-order domains, whose carriers are samples anyway
            xs = random.Random(f"{self.seed}:{show(f.dom)}").sample(xs, _MAX_INPUTS)
        for x in xs:
            fx, gx = f(x), g(x)
            if fx != gx:
                return x, fx, gx
        return None

    def equal(self, f, g) -> str:
        return "equal" if self.counterexample(f, g) is None else "distinct"

    def table(self, f) -> list:
        """The graph of ``f`` as printable pairs."""
        return [(_fmt(x), _render(f(x))) for x in self.carrier(f.dom)]


def _render(v) -> str:
    if isinstance(v, (Dist, KFun)):
        return repr(v)
    return _fmt(v)


def finmodel(theta: Optional[Mapping[str, list]] = None, seed: int = 0) -> FinModel:
    return FinModel(theta, seed=seed)
