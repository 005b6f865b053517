"""Types, indexed terms and pure terms of the linear lambda calculus.

Indexed terms carry Church-style annotations and integer bang indices.
Pure terms reuse the same node classes with every annotation and index
set to ``None``; :func:`erase` maps the former onto the latter.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Union

__all__ = [
    "Type", "TConst", "Arrow", "Tensor", "Unit", "Bang", "bang", "UNIT",
    "Term", "Var", "Const", "Star", "Lam", "App", "Pair", "LetPair",
    "LetUnit", "If", "let", "lam_unit",
    "ParseError", "parse", "parse_type", "parse_term", "parse_judgment",
    "show", "erase", "is_pure", "alpha_eq", "nameless", "classify",
    "is_value", "is_core_value", "free_vars", "fv", "fresh", "rename_free",
    "type_size", "term_size", "to_json", "from_json", "DEFAULT_CONSTANTS",
]


# ---------------------------------------------------------------- types


class Type:
    """Base class for the type grammar  α | A⊸B | A⊗B | ⊤ | !A."""

    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class TConst(Type):
    name: str


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class Tensor(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Unit(Type):
    pass


@dataclass(frozen=True)
class Bang(Type):
    inner: Type


UNIT = Unit()


def bang(a: Type, n: int = 1) -> Type:
    """Return ``!ⁿa``."""
    for _ in range(n):
        a = Bang(a)
    return a


def type_size(a: Type) -> int:
    if isinstance(a, (TConst, Unit)):
        return 1
    if isinstance(a, Bang):
        return 1 + type_size(a.inner)
    if isinstance(a, Arrow):
        return 1 + type_size(a.dom) + type_size(a.cod)
    return 1 + type_size(a.left) + type_size(a.right)


# ---------------------------------------------------------------- terms


class Term:
    """Base class for indexed and pure terms."""

    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Var(Term):
    name: str
    ann: Optional[Type] = None


@dataclass(frozen=True)
class Const(Term):
    name: str
    ann: Optional[Type] = None


@dataclass(frozen=True)
class Star(Term):
    n: Optional[int] = None


@dataclass(frozen=True)
class Lam(Term):
    n: Optional[int]
    var: str
    ann: Optional[Type]
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    n: Optional[int]
    left: Term
    right: Term


@dataclass(frozen=True)
class LetPair(Term):
    n: Optional[int]
    x: str
    xann: Optional[Type]
    y: str
    yann: Optional[Type]
    subject: Term
    body: Term


@dataclass(frozen=True)
class LetUnit(Term):
    subject: Term
    body: Term


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    else_: Term


def let(x: str, ann: Optional[Type], subject: Term, body: Term) -> Term:
    """``let x^A = M in N``, sugar for ``(λ⁰x^A.N) M``."""
    return App(Lam(0 if ann is not None else None, x, ann, body), subject)


def lam_unit(n: int, m: int, body: Term, var: str = "u") -> Term:
    """``λⁿ⋆ᵐ.M``, sugar for ``λⁿ x^{!ᵐ⊤}. let ⋆ = x^⊤ in M``."""
    var = fresh(var, fv(body))
    return Lam(n, var, bang(UNIT, m), LetUnit(Var(var, UNIT), body))


def is_let(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fn, Lam) and t.fn.n in (0, None)


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, Pair):
        return (t.left, t.right)
    if isinstance(t, (LetPair, LetUnit)):
        return (t.subject, t.body)
    if isinstance(t, If):
        return (t.cond, t.then, t.else_)
    return ()


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in children(t))


# ---------------------------------------------------------------- erasure


def erase(t: Term) -> Term:
    """Remove every type annotation and integer index."""
    if isinstance(t, Var):
        return Var(t.name)
    if isinstance(t, Const):
        return Const(t.name)
    if isinstance(t, Star):
        return Star()
    if isinstance(t, Lam):
        return Lam(None, t.var, None, erase(t.body))
    if isinstance(t, App):
        return App(erase(t.fn), erase(t.arg))
    if isinstance(t, Pair):
        return Pair(None, erase(t.left), erase(t.right))
    if isinstance(t, LetPair):
        return LetPair(None, t.x, None, t.y, None, erase(t.subject), erase(t.body))
    if isinstance(t, LetUnit):
        return LetUnit(erase(t.subject), erase(t.body))
    if isinstance(t, If):
        return If(erase(t.cond), erase(t.then), erase(t.else_))
    return t


def is_pure(t: Term) -> bool:
    return erase(t) == t


# ---------------------------------------------------------------- variables


def free_vars(t: Term) -> dict[str, list[Optional[Type]]]:
    """Map each free variable to the annotations of its free instances."""
    out: dict[str, list[Optional[Type]]] = {}

    def go(t: Term, bound: frozenset) -> None:
        if isinstance(t, Var):
            if t.name not in bound:
                out.setdefault(t.name, []).append(t.ann)
        elif isinstance(t, Lam):
            go(t.body, bound | {t.var})
        elif isinstance(t, LetPair):
            go(t.subject, bound)
            go(t.body, bound | {t.x, t.y})
        else:
            for c in children(t):
                go(c, bound)

    go(t, frozenset())
    return out


def fv(t: Term) -> set[str]:
    return set(free_vars(t))


def fresh(base: str, avoid) -> str:
    """A variable name derived from ``base`` that is not in ``avoid``."""
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789'") or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def rename_free(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of ``old`` to ``new`` (``new`` must not be captured)."""
    if isinstance(t, Var):
        return replace(t, name=new) if t.name == old else t
    if isinstance(t, Lam):
        if t.var == old:
            return t
        if t.var == new:
            v = fresh(t.var, fv(t.body) | {old, new})
            t = replace(t, var=v, body=rename_free(t.body, t.var, v))
        return replace(t, body=rename_free(t.body, old, new))
    if isinstance(t, LetPair):
        subject = rename_free(t.subject, old, new)
        if old in (t.x, t.y):
            return replace(t, subject=subject)
        if new in (t.x, t.y):
            avoid = fv(t.body) | {old, new, t.x, t.y}
            x2 = fresh(t.x, avoid) if t.x == new else t.x
            y2 = fresh(t.y, avoid | {x2}) if t.y == new else t.y
            body = rename_free(rename_free(t.body, t.x, x2), t.y, y2)
            t = replace(t, x=x2, y=y2, body=body)
        return replace(t, subject=subject, body=rename_free(t.body, old, new))
    if isinstance(t, App):
        return App(rename_free(t.fn, old, new), rename_free(t.arg, old, new))
    if isinstance(t, Pair):
        return replace(t, left=rename_free(t.left, old, new), right=rename_free(t.right, old, new))
    if isinstance(t, LetUnit):
        return LetUnit(rename_free(t.subject, old, new), rename_free(t.body, old, new))
    if isinstance(t, If):
        return If(*(rename_free(c, old, new) for c in children(t)))
    return t


def nameless(t: Term, env: tuple = ()) -> tuple:
    """Canonical de Bruijn form; alpha-equivalent terms map to equal tuples."""
    if isinstance(t, Var):
        if t.name in env:
            return ("B", env.index(t.name), t.ann)
        return ("F", t.name, t.ann)
    if isinstance(t, Const):
        return ("C", t.name, t.ann)
    if isinstance(t, Star):
        return ("S", t.n)
    if isinstance(t, Lam):
        return ("L", t.n, t.ann, nameless(t.body, (t.var,) + env))
    if isinstance(t, App):
        return ("A", nameless(t.fn, env), nameless(t.arg, env))
    if isinstance(t, Pair):
        return ("P", t.n, nameless(t.left, env), nameless(t.right, env))
    if isinstance(t, LetPair):
        return ("LP", t.n, t.xann, t.yann, nameless(t.subject, env),
                nameless(t.body, (t.y, t.x) + env))
    if isinstance(t, LetUnit):
        return ("LU", nameless(t.subject, env), nameless(t.body, env))
    if isinstance(t, If):
        return ("I",) + tuple(nameless(c, env) for c in children(t))
    # runtime leaves (e.g. qubit references) compare structurally
    return ("X", t)


def alpha_eq(a: Term, b: Term) -> bool:
    return nameless(a) == nameless(b)


# ---------------------------------------------------------------- classes


def is_core_value(t: Term) -> bool:
    return isinstance(t, (Var, Const, Star, Lam)) or getattr(t, "is_runtime_value", False)


def is_value(t: Term) -> bool:
    if is_core_value(t):
        return True
    if isinstance(t, Pair):
        return is_value(t.left) and is_value(t.right)
    if is_let(t):
        return is_value(t.arg) and is_value(t.fn.body)
    if isinstance(t, (LetPair, LetUnit)):
        return is_value(t.subject) and is_value(t.body)
    return False


def classify(t: Term) -> str:
    """One of ``"CoreValue"``, ``"Value"`` or ``"Computation"``."""
    if is_core_value(t):
        return "CoreValue"
    return "Value" if is_value(t) else "Computation"


# ---------------------------------------------------------------- printing

_TYPE_PREC = {Arrow: 0, Tensor: 1}


def _show_type(a: Type, prec: int) -> str:
    if isinstance(a, TConst):
        return a.name
    if isinstance(a, Unit):
        return "top"
    if isinstance(a, Bang):
        return "!" + _show_type(a.inner, 2)
    if isinstance(a, Arrow):
        s = f"{_show_type(a.dom, 1)} -o {_show_type(a.cod, 0)}"
        return f"({s})" if prec > 0 else s
    s = f"{_show_type(a.left, 1)} * {_show_type(a.right, 2)}"
    return f"({s})" if prec > 1 else s


def _idx(n: Optional[int]) -> str:
    return f"^{n}" if n else ""


def _ann(a: Optional[Type]) -> str:
    return "" if a is None else ":" + _show_type(a, 2)


DEFAULT_CONSTANTS = frozenset({"0", "1", "new", "meas", "H", "X", "Y", "Z", "S", "T", "CNOT", "coin"})


def _show_term(t: Term, prec: int) -> str:
    if isinstance(t, Var):
        return t.name + _ann(t.ann)
    if isinstance(t, Const):
        name = t.name if t.name in DEFAULT_CONSTANTS else "@" + t.name
        return name + _ann(t.ann)
    if isinstance(t, Star):
        return "unit" + _idx(t.n)
    if isinstance(t, Pair):
        return f"<{_show_term(t.left, 0)}, {_show_term(t.right, 0)}>{_idx(t.n)}"
    if is_let(t):
        lam = t.fn
        s = f"let {lam.var}{_ann(lam.ann)} = {_show_term(t.arg, 0)} in {_show_term(lam.body, 0)}"
    elif isinstance(t, Lam):
        s = f"lam{_idx(t.n)} {t.var}{_ann(t.ann)}. {_show_term(t.body, 0)}"
    elif isinstance(t, LetPair):
        s = (f"let <{t.x}{_ann(t.xann)}, {t.y}{_ann(t.yann)}>{_idx(t.n)} = "
             f"{_show_term(t.subject, 0)} in {_show_term(t.body, 0)}")
    elif isinstance(t, LetUnit):
        s = f"let * = {_show_term(t.subject, 0)} in {_show_term(t.body, 0)}"
    elif isinstance(t, If):
        s = (f"if {_show_term(t.cond, 0)} then {_show_term(t.then, 0)} "
             f"else {_show_term(t.else_, 0)}")
    elif isinstance(t, App):
        s = f"{_show_term(t.fn, 1)} {_show_term(t.arg, 2)}"
        return f"({s})" if prec > 1 else s
    else:
        return str(t)
    return f"({s})" if prec > 0 else s


def show(x: Union[Type, Term]) -> str:
    """Render a type or term in the surface syntax accepted by :func:`parse`."""
    if isinstance(x, Type):
        return _show_type(x, 0)
    return _show_term(x, 0)


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*)"
    r"|(?P<sym>-o|\|-|[*!^()<>,:.=\\@])"
    r"|(?P<num>\d+)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_']*)"
)

_KEYWORDS = {"lam", "let", "in", "if", "then", "else", "unit", "top"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos, line, lstart = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "id" and val in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, val, line, pos - lstart + 1))
        for i in range(pos, m.end()):
            if text[i] == "\n":
                line, lstart = line + 1, i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - lstart + 1))
    return toks


class _Parser:
    def __init__(self, text: str, indexed: bool, constants):
        self.toks = _tokenize(text)
        self.i = 0
        self.indexed = indexed
        self.constants = DEFAULT_CONSTANTS if constants is None else frozenset(constants)

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text in texts

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, msg: str):
        t = self.tok
        found = t.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", t.line, t.col)

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.fail("expected identifier")
        return self.advance().text

    def index(self) -> Optional[int]:
        if self.at("^"):
            self.advance()
            if self.tok.kind != "num":
                self.fail("expected integer index")
            return int(self.advance().text)
        return 0 if self.indexed else None

    # types
    def type(self) -> Type:
        left = self.tensor()
        if self.at("-o"):
            self.advance()
            return Arrow(left, self.type())
        return left

    def tensor(self) -> Type:
        t = self.unary()
        while self.at("*"):
            self.advance()
            t = Tensor(t, self.unary())
        return t

    def unary(self) -> Type:
        if self.at("!"):
            self.advance()
            n = 1
            if self.at("^"):
                self.advance()
                if self.tok.kind != "num":
                    self.fail("expected integer")
                n = int(self.advance().text)
            return bang(self.unary(), n)
        if self.at("top"):
            self.advance()
            return UNIT
        if self.at("("):
            self.advance()
            t = self.type()
            self.expect(")")
            return t
        if self.tok.kind == "id":
            return TConst(self.advance().text)
        self.fail("expected type")

    def annotation(self, required: bool) -> Optional[Type]:
        if self.indexed:
            if self.at(":"):
                self.advance()
                return self.type()
            if required:
                self.fail("expected ':' annotation")
        return None

    # terms
    def term(self, bound: frozenset) -> Term:
        if self.at("lam", "\\"):
            self.advance()
            n = self.index()
            if self.at("*"):
                self.advance()
                m = 0
                if self.at("^"):
                    self.advance()
                    m = int(self.advance().text)
                self.expect(".")
                body = self.term(bound)
                if not self.indexed:
                    v = fresh("u", fv(body))
                    return Lam(None, v, None, LetUnit(Var(v), body))
                return lam_unit(n, m, body)
            x = self.ident()
            ann = self.annotation(required=True)
            self.expect(".")
            return Lam(n, x, ann, self.term(bound | {x}))
        if self.at("let"):
            self.advance()
            if self.at("<"):
                self.advance()
                x = self.ident()
                xa = self.annotation(True)
                self.expect(",")
                y = self.ident()
                ya = self.annotation(True)
                self.expect(">")
                n = self.index()
                self.expect("=")
                m = self.term(bound)
                self.expect("in")
                return LetPair(n, x, xa, y, ya, m, self.term(bound | {x, y}))
            if self.at("*"):
                self.advance()
                self.expect("=")
                m = self.term(bound)
                self.expect("in")
                return LetUnit(m, self.term(bound))
            x = self.ident()
            ann = self.annotation(True)
            self.expect("=")
            m = self.term(bound)
            self.expect("in")
            return App(Lam(0 if self.indexed else None, x, ann, self.term(bound | {x})), m)
        if self.at("if"):
            self.advance()
            c = self.term(bound)
            self.expect("then")
            a = self.term(bound)
            self.expect("else")
            return If(c, a, self.term(bound))
        return self.application(bound)

    def starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("id", "num") or self.at("@", "unit", "<", "(")

    def application(self, bound: frozenset) -> Term:
        t = self.atom(bound)
        while True:
            if self.starts_atom():
                t = App(t, self.atom(bound))
            elif self.at("lam", "\\", "let", "if"):
                return App(t, self.term(bound))
            else:
                return t

    def atom(self, bound: frozenset) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Const(tok.text, self.annotation(True))
        if self.at("@"):
            self.advance()
            name = self.ident()
            if name not in self.constants:
                raise ParseError(f"unknown constant {name!r}", tok.line, tok.col)
            return Const(name, self.annotation(True))
        if tok.kind == "id":
            self.advance()
            ann = self.annotation(True)
            if tok.text not in bound and tok.text in self.constants:
                return Const(tok.text, ann)
            return Var(tok.text, ann)
        if self.at("unit"):
            self.advance()
            return Star(self.index())
        if self.at("<"):
            self.advance()
            a = self.term(bound)
            self.expect(",")
            b = self.term(bound)
            self.expect(">")
            return Pair(self.index(), a, b)
        if self.at("("):
            self.advance()
            t = self.term(bound)
            self.expect(")")
            return t
        self.fail("expected term")

    def context(self) -> list[tuple[str, Type]]:
        ctx: list[tuple[str, Type]] = []
        if self.at("|-"):
            return ctx
        while True:
            x = self.ident()
            self.expect(":")
            ctx.append((x, self.type()))
            if not self.at(","):
                return ctx
            self.advance()

    def done(self):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input")


def _has_turnstile(text: str) -> bool:
    return any(t.text == "|-" for t in _tokenize(text))


def parse_type(text: str) -> Type:
    p = _Parser(text, True, None)
    t = p.type()
    p.done()
    return t


def parse_term(text: str, indexed: bool = True, constants=None) -> Term:
    p = _Parser(text, indexed, constants)
    t = p.term(frozenset())
    p.done()
    return t


def parse_judgment(text: str, indexed: bool = True, constants=None):
    """Parse ``CTX |- TERM : TYPE``; header-less input yields ``([], term, None)``.

    The type is optional in both forms.
    """
    p = _Parser(text, indexed, constants)
    ctx: list[tuple[str, Type]] = []
    if _has_turnstile(text):
        ctx = p.context()
        p.expect("|-")
    t = p.term(frozenset())
    ty = None
    if p.at(":"):
        p.advance()
        ty = p.type()
    p.done()
    return ctx, t, ty


def parse(text: str, kind: str = "term", constants=None):
    """Parse ``text`` as a ``"type"``, ``"term"`` (indexed) or ``"pure-term"``."""
    if kind == "type":
        return parse_type(text)
    if kind == "term":
        return parse_term(text, True, constants)
    if kind == "pure-term":
        return parse_term(text, False, constants)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------- json

_TYPE_FIELDS = {TConst: ("name",), Arrow: ("dom", "cod"), Tensor: ("left", "right"),
                Unit: (), Bang: ("inner",)}
_TERM_FIELDS = {
    Var: ("name", "ann"), Const: ("name", "ann"), Star: ("n",),
    Lam: ("n", "var", "ann", "body"), App: ("fn", "arg"), Pair: ("n", "left", "right"),
    LetPair: ("n", "x", "xann", "y", "yann", "subject", "body"),
    LetUnit: ("subject", "body"), If: ("cond", "then", "else_"),
}
_BY_TAG = {cls.__name__: cls for cls in list(_TYPE_FIELDS) + list(_TERM_FIELDS)}


def to_json(x):
    """JSON-ready dict with an explicit ``"k"`` constructor tag."""
    if x is None or isinstance(x, (int, str)):
        return x
    fields = _TYPE_FIELDS.get(type(x), _TERM_FIELDS.get(type(x)))
    if fields is None:
        raise TypeError(f"cannot export {x!r}")
    out = {"k": type(x).__name__}
    for f in fields:
        out[f] = to_json(getattr(x, f))
    return out


def from_json(d):
    if d is None or isinstance(d, (int, str)):
        return d
    cls = _BY_TAG[d["k"]]
    fields = _TYPE_FIELDS[cls] if cls in _TYPE_FIELDS else _TERM_FIELDS[cls]
    return cls(*(from_json(d[f]) for f in fields))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from subterms(c)
