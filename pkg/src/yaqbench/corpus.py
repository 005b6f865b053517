"""The bundled test corpus.

``data/typing.lam`` holds golden typing judgments with their expected
verdicts and ``data/terms.lam`` holds pure terms with a context and a goal.
Both are plain text, one judgment per line, ``#`` for comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from .category.base import nest
from .elaborate import infer
from .semantics import _unpack
from .syntax import Term, Type, erase, fresh, fv, parse_judgment
from .typecheck import Derivation

__all__ = ["GoldenCase", "TermCase", "typing_golden", "pure_terms", "packed_judgments", "read_lines"]


@dataclass(frozen=True)
class GoldenCase:
    mode: str  # "check" or "infer"
    expected: str  # "accept" or an error class name
    text: str
    ctx: tuple
    term: Term
    ty: Optional[Type]


@dataclass(frozen=True)
class TermCase:
    text: str
    ctx: tuple
    term: Term
    ty: Type


def read_lines(name: str) -> list[str]:
    text = resources.files("yaqbench").joinpath("data", name).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


@lru_cache(maxsize=None)
def typing_golden() -> tuple[GoldenCase, ...]:
    out = []
    for line in read_lines("typing.lam"):
        head, text = (s.strip() for s in line.split("|", 1))
        mode, expected = head.split()
        ctx, term, ty = parse_judgment(text, indexed=(mode == "check"))
        out.append(GoldenCase(mode, expected, text, tuple(ctx), term, ty))
    return tuple(out)


@lru_cache(maxsize=None)
def pure_terms() -> tuple[TermCase, ...]:
    out = []
    for line in read_lines("terms.lam"):
        ctx, term, ty = parse_judgment(line, indexed=False)
        out.append(TermCase(line, tuple(ctx), term, ty))
    return tuple(out)


def packed_judgments() -> list[Derivation]:
    """Every corpus term with its context packed into one variable.

    ``x1:A1, ..., xn:An ⊢ M`` becomes ``t:A1⊗(...⊗An) ⊢ let ⟨x1, ...⟩ = t in M``;
    an empty context becomes ``t:⊤ ⊢ let * = t in M``.
    """
    out = []
    for case in pure_terms():
        names = {x for x, _ in case.ctx} | fv(case.term)
        t = fresh("t", names)
        _, packed = _unpack(case.ctx, erase(case.term), t)
        out.append(infer([(t, nest([a for _, a in case.ctx]))], packed, case.ty).derivation)
    return out
