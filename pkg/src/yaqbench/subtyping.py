"""Subtyping ``A <: B`` with the exponential read as a property.

``is_subtype`` decides the relation structurally after stripping leading
bangs.  ``subtype_oracle`` searches for a derivation with the four rules
as written, and is used to cross-check the decision procedure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .syntax import Arrow, Bang, TConst, Tensor, Type, Unit, bang, show

__all__ = [
    "StrippedType", "strip", "is_subtype", "subtype_oracle", "derive",
    "context_subtype", "BudgetExceeded", "all_types",
]


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StrippedType:
    bangs: int
    core: Type

    def rebuild(self) -> Type:
        return bang(self.core, self.bangs)


def strip(a: Type) -> StrippedType:
    n = 0
    while isinstance(a, Bang):
        a, n = a.inner, n + 1
    return StrippedType(n, a)


def is_subtype(a: Type, b: Type) -> bool:
    sa, sb = strip(a), strip(b)
    if not (sb.bangs == 0 or sa.bangs >= 1):
        return False
    x, y = sa.core, sb.core
    if isinstance(x, TConst):
        return x == y
    if isinstance(x, Unit):
        return isinstance(y, Unit)
    if isinstance(x, Arrow):
        return isinstance(y, Arrow) and is_subtype(y.dom, x.dom) and is_subtype(x.cod, y.cod)
    if isinstance(x, Tensor):
        return (isinstance(y, Tensor) and is_subtype(x.left, y.left)
                and is_subtype(x.right, y.right))
    return False


def _peel(a: Type, n: int) -> Optional[Type]:
    for _ in range(n):
        if not isinstance(a, Bang):
            return None
        a = a.inner
    return a


def _max_bangs(a: Type) -> int:
    return strip(a).bangs


def derive(a: Type, b: Type, depth: int = 64) -> Optional[dict]:
    """Search for a derivation of ``a <: b``; ``None`` when none exists.

    Each rule's conclusion ``!ⁿX <: !ᵐY`` is matched by trying every
    split of the leading bangs of both sides.
    """
    if depth <= 0:
        raise BudgetExceeded(f"derivation depth exhausted on {show(a)} <: {show(b)}")
    for n in range(_max_bangs(a) + 1):
        x = _peel(a, n)
        for m in range(_max_bangs(b) + 1):
            y = _peel(b, m)
            if not (m == 0 or n >= 1):
                continue
            node = {"lhs": show(a), "rhs": show(b), "n": n, "m": m}
            if isinstance(x, TConst) and x == y:
                return {"rule": "ax", **node, "premises": []}
            if isinstance(x, Unit) and isinstance(y, Unit):
                return {"rule": "top", **node, "premises": []}
            if isinstance(x, Arrow) and isinstance(y, Arrow):
                p1 = derive(y.dom, x.dom, depth - 1)
                p2 = p1 and derive(x.cod, y.cod, depth - 1)
                if p1 and p2:
                    return {"rule": "lolli", **node, "premises": [p1, p2]}
            if isinstance(x, Tensor) and isinstance(y, Tensor):
                p1 = derive(x.left, y.left, depth - 1)
                p2 = p1 and derive(x.right, y.right, depth - 1)
                if p1 and p2:
                    return {"rule": "tensor", **node, "premises": [p1, p2]}
    return None


def subtype_oracle(a: Type, b: Type, depth: int = 64) -> bool:
    return derive(a, b, depth) is not None


def context_subtype(d1: Sequence[tuple[str, Type]], d2: Sequence[tuple[str, Type]]) -> bool:
    """Pointwise ``d1 <: d2``; both contexts must bind the same variables."""
    m1, m2 = dict(d1), dict(d2)
    if set(m1) != set(m2):
        raise ValueError(f"context domains differ: {sorted(m1)} vs {sorted(m2)}")
    return all(is_subtype(m1[x], m2[x]) for x in m1)


def all_types(max_size: int, constants: Sequence[str] = ("a",), unit: bool = True) -> list[Type]:
    """Every type of size at most ``max_size`` over the given constants."""
    by_size: dict[int, list[Type]] = {1: [TConst(c) for c in constants] + ([Unit()] if unit else [])}
    for s in range(2, max_size + 1):
        out = [Bang(t) for t in by_size[s - 1]]
        for i in range(1, s - 1):
            for l in by_size[i]:
                for r in by_size[s - 1 - i]:
                    out.append(Arrow(l, r))
                    out.append(Tensor(l, r))
        by_size[s] = out
    return [t for s in range(1, max_size + 1) for t in by_size.get(s, [])]
