"""The model signature shared by every linear category for duplication.

Objects are syntax types in every model: ``L(A)`` is ``!A`` and ``T(A)``
is ``top -o A``.  Concrete models implement the primitive maps; the
derived ones (strength-induced double strengths, evaluation, Kleisli
extension, canonical coercions and context wiring) live here.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from ..subtyping import is_subtype, strip
from ..syntax import Arrow, Bang, Tensor, Type, UNIT, show

__all__ = ["Model", "L", "T", "nest", "NotSubtype"]


def L(a: Type, n: int = 1) -> Type:
    for _ in range(n):
        a = Bang(a)
    return a


def T(a: Type) -> Type:
    return Arrow(UNIT, a)


def nest(types: Sequence[Type]) -> Type:
    """The object of a context: right-nested tensors, ``top`` when empty."""
    if not types:
        return UNIT
    if len(types) == 1:
        return types[0]
    return Tensor(types[0], nest(types[1:]))


class NotSubtype(ValueError):
    pass


class Model:
    """Interface of a linear category for duplication.

    Arrows are opaque; ``dom(f)`` and ``cod(f)`` give their objects.
    ``equal`` returns ``"equal"``, ``"distinct"`` or ``"not-proved"``.
    """

    name = "model"

    # ---- primitives every model provides
    def dom(self, f) -> Type: raise NotImplementedError
    def cod(self, f) -> Type: raise NotImplementedError
    def id(self, a: Type): raise NotImplementedError
    def compose(self, f, g): raise NotImplementedError  # f then g
    def tensor(self, f, g): raise NotImplementedError
    def alpha(self, a, b, c): raise NotImplementedError  # A⊗(B⊗C) → (A⊗B)⊗C
    def alpha_inv(self, a, b, c): raise NotImplementedError
    def lam(self, a): raise NotImplementedError  # ⊤⊗A → A
    def lam_inv(self, a): raise NotImplementedError
    def rho(self, a): raise NotImplementedError  # A⊗⊤ → A
    def rho_inv(self, a): raise NotImplementedError
    def sigma(self, a, b): raise NotImplementedError
    def eps(self, a): raise NotImplementedError  # LA → A
    def delta(self, a): raise NotImplementedError  # LA → LLA
    def m(self, a, b): raise NotImplementedError  # LA⊗LB → L(A⊗B)
    def m_inv(self, a, b): raise NotImplementedError
    def m_unit(self): raise NotImplementedError  # ⊤ → L⊤
    def m_unit_inv(self): raise NotImplementedError
    def d(self, a): raise NotImplementedError  # LA → LA⊗LA
    def e(self, a): raise NotImplementedError  # LA → ⊤
    def eta(self, a): raise NotImplementedError  # A → TA
    def mu(self, a): raise NotImplementedError  # TTA → TA
    def t(self, a, b): raise NotImplementedError  # A⊗TB → T(A⊗B)
    def fmap_L(self, f): raise NotImplementedError
    def fmap_T(self, f): raise NotImplementedError
    def lolli(self, f, g): raise NotImplementedError  # (B⊸C) → (A⊸D) for f:A→B, g:C→D
    def phi(self, f): raise NotImplementedError  # (A → B⊸C) ↦ (A⊗B → TC)
    def phi_inv(self, g, b: Type): raise NotImplementedError
    def equal(self, f, g) -> str: raise NotImplementedError

    # ---- derived structure
    def then(self, *fs):
        out = fs[0]
        for f in fs[1:]:
            out = self.compose(out, f)
        return out

    def delta_inv(self, a):
        return self.eps(L(a))

    def star(self, f):
        """Kleisli extension ``f*: TA → TB`` of ``f: A → TB``."""
        return self.compose(self.fmap_T(f), self.mu(_unT(self.cod(f))))

    def app(self, a: Type, b: Type):
        """Evaluation ``(A⊸B)⊗A → TB``, the transpose of the identity."""
        return self.phi(self.id(Arrow(a, b)))

    def psi1(self, a: Type, b: Type):
        """``TA⊗TB → T(A⊗B)``, evaluating the left component first."""
        ta, tb = T(a), T(b)
        inner = self.compose(self.sigma(tb, a), self.t(a, b))
        return self.then(self.sigma(ta, tb), self.t(tb, a), self.star(inner))

    def psi2(self, a: Type, b: Type):
        ta = T(a)
        inner = self.compose(self.sigma(ta, b), self.t(b, a))
        return self.then(self.t(ta, b), self.star(inner), self.fmap_T(self.sigma(b, a)))

    def m_n(self, a: Type, b: Type, n: int):
        """``LⁿA ⊗ LⁿB → Lⁿ(A⊗B)``."""
        if n == 0:
            return self.id(Tensor(a, b))
        return self.compose(self.m(L(a, n - 1), L(b, n - 1)), self.fmap_L(self.m_n(a, b, n - 1)))

    def m_n_inv(self, a: Type, b: Type, n: int):
        if n == 0:
            return self.id(Tensor(a, b))
        return self.compose(self.fmap_L(self.m_n_inv(a, b, n - 1)), self.m_inv(L(a, n - 1), L(b, n - 1)))

    def coalgebra(self, types: Sequence[Type]):
        """``⟦!Δ⟧ → L⟦!Δ⟧`` for a context of banged types."""
        if not types:
            return self.m_unit()
        head = types[0]
        dh = self.delta(_unL(head))
        if len(types) == 1:
            return dh
        rest = self.coalgebra(types[1:])
        return self.compose(self.tensor(dh, rest), self.m(head, nest(types[1:])))

    # ---- canonical coercions
    def coerce(self, a: Type, b: Type, rng: Optional[random.Random] = None):
        """The canonical arrow ``I_{A,B}``; ``rng`` picks one of many decompositions."""
        if not is_subtype(a, b):
            raise NotSubtype(f"{show(a)} is not a subtype of {show(b)}")
        sa, sb = strip(a), strip(b)
        n, x, mm, y = sa.bangs, sa.core, sb.bangs, sb.core
        if mm == 0:
            if n == 0:
                return self._core(x, y, rng)
            if rng is not None and rng.random() < 0.5:
                # map the core under all bangs, then drop them
                lifted = self._lift(self._core(x, y, rng), n)
                return self.compose(lifted, self._collapse(y, n, 0, rng))
            return self.compose(self._collapse(x, n, 0, rng), self._core(x, y, rng))
        if rng is not None and rng.random() < 0.5 and n >= mm and n >= 1:
            # keep min(n, m) bangs around the core and adjust the rest
            lifted = self._lift(self._core(x, y, rng), n)
            return self.compose(lifted, self._collapse(y, n, mm, rng))
        down = self._collapse(x, n, 1, rng)
        core = self.fmap_L(self._core(x, y, rng))
        return self.then(down, core, self._grow(y, 1, mm, rng))

    def _lift(self, f, n: int):
        for _ in range(n):
            f = self.fmap_L(f)
        return f

    def _roundtrip(self, a: Type, rng):
        """An identity on ``LA`` written as ``δ;ε_{LA}`` (when ``rng`` says so)."""
        if rng is not None and rng.random() < 0.25:
            return self.compose(self.delta(a), self.eps(L(a)))
        return None

    def _collapse(self, x: Type, n: int, k: int, rng):
        """``LⁿX → LᵏX`` for ``n ≥ k`` using counits at random levels."""
        if n < k:
            raise ValueError("collapse needs n >= k")
        f = self.id(L(x, n))
        cur = n
        while cur > k:
            # ε at depth j: Lʲ(ε_{L^{cur-1-j} X}) : L^cur X → L^{cur-1} X
            j = rng.randrange(cur) if rng is not None else 0
            step = self._lift(self.eps(L(x, cur - 1 - j)), j)
            f = self.compose(f, step)
            cur -= 1
            if rng is not None and cur >= 1:
                rt = self._roundtrip(L(x, cur - 1), rng)
                if rt is not None:
                    f = self.compose(f, rt)
        return f

    def _grow(self, y: Type, k: int, m: int, rng):
        """``LᵏY → LᵐY`` for ``1 ≤ k ≤ m`` using comultiplications at random levels."""
        f = self.id(L(y, k))
        cur = k
        while cur < m:
            j = rng.randrange(cur) if rng is not None else 0
            # Lʲ(δ_{L^{cur-1-j} Y}) : L^cur Y → L^{cur+1} Y
            step = self._lift(self.delta(L(y, cur - 1 - j)), j)
            f = self.compose(f, step)
            cur += 1
        return f

    def _core(self, x: Type, y: Type, rng):
        if isinstance(x, Arrow):
            f = self.coerce(y.dom, x.dom, rng)
            g = self.coerce(x.cod, y.cod, rng)
            if rng is not None and rng.random() < 0.5:
                return self.compose(self.lolli(f, self.id(x.cod)), self.lolli(self.id(y.dom), g))
            return self.lolli(f, g)
        if isinstance(x, Tensor):
            f = self.coerce(x.left, y.left, rng)
            g = self.coerce(x.right, y.right, rng)
            if rng is not None:
                r = rng.random()
                if r < 1 / 3:
                    return self.compose(self.tensor(f, self.id(x.right)), self.tensor(self.id(y.left), g))
                if r < 2 / 3:
                    return self.compose(self.tensor(self.id(x.left), g), self.tensor(f, self.id(y.right)))
            return self.tensor(f, g)
        return self.id(x)

    def coerce_ctx(self, src: Sequence[Type], dst: Sequence[Type]):
        """``I_{Δ′,Δ}`` on context objects, componentwise."""
        if len(src) != len(dst):
            raise ValueError("contexts of different length")
        if not src:
            return self.id(UNIT)
        if len(src) == 1:
            return self.coerce(src[0], dst[0])
        return self.tensor(self.coerce(src[0], dst[0]), self.coerce_ctx(src[1:], dst[1:]))

    # ---- context wiring
    def _under(self, types: Sequence[Type], p: int, f):
        """Lift ``f`` acting on ``nest(types[p:])`` to ``nest(types)``."""
        for i in range(p - 1, -1, -1):
            f = self.tensor(self.id(types[i]), f)
        return f

    def _swap_step(self, types: list, p: int):
        a, b = types[p], types[p + 1]
        if p + 2 == len(types):
            f = self.sigma(a, b)
        else:
            r = nest(types[p + 2:])
            f = self.then(self.alpha(a, b, r), self.tensor(self.sigma(a, b), self.id(r)),
                          self.alpha_inv(b, a, r))
        return self._under(types, p, f)

    def _dup_step(self, types: list, p: int):
        a = types[p]
        if p + 1 == len(types):
            f = self.d(_unL(a))
        else:
            r = nest(types[p + 1:])
            f = self.compose(self.tensor(self.d(_unL(a)), self.id(r)), self.alpha_inv(a, a, r))
        return self._under(types, p, f)

    def _drop_step(self, types: list, p: int):
        a = types[p]
        if len(types) == 1:
            return self.e(_unL(a))
        if p + 1 == len(types):
            prev = types[p - 1]
            f = self.compose(self.tensor(self.id(prev), self.e(_unL(a))), self.rho(prev))
            return self._under(types, p - 1, f)
        r = nest(types[p + 1:])
        f = self.compose(self.tensor(self.e(_unL(a)), self.id(r)), self.lam(r))
        return self._under(types, p, f)

    def wiring(self, types: Sequence[Type], target: Sequence[int]):
        """``nest(types) → nest([types[i] for i in target])``.

        Indices used more than once are duplicated with ``d`` and unused
        ones are discarded with ``e``; both require a banged type.
        """
        types = list(types)
        items = list(range(len(types)))
        f = self.id(nest(types))
        counts = {i: list(target).count(i) for i in items}
        for i in items:
            if counts[i] != 1 and not isinstance(types[i], Bang):
                raise ValueError(f"cannot {'drop' if counts[i] == 0 else 'copy'} {show(types[i])}")
        cur_t, cur_i = list(types), list(items)
        p = 0
        while p < len(cur_i):
            c = counts[cur_i[p]]
            if c == 0:
                f = self.compose(f, self._drop_step(cur_t, p))
                del cur_t[p], cur_i[p]
                continue
            for _ in range(c - 1):
                f = self.compose(f, self._dup_step(cur_t, p))
                cur_t.insert(p, cur_t[p])
                cur_i.insert(p, cur_i[p])
            p += c
        want = list(target)
        for pos in range(len(want)):
            q = cur_i.index(want[pos], pos)
            while q > pos:
                f = self.compose(f, self._swap_step(cur_t, q - 1))
                cur_t[q - 1], cur_t[q] = cur_t[q], cur_t[q - 1]
                cur_i[q - 1], cur_i[q] = cur_i[q], cur_i[q - 1]
                q -= 1
        return f

    def assoc_concat(self, xs: Sequence[Type], ys: Sequence[Type]):
        """``nest(xs) ⊗ nest(ys) → nest(xs + ys)``."""
        xs, ys = list(xs), list(ys)
        if not xs:
            return self.lam(nest(ys))
        if not ys:
            return self.rho(nest(xs))
        if len(xs) == 1:
            return self.id(Tensor(xs[0], nest(ys)))
        head, rest = xs[0], xs[1:]
        # (h ⊗ R) ⊗ Y → h ⊗ (R ⊗ Y) → h ⊗ nest(R + Y)
        return self.compose(self.alpha_inv(head, nest(rest), nest(ys)),
                            self.tensor(self.id(head), self.assoc_concat(rest, ys)))

    def split_concat(self, xs: Sequence[Type], ys: Sequence[Type]):
        """``nest(xs + ys) → nest(xs) ⊗ nest(ys)``."""
        xs, ys = list(xs), list(ys)
        if not xs:
            return self.lam_inv(nest(ys))
        if not ys:
            return self.rho_inv(nest(xs))
        if len(xs) == 1:
            return self.id(Tensor(xs[0], nest(ys)))
        head, rest = xs[0], xs[1:]
        return self.compose(self.tensor(self.id(head), self.split_concat(rest, ys)),
                            self.alpha(head, nest(rest), nest(ys)))


def _unL(a: Type) -> Type:
    if not isinstance(a, Bang):
        raise ValueError(f"{show(a)} is not of the form !A")
    return a.inner


def _unT(a: Type) -> Type:
    if not (isinstance(a, Arrow) and a.dom == UNIT):
        raise ValueError(f"{show(a)} is not of the form T(A)")
    return a.cod
