"""Equational law checker for models, plus deliberate corruptions to test it."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from ..subtyping import all_types
from ..syntax import Arrow, TConst, Tensor, Type, UNIT, show
from .base import L, Model, T
from .finmodel import Dist

__all__ = ["Diagram", "DIAGRAMS", "LawEntry", "LawReport", "check_laws", "mutate", "MUTATIONS",
           "default_objects"]


@dataclass(frozen=True)
class Diagram:
    id: str
    arity: int
    sides: Callable  # (model, *objects) -> (lhs, rhs)
    group: str
    required: bool = True


def _c(M: Model, *fs):
    return M.then(*fs)


def _interchange(M: Model, a, b, c, d):
    """``(A⊗B)⊗(C⊗D) → (A⊗C)⊗(B⊗D)``."""
    i = M.id
    return _c(M,
              M.alpha_inv(a, b, Tensor(c, d)),
              M.tensor(i(a), M.alpha(b, c, d)),
              M.tensor(i(a), M.tensor(M.sigma(b, c), i(d))),
              M.tensor(i(a), M.alpha_inv(c, b, d)),
              M.alpha(a, c, Tensor(b, d)))


def _diagrams() -> list[Diagram]:
    D = []

    def law(id, arity, group, required=True):
        def wrap(fn):
            D.append(Diagram(id, arity, fn, group, required))
            return fn
        return wrap

    # symmetric monoidal structure
    @law("alpha-iso", 3, "monoidal")
    def _(M, a, b, c):
        return _c(M, M.alpha(a, b, c), M.alpha_inv(a, b, c)), M.id(Tensor(a, Tensor(b, c)))

    @law("unit-iso", 1, "monoidal")
    def _(M, a):
        lhs = M.tensor(_c(M, M.lam(a), M.lam_inv(a)), _c(M, M.rho(a), M.rho_inv(a)))
        return lhs, M.id(Tensor(Tensor(UNIT, a), Tensor(a, UNIT)))

    @law("pentagon", 4, "monoidal")
    def _(M, a, b, c, d):
        i = M.id
        lhs = _c(M, M.alpha(a, b, Tensor(c, d)), M.alpha(Tensor(a, b), c, d))
        rhs = _c(M, M.tensor(i(a), M.alpha(b, c, d)), M.alpha(a, Tensor(b, c), d),
                 M.tensor(M.alpha(a, b, c), i(d)))
        return lhs, rhs

    @law("triangle", 2, "monoidal")
    def _(M, a, b):
        lhs = _c(M, M.alpha(a, UNIT, b), M.tensor(M.rho(a), M.id(b)))
        return lhs, M.tensor(M.id(a), M.lam(b))

    @law("symmetry", 2, "monoidal")
    def _(M, a, b):
        return _c(M, M.sigma(a, b), M.sigma(b, a)), M.id(Tensor(a, b))

    @law("hexagon", 3, "monoidal")
    def _(M, a, b, c):
        i = M.id
        lhs = _c(M, M.alpha(a, b, c), M.sigma(Tensor(a, b), c), M.alpha(c, a, b))
        rhs = _c(M, M.tensor(i(a), M.sigma(b, c)), M.alpha(a, c, b), M.tensor(M.sigma(a, c), i(b)))
        return lhs, rhs

    # comonad
    @law("comonad-counit-left", 1, "comonad")
    def _(M, a):
        return _c(M, M.delta(a), M.eps(L(a))), M.id(L(a))

    @law("comonad-counit-right", 1, "comonad")
    def _(M, a):
        return _c(M, M.delta(a), M.fmap_L(M.eps(a))), M.id(L(a))

    @law("comonad-coassoc", 1, "comonad")
    def _(M, a):
        return _c(M, M.delta(a), M.delta(L(a))), _c(M, M.delta(a), M.fmap_L(M.delta(a)))

    @law("eps-natural", 2, "comonad")
    def _(M, a, b):
        return _c(M, M.fmap_L(M.sigma(a, b)), M.eps(Tensor(b, a))), _c(M, M.eps(Tensor(a, b)), M.sigma(a, b))

    @law("delta-natural", 2, "comonad")
    def _(M, a, b):
        s = M.sigma(a, b)
        lhs = _c(M, M.fmap_L(s), M.delta(Tensor(b, a)))
        return lhs, _c(M, M.delta(Tensor(a, b)), M.fmap_L(M.fmap_L(s)))

    @law("delta-iso", 1, "idempotence")
    def _(M, a):
        la, lla = L(a), L(a, 2)
        lhs = M.tensor(_c(M, M.delta(a), M.delta_inv(a)), _c(M, M.delta_inv(a), M.delta(a)))
        return lhs, M.id(Tensor(la, lla))

    @law("m-iso", 2, "strong-monoidal")
    def _(M, a, b):
        src = Tensor(L(a), L(b))
        lhs = M.tensor(_c(M, M.m(a, b), M.m_inv(a, b)), _c(M, M.m_inv(a, b), M.m(a, b)))
        return lhs, M.id(Tensor(src, L(Tensor(a, b))))

    @law("m-unit-iso", 0, "strong-monoidal")
    def _(M):
        lhs = M.tensor(_c(M, M.m_unit(), M.m_unit_inv()), _c(M, M.m_unit_inv(), M.m_unit()))
        return lhs, M.id(Tensor(UNIT, L(UNIT)))

    @law("eps-monoidal", 2, "monoidal-comonad")
    def _(M, a, b):
        return _c(M, M.m(a, b), M.eps(Tensor(a, b))), M.tensor(M.eps(a), M.eps(b))

    @law("delta-monoidal", 2, "monoidal-comonad")
    def _(M, a, b):
        lhs = _c(M, M.m(a, b), M.delta(Tensor(a, b)))
        rhs = _c(M, M.tensor(M.delta(a), M.delta(b)), M.m(L(a), L(b)), M.fmap_L(M.m(a, b)))
        return lhs, rhs

    @law("m-assoc", 3, "monoidal-comonad")
    def _(M, a, b, c):
        lhs = _c(M, M.tensor(M.id(L(a)), M.m(b, c)), M.m(a, Tensor(b, c)), M.fmap_L(M.alpha(a, b, c)))
        rhs = _c(M, M.alpha(L(a), L(b), L(c)), M.tensor(M.m(a, b), M.id(L(c))), M.m(Tensor(a, b), c))
        return lhs, rhs

    @law("m-unit", 1, "monoidal-comonad")
    def _(M, a):
        lhs = _c(M, M.tensor(M.m_unit(), M.id(L(a))), M.m(UNIT, a), M.fmap_L(M.lam(a)))
        return lhs, M.lam(L(a))

    # comonoid
    @law("comonoid-comm", 1, "comonoid")
    def _(M, a):
        return _c(M, M.d(a), M.sigma(L(a), L(a))), M.d(a)

    @law("comonoid-assoc", 1, "comonoid")
    def _(M, a):
        la = L(a)
        lhs = _c(M, M.d(a), M.tensor(M.id(la), M.d(a)), M.alpha(la, la, la))
        return lhs, _c(M, M.d(a), M.tensor(M.d(a), M.id(la)))

    @law("comonoid-counit", 1, "comonoid")
    def _(M, a):
        return _c(M, M.d(a), M.tensor(M.e(a), M.id(L(a))), M.lam(L(a))), M.id(L(a))

    # linear exponential comonad
    @law("lec-d-monoidal", 2, "linear-exponential")
    def _(M, a, b):
        la, lb = L(a), L(b)
        lhs = _c(M, M.m(a, b), M.d(Tensor(a, b)))
        rhs = _c(M, M.tensor(M.d(a), M.d(b)), _interchange(M, la, la, lb, lb),
                 M.tensor(M.m(a, b), M.m(a, b)))
        return lhs, rhs

    @law("lec-d-unit", 0, "linear-exponential")
    def _(M):
        return _c(M, M.m_unit(), M.d(UNIT)), _c(M, M.lam_inv(UNIT), M.tensor(M.m_unit(), M.m_unit()))

    @law("lec-e-monoidal", 2, "linear-exponential")
    def _(M, a, b):
        return _c(M, M.m(a, b), M.e(Tensor(a, b))), _c(M, M.tensor(M.e(a), M.e(b)), M.lam(UNIT))

    @law("lec-e-unit", 0, "linear-exponential")
    def _(M):
        return _c(M, M.m_unit(), M.e(UNIT)), M.id(UNIT)

    @law("lec-d-coalgebra", 1, "linear-exponential")
    def _(M, a):
        la = L(a)
        lhs = _c(M, M.d(a), M.tensor(M.delta(a), M.delta(a)), M.m(la, la))
        return lhs, _c(M, M.delta(a), M.fmap_L(M.d(a)))

    @law("lec-e-coalgebra", 1, "linear-exponential")
    def _(M, a):
        return _c(M, M.e(a), M.m_unit()), _c(M, M.delta(a), M.fmap_L(M.e(a)))

    @law("lec-delta-d", 1, "linear-exponential")
    def _(M, a):
        return _c(M, M.delta(a), M.d(L(a))), _c(M, M.d(a), M.tensor(M.delta(a), M.delta(a)))

    @law("lec-delta-e", 1, "linear-exponential")
    def _(M, a):
        return _c(M, M.delta(a), M.e(L(a))), M.e(a)

    # monad
    @law("monad-assoc", 1, "monad")
    def _(M, a):
        return _c(M, M.fmap_T(M.mu(a)), M.mu(a)), _c(M, M.mu(T(a)), M.mu(a))

    @law("monad-unit-left", 1, "monad")
    def _(M, a):
        return _c(M, M.eta(T(a)), M.mu(a)), M.id(T(a))

    @law("monad-unit-right", 1, "monad")
    def _(M, a):
        return _c(M, M.fmap_T(M.eta(a)), M.mu(a)), M.id(T(a))

    # strength
    @law("strength-unit", 1, "strength")
    def _(M, a):
        return _c(M, M.t(UNIT, a), M.fmap_T(M.lam(a))), M.lam(T(a))

    @law("strength-assoc", 3, "strength")
    def _(M, a, b, c):
        lhs = _c(M, M.t(Tensor(a, b), c), M.fmap_T(M.alpha_inv(a, b, c)))
        rhs = _c(M, M.alpha_inv(a, b, T(c)), M.tensor(M.id(a), M.t(b, c)), M.t(a, Tensor(b, c)))
        return lhs, rhs

    @law("strength-eta", 2, "strength")
    def _(M, a, b):
        return _c(M, M.tensor(M.id(a), M.eta(b)), M.t(a, b)), M.eta(Tensor(a, b))

    @law("strength-mu", 2, "strength")
    def _(M, a, b):
        lhs = _c(M, M.tensor(M.id(a), M.mu(b)), M.t(a, b))
        rhs = _c(M, M.t(a, T(b)), M.fmap_T(M.t(a, b)), M.mu(Tensor(a, b)))
        return lhs, rhs

    @law("strength-natural", 3, "strength")
    def _(M, a, b, c):
        s = M.sigma(a, b)
        lhs = _c(M, M.tensor(s, M.id(T(c))), M.t(Tensor(b, a), c))
        return lhs, _c(M, M.t(Tensor(a, b), c), M.fmap_T(M.tensor(s, M.id(c))))

    @law("psi-commutative", 2, "strength", required=False)
    def _(M, a, b):
        return M.psi1(a, b), M.psi2(a, b)

    # Kleisli exponential
    @law("phi-iso-left", 2, "exponential")
    def _(M, a, b):
        g = M.eta(Tensor(a, b))
        return M.phi(M.phi_inv(g, b)), g

    @law("phi-iso-right", 2, "exponential")
    def _(M, a, b):
        return M.phi_inv(M.app(a, b), a), M.id(_arrow(a, b))

    @law("phi-natural", 2, "exponential")
    def _(M, a, b):
        f = M.phi_inv(M.eta(Tensor(a, b)), b)
        lhs = M.phi(_c(M, M.eps(a), f))
        return lhs, _c(M, M.tensor(M.eps(a), M.id(b)), M.phi(f))

    @law("phi-app", 2, "exponential")
    def _(M, a, b):
        return M.phi(M.id(_arrow(a, b))), M.app(a, b)

    return D


def _arrow(a: Type, b: Type) -> Type:
    return Arrow(a, b)


DIAGRAMS = _diagrams()


@dataclass
class LawEntry:
    diagram: str
    objects: tuple
    verdict: str
    required: bool = True
    trace: Optional[object] = None

    def to_json(self) -> dict:
        out = {"diagram": self.diagram, "objects": list(self.objects), "verdict": self.verdict,
               "required": self.required}
        if self.trace is not None:
            out["trace"] = self.trace
        return out


@dataclass
class LawReport:
    model: str
    entries: list = field(default_factory=list)

    def failures(self) -> list:
        return [e for e in self.entries if e.required and e.verdict != "equal"]

    def all_pass(self) -> bool:
        return not self.failures()

    def failed_diagrams(self) -> set:
        return {e.diagram for e in self.failures()}

    def to_json(self) -> dict:
        return {"model": self.model, "all_pass": self.all_pass(), "checked": len(self.entries),
                "failures": len(self.failures()), "entries": [e.to_json() for e in self.entries]}


def default_objects(model: Model, max_size: int = 3) -> list:
    """Sample objects: small types for the syntactic model, small sets for the finite one."""
    if model.name == "finset":
        return [UNIT, TConst("s1"), TConst("s2"), TConst("s3")]
    return list(all_types(max_size, constants=("a",), unit=True))


def _tuples(objects: Sequence[Type], arity: int, limit: Optional[int], rng: random.Random):
    combos = list(itertools.product(objects, repeat=arity))
    if limit is not None and len(combos) > limit:
        combos = rng.sample(combos, limit)
    return combos


def check_laws(model: Model, objects: Optional[Iterable[Type]] = None, limit: Optional[int] = None,
               seed: int = 0, diagrams: Optional[Iterable[str]] = None,
               optional_limit: Optional[int] = None) -> LawReport:
    """Check every diagram on object tuples drawn from ``objects``.

    ``limit`` caps the number of tuples per diagram (sampled with ``seed``);
    ``optional_limit`` does the same for the informational diagrams, whose
    failures do not count against the report.
    """
    objs = list(objects) if objects is not None else default_objects(model)
    wanted = set(diagrams) if diagrams is not None else None
    rng = random.Random(seed)
    report = LawReport(model.name)
    for dg in DIAGRAMS:
        if wanted is not None and dg.id not in wanted:
            continue
        cap = limit if dg.required or optional_limit is None else optional_limit
        for tup in _tuples(objs, dg.arity, cap, rng):
            shown = tuple(show(o) for o in tup)
            try:
                lhs, rhs = dg.sides(model, *tup)
                verdict = model.equal(lhs, rhs)
                trace = _trace(model, lhs, rhs, verdict)
            except Exception as exc:  # a broken model may not even build the diagram
                verdict, trace = "error", f"{type(exc).__name__}: {exc}"
            report.entries.append(LawEntry(dg.id, shown, verdict, dg.required, trace))
    return report


def _trace(model, lhs, rhs, verdict):
    if verdict == "equal" and model.name == "finset":
        return None
    if model.name == "finset":
        cx = model.counterexample(lhs, rhs)
        return None if cx is None else {"input": repr(cx[0]), "lhs": repr(cx[1]), "rhs": repr(cx[2])}
    v = getattr(model, "last_verdict", None)
    return None if v is None else v.to_json().get("trace")


# ---------------------------------------------------------------- mutations


def _first(model, a):
    return model.carrier(a)[0]


def _mut_sigma_identity(base):
    orig = base.sigma

    def sigma(a, b):
        return base.id(Tensor(a, b)) if a == b else orig(a, b)
    return {"sigma": sigma}


def _mut_d_constant(base):
    def d(a):
        c = _first(base, a)
        return base._arr(L(a), Tensor(L(a), L(a)), lambda x: (x, c))
    return {"d": d}


def _mut_eta_noise(base):
    def eta(a):
        support = base.carrier(a)
        return base._arr(a, T(a), lambda x: base._thunk(lambda: Dist.uniform(support)))
    return {"eta": eta}


def _mut_strength_forget(base):
    def t(a, b):
        c = _first(base, a)
        return base._arr(Tensor(a, T(b)), T(Tensor(a, b)),
                         lambda p: base._thunk(lambda: p[1](()).map(lambda y: (c, y))))
    return {"t": t}


def _mut_mu_first(base):
    def mu(a):
        def run(k):
            inner = next(iter(k(()).items))
            return base._thunk(lambda: inner(()))
        return base._arr(T(T(a)), T(a), run)
    return {"mu": mu}


def _mut_d_swapped(base):
    orig = base.d

    def d(a):
        return base.compose(orig(a), base.sigma(L(a), L(a)))
    return {"d": d}


#: name -> (factory, expected to be caught)
MUTATIONS = {
    "sigma-identity": (_mut_sigma_identity, True),
    "d-constant": (_mut_d_constant, True),
    "eta-noise": (_mut_eta_noise, True),
    "strength-forget": (_mut_strength_forget, True),
    "mu-first": (_mut_mu_first, True),
    "d-swapped": (_mut_d_swapped, False),
}


def mutate(model: Model, name: str) -> Model:
    """A copy of ``model`` with one structure map corrupted."""
    factory, _ = MUTATIONS[name]
    clone = object.__new__(type(model))
    clone.__dict__.update(model.__dict__)
    for attr, fn in factory(model).items():
        setattr(clone, attr, fn)
    clone.name = model.name
    return clone
