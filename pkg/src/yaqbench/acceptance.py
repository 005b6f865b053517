"""The acceptance criteria as runnable suites.

Each ``criterion_N`` returns a :class:`CriterionResult` with the counts it
looked at, the failures it found and its wall time.  ``SUITES`` maps a
short suite name to its function; the ``corpus`` subcommand and the test
suite both run them from here.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .axioms import ASSIGNMENTS, all_instances
from .category.finmodel import FinModel
from .category.laws import MUTATIONS, check_laws, default_objects, mutate
from .category.yaq import YAQ
from .corpus import packed_judgments, pure_terms, typing_golden
from .elaborate import infer, infer_all
from .equivalence import ax_equal
from .quantum import run_distribution, run_sample
from .semantics import completeness_case, interpret, soundness_case, substitution_case
from .subtyping import all_types, is_subtype, subtype_oracle
from .syntax import App, Arrow, Bang, Lam, Pair, Star, Tensor, Unit, Var, fresh, fv, is_value, parse_term, parse_type, show
from .typecheck import Judgment, check, replay

__all__ = ["CriterionResult", "SUITES", "run_suites"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.detail.items())
        return f"[{mark}] {self.number:>2} {self.name}: checked={self.checked} failures={len(self.failures)}{extra} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "checked": self.checked, "failures": [str(f) for f in self.failures],
                "seconds": round(self.seconds, 3), "detail": self.detail}


def _timed(number: int, name: str):
    def wrap(fn: Callable[..., CriterionResult]):
        def run(**kw) -> CriterionResult:
            t0 = time.perf_counter()
            r = fn(**kw)
            r.number, r.name, r.seconds = number, name, time.perf_counter() - t0
            limit = r.detail.pop("time_limit", None)
            if limit is not None and r.seconds >= limit:
                r.passed = False
                r.failures.append(f"runtime {r.seconds:.1f}s exceeds {limit}s")
            return r
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _result(checked: int, failures: list, need: int = 0, **detail) -> CriterionResult:
    ok = not failures and checked >= need
    if checked < need:
        failures = failures + [f"only {checked} instances, need {need}"]
    return CriterionResult(0, "", ok, checked, failures, 0.0, detail)


# ---------------------------------------------------------------- 1


@_timed(1, "subtyping agrees with the derivation oracle")
def criterion_1(max_size: int = 6) -> CriterionResult:
    ts = all_types(max_size, constants=("a",), unit=True)
    bad = [(show(a), show(b)) for a in ts for b in ts if is_subtype(a, b) != subtype_oracle(a, b)]
    return _result(len(ts) ** 2, bad, types=len(ts), time_limit=10)


# ---------------------------------------------------------------- 2


@_timed(2, "golden typing corpus")
def criterion_2() -> CriterionResult:
    bad = []
    for case in typing_golden():
        try:
            if case.mode == "check":
                d = check(Judgment(case.ctx, case.term, case.ty))
            else:
                d = infer(case.ctx, case.term, case.ty).derivation
            replay(d)
            got = "accept"
        except Exception as exc:  # the verdict is the exception class
            got = type(exc).__name__
        if got != case.expected:
            bad.append(f"{case.text}: expected {case.expected}, got {got}")
    return _result(len(typing_golden()), bad, need=30)


# ---------------------------------------------------------------- 3 and 7


def indexation_pairs(k: int = 5):
    """All pairs of distinct indexations of every corpus term."""
    for case in pure_terms():
        rs = infer_all(case.ctx, case.term, case.ty, k)
        for a, b in itertools.combinations(rs, 2):
            yield case, a.derivation, b.derivation


@_timed(3, "indexations of a pure term are equal")
def criterion_3(k: int = 5) -> CriterionResult:
    bad, pairs = [], 0
    for case, d1, d2 in indexation_pairs(k):
        pairs += 1
        v = ax_equal(d1, d2)
        if v.status != "equal":
            bad.append(f"{case.text}: {show(d1.term)} vs {show(d2.term)} -> {v.status}")
    return _result(len(pure_terms()), bad, need=100, pairs=pairs, time_limit=300)


# ---------------------------------------------------------------- 4


@_timed(4, "axiom rows decided equal")
def criterion_4() -> CriterionResult:
    bad, n = [], 0
    for ins in all_instances():
        n += 1
        for a, b in ((ins.left, ins.right), (ins.right, ins.left)):
            v = ax_equal(a, b)
            if v.status != "equal":
                bad.append(f"{ins.describe()}: {v.status}")
    return _result(n, bad, need=3, assignments=len(ASSIGNMENTS))


# ---------------------------------------------------------------- 5


@_timed(5, "categorical laws and mutations")
def criterion_5(yaq_limit: Optional[int] = None) -> CriterionResult:
    bad = []
    fin = check_laws(FinModel())
    bad += [f"finset {e.diagram}{e.objects}: {e.verdict}" for e in fin.failures()]
    yaq = check_laws(YAQ(), limit=yaq_limit, optional_limit=1)
    bad += [f"yaq {e.diagram}{e.objects}: {e.verdict}" for e in yaq.failures()]
    caught = 0
    for name, (_, should_fail) in MUTATIONS.items():
        r = check_laws(mutate(FinModel(), name))
        if r.all_pass() == should_fail:
            bad.append(f"mutation {name}: {'not caught' if should_fail else 'spuriously caught'}")
        caught += should_fail and not r.all_pass()
    if caught < 5:
        bad.append(f"only {caught} mutations caught")
    return _result(len(fin.entries) + len(yaq.entries), bad,
                   finset=len(fin.entries), yaq=len(yaq.entries), mutations_caught=caught)


# ---------------------------------------------------------------- 6


@_timed(6, "coherence of coercions")
def criterion_6(max_size: int = 4, draws: int = 10, seed: int = 0) -> CriterionResult:
    ts = all_types(max_size, constants=("a",), unit=True)
    pairs = [(a, b) for a in ts for b in ts if is_subtype(a, b)]
    rng = random.Random(seed)
    bad = []
    for model in (FinModel(), YAQ()):
        for a, b in pairs:
            arrows = [model.coerce(a, b, rng) for _ in range(draws)]
            # equality is an equivalence, so comparing with the first draw covers every pair
            for f in arrows[1:]:
                if model.equal(arrows[0], f) != "equal":
                    bad.append(f"{model.name} {show(a)} <: {show(b)}")
                    break
    return _result(len(pairs), bad, draws=draws)


# ---------------------------------------------------------------- 7


@_timed(7, "soundness of the interpretation")
def criterion_7(k: int = 5) -> CriterionResult:
    fin, yaq = FinModel(), YAQ()
    bad, n = [], 0
    cases = [(ins.describe(), ins.left, ins.right) for ins in all_instances()]
    cases += [(case.text, d1, d2) for case, d1, d2 in indexation_pairs(k)]
    for label, d1, d2 in cases:
        n += 1
        for model in (fin, yaq):
            v = soundness_case(d1, d2, model)
            if v != "equal":
                bad.append(f"{model.name} {label}: {v}")
    return _result(n, bad)


# ---------------------------------------------------------------- 8


@_timed(8, "completeness in the syntactic model")
def criterion_8() -> CriterionResult:
    yaq = YAQ()
    bad, values = [], 0
    ds = packed_judgments()
    for d in ds:
        kinds = ["c"] + (["v"] if is_value(d.term) else [])
        values += len(kinds) - 1
        for kind in kinds:
            v = completeness_case(d, yaq, kind)
            if v != "equal":
                bad.append(f"[{kind}] {show(d.term)}: {v}")
    return _result(len(ds), bad, need=50, values=values)


# ---------------------------------------------------------------- 9


def _qj(text: str, ty: str) -> Judgment:
    return Judgment((), parse_term(text, indexed=False), parse_type(ty))


@_timed(9, "quantum statistics")
def criterion_9(shots: int = 10_000, seed: int = 7) -> CriterionResult:
    bad = []
    one = run_distribution(_qj("meas (new 0)", "!bit")).probs
    if one != {"0": 1}:
        bad.append(f"meas (new 0): {one}")
    had = run_distribution(_qj("meas (H (new 0))", "!bit"))
    if abs(had.get("0") - 0.5) > 1e-9 or abs(had.get("1") - 0.5) > 1e-9:
        bad.append(f"meas (H (new 0)): {had.probs}")
    bell = run_distribution(_qj("let <a, b> = CNOT <H (new 0), new 0> in <meas a, meas b>", "!bit * !bit"))
    if set(bell.probs) != {"<0, 0>", "<1, 1>"} or any(abs(bell.get(k) - 0.5) > 1e-9 for k in bell.probs):
        bad.append(f"bell pair: {bell.probs}")
    hist = run_sample(_qj("meas (H (new 0))", "!bit"), shots, seed)
    sigma = (shots * 0.25) ** 0.5
    if abs(hist.get("0", 0) - shots / 2) > 3 * sigma:
        bad.append(f"sampling: {hist}")
    return _result(4, bad, histogram=hist, time_limit=30)


# ---------------------------------------------------------------- 10


def _value_of(a, avoid: set):
    """A small value of type ``a``: ``(context, pure term)``."""
    n, core = 0, a
    while isinstance(core, Bang):
        n, core = n + 1, core.inner
    w = fresh("w", avoid)
    if isinstance(core, Unit):
        return (), Star(None)
    if isinstance(core, Tensor):
        w2 = fresh("w", avoid | {w})
        wrap = lambda t: _bang(t, n)  # noqa: E731
        return ((w, wrap(core.left)), (w2, wrap(core.right))), Pair(None, Var(w), Var(w2))
    if isinstance(core, Arrow):
        y = fresh("y", avoid | {w})
        g = _bang(core, n)
        return ((w, g),), Lam(None, y, None, App(Var(w), Var(y)))
    return ((w, a),), Var(w)


def _bang(a, n):
    for _ in range(n):
        a = Bang(a)
    return a


@_timed(10, "value, substitution and placement lemmas")
def criterion_10() -> CriterionResult:
    models = (FinModel(), YAQ())
    bad = []
    counts = {"value": 0, "substitution": 0, "placement": 0}
    for case in pure_terms():
        d = infer(case.ctx, case.term, case.ty).derivation
        # value clause followed by the unit agrees with the computational clause
        if is_value(d.term):
            counts["value"] += 1
            for M in models:
                c = interpret(d, M, "c").arrow
                v = interpret(d, M, "v").arrow
                if M.equal(c, M.compose(v, M.eta(d.ty))) != "equal":
                    bad.append(f"value {M.name} {case.text}")
        # substituting a value for the last variable
        if d.ctx:
            x, a = d.ctx[-1]
            avoid = {y for y, _ in d.ctx} | fv(d.term) | {x}
            vctx, vterm = _value_of(a, avoid)
            try:
                vd = infer(vctx, vterm, a).derivation
            except Exception as exc:
                bad.append(f"substitution {case.text}: no value of {show(a)} ({exc})")
            else:
                counts["substitution"] += 1
                for M in models:
                    if substitution_case(d, x, vd, M) != "equal":
                        bad.append(f"substitution {M.name} {case.text}")
        # two placements of the shared banged variables
        j = Judgment(d.ctx, d.term, d.ty)
        d1, d2 = check(j, placement="shared"), check(j, placement="minimal")
        if _splits(d1) != _splits(d2):
            counts["placement"] += 1
            for M in models:
                if soundness_case(d1, d2, M) != "equal":
                    bad.append(f"placement {M.name} {case.text}")
    short = [k for k, c in counts.items() if c < 20]
    bad += [f"only {counts[k]} {k} instances" for k in short]
    return _result(sum(counts.values()), bad, **counts)


def _splits(d) -> tuple:
    return tuple(tuple(tuple(x for x, _ in p.ctx) for p in n.premises) for n in d.nodes())


SUITES: dict[str, Callable[..., CriterionResult]] = {
    "subtyping": criterion_1,
    "typing": criterion_2,
    "indexation": criterion_3,
    "axioms": criterion_4,
    "laws": criterion_5,
    "coherence": criterion_6,
    "soundness": criterion_7,
    "completeness": criterion_8,
    "quantum": criterion_9,
    "lemmas": criterion_10,
}


def run_suites(names=None, on_result: Optional[Callable[[CriterionResult], None]] = None) -> list:
    out = []
    for name in names or SUITES:
        r = SUITES[name]()
        if on_result:
            on_result(r)
        out.append(r)
    return out
