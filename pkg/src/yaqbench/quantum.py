"""Call-by-value evaluation of quantum programs over a statevector.

Qubit ``i`` is axis ``i`` of the state reshaped to ``(2,) * k``; ``new``
appends an axis.  Functions are evaluated before their arguments and the
left component of a pair before the right one.  Measurement either
splits the run into both weighted branches (exhaustive mode) or picks
one branch with a seeded generator (sampling mode).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .syntax import (
    App, Arrow, Const, If, Lam, LetPair, LetUnit, Pair, Star, Tensor, Term, Type,
    Var, bang, erase, is_pure,
)
from .elaborate import infer
from .typecheck import DEFAULT_SIGNATURE, QBIT, Derivation, Judgment, check

__all__ = [
    "Gate", "GateTable", "DEFAULT_GATES", "load_gate_table", "quantum_signature",
    "QuantumError", "QubitBudgetExceeded", "StuckTerm", "OutcomeDistribution",
    "run_distribution", "run_sample", "evaluate",
]

_R2 = 1 / math.sqrt(2)


class QuantumError(RuntimeError):
    pass


class QubitBudgetExceeded(QuantumError):
    pass


class StuckTerm(QuantumError):
    pass


@dataclass(frozen=True)
class Gate:
    name: str
    arity: int
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        dim = 2 ** self.arity
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"gate {self.name}: expected a {dim}x{dim} matrix")
        if not np.allclose(self.matrix.conj().T @ self.matrix, np.eye(dim), atol=1e-9):
            raise ValueError(f"gate {self.name} is not unitary")

    @property
    def type(self) -> Type:
        q = QBIT
        for _ in range(self.arity - 1):
            q = Tensor(QBIT, q)
        return bang(Arrow(q, q))


GateTable = dict


def _gate(name, arity, rows):
    return Gate(name, arity, np.array(rows, dtype=complex))


DEFAULT_GATES: GateTable = {
    g.name: g for g in [
        _gate("H", 1, [[_R2, _R2], [_R2, -_R2]]),
        _gate("X", 1, [[0, 1], [1, 0]]),
        _gate("Y", 1, [[0, -1j], [1j, 0]]),
        _gate("Z", 1, [[1, 0], [0, -1]]),
        _gate("S", 1, [[1, 0], [0, 1j]]),
        _gate("T", 1, [[1, 0], [0, complex(_R2, _R2)]]),
        _gate("CNOT", 2, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    ]
}


def load_gate_table(path: str, base: Optional[GateTable] = None) -> GateTable:
    """Read a JSON gate table: ``{"gates": [{"name", "arity", "matrix"}]}``.

    ``matrix`` is row-major; entries are numbers or strings such as ``"0.5-0.5j"``.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    table = dict(DEFAULT_GATES if base is None else base)
    for g in data.get("gates", []):
        n = int(g["arity"])
        flat = [complex(x) for x in g["matrix"]]
        dim = 2 ** n
        if len(flat) != dim * dim:
            raise ValueError(f"gate {g['name']}: expected {dim * dim} entries, got {len(flat)}")
        table[g["name"]] = Gate(g["name"], n, np.array(flat, dtype=complex).reshape(dim, dim))
    return table


def quantum_signature(gates: Optional[GateTable] = None) -> dict:
    sig = {k: v for k, v in DEFAULT_SIGNATURE.items() if k not in DEFAULT_GATES}
    for g in (gates or DEFAULT_GATES).values():
        sig[g.name] = g.type
    return sig


# ---------------------------------------------------------------- runtime values


@dataclass(frozen=True)
class _Bit:
    b: int


@dataclass(frozen=True)
class _Wire:
    i: int


@dataclass(frozen=True)
class _UnitVal:
    pass


@dataclass(frozen=True)
class _PairVal:
    left: object
    right: object


@dataclass(frozen=True)
class _Closure:
    var: str
    body: Term
    env: tuple


@dataclass(frozen=True)
class _Prim:
    name: str


def render(v) -> str:
    if isinstance(v, _Bit):
        return str(v.b)
    if isinstance(v, _UnitVal):
        return "*"
    if isinstance(v, _PairVal):
        return f"<{render(v.left)}, {render(v.right)}>"
    if isinstance(v, _Wire):
        return f"qbit#{v.i}"
    if isinstance(v, _Prim):
        return v.name
    return "<fun>"


class _Machine:
    def __init__(self, gates: GateTable, max_qubits: int, rng: Optional[np.random.Generator]):
        self.gates = gates
        self.max_qubits = max_qubits
        self.rng = rng

    # each run is (weight, value, state)
    def eval(self, t: Term, env: dict, w: float, st: np.ndarray) -> list:
        if isinstance(t, Var):
            if t.name not in env:
                raise StuckTerm(f"free variable {t.name}")
            return [(w, env[t.name], st)]
        if isinstance(t, Const):
            if t.name in ("0", "1"):
                return [(w, _Bit(int(t.name)), st)]
            return [(w, _Prim(t.name), st)]
        if isinstance(t, Star):
            return [(w, _UnitVal(), st)]
        if isinstance(t, Lam):
            return [(w, _Closure(t.var, t.body, tuple(env.items())), st)]
        if isinstance(t, App):
            out = []
            for w1, f, s1 in self.eval(t.fn, env, w, st):
                for w2, a, s2 in self.eval(t.arg, env, w1, s1):
                    out.extend(self.apply(f, a, w2, s2))
            return out
        if isinstance(t, Pair):
            out = []
            for w1, l, s1 in self.eval(t.left, env, w, st):
                for w2, r, s2 in self.eval(t.right, env, w1, s1):
                    out.append((w2, _PairVal(l, r), s2))
            return out
        if isinstance(t, LetPair):
            out = []
            for w1, v, s1 in self.eval(t.subject, env, w, st):
                if not isinstance(v, _PairVal):
                    raise StuckTerm(f"let-pair on {render(v)}")
                inner = dict(env)
                inner[t.x], inner[t.y] = v.left, v.right
                out.extend(self.eval(t.body, inner, w1, s1))
            return out
        if isinstance(t, LetUnit):
            out = []
            for w1, v, s1 in self.eval(t.subject, env, w, st):
                if not isinstance(v, _UnitVal):
                    raise StuckTerm(f"let * on {render(v)}")
                out.extend(self.eval(t.body, env, w1, s1))
            return out
        if isinstance(t, If):
            out = []
            for w1, v, s1 in self.eval(t.cond, env, w, st):
                if not isinstance(v, _Bit):
                    raise StuckTerm(f"if on {render(v)}")
                branch = t.then if v.b == 1 else t.else_
                out.extend(self.eval(branch, env, w1, s1))
            return out
        raise StuckTerm(f"cannot evaluate {type(t).__name__}")

    def apply(self, f, a, w: float, st: np.ndarray) -> list:
        if isinstance(f, _Closure):
            env = dict(f.env)
            env[f.var] = a
            return self.eval(f.body, env, w, st)
        if not isinstance(f, _Prim):
            raise StuckTerm(f"application of {render(f)}")
        name = f.name
        if name == "new":
            if not isinstance(a, _Bit):
                raise StuckTerm("new expects a bit")
            k = _nqubits(st)
            if k + 1 > self.max_qubits:
                raise QubitBudgetExceeded(f"more than {self.max_qubits} qubits")
            ket = np.zeros(2, dtype=complex)
            ket[a.b] = 1
            return [(w, _Wire(k), np.kron(st, ket))]
        if name == "meas":
            if not isinstance(a, _Wire):
                raise QuantumError(f"measurement of non-qubit {render(a)}")
            return self.measure(a.i, w, st)
        if name == "coin":
            if self.rng is not None:
                return [(w, _Bit(int(self.rng.integers(2))), st)]
            return [(w / 2, _Bit(0), st), (w / 2, _Bit(1), st)]
        if name in self.gates:
            g = self.gates[name]
            wires = _flatten(a, g.arity)
            return [(w, a, _apply_gate(st, g.matrix, wires))]
        raise StuckTerm(f"unknown primitive {name}")

    def measure(self, i: int, w: float, st: np.ndarray) -> list:
        k = _nqubits(st)
        psi = st.reshape((2,) * k)
        branches = []
        for b in (0, 1):
            proj = np.zeros_like(psi)
            idx = [slice(None)] * k
            idx[i] = b
            proj[tuple(idx)] = psi[tuple(idx)]
            p = float(np.vdot(proj, proj).real)
            branches.append((b, p, proj.reshape(-1)))
        if self.rng is not None:
            p0 = branches[0][1]
            b = 0 if self.rng.random() < p0 else 1
            _, p, vec = branches[b]
            return [(w, _Bit(b), vec / math.sqrt(p))]
        out = []
        for b, p, vec in branches:
            if p > 1e-15:
                out.append((w * p, _Bit(b), vec / math.sqrt(p)))
        return out


def _nqubits(st: np.ndarray) -> int:
    return int(st.size).bit_length() - 1


def _flatten(v, n: int) -> list:
    """Wires of a right-nested tuple of ``n`` qubits."""
    if n == 1:
        if not isinstance(v, _Wire):
            raise QuantumError(f"gate argument {render(v)} is not a qubit")
        return [v.i]
    if not isinstance(v, _PairVal):
        raise QuantumError(f"gate argument {render(v)} is not a pair")
    out = _flatten(v.left, 1) + _flatten(v.right, n - 1)
    if len(set(out)) != len(out):
        raise QuantumError("gate applied to the same qubit twice")
    return out


def _apply_gate(st: np.ndarray, u: np.ndarray, wires: Sequence[int]) -> np.ndarray:
    k = _nqubits(st)
    n = len(wires)
    psi = st.reshape((2,) * k)
    psi = np.moveaxis(psi, list(wires), list(range(n)))
    shape = psi.shape
    psi = (u @ psi.reshape(2 ** n, -1)).reshape(shape)
    psi = np.moveaxis(psi, list(range(n)), list(wires))
    out = psi.reshape(-1)
    norm = float(np.vdot(out, out).real)
    if abs(norm - 1) > 1e-9:
        raise QuantumError(f"norm drifted to {norm}")
    return out


# ---------------------------------------------------------------- entry points


@dataclass
class OutcomeDistribution:
    probs: dict  # rendered value -> Fraction or float

    def total(self) -> float:
        return float(sum(float(p) for p in self.probs.values()))

    def get(self, key: str) -> float:
        return float(self.probs.get(key, 0))

    def to_json(self) -> dict:
        return {"kind": "distribution",
                "outcomes": [{"value": k, "probability": _num(p)} for k, p in sorted(self.probs.items())]}


def _num(p):
    if isinstance(p, Fraction):
        return str(p) if p.denominator != 1 else str(p.numerator)
    return round(p, 12)


def _exact(p: float):
    """A dyadic fraction when ``p`` is one up to rounding, else ``p`` itself."""
    f = Fraction(p).limit_denominator(1 << 20)
    d = f.denominator
    if abs(float(f) - p) < 1e-12 and d & (d - 1) == 0:
        return f
    return p


def _prepare(j, signature, gates):
    sig = signature or quantum_signature(gates)
    if isinstance(j, Derivation):
        return j
    if is_pure(j.term):
        return infer(list(j.ctx), j.term, j.ty, signature=sig).derivation
    return check(j, sig)


def evaluate(j, gates: Optional[GateTable] = None, max_qubits: int = 12,
             rng: Optional[np.random.Generator] = None, signature=None) -> list:
    """Type check ``j`` and return its runs as ``(weight, value, state)`` triples."""
    gates = gates or DEFAULT_GATES
    d = _prepare(j, signature, gates)
    if d.ctx:
        raise QuantumError("programs must be closed")
    m = _Machine(gates, max_qubits, rng)
    return m.eval(erase(d.term), {}, 1.0, np.ones(1, dtype=complex))


def run_distribution(j, gates: Optional[GateTable] = None, max_qubits: int = 12,
                     signature=None) -> OutcomeDistribution:
    acc: dict[str, float] = {}
    for w, v, _ in evaluate(j, gates, max_qubits, None, signature):
        key = render(v)
        acc[key] = acc.get(key, 0.0) + w
    total = sum(acc.values())
    if abs(total - 1) > 1e-9:
        raise QuantumError(f"branch weights sum to {total}")
    return OutcomeDistribution({k: _exact(p) for k, p in acc.items()})


def run_sample(j, shots: int, seed: int = 0, gates: Optional[GateTable] = None,
               max_qubits: int = 12, signature=None) -> dict:
    """A histogram of ``shots`` independent runs; reproducible for a given seed."""
    gates = gates or DEFAULT_GATES
    d = _prepare(j, signature, gates)
    rng = np.random.default_rng(seed)
    counts: Counter = Counter()
    for _ in range(shots):
        ((_, v, _),) = evaluate(d, gates, max_qubits, rng)
        counts[render(v)] += 1
    return dict(sorted(counts.items()))
