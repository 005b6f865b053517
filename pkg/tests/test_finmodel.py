from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from yaqbench.category.base import L, T
from yaqbench.category.finmodel import Dist, FinModel, Uninterpretable, finmodel
from yaqbench.syntax import UNIT, Arrow, Tensor, TConst

BIT = TConst("bit")


def dists(support=range(4)):
    weights = st.lists(st.integers(0, 5), min_size=len(support), max_size=len(support))
    return weights.filter(any).map(
        lambda ws: Dist({x: Fraction(w, sum(ws)) for x, w in zip(support, ws)}))


kleisli = st.lists(dists(), min_size=4, max_size=4).map(lambda ds: ds.__getitem__)


def test_dist_validation():
    with pytest.raises(ValueError):
        Dist({0: Fraction(1, 2)})
    with pytest.raises(ValueError):
        Dist({0: Fraction(3, 2), 1: Fraction(-1, 2)})
    assert Dist({0: Fraction(1, 2), 1: Fraction(1, 2), 2: 0}).items == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_dist_merges_duplicates_exactly():
    d = Dist.uniform([0, 1, 2]).map(lambda x: x % 2)
    assert d == Dist({0: Fraction(2, 3), 1: Fraction(1, 3)})
    assert sum(d.items.values()) == 1


@given(dists(), kleisli, kleisli)
def test_monad_laws(m, f, g):
    assert m.bind(Dist.point) == m
    assert Dist.point(2).bind(f) == f(2)
    assert m.bind(f).bind(g) == m.bind(lambda x: f(x).bind(g))


@given(dists(), dists())
def test_commutative(m, n):
    lhs = m.bind(lambda x: n.map(lambda y: (x, y)))
    rhs = n.bind(lambda y: m.map(lambda x: (x, y)))
    assert lhs == rhs


@given(dists())
def test_exact_total(m):
    assert sum(m.items.values()) == 1
    assert all(isinstance(p, Fraction) and p > 0 for p in m.items.values())


def test_comonad_is_identity():
    M = finmodel()
    for f in (M.eps(BIT), M.delta(BIT), M.m(BIT, BIT), M.m_unit()):
        assert [a for a, _ in M.table(f)] == [b for _, b in M.table(f)]
    assert M.carrier(L(BIT)) == M.carrier(BIT) == [0, 1]


def test_eta_is_point_distribution():
    M = finmodel()
    assert M.eta(BIT)(0)(()) == Dist.point(0)


def test_strength_pairs_through_the_distribution():
    M = finmodel()
    t = M.t(TConst("s1"), BIT)
    coin = M.constants["coin"]()
    assert t((0, coin))(()) == Dist({(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)})


def test_diagonal_and_discard():
    M = finmodel()
    assert M.d(BIT)(1) == (1, 1)
    assert M.e(BIT)(1) == ()


def test_carriers():
    M = FinModel({"s4": [0, 1, 2, 3]})
    assert len(M.carrier(Tensor(TConst("s4"), BIT))) == 8
    assert M.carrier(UNIT) == [()]
    fns = M.carrier(Arrow(BIT, BIT))
    assert len(set(fns)) == len(fns)
    assert all(len(f.table()) == 2 for f in fns)


def test_qbit_is_uninterpretable():
    with pytest.raises(Uninterpretable):
        finmodel().carrier(TConst("qbit"))


def test_equal_and_counterexample():
    M = finmodel()
    sw = M.sigma(BIT, BIT)
    assert M.equal(M.compose(sw, sw), M.id(Tensor(BIT, BIT))) == "equal"
    assert M.equal(sw, M.id(Tensor(BIT, BIT))) == "distinct"
    x, fx, gx = M.counterexample(sw, M.id(Tensor(BIT, BIT)))
    assert fx != gx and x in [(0, 1), (1, 0)]


def test_phi_roundtrip():
    M = finmodel()
    f = M.sigma(BIT, BIT)
    g = M.compose(f, M.eta(Tensor(BIT, BIT)))
    assert M.equal(M.phi(M.phi_inv(g, BIT)), g) == "equal"
    assert M.cod(M.phi_inv(g, BIT)) == Arrow(BIT, Tensor(BIT, BIT))
    assert M.dom(M.mu(BIT)) == T(T(BIT))
