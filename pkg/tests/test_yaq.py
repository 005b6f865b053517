import random

import pytest

from yaqbench.category.base import NotSubtype
from yaqbench.category.finmodel import FinModel
from yaqbench.category.yaq import Morphism, yaq_structure
from yaqbench.subtyping import all_types, is_subtype
from yaqbench.syntax import Tensor, TConst, parse_term, parse_type

A, B, BIT = TConst("a"), TConst("b"), TConst("bit")


@pytest.fixture(scope="module")
def Y():
    return yaq_structure()


def test_structure_maps_are_the_listed_terms(Y):
    assert str(Y.eps(BIT)) == "x:!bit |- x:bit : bit"
    assert str(Y.delta(BIT)) == "x:!bit |- x:!!bit : !!bit"
    assert str(Y.d(BIT)) == "x:!bit |- <x:!bit, x:!bit> : !bit * !bit"
    assert str(Y.e(BIT)) == "x:!bit |- unit : top"
    assert str(Y.eta(BIT)) == "x:bit |- lam u:top. let * = u:top in x:bit : top -o bit"
    assert str(Y.m(A, B)) == "z:!a * !b |- let <x:!a, y:!b> = z:(!a * !b) in <x:!a, y:!b>^1 : !(a * b)"


def test_every_structure_map_typechecks(Y):
    maps = [Y.id(A), Y.sigma(A, B), Y.alpha(A, B, A), Y.alpha_inv(A, B, A), Y.lam(A), Y.lam_inv(A),
            Y.rho(A), Y.rho_inv(A), Y.eps(A), Y.delta(A), Y.m(A, B), Y.m_inv(A, B), Y.m_unit(),
            Y.m_unit_inv(), Y.d(A), Y.e(A), Y.eta(A), Y.mu(A), Y.t(A, B)]
    for f in maps:
        d = f.deriv
        assert (d.ctx[0][1], d.ty) == (f.dom, f.cod)


def test_symmetry_is_an_involution(Y):
    both = Y.compose(Y.sigma(A, B), Y.sigma(B, A))
    assert Y.equal(both, Y.id(Tensor(A, B))) == "equal"
    assert Y.equal(Y.sigma(A, A), Y.id(Tensor(A, A))) == "distinct"


def test_identity_laws_and_associativity(Y):
    f = Y.sigma(A, B)
    g = Y.sigma(B, A)
    h = Y.d(A)
    assert Y.equal(Y.compose(Y.id(f.dom), f), f) == "equal"
    assert Y.equal(Y.compose(f, Y.id(f.cod)), f) == "equal"
    lhs = Y.compose(Y.compose(f, g), Y.id(Tensor(A, B)))
    rhs = Y.compose(f, Y.compose(g, Y.id(Tensor(A, B))))
    assert Y.equal(lhs, rhs) == "equal"
    assert Y.equal(Y.compose(Y.d(A), Y.compose(Y.sigma(h.cod.left, h.cod.right), Y.id(h.cod))),
                   Y.compose(Y.compose(Y.d(A), Y.sigma(h.cod.left, h.cod.right)), Y.id(h.cod))) == "equal"


def test_composition_respects_equivalent_representatives(Y):
    # two indexations of the same value give the same composite
    swap = parse_type("!(a * b)")
    f1 = Morphism(swap, parse_type("!(b * a)"), "x", parse_term(
        "let <y:a, z:b>^1 = x:!(a * b) in <z:!b, y:!a>^1"))
    f2 = Morphism(swap, parse_type("!(b * a)"), "x", parse_term(
        "let <y:a, z:b>^2 = x:!!(a * b) in <z:!b, y:!a>^1"))
    assert Y.equal(f1, f2) == "equal"
    g = Y.eps(Tensor(B, A))
    assert Y.equal(Y.compose(f1, g), Y.compose(f2, g)) == "equal"


def test_coercion_generators(Y):
    assert Y.equal(Y.coerce(parse_type("!a"), A), Y.eps(A)) == "equal"
    assert Y.equal(Y.coerce(A, A), Y.id(A)) == "equal"
    assert Y.equal(Y.coerce(parse_type("!a"), parse_type("!!a")), Y.delta(A)) == "equal"


def test_coercion_is_path_independent(Y):
    src, dst = parse_type("!!(a * !a)"), parse_type("a * !a")
    arrows = [Y.coerce(src, dst, random.Random(s)) for s in range(6)]
    assert len({str(f) for f in arrows}) > 1
    assert all(Y.equal(arrows[0], f) == "equal" for f in arrows[1:])
    fin = FinModel()
    tables = {tuple(fin.table(fin.coerce(src, dst, random.Random(s)))) for s in range(6)}
    assert len(tables) == 1


def test_coercion_matches_the_cast_term(Y):
    for a in all_types(3):
        for b in all_types(3):
            if is_subtype(a, b):
                want = Y.make(a, b, parse_term(f"x:{b}"))
                assert Y.equal(Y.coerce(a, b), want) == "equal", (a, b)


def test_not_a_subtype(Y):
    with pytest.raises(NotSubtype):
        Y.coerce(parse_type("!(a * a)"), parse_type("!a * !a"))
