import pytest

from yaqbench.category.finmodel import FinModel
from yaqbench.category.laws import DIAGRAMS, MUTATIONS, check_laws, default_objects, mutate
from yaqbench.category.yaq import YAQ
from yaqbench.schemas import validate
from yaqbench.syntax import parse_type

REQUIRED = [d.id for d in DIAGRAMS if d.required]


def test_diagram_families_are_covered():
    ids = {d.id for d in DIAGRAMS}
    for prefix in ("pentagon", "triangle", "hexagon", "comonad-", "comonoid-", "lec-", "monad-",
                   "strength-", "phi-", "delta-iso", "m-iso", "psi-commutative"):
        assert any(i.startswith(prefix) for i in ids), prefix
    assert len([i for i in ids if i.startswith("lec-")]) >= 6
    assert len([i for i in ids if i.startswith("strength-")]) >= 4
    # only the commutativity of the strength is informational
    assert [d.id for d in DIAGRAMS if not d.required] == ["psi-commutative"]


def test_finite_model_passes_exhaustively():
    r = check_laws(FinModel())
    assert r.all_pass(), r.failures()[:3]
    assert all(e.verdict == "equal" for e in r.entries)
    # arity 4 over four sets
    assert sum(e.diagram == "pentagon" for e in r.entries) == 4 ** 4
    validate("law_report", r.to_json())


def test_finite_model_on_banged_and_function_objects():
    # !a and a share a carrier, so exponential laws must not tell their elements apart
    objs = [parse_type(t) for t in ("a", "!a", "a -o a", "!a -o a")]
    r = check_laws(FinModel(), objs)
    assert r.all_pass(), r.failures()[:3]


def test_default_objects():
    assert len(default_objects(FinModel())) == 4
    assert len(default_objects(YAQ())) == 14


def test_yaq_on_small_objects():
    objs = [parse_type(s) for s in ("a", "!a", "a * a")]
    r = check_laws(YAQ(), objs, diagrams=REQUIRED)
    assert r.all_pass(), [(e.diagram, e.objects, e.verdict) for e in r.failures()[:3]]
    validate("law_report", r.to_json())


def test_yaq_commutativity_is_reported_but_not_required():
    r = check_laws(YAQ(), [parse_type("a")], diagrams=["psi-commutative"])
    (e,) = r.entries
    assert not e.required and e.verdict in ("equal", "not-proved", "distinct")
    assert r.all_pass()


def test_limit_samples_deterministically():
    r1 = check_laws(FinModel(), limit=3, seed=5)
    r2 = check_laws(FinModel(), limit=3, seed=5)
    assert [(e.diagram, e.objects) for e in r1.entries] == [(e.diagram, e.objects) for e in r2.entries]
    assert max(sum(e.diagram == d.id for e in r1.entries) for d in DIAGRAMS) == 3


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_mutations(name):
    _, caught = MUTATIONS[name]
    r = check_laws(mutate(FinModel(), name))
    assert (not r.all_pass()) == caught
    if caught:
        # a corruption is pinned to a few diagrams, not smeared over the report
        assert 0 < len(r.failed_diagrams()) <= 6
        bad = r.failures()[0]
        assert bad.trace is not None and bad.trace["lhs"] != bad.trace["rhs"]


def test_swapped_diagonal_keeps_commutativity():
    # d;sigma equals d because the diagonal is commutative, so no diagram can tell
    r = check_laws(mutate(FinModel(), "d-swapped"), diagrams=["comonoid-comm", "comonoid-assoc"])
    assert r.all_pass()


def test_five_mutations_are_caught():
    assert sum(caught for _, caught in MUTATIONS.values()) >= 5


def test_mutation_leaves_original_untouched():
    base = FinModel()
    mutate(base, "eta-noise")
    assert check_laws(base, diagrams=["monad-unit-left"]).all_pass()
