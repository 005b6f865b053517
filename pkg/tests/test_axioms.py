import pytest

from yaqbench.axioms import ASSIGNMENTS, ROWS, instantiate
from yaqbench.category.finmodel import FinModel
from yaqbench.category.yaq import YAQ
from yaqbench.equivalence import ax_equal
from yaqbench.semantics import soundness_case
from yaqbench.syntax import erase, show
from yaqbench.typecheck import replay

CASES = [(name, i) for name in ROWS for i in range(len(ASSIGNMENTS))]


def _id(case):
    name, i = case
    return f"{name}[{', '.join(show(a) for a in ASSIGNMENTS[i])}]"


def test_rows_and_assignments():
    assert len(ASSIGNMENTS) >= 3
    assert {r.table for r in ROWS.values()} == {"axioms", "derived"}


@pytest.mark.parametrize("case", CASES, ids=_id)
def test_instance_is_well_typed_and_equal(case):
    name, i = case
    inst = instantiate(ROWS[name], ASSIGNMENTS[i])
    replay(inst.left)
    replay(inst.right)
    types = lambda d: ([a for _, a in d.ctx], d.ty)  # noqa: E731
    assert types(inst.left) == types(inst.right)
    assert ax_equal(inst.left, inst.right).status == "equal"
    assert ax_equal(inst.right, inst.left).status == "equal"


@pytest.mark.parametrize("case", CASES[:: len(ASSIGNMENTS)], ids=_id)
def test_instance_is_sound_in_the_finite_model(case):
    inst = instantiate(ROWS[case[0]], ASSIGNMENTS[case[1]])
    assert soundness_case(inst.left, inst.right, FinModel()) == "equal"


def test_beta_lam_sound_in_both_models():
    inst = instantiate(ROWS["beta-lam"], ASSIGNMENTS[0])
    assert soundness_case(inst.left, inst.right, FinModel()) == "equal"
    assert soundness_case(inst.left, inst.right, YAQ()) == "equal"


def test_sides_differ_syntactically():
    # every row relates two different terms, otherwise the suite checks nothing;
    # the unit elimination needs a subject of type exactly top, so its cast is the identity
    for name in ROWS:
        inst = instantiate(ROWS[name], ASSIGNMENTS[1])
        if name == "cast-unit":
            assert inst.left.term == inst.right.term
            continue
        assert inst.left.term != inst.right.term or inst.left.ctx != inst.right.ctx, name
        # casts keep the erasure, every other row changes it
        assert (erase(inst.left.term) == erase(inst.right.term)) == name.startswith("cast"), name
