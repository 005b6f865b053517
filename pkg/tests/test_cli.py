import io
import json

import pytest

from yaqbench.cli import main
from yaqbench.schemas import validate


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(schema, *argv):
    code, out, _ = run("--format", "json", *argv)
    doc = json.loads(out)
    if schema:
        validate(schema, doc)
    return code, doc


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


# ---------------------------------------------------------------- sub


def test_sub_yes_and_no():
    assert run("sub", "!bit", "bit")[:2] == (0, "yes\n")
    assert run("sub", "bit", "!bit")[:2] == (1, "no\n")


def test_sub_derive_json():
    code, doc = run_json("subtype", "sub", "!(a -o b)", "!a -o b", "--derive")
    assert code == 0 and doc["subtype"] and doc["derivation"]["rule"] == "lolli"


def test_sub_parse_error():
    code, _, err = run("sub", "a -o", "a")
    assert code == 2 and "ParseError" in err
    code, doc = run_json("error", "sub", "a -o", "a")
    assert code == 2 and doc["error"] == "ParseError" and doc["line"] == 1


# ---------------------------------------------------------------- check, infer, erase


def test_check_ok(write):
    f = write("pair.yaq", "y:!bit |- <y:!bit, y:!bit>^1 : !(bit * bit)")
    code, out, _ = run("check", f)
    assert code == 0 and out.startswith("ok:")
    code, doc = run_json("derivation", "check", f)
    assert code == 0 and doc["rule"] == "tensor_I"


def test_check_json_with_top(write):
    f = write("unit.yaq", "x:!qbit |- <unit^1, x:!qbit>^1 : !(top * qbit)")
    code, doc = run_json("derivation", "check", f)
    assert code == 0
    f = write("unit2.yaq", "|- unit^1 : !top")
    assert run_json("derivation", "check", f)[0] == 0


def test_check_error_span(write):
    text = "x:qbit |- <x:qbit, x:qbit> : qbit * qbit"
    f = write("clone.yaq", text)
    code, doc = run_json("error", "check", f)
    assert code == 1 and doc["error"] == "LinearVariableReused"
    if doc["span"]:
        lo, hi = doc["span"]
        assert 0 <= lo < hi <= len(text)


def test_check_placement_minimal(write):
    f = write("dummy.yaq", "x:!qbit |- unit : top")
    assert run("check", "--placement", "minimal", f)[0] == 0


def test_infer(write):
    f = write("id.yaq", "|- lam x. x : !(qbit -o qbit)")
    code, out, _ = run("infer", f)
    assert code == 0 and out.strip() == "lam^1 x:qbit. x:qbit : !(qbit -o qbit)"
    code, doc = run_json(None, "infer", f)
    for d in doc["indexations"]:
        validate("derivation", d)


def test_infer_several_and_not_typeable(write):
    f = write("swap.yaq", "x:!(a * b) |- let <y, z> = x in <z, y> : !(b * a)")
    code, out, _ = run("infer", "-k", "3", f)
    assert code == 0 and len(out.strip().splitlines()) >= 2
    g = write("clone.yaq", "x:qbit |- <x, x> : qbit * qbit")
    assert run("infer", g)[0] == 1


def test_infer_goal_flag(write):
    f = write("unit.yaq", "|- unit : top")
    code, out, _ = run("infer", "--goal", "!top", f)
    assert code == 0 and out.strip() == "unit^1 : !top"


def test_erase(write):
    f = write("lam.yaq", "|- lam^1 x:qbit. x:qbit : !(qbit -o qbit)")
    assert run("erase", f)[1] == "lam x. x\n"


# ---------------------------------------------------------------- normalize, eq


def test_normalize(write):
    f = write("beta.yaq", "x:a |- (lam y:a. y:a) x:a : a")
    assert run("normalize", f)[:2] == (0, "x:a\n")


def test_eq_permeable(write):
    ctx = "t:!(a * !(b * c)) |- "
    ty = " : !(!(c * b) * a)"
    f1 = write("p1.yaq", ctx + "let <x, u> = t in let <y, z> = u in <<z, y>, x>" + ty)
    f2 = write("p2.yaq", ctx + "let <x, u> = t in <let <y, z> = u in <z, y>, x>" + ty)
    code, doc = run_json("verdict", "eq", f1, f2)
    assert code == 0 and doc["status"] == "equal"


def test_eq_header_less_second_file(write):
    f1 = write("a.yaq", "f:a -o a, x:a |- f x : a")
    f2 = write("b.yaq", "(lam y. f y) x")
    assert run("eq", f1, f2)[:2] == (0, "equal\n")


def test_eq_distinct(write):
    f1 = write("a.yaq", "x:!a, y:!a |- <x, y> : a * a")
    f2 = write("b.yaq", "<y, x>")
    code, doc = run_json("verdict", "eq", f1, f2)
    assert code == 1 and doc["status"] == "distinct"


# ---------------------------------------------------------------- denote, laws


def test_denote_finset(write):
    f = write("swap.yaq", "x:a * b |- let <y:a, z:b> = x:a * b in <z:b, y:a> : b * a")
    code, doc = run_json("denotation", "denote", f)
    assert code == 0 and doc["model"] == "finset" and len(doc["table"]) == 4


def test_denote_yaq(write):
    f = write("id.yaq", "x:a |- x:a : a")
    code, doc = run_json("denotation", "denote", "--model", "yaq", "--kind", "v", f)
    assert code == 0 and doc["model"] == "yaq" and doc["kind"] == "value"


def test_denote_quantum_is_uninterpretable(write):
    f = write("q.yaq", "x:qbit |- x:qbit : qbit")
    code, doc = run_json("error", "denote", f)
    assert code == 1 and doc["error"] == "Uninterpretable"


def test_laws_finset():
    code, doc = run_json("law_report", "laws", "--model", "finset", "--objects", "a;!a", "--limit", "3")
    assert code == 0 and doc["entries"]


def test_laws_lawcfg(write):
    cfg = write("small.lawcfg", "model = finset\nobjects = size:1\ndiagrams = pentagon\nlimit = 2\n")
    code, doc = run_json("law_report", "laws", "--lawcfg", cfg)
    assert code == 0 and {e["diagram"] for e in doc["entries"]} == {"pentagon"}


def test_laws_unknown_diagram():
    code, _, err = run("laws", "--diagram", "nope")
    assert code == 2 and "nope" in err


# ---------------------------------------------------------------- run


def test_run_exact(write):
    f = write("coin.yaq", "|- meas (H (new 0)) : bit")
    code, out, _ = run("run", "--exact", f)
    assert code == 0 and out == "0\t1/2\n1\t1/2\n"
    code, doc = run_json("run", "run", f)
    assert doc["kind"] == "distribution"


def test_run_shots_reproducible(write):
    f = write("coin.yaq", "|- meas (H (new 0)) : bit")
    a = run_json("run", "--seed", "7", "run", "--shots", "50", f)[1]
    b = run_json("run", "--seed", "7", "run", "--shots", "50", f)[1]
    assert a == b and sum(a["counts"].values()) == 50


def test_run_negative_shots(write):
    f = write("coin.yaq", "|- meas (H (new 0)) : bit")
    assert run("run", "--shots", "-1", f)[0] == 2


def test_run_figures_are_deterministic(write, tmp_path):
    f = write("bell.yaq", "|- let <x, y> = CNOT <H (new 0), new 0> in <meas x, meas y> : bit * bit")
    out = tmp_path / "figs"
    assert run("run", f, "--figures", str(out))[0] == 0
    tsv, png = (out / "bell.tsv").read_bytes(), (out / "bell.png").read_bytes()
    assert run("run", f, "--figures", str(out))[0] == 0
    assert (out / "bell.tsv").read_bytes() == tsv and (out / "bell.png").read_bytes() == png
    assert tsv.decode().splitlines()[0] == "value\tprobability"


def test_run_custom_gate(write):
    gates = write("gates.json", json.dumps({"gates": [
        {"name": "SX", "arity": 1, "matrix": ["0.5+0.5j", "0.5-0.5j", "0.5-0.5j", "0.5+0.5j"]}]}))
    f = write("sx.yaq", "|- meas (SX (SX (new 0))) : bit")
    code, out, _ = run("--gates", gates, "run", f)
    assert code == 0 and out == "1\t1\n"
    g = write("sxc.yaq", "|- SX:qbit -o qbit (new:bit -o qbit 0:bit) : qbit")
    assert run("--gates", gates, "check", g)[0] == 0


def test_run_qubit_budget(write):
    cfg = write("small.cfg", "max_qubits = 1\n")
    f = write("bell.yaq", "|- let <x, y> = CNOT <H (new 0), new 0> in <meas x, meas y> : bit * bit")
    code, doc = run_json("error", "--config", cfg, "run", f)
    assert code == 3 and doc["error"] == "QubitBudgetExceeded"


# ---------------------------------------------------------------- corpus, errors


def test_corpus_quantum(tmp_path):
    code, out, _ = run("corpus", "--suite", "quantum", "--out", str(tmp_path))
    assert code == 0 and "PASS" in out.upper()
    assert (tmp_path / "corpus.tsv").read_text().splitlines()[1].startswith("9\tquantum\tpass")
    code, doc = run_json("corpus", "corpus", "--suite", "quantum")
    assert code == 0 and doc["all_pass"]


def test_corpus_unknown_suite():
    assert run("corpus", "--suite", "nope")[0] == 2


def test_config_error(write):
    cfg = write("bad.cfg", "colour = red\n")
    code, _, err = run("--config", cfg, "sub", "a", "a")
    assert code == 2 and "config" in err


def test_missing_file():
    assert run("check", "/nonexistent/x.yaq")[0] == 2


def test_usage_error():
    assert run("frobnicate")[0] == 2
    assert run()[0] == 2
