import json

import pytest

from proofkit import CORPUS
from proofkit.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


C = CORPUS


def test_check_valid_derivation(capsys):
    code, out, _ = run(capsys, "check", C / "hilbert-min.json", C / "skk-derivation.json")
    assert code == 0 and out.startswith("valid") and "imp(a,a)" in out


def test_check_invalid_derivation(capsys, tmp_path):
    data = json.loads((C / "skk-derivation.json").read_text())
    data["formula"] = "imp(b,b)"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "check", C / "hilbert-min.json", bad)
    assert code == 1 and "invalid" in out


def test_prove_outcomes(capsys):
    assert run(capsys, "prove", C / "counterexample.json", "--goal", "a")[0] == 0
    code, data = run_json(capsys, "prove", C / "counterexample.json", "--goal", "b")
    assert code == 1 and data == {"result": "refuted"}
    code, _, _ = run(capsys, "prove", C / "hilbert-min.json", "--goal", "imp(a,a)", "--universe", 17, "--max-depth", 1)
    assert code == 2


def test_prove_under_assumption(capsys):
    code, out, _ = run(capsys, "prove", C / "counterexample-ext.json", "--goal", "c", "--assume", "b")
    assert code == 0 and "[assumption]" in out


def test_theorems(capsys):
    code, data = run_json(capsys, "theorems", C / "counterexample-ext.json")
    assert code == 0 and data == {"saturated": True, "theorems": ["a"]}


def test_classify(capsys):
    code, data = run_json(capsys, "classify", C / "counterexample.json", "--rule", C / "b-to-c.json")
    assert code == 0
    assert [data[k]["verdict"] for k in ("derivable", "correct", "admissible")] == ["no", "yes", "yes"]


def test_classify_unknown_exits_2(capsys, tmp_path):
    rule = tmp_path / "identity.json"
    rule.write_text(json.dumps({"kind": "explicit", "instances": [{"id": "i1", "prem": [], "concl": "imp(a,a)"}]}))
    code, data = run_json(capsys, "classify", C / "hilbert-min.json", "--rule", rule,
                          "--universe", 17, "--max-depth", 1)
    assert code == 2 and data["derivable"]["verdict"] == "unknown"


def test_compare(capsys):
    code, data = run_json(capsys, "compare", C / "counterexample.json", C / "counterexample-ext.json")
    assert code == 0
    assert data["same_theorems"] == "yes" and data["same_consequence"] == "no"
    assert data["mutually_admissible"] == "yes" and data["mutually_derivable"] == "no"
    assert data["discrepancies"] == []


def test_compare_signature_mismatch(capsys):
    code, _, err = run(capsys, "compare", C / "counterexample.json", C / "hilbert-min.json")
    assert code == 3 and err.startswith("error:")


@pytest.mark.parametrize("strategy", ["leftmost-innermost", "leftmost-outermost", "random"])
def test_eliminate(capsys, strategy):
    code, data = run_json(capsys, "eliminate", C / "elim-demo.json", "--rule", "T",
                          "--derivation", C / "elim-demo-derivation.json",
                          "--mimicry", C / "elim-demo-mimicry.json", "--strategy", strategy)
    assert code == 0 and data["step_count"] == 3
    assert all(s["mpo_decrease"] for s in data["steps"])


def test_audit(capsys):
    code, data = run_json(capsys, "audit", "--samples", 5)
    assert code == 0 and data["ok"] and data["counts"]["samples"] == 5
    assert "_seconds" not in data
    assert run(capsys, "audit", "--samples", 0)[0] == 3


def test_ars_commands(capsys):
    code, data = run_json(capsys, "ars", "relation", C / "fa-ars.json")
    assert code == 0 and data["steps"] == 3 and len(data["pairs"]) == 2
    code, out, _ = run(capsys, "ars", "steps", C / "fa-ars.json", "--from", "f(f(a))", "--to", "f(a)")
    assert out.split() == ["f(f(a))@ε", "f(f(a))@1"]
    code, data = run_json(capsys, "ars", "expand", "--rule", "f(?x)->?x", "--sig", C / "fa-signature.json",
                          "--bound", 3)
    assert data == json.loads((C / "fa-ars.json").read_text())


def test_nd_classify(capsys):
    args = ("--universe", 2, "--markers", 1, "--max-antecedent", 1)
    code, data = run_json(capsys, "nd", "classify", C / "necessitation.json", "--rule", C / "nec-closed.json", *args)
    assert code == 0
    assert (data["derivable"]["verdict"], data["admissible"]["verdict"]) == ("no", "yes")
    code, data = run_json(capsys, "nd", "classify", C / "necessitation.json", "--rule", C / "nec-open.json", *args)
    assert data["admissible"]["verdict"] == "no"
    assert data["admissible"]["counterexample"].endswith("p:m1 => p / p:m1 => box(p)")


def test_nd_encode_writes_a_loadable_system(capsys, tmp_path):
    out = tmp_path / "enc.json"
    code, data = run_json(capsys, "nd", "encode", C / "nd-minimal.json", "-o", out, "--universe", 3)
    assert code == 0 and data["axioms"] == 1
    code, _, _ = run(capsys, "prove", out, "--goal", "=> imp(a,a)", "--universe", 3)
    assert code == 0


def test_nd_system_rejected_by_hilbert_commands(capsys):
    code, _, err = run(capsys, "theorems", C / "nd-minimal.json")
    assert code == 3 and "nd" in err


@pytest.mark.parametrize("argv", [
    [],
    ["prove"],
    ["classify", "missing.json", "--rule", "x.json"],
    ["eliminate", "x", "--rule", "T", "--derivation", "d", "--mimicry", "m", "--strategy", "sideways"],
])
def test_usage_and_load_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 3
