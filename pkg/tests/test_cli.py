from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from sigmafibre.cli import main, render_text
from sigmafibre.fibre import Verdict
from sigmafibre.sigma import load_sigma
from sigmafibre.sphere import from_json


def run(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def fx(name):
    return FIXTURES / name


def test_sigma_one_relator_rays(capsys):
    code, out, _ = run(capsys, "sigma", fx("aba2b.one_relator.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["complement"]["rays"] == [[-1, 2], [1, -2]]
    assert len(doc["warnings"]) == 4


def test_sigma_modes(capsys):
    _, out, _ = run(capsys, "sigma", fx("z2.one_relator.json"), "--degenerate", "include")
    doc = json.loads(out)
    assert doc["warnings"] == [] and len(doc["complement"]["rays"]) == 4
    _, out, _ = run(capsys, "sigma", fx("z2.one_relator.json"), "--degenerate", "exclude")
    assert json.loads(out)["complement"]["rays"] == []


def test_sigma_inline_and_graph(capsys):
    code, out, _ = run(capsys, "sigma", '{"presentation": "a, b | a b a^-1 b^-2"}')
    assert code == 0
    assert json.loads(out)["relations"] == [[0, -1]]
    code, out, _ = run(capsys, "sigma", fx("p3.graph.json"))
    assert json.loads(out)["complement"]["subspaces"] == [[[1, 0, 0], [0, 0, 1]]]


def test_artin_assert(capsys):
    code, out, _ = run(capsys, "artin", fx("graph6.graph.json"), "--assert", "exists")
    assert code == 0
    assert json.loads(out)["untwisted"]["answer"] == "NOT_FP"
    code, _, err = run(capsys, "artin", fx("p3.graph.json"), "--assert", "exists")
    assert code == 1 and "assertion failed" in err


def test_separators(capsys):
    code, out, _ = run(capsys, "separators", fx("graph6.graph.json"))
    doc = json.loads(out)
    assert doc["separators"] == [["A", "C", "E"], ["A", "C", "F"], ["A", "D", "F"], ["B", "C", "E"]]
    assert doc["direct_product"] is False


def test_fp_check_asserts(capsys):
    assert run(capsys, "fp-check", fx("aba2b_identity.task.json"), "--assert", "fp")[0] == 1
    assert run(capsys, "fp-check", fx("aba2b_identity.task.json"), "--assert", "not-fp")[0] == 0
    assert run(capsys, "fp-check", fx("aba2b_swap.task.json"), "--assert", "fp")[0] == 0


def test_task_commands(capsys):
    code, out, _ = run(capsys, "corank2", fx("aba2b_corank2.task.json"))
    assert code == 0 and json.loads(out)["answer"] == "EXISTS"
    code, out, _ = run(capsys, "cook", fx("shear_cook.task.json"))
    doc = json.loads(out)
    assert code == 0 and doc["mu_star"] == [[1, 8], [0, 1]] and doc["answer"] == "FP"
    code, out, _ = run(capsys, "plan", fx("product_plan.task.json"), "--assert", "fp")
    assert code == 0 and json.loads(out)["corank"] == 4
    task = {"factor": {"sigma": {"rank": 3, "subspaces": [[[1, 0, 0], [0, 1, 0]]]}}}
    code, out, _ = run(capsys, "greatsph", json.dumps(task), "--assert", "not-exists")
    assert code == 0
    task = {"factor1": {"sigma": {"rank": 2}}, "factor2": {"sigma": {"rank": 2, "rays": [[1, 0]]}}}
    code, out, _ = run(capsys, "corank1", json.dumps(task))
    assert json.loads(out)["certificate"]["case"] == "i"
    task = {"factor": {"sigma": {"rank": 2, "rays": [[1, 1]]}}}
    assert run(capsys, "untwisted", json.dumps(task), "--assert", "fp")[0] == 0


def test_unknown_exit(capsys):
    code, out, err = run(capsys, "minus-id", fx("z2_minus_id.task.json"))
    assert code == 3
    assert json.loads(out)["answer"] == "UNKNOWN"
    assert "undecided" in err
    code, _, _ = run(capsys, "minus-id", fx("z2_minus_id.task.json"), "--degenerate", "exclude")
    assert code == 0


@pytest.mark.parametrize("args, needle", [
    (["sigma", "{bad"], "line 1 column 2"),
    (["sigma", "/nonexistent/file.json"], "cannot read"),
    (["sigma", '{"presentation": "a, b | a c"}'], "column 10"),
    (["sigma", '{"rank": 2, "rays": [[1]]}'], "$.rays[0]"),
    (["separators", '{"vertices": ["a"], "edges": [["a", "a"]]}'], "loops"),
    (["fp-check", str(FIXTURES / "aba2b_corank2.task.json")], "does not match"),
    (["fp-check", '{"factor1": {"sigma": {"rank": 2}}, "factor2": {"sigma": {"rank": 2}},'
                  ' "mu": [[2, 0], [0, 1]]}'], "$.mu"),
    (["cook", '{"factor1": {"sigma": {"rank": 2}}, "factor2": {"sigma": {"rank": 2}}}'],
     "k_gens"),
    (["separators", fx("graph6.graph.json"), "--assert", "fp"], "does not apply"),
])
def test_input_errors_exit_2(capsys, args, needle):
    code, out, err = run(capsys, *args)
    assert code == 2
    assert needle in err
    assert err.startswith("error:")


def test_text_format(capsys):
    code, out, _ = run(capsys, "separators", fx("graph6.graph.json"), "--format", "text")
    assert code == 0
    assert out.splitlines()[0] == "direct_product: false"
    assert render_text({"a": {"b": [1, 2]}}) == "a:\n  b: [1, 2]"


def test_byte_stable_output():
    cmd = [sys.executable, "-m", "sigmafibre", "plan", str(fx("product_plan.task.json"))]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first


def test_emitted_json_reloads(capsys):
    _, out, _ = run(capsys, "sigma", fx("aba2b.one_relator.json"))
    doc = json.loads(out)
    s = load_sigma(doc)
    assert json.loads(json.dumps(doc)) == doc
    assert from_json(doc["complement"]) == s.complement
    _, out, _ = run(capsys, "fp-check", fx("aba2b_swap.task.json"))
    v = Verdict.from_json(json.loads(out))
    assert v.to_json() == json.loads(out)
