import json

import pytest

from pvw.cli import EXIT_BUDGET, EXIT_EVAL, EXIT_INVALID, EXIT_OK, EXIT_PARSE, main
from pvw.evaluator import exact_eval
from pvw.formats import emit_comp, emit_proof, parse_comp
from pvw.proofs import axiom
from pvw.stdlib import TAIL
from pvw.terms import app, numeral

TAIL_TERM = "(app (named tail) (s1 (s0 (s1 eps))))"


@pytest.fixture
def files(tmp_path):
    t = app(TAIL, numeral("101"))
    comp = tmp_path / "tail.comp"
    comp.write_text(emit_comp(exact_eval(t)))
    proof = tmp_path / "tail.proof"
    proof.write_text(emit_proof(axiom(TAIL, "s1", {"x": numeral("01")})))
    return tmp_path, comp, proof


def test_eval_writes_computation(tmp_path, capsys):
    out, report = tmp_path / "o.comp", tmp_path / "r.json"
    assert main(["eval", "--term", TAIL_TERM, "--out", str(out), "--json", str(report)]) == EXIT_OK
    dag = parse_comp(out.read_text())
    assert dag.nodes[-1].stmt.value == numeral("01")
    data = json.loads(report.read_text())
    assert data["value"] == "(s0 (s1 eps))"
    assert data["M_bound_holds"]


def test_eval_demand_mode(capsys):
    assert main(["eval", "--term", TAIL_TERM, "--mode", "demand:1"]) == EXIT_OK
    assert "(comp" in capsys.readouterr().out


def test_eval_with_env(capsys):
    assert main(["eval", "--term", "(app (named tail) (var x))", "--env", "(env (bind x (s1 eps)))"]) == EXIT_OK


@pytest.mark.parametrize("argv,code", [
    (["eval", "--term", "(app (named tail)"], EXIT_PARSE),
    (["eval", "--term", TAIL_TERM, "--mode", "lazy"], EXIT_PARSE),
    (["eval", "--term", "(var x)"], EXIT_EVAL),
    (["eval", "--term", "(s1 star)"], EXIT_EVAL),
    (["check", "--comp", "/nonexistent/file.comp"], EXIT_PARSE),
])
def test_error_exit_codes(argv, code, capsys):
    assert main(argv) == code
    assert "pvw:" in capsys.readouterr().err


def test_check_comp_ok_and_invalid(files, capsys):
    tmp, comp, _ = files
    assert main(["check", "--comp", str(comp)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ok"] is True
    bad = tmp / "bad.comp"
    bad.write_text(comp.read_text().replace("(stmt eps (env) eps)", "(stmt eps (env) (s1 eps))", 1))
    assert main(["check", "--comp", str(bad)]) == EXIT_INVALID
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is False and report["violation"]["node"] == 0


def test_check_proof(files, capsys):
    tmp, _, proof = files
    assert main(["check", "--proof", str(proof)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["conclusion"]["lhs"] == TAIL_TERM
    forged = tmp / "forged.proof"
    forged.write_text("(axiom (named tail) s1 (eq eps (s1 eps)))")
    assert main(["check", "--proof", str(forged)]) == EXIT_INVALID
    report = json.loads(capsys.readouterr().out)
    assert report["violation"]["location"]


def test_audit(files, capsys):
    _, comp, _ = files
    assert main(["audit", "--comp", str(comp)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert set(report) >= {"node_count", "M", "T", "audits", "minimal_C"}


def test_transform_both_directions(files, capsys):
    tmp, comp, proof = files
    out, ledger = tmp / "fwd.comp", tmp / "ledger.json"
    argv = ["transform", "--comp", str(comp), "--proof", str(proof), "--out", str(out), "--json", str(ledger)]
    assert main(argv) == EXIT_OK
    data = json.loads(ledger.read_text())
    assert data["overall"] is True
    back = tmp / "bwd.comp"
    argv = ["transform", "--comp", str(out), "--proof", str(proof), "--direction", "bwd", "--out", str(back)]
    assert main(argv) == EXIT_OK
    assert parse_comp(back.read_text()).nodes[-1].stmt.main == app(TAIL, numeral("101"))


def test_transform_budget_violation(files, capsys):
    _, comp, proof = files
    argv = ["transform", "--comp", str(comp), "--proof", str(proof), "--budget-U", "1", "--strict"]
    assert main(argv) == EXIT_BUDGET
    argv = ["transform", "--comp", str(comp), "--proof", str(proof), "--budget-U", "1"]
    assert main(argv) == EXIT_INVALID


def test_transform_wrong_side(files, capsys):
    _, comp, proof = files
    argv = ["transform", "--comp", str(comp), "--proof", str(proof), "--direction", "bwd"]
    assert main(argv) == EXIT_INVALID


def test_beckmann_table(tmp_path, capsys):
    assert main(["beckmann", "--k", "1", "2", "--lengths", "1,2", "--out-dir", str(tmp_path)]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert len(rows) == 4 and all(r["transform_ok"] for r in rows)
    assert (tmp_path / "beckmann_k2_l2_chain.proof").exists()
