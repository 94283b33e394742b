import json
import pathlib

from fdexplain.bundle import import_bundle
from fdexplain.cli import cli_main

CONF = str(pathlib.Path(__file__).parent.parent / "models" / "conf.model")


def run(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_conference(capsys):
    code, out, _ = run(capsys, "solve", CONF)
    assert code == 0
    assert "branches: 3, failures: 1" in out
    assert "solution: AM=2 MP=3 PM=1 MA=3" in out
    assert "solution: AM=1 MP=3 PM=2 MA=3" in out
    assert "reduced domains: AM∈{1,2} MP∈{2,3} PM∈{1,2} MA∈{2,3}" in out


def test_solve_unsatisfiable(tmp_path, capsys):
    model = tmp_path / "bad.model"
    model.write_text("var X in 1..2\nvar Y in 1..2\nconstraint X > Y + 2\nlabel X\n")
    code, out, _ = run(capsys, "solve", str(model))
    assert code == 1
    assert "no solution" in out


def test_explain_mp2(capsys):
    code, out, _ = run(capsys, "explain", CONF, "--var", "MP", "--value", "2")
    assert code == 0
    assert "context: {PM=1,PM=2,PM=3}" in out
    # All four restriction-fact leaves are visible.
    assert out.count("[choice PM=1]") == 2
    assert out.count("[choice PM=2]") == 1
    assert out.count("[choice PM=3]") == 1
    assert "(AM,1)" in out and "(PM,1)" in out


def test_explain_mp3_removed_in_failing_branch(capsys):
    # (MP,3) survives both solution branches but dies with everything else
    # in PM=3's emptied closure, so it does have an explanation there.
    code, out, _ = run(capsys, "explain", CONF, "--var", "MP", "--value", "3")
    assert code == 0
    assert "context: {PM=3}" in out


def test_explain_not_removed(tmp_path, capsys):
    model = tmp_path / "free.model"
    model.write_text("var X in 1..2\n")
    code, out, _ = run(capsys, "explain", str(model), "--var", "X", "--value", "1")
    assert code == 0
    assert "not removed in any branch" in out


def test_failure_branch(capsys):
    code, out, _ = run(capsys, "failure", CONF, "--branch", "PM=3", "--var", "MA")
    assert code == 0
    assert "failure of MA on branch PM=3: 3 explanations" in out


def test_failure_on_solved_branch(capsys):
    code, _, err = run(capsys, "failure", CONF, "--branch", "PM=1")
    assert code == 2
    assert "not a failure leaf" in err


def test_retract(capsys):
    code, out, _ = run(capsys, "retract", CONF, "--constraint", "c2")
    assert code == 0
    assert "verified: true" in out


def test_export_and_validate(tmp_path, capsys):
    out_file = tmp_path / "conf.json"
    code, _, _ = run(capsys, "export", CONF, "-o", str(out_file))
    assert code == 0
    bundle = import_bundle(out_file.read_text(encoding="utf-8"))
    assert len(bundle["solutions"]) == 2
    code, out, _ = run(capsys, "validate-bundle", str(out_file))
    assert code == 0 and "bundle ok" in out


def test_check(capsys):
    code, out, _ = run(capsys, "check", CONF)
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 4


def test_unknown_verb(capsys):
    code, _, _ = run(capsys, "frobnicate", CONF)
    assert code == 2


def test_parse_error_exit_code(tmp_path, capsys):
    model = tmp_path / "broken.model"
    model.write_text("var X in 1..2\nconstraint X ? Y\n")
    code, _, err = run(capsys, "solve", str(model))
    assert code == 2
    assert "line 2" in err


def test_missing_file(capsys):
    code, _, _ = run(capsys, "solve", "/nonexistent/nowhere.model")
    assert code == 2
