import json

import pytest

from nsesym.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_classify(capsys):
    code, data = run_json(capsys, "classify", "--ax", "1", "--at", "2")
    assert code == 0 and data["verdict"] == "supercritical"
    for key in ("energy_exponent", "velocity_exponent", "scenario", "blowup_excluded",
                "severity_verdict"):
        assert key in data


def test_classify_rational_input(capsys):
    code, data = run_json(capsys, "classify", "--ax", "2/3", "--at", "5/3")
    assert code == 0 and data["verdict"] == "critical"


def test_weights(capsys):
    code, data = run_json(capsys, "weights", "--expr", "u^2+v^2+w^2")
    assert code == 0 and data["weight"] == ["2", "-2"]
    code, out, _ = run(capsys, "weights", "--expr", "u^2+v^2+w^2")
    assert "(2, -2)" in out


def test_verify_form_k8(capsys):
    code, data = run_json(capsys, "verify-form", "--k", "8")
    assert code == 0 and data["verified"] is True and data["generators"] == 5


def test_verify_form_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify-form", "--form", "dx /\\ dp")
    assert code == 1 and "X" in out


def test_verify_form_from_file(capsys, tmp_path):
    f = tmp_path / "b0.form"
    f.write_text("(p/(u^2+v^2+w^2))\n")
    code, data = run_json(capsys, "verify-form", "--file", str(f))
    assert code == 0 and data["verified"]


@pytest.mark.parametrize("argv", [
    ["verify-form", "--k", "1"],
    ["weights", "--expr", "x +"],
    ["classify", "--ax", "0", "--at", "0"],
    ["classify", "--ax", "one", "--at", "2"],
    ["apply", "--generator", "Q", "--expr", "x"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err and len(err.strip().splitlines()) == 1


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["classify", "--ax", "1", "--at", "2", "--bogus"],
    ["classify", "--ax", "1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and len(err.strip().splitlines()) == 1 and "error" in err


def test_console_script_exit_code():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "nsesym.cli", "verify-form", "--k", "7"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "paper reports none" in proc.stderr


def test_apply_and_lie(capsys):
    code, data = run_json(capsys, "apply", "--generator", "X", "--expr", "p")
    assert code == 0 and data["result"] == "-2*p"
    code, out, _ = run(capsys, "lie", "--generator", "X", "--form", "dp")
    assert code == 0 and "-2" in out


def test_residual_and_euler(capsys):
    code, data = run_json(capsys, "residual", "--solution", "stagnation")
    assert code == 0
    code, data = run_json(capsys, "euler", "--solution", "stagnation")
    assert code == 0 and data["time_independent"] is True


def test_residual_file(capsys, tmp_path):
    f = tmp_path / "sol.txt"
    f.write_text("u = x\nv = 0\nw = 0\np = 0\n")
    code, _, _ = run(capsys, "residual", "--file", str(f))
    assert code == 1


def test_solve_forms_json(capsys):
    code, data = run_json(capsys, "solve-forms", "--k", "1", "--seed", "3")
    assert code == 0
    for key in ("k", "unknowns", "rows", "singular_values", "nullspace_dim", "forms"):
        assert key in data
    assert data["nullspace_dim"] == 0


def test_deterministic_json(capsys):
    argv = ["solve-forms", "--k", "3", "--seed", "11", "--json"]
    main(argv)
    a = capsys.readouterr().out
    main(argv)
    b = capsys.readouterr().out
    assert a == b


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("BOUTON_FORMS_SEED", "9")
    main(["verify-form", "--k", "3", "--json"])
    a = capsys.readouterr().out
    main(["verify-form", "--k", "3", "--json", "--seed", "9"])
    b = capsys.readouterr().out
    assert a == b


def test_json_to_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code = main(["classify", "--ax", "1", "--at", "2", "--json", str(target)])
    assert code == 0 and json.loads(target.read_text())["verdict"] == "supercritical"


def test_reproduce_properties_deterministic(capsys):
    main(["reproduce", "--suite", "properties", "--seed", "7", "--json"])
    a = capsys.readouterr().out
    main(["reproduce", "--suite", "properties", "--seed", "7", "--json"])
    b = capsys.readouterr().out
    assert a == b and json.loads(a)
