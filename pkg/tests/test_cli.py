import json
import subprocess
import sys

import pytest

from matpainleve.cli import ConfigError, RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_list_systems(capsys):
    code, out = run(capsys, "list-systems")
    assert code == 0
    d = json.loads(out.out)
    assert d["schema_version"] == 1
    assert len(d["hamiltonians"]) == 8 and len(d["lax_catalog"]) == 9
    assert len(d["degeneration_edges"]) == 18
    assert d["degeneration_dot"].startswith("digraph")


def test_spectral_type_text(capsys):
    code, out = run(capsys, "spectral-type", "--system", "(2)_2,(11)_2", "--format", "text")
    assert code == 0
    assert "PASS" in out.out and "x=0 (1/2)" in out.out and "x=inf (1/2)" in out.out


def test_residual_csv(capsys):
    code, out = run(capsys, "residual", "--system", "(2)_2,(11)_2", "--format", "csv")
    lines = out.out.splitlines()
    assert code == 0 and lines[0] == "suite,name,passed,value,tolerance"
    assert lines[1].startswith("isomonodromy,") and ",True," in lines[1]


def test_residual_tolerance_override_fails(capsys):
    code, _ = run(capsys, "residual", "--system", "(2)_2,(11)_2", "--tol", "isomonodromy=1e-30")
    assert code == 1


def test_integrate_reports_drift(capsys):
    code, out = run(capsys, "integrate", "--system", "(((((11)))))_2", "--steps", "200")
    d = json.loads(out.out)
    assert code == 0 and d["passed"]


def test_riemann_scheme(capsys):
    code, out = run(capsys, "riemann-scheme", "--system", "22,22,22,211", "--format", "text")
    assert code == 0 and "x=1" in out.out


def test_output_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out = run(capsys, "riemann-scheme", "--system", "MatVI", "--output", str(path))
    assert code == 0
    assert json.loads(path.read_text())["command"] == "riemann-scheme"


def test_deterministic_output(capsys):
    a = run(capsys, "residual", "--system", "22,22,22,211", "--seed", "5")[1].out
    b = run(capsys, "residual", "--system", "22,22,22,211", "--seed", "5")[1].out
    assert a == b


@pytest.mark.parametrize("argv", [
    ["residual", "--system", "nope"],
    ["degenerate", "--eps-grid", "0.1,0.2"],
    ["degenerate", "--eps-grid", "0.1,abc"],
    ["verify-all", "--tol", "bogus=1"],
    ["verify-all", "--tol", "conservation"],
    ["integrate", "--steps", "-3"],
    ["degenerate", "--rule", "I -> II"],
])
def test_invalid_configuration(argv, capsys):
    code, out = run(capsys, *argv)
    assert code == 2 and "error" in out.err


def test_variant_without_lax_pair(capsys):
    code, _ = run(capsys, "residual", "--system", "(2)(2),22,211")
    assert code == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("residual", format="xml").validate()
    assert RunConfig("residual", eps_grid=(0.1, 0.05)).validate().steps == 1000


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "matpainleve", "list-systems", "--format", "csv"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.startswith("suite,name")


@pytest.mark.slow
def test_verify_all_is_byte_identical():
    cmd = [sys.executable, "-m", "matpainleve", "verify-all", "--seed", "42"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout
