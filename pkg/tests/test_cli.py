import json
import subprocess
import sys

import pytest

from rootsharp.cli import main


def test_eval_an(capsys):
    assert main(["eval", "an", "--n", "1", "--k", "1", "--lambda", "1,-1", "--x", "0.5,-0.5"]) == 0
    out = capsys.readouterr().out
    assert "log_phi" in out and "region II" in out


def test_eval_bc1(capsys):
    assert main(["eval", "bc1", "--k1", "1", "--k2", "0.5", "--lambda", "3", "--t", "2",
                 "--method", "integral"]) == 0
    assert "region       IV" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["eval", "an", "--n", "1", "--k", "1", "--lambda", "1", "--x", "0.5,-0.5"],
    ["eval", "an", "--n", "1", "--k", "1", "--lambda", "a,b", "--x", "0.5,-0.5"],
    ["eval", "bc1", "--k1", "1", "--k2", "0", "--lambda", "1", "--t", "1", "--method", "integral"],
    ["verify"],
    ["verify", "conjecture", "--system", "bc1", "--grid-lo", "2", "--grid-hi", "1", "--points", "3",
     "--out", "x.csv"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 2


def test_eval_nonconverged():
    argv = ["eval", "an", "--n", "2", "--k", "0.5", "--lambda", "3,1,0", "--x", "5,2,0",
            "--nodes", "3", "--tol", "1e-15"]
    assert main(argv) == 3


def test_verify_conjecture_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    argv = ["verify", "conjecture", "--system", "bc1", "--k1", "1", "--k2", "0.5", "--grid-lo", "0.1",
            "--grid-hi", "10", "--points", "3", "--out", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    assert first.startswith(b"system,n,k1,k2,region")
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_verify_conjecture_json_an(tmp_path):
    out = tmp_path / "s.json"
    argv = ["verify", "conjecture", "--system", "an", "--n", "1", "--k", "0.5", "--grid-lo", "0.1",
            "--grid-hi", "10", "--points", "3", "--out", str(out), "--format", "json"]
    assert main(argv) == 0
    assert json.loads(out.read_text())["n"] == 1


def test_verify_bad_path(tmp_path):
    argv = ["verify", "conjecture", "--system", "bc1", "--grid-lo", "0.1", "--grid-hi", "10",
            "--points", "2", "--out", str(tmp_path / "no" / "s.csv")]
    assert main(argv) == 2


def test_module_entry_point_lemmas(tmp_path):
    out = tmp_path / "l.json"
    proc = subprocess.run([sys.executable, "-m", "rootsharp", "verify", "lemmas", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["passed"] is True
