import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from lrauth.cli import run_cli

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "scenarios"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    return code, json.loads(out) if out.strip() else None, err


def test_demo_bell():
    code, rep, _ = run_json("demo", "bell")
    assert code == 0 and rep["pass"] is True
    assert rep["verdicts"][0]["kind"] == "complete_lra_verified"
    assert list(rep) == ["command", "verdicts", "pass"]


def test_demo_bell_text():
    code, out, _ = run("demo", "bell")
    assert code == 0 and "overall: PASS" in out


def test_prop2_json():
    code, rep, _ = run_json("prop2")
    assert code == 0
    row = rep["verdicts"][0]
    for key in ("conclusive_probability", "paper_bound", "computed_bound", "log3_quarter", "pass"):
        assert key in row
    assert row["conclusive_probability"] == pytest.approx(1 / 12, abs=1e-11)
    assert row["strict_relative_entropy"] == "Infinity"


def test_nullspace_trivial():
    code, rep, _ = run_json("nullspace", str(DEMOS / "bell_product_triple.lra"), "--question", "1", "--party", "0")
    assert code == 0
    v = rep["verdicts"][0]
    assert v["kind"] == "trivial_constraint_space" and v["message"] == "trivial: span{I}"
    assert v["evidence"]["dimension"] == 1


def test_nullspace_text_output():
    code, out, _ = run("nullspace", str(DEMOS / "bell_product_triple.lra"), "--question", "1", "--party", "0")
    assert code == 0 and "trivial: span{I}" in out


def test_verify_and_complete():
    f = str(DEMOS / "bell_triple.lra")
    code, rep, _ = run_json("verify", f, "--question", "3", "--protocol", "zz")
    assert code == 0 and rep["verdicts"][0]["kind"] == "authenticated"
    code, rep, _ = run_json("verify", f, "--question", "1", "--protocol", "zz")
    assert code == 1 and rep["pass"] is False
    code, rep, _ = run_json("complete", f)
    assert code == 0 and rep["verdicts"][0]["kind"] == "complete_lra_verified"


def test_classify():
    code, rep, _ = run_json("classify", str(DEMOS / "bell_basis.lra"))
    assert code == 0 and rep["verdicts"][0]["kind"] == "no_partial_lra_entangled_basis"
    code, rep, _ = run_json("classify", str(DEMOS / "bell_triple.lra"))
    assert code == 1 and rep["verdicts"][0]["kind"] == "inconclusive"


def test_conclusive():
    code, rep, _ = run_json("conclusive", str(DEMOS / "bell_triple.lra"), "--question", "1", "--protocol", "yy")
    assert code == 0
    assert rep["verdicts"][0]["evidence"]["success_probability"] == pytest.approx(1 / 3, abs=1e-11)
    code, rep, _ = run_json("conclusive", str(DEMOS / "qutrit_psi4.lra"), "--protocol", "level2")
    assert code == 0
    assert rep["verdicts"][0]["evidence"]["success_probability"] == pytest.approx(1 / 12, abs=1e-11)
    code, rep, _ = run_json("conclusive", str(DEMOS / "bell_triple.lra"), "--question", "2", "--protocol", "yy")
    assert code == 1


def test_run_directives():
    for f in sorted(DEMOS.glob("*.lra")):
        code, rep, err = run_json("run", str(f))
        assert code == 0, (f.name, err, rep)
        assert rep["pass"] is True


def test_usage_errors(tmp_path):
    assert run("bogus")[0] == 2
    assert run()[0] == 2
    assert run("verify", str(DEMOS / "bell_triple.lra"))[0] == 2  # missing flags
    code, _, err = run("verify", str(DEMOS / "bell_triple.lra"), "--question", "9", "--protocol", "zz")
    assert code == 2 and "out of range" in err
    code, _, err = run("verify", str(DEMOS / "bell_triple.lra"), "--question", "1", "--protocol", "nope")
    assert code == 2 and "unknown protocol" in err
    assert run("classify", str(tmp_path / "missing.lra"))[0] == 2


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.lra"
    bad.write_text("parties 2\nstate a = basis:0\nstate b = amps [0.6,0; 0.8,0]\n")
    code, _, err = run("classify", str(bad))
    assert code == 2 and "line 3" in err and "orthogonality" in err
    binary = tmp_path / "bin.lra"
    binary.write_bytes(b"\xff\xfe\x00")
    assert run("classify", str(binary))[0] == 2


def test_complete_requires_full_strategy(tmp_path):
    f = tmp_path / "partial.lra"
    f.write_text("parties 2 2\nstate a = bell:phi+\nstate b = bell:phi-\nprotocol p for=1 {\n  answer 1\n}\n")
    code, _, err = run("complete", str(f))
    assert code == 2 and "questions [2]" in err


def test_run_without_directives(tmp_path):
    f = tmp_path / "plain.lra"
    f.write_text("parties 2\nstate a = basis:0\n")
    assert run("run", str(f))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lrauth", "demo", "bell", "--json"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
    proc = subprocess.run([sys.executable, "-m", "lrauth", "nonsense"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_readme_scenario_runs(tmp_path):
    readme = (Path(__file__).resolve().parent.parent / "README.md").read_text()
    block = readme.split("## Scenario files\n\n```\n")[1].split("```")[0]
    f = tmp_path / "readme.lra"
    f.write_text(block)
    code, rep, err = run_json("run", str(f))
    assert code == 0, err
    assert [v["analysis"] for v in rep["verdicts"]] == ["verify", "nullspace", "conclusive", "prop2"]
