from __future__ import annotations

import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from gradlie.cli import main
from gradlie.exactla import scalar_str


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    text = out.getvalue()
    try:
        report = json.loads(text) if text else None
    except json.JSONDecodeError:
        report = text
    return code, report


def test_catalog_list():
    code, rep = run("catalog", "list")
    assert code == 0
    assert [f["name"] for f in rep["fixtures"]] == ["n1", "n2", "m2", "witt_pos", "witt_nonneg", "exampleL", "Rn1", "Rn2"]


def test_check_jacobi_passes_for_n2():
    code, rep = run("check", "jacobi", "--name", "n2", "--truncate", "24")
    assert code == 0
    assert rep["violations"] == [] and rep["verdict"] == "pass"


def test_check_jacobi_flags_corrupted_file(tmp_path):
    code, _ = run("algebra", "export", "--name", "n1", "--truncate", "9", "--json", str(tmp_path / "n1.json"))
    assert code == 0
    doc = json.loads((tmp_path / "n1.json").read_text())
    term = doc["brackets"][0][2][0]
    term[1] = scalar_str(-Fraction(term[1]))
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    code, rep = run("check", "jacobi", "--input", str(tmp_path / "bad.json"))
    assert code == 1
    assert rep["violations"]


def test_check_grading():
    code, rep = run("check", "grading", "--name", "n1", "--truncate", "15")
    assert code == 0 and rep["natural_grading"] is True


def test_signature_of_witt_nonneg_is_not_pronilpotent():
    code, rep = run("signature", "--name", "witt_nonneg", "--truncate", "20")
    assert code == 1
    assert "not pro-nilpotent" in rep["message"]


def test_series():
    code, rep = run("series", "derived", "--name", "witt_nonneg", "--truncate", "20")
    assert code == 0
    assert rep["min_degrees"][:4] == [0, 1, 3, 7]


def test_algebra_show_with_parameters():
    code, rep = run("algebra", "show", "--name", "Rn2", "--beta", "1=1/2", "--truncate", "12")
    assert code == 0 and rep["graded"] is False
    code, rep = run("algebra", "show", "--name", "Rn1", "--alpha", "2=1", "--truncate", "24")
    assert code == 1 and rep["triple"] == ["x", "y", "e1"]


@pytest.mark.parametrize("argv", [
    ["algebra", "show", "--name", "n1", "--alpha", "2=1", "--truncate", "9"],
    ["algebra", "show", "--name", "Rn1", "--alpha", "two=1", "--truncate", "9"],
    ["algebra", "show", "--name", "nope", "--truncate", "9"],
    ["algebra", "show", "--name", "n1"],
    ["h1", "--name", "n1", "--truncate", "12", "--margin", "1"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv):
    code, _ = run(*argv)
    assert code == 2


def test_malformed_file_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"name": "x", "truncation": 2, "basis": [], "brackets": [[1, 2, []]]}')
    code, _ = run("check", "jacobi", "--input", str(p))
    assert code == 2
    assert "$.brackets[0]" in capsys.readouterr().err


def test_derivations_and_h1():
    code, rep = run("derivations", "--name", "n1", "--truncate", "18", "--margin", "3")
    assert code == 0
    dims = {r["weight"]: r["dimension"] for r in rep["weights"] if r["stable"]}
    assert [dims[w] for w in range(6)] == [2, 1, 1, 2, 1, 1]
    code, rep = run("h1", "--name", "n1", "--truncate", "18")
    assert code == 1 and rep["verdict"] == "fail"
    code, rep = run("h1", "--name", "Rn1", "--truncate", "18")
    assert code == 0


def test_h2_example():
    code, rep = run("h2", "--name", "Rn1", "--truncate", "18", "--margin", "3")
    assert code == 0
    assert all(r["h2"] == 0 for r in rep["weights"] if r["stable"])


def test_complete_and_nilindep():
    code, rep = run("complete", "--name", "Rn1", "--truncate", "18", "--min-stable", "10")
    assert code == 0 and rep["complete"] is True
    code, rep = run("complete", "--name", "Rn1", "--truncate", "9", "--min-stable", "10")
    assert code == 1 and rep["verdict"] == "indeterminate"
    code, rep = run("nilindep", "--name", "n2", "--truncate", "24")
    assert code == 0 and rep["count"] == 2


def test_extend(tmp_path):
    spec = tmp_path / "ds.json"
    spec.write_text(json.dumps({"derivations": [
        {"closed_form": "n1", "params": {"alpha1": "1"}},
        {"closed_form": "n1", "params": {"alpha1": "-1", "beta2": "1"}},
    ]}))
    code, rep = run("extend", "--base", "n1", "--derivations", str(spec), "--truncate", "12")
    assert code == 0
    _, ref = run("algebra", "export", "--name", "Rn1", "--truncate", "12")
    assert rep["extension"]["brackets"] == ref["brackets"]
    spec.write_text(json.dumps({"derivations": [{"images": [[1, [[1, "1"]]]]}]}))
    code, rep = run("extend", "--base", "n1", "--derivations", str(spec), "--truncate", "12")
    assert code == 1 and "not a derivation" in rep["message"]


def test_json_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        code, _ = run("h1", "--name", "n2", "--truncate", "24", "--json", str(p))
        assert code == 1
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gradlie.cli", "catalog", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"
