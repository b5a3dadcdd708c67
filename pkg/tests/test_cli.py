"""Command-line interface: verbs, exit codes and report stability."""
import json

import pytest

from structensor.cli import main, run
from structensor.jsonio import dumps
from structensor.tensor import SymmetricTensor, rank_one_pow


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_eval_at_origin(capsys):
    code, rep = run(["eval", "--input", "bundled:sec54_tensor", "--x", "0,0"])
    assert code == 0 and rep["value"] == 0.0
    assert json.loads(capsys.readouterr().out)["value"] == 0.0


def test_inherit_node2():
    code, rep = run(["inherit", "--input", "bundled:node2_generating", "--q", "2", "--p", "3"])
    assert code == 0
    B = SymmetricTensor.from_dict(rep["tensor"])
    assert B.allclose(rank_one_pow((1.0, 4.0, 16.0), 4), rtol=1e-9)


def test_check_sos_sec55_is_in():
    # the tensor has a validated Gram certificate, so the check exits 0 (In)
    code, rep = run(["check", "--target", "sos", "--input", "bundled:sec55_tensor"])
    assert code == 0 and rep["status"] == "In"
    assert rep["residuals"]["lambda_min"] > 0


def test_check_cd_hankel_out():
    code, rep = run(["check", "--target", "cd-hankel", "--input", "bundled:sec54_generating"])
    assert code == 1 and rep["status"] == "Out"


def test_prony_inconclusive_exits_2(tmp_path):
    # a generic length-5 generating vector needs three nodes, more than fit
    path = _write(tmp_path, "h.json", {"order": 4, "dim": 2, "h": [1.0, -2.0, 0.5, 3.0, 1.5]})
    code, rep = run(["prony", "--input", path])
    assert code == 2 and rep["status"] == "Inconclusive" and rep["reason"]


def test_malformed_input_names_field(tmp_path, capsys):
    path = _write(tmp_path, "bad.json", {"order": 4, "dim": 2, "entries": "oops"})
    code, rep = run(["eval", "--input", path, "--x", "1,1"])
    assert code == 3 and rep["status"] == "input_error"
    assert "entries" in rep["message"]
    assert "entries" in capsys.readouterr().err
    path = _write(tmp_path, "bad2.json", {"dim": 2, "entries": [1, 2, 3, 4, 5]})
    code, rep = run(["eval", "--input", path, "--x", "1,1"])
    assert code == 3 and "order" in rep["message"]


def test_missing_file_and_usage_errors(tmp_path):
    assert main(["eval", "--input", str(tmp_path / "nope.json"), "--x", "1"]) == 3
    assert main(["frobnicate"]) == 3
    assert main(["eval", "--input", "bundled:no_such_thing", "--x", "1"]) == 3


def test_eval_dimension_mismatch():
    code, rep = run(["eval", "--input", "bundled:sec54_tensor", "--x", "1,2,3"])
    assert code == 3


def test_outputs_are_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["check", "--target", "pd-probe", "--input", "bundled:sec54_tensor", "--seed", "3"]
    run(argv + ["--out", str(a)])
    run(argv + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert a.read_text() == dumps(rep)


def test_text_format(capsys):
    code, _ = run(["eval", "--input", "bundled:sec54_tensor", "--x", "1,0", "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0 and "value: 1.9999" in out


def test_hadamard_of_decompositions(tmp_path):
    d1 = _write(tmp_path, "d1.json", {"dim": 2, "vectors": [[1.0, 2.0]], "weights": [1.0]})
    d2 = _write(tmp_path, "d2.json", {"dim": 2, "vectors": [[3.0, 1.0]], "weights": [2.0]})
    assert run(["hadamard", "--input", d1, "--input", d2])[0] == 3
    code, rep = run(["hadamard", "--input", d1, "--input", d2, "--order", "4"])
    assert code == 0
    assert SymmetricTensor.from_dict(rep["tensor"]).allclose(rank_one_pow((3.0, 2.0), 4) * 2.0)


def test_reproduce_sec54():
    code, rep = run(["reproduce", "sec54"])
    verdicts = {c["claim"]: c["verdict"] for c in rep["claims"]}
    assert rep["status"] == "partial" and code == 2
    assert "not_reproduced" in verdicts.values()


def test_harness_verb():
    code, rep = run(["harness", "--order", "4", "--dim", "2", "--samples", "2"])
    assert code == 0 and rep["status"] == "In"


@pytest.mark.parametrize("target", ["sos", "ssos", "sos-star", "pd-probe", "cop-probe"])
def test_check_targets_run(target):
    code, rep = run(["check", "--target", target, "--input", "bundled:sec54_tensor"])
    assert code in (0, 1, 2)
    assert rep["status"] in {"In", "Out", "Inconclusive", "positive", "negative_witness", "zero_boundary"}
