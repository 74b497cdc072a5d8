import json

import pytest

from modinv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_clone_check_exit_zero(capsys):
    code, out, _ = run(capsys, "clone-check", "--rtilde", "2", "--m", "3")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass"
    assert set(doc) >= {"params", "block_count", "multiplicities", "s_residual", "iso_bijection",
                        "s_match_residual", "weights_parent", "weights_target"}


def test_verify_builder(capsys):
    code, out, _ = run(capsys, "verify", "--theory", "D2:9", "--builder", "dinv", "--rtilde", "1", "--m", "3")
    assert code == 0 and json.loads(out)["verdict"] == "pass"


def test_verify_corrupted_file(tmp_path, capsys):
    path = tmp_path / "inv.json"
    assert main(["build", "--family", "dinv", "--rtilde", "2", "--m", "3", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    doc["M"][0][2] = doc["M"][2][0] = 1
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify", "--in", str(path), "--tol", "1e-9")
    assert code == 1 and "residual" in err


def test_invalid_input_exit_two(capsys):
    assert run(capsys, "verify", "--theory", "D2:9", "--builder", "dinv", "--rtilde", "1", "--m", "4")[0] == 2
    assert run(capsys, "smatrix", "--theory", "X:3")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "build", "--builder", "bseries", "--ltilde", "1", "--m", "3", "--literal-subscripts")[0] == 2


def test_extend_scinv_refused(capsys):
    code, _, err = run(capsys, "extend", "--theory", "D2:8", "--builder", "scinv")
    assert code == 1 and "fixed point resolution required" in err


def test_search_and_meromorphic(capsys):
    code, out, _ = run(capsys, "search", "--theory", "D2:15")
    assert code == 0 and json.loads(out)["galex_count"] >= 2
    code, out, _ = run(capsys, "meromorphic", "--m", "3")
    assert code == 0 and json.loads(out)["c"] == "8/1"


def test_zcompare(capsys):
    code, out, _ = run(capsys, "zcompare", "--theory", "u1:6", "--builder", "sc", "--current", "6", "--radius", "3/2")
    assert code == 0 and json.loads(out)["equal"]
    code, out, _ = run(capsys, "zcompare", "--theory", "orb:9", "--builder", "dinv", "--rtilde", "1", "--m", "3",
                       "--against", "orb:1")
    assert code == 0 and json.loads(out)["equal"]
    code, _, err = run(capsys, "zcompare", "--theory", "u1:6", "--builder", "diag", "--radius", "2/3")
    assert code == 1 and "differ" in err


def test_spectrum_smatrix_fusion(capsys, monkeypatch):
    monkeypatch.setenv("MIPF_QORDER", "4")
    code, out, _ = run(capsys, "spectrum", "--theory", "orb:2")
    doc = json.loads(out)
    assert code == 0 and len(doc["primaries"]) == 9
    assert len(doc["characters"]["[sigma]"]["coefficients"]) == 8
    code, out, _ = run(capsys, "smatrix", "--theory", "B2:2")
    assert code == 0 and json.loads(out)["labels"][0] == "O"
    code, out, _ = run(capsys, "fusion", "--theory", "u1:2")
    assert code == 0 and out.startswith("a,b,c,N")


def test_deterministic_artifacts(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["clone-check", "--rtilde", "1", "--m", "3", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_env_tolerance(monkeypatch, capsys):
    monkeypatch.setenv("MIPF_TOL", "0.5")
    assert run(capsys, "verify", "--theory", "u1:2", "--builder", "diag")[0] == 2
    # a tolerance below double precision makes modular-data construction itself fail
    monkeypatch.setenv("MIPF_TOL", "1e-20")
    code, _, err = run(capsys, "verify", "--theory", "u1:7", "--builder", "diag")
    assert code == 1 and "residual" in err
