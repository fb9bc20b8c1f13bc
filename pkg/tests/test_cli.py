import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from tgkit.cli import canonical_json, parse_algebra_file, parse_builtin, run
from tgkit.errors import AlgebraFileError, BadParams


def _json_out(capsys, argv):
    code = run(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


# ------------------------------------------------------------------ parsing

def test_parse_builtin_forms():
    assert parse_builtin("sl2") == ("sl2", {})
    assert parse_builtin("sl2:1,2") == ("sl2", {"a": 1, "b": 2})
    assert parse_builtin("sl2:0.5,b=2") == ("sl2", {"a": 0.5, "b": 2})
    assert parse_builtin("twisted-h2:kappa=2,chart=cartesian") == \
        ("twisted-h2", {"kappa": 2, "chart": "cartesian"})
    with pytest.raises(BadParams):
        parse_builtin("sl2:1,2,3")
    with pytest.raises(BadParams):
        parse_builtin("sl2:1,a=2")


def test_algebra_file_position_in_errors():
    base = {"dim": 3, "brackets": [{"i": 0, "j": 1, "coeffs": [0, 0, 1]}]}

    def err(data):
        with pytest.raises(AlgebraFileError) as e:
            parse_algebra_file(data)
        return str(e.value)

    msg = err({**base, "brackets": base["brackets"] * 2})
    assert "brackets[1]" in msg and "duplicate pair (0, 1)" in msg
    msg = err({**base, "brackets": [{"i": 1, "j": 0, "coeffs": [0, 0, 1]}]})
    assert "need i < j" in msg
    msg = err({**base, "gram": [[1, 0], [0, 1]]})
    assert "gram must be 3x3" in msg
    msg = err({**base, "frobenius": 1})
    assert "unknown keys: ['frobenius']" in msg
    msg = err({"dim": 3, "brackets": [{"i": 0, "j": 5, "coeffs": [0, 0, 1]}]})
    assert "out of range" in msg
    assert "dim" in err({"brackets": []})


# ----------------------------------------------------------------- commands

def test_tg_check_certified_subspace(capsys):
    code = run(["tg-check", "--builtin", "sl2", "--subspace", "0,1,0;0,0,1"])
    assert code == 0
    out = capsys.readouterr().out
    assert "ok: true" in out
    assert "exit: 0" in out


def test_tg_check_failure_still_reports(capsys):
    code, rep = _json_out(capsys, ["tg-check", "--builtin", "sl2",
                                   "--subspace", "1,0,0;0,1,0"])
    assert code == 2
    assert rep["result"]["ok"] is False
    assert rep["result"]["witness"]["kind"] == "bracket"
    assert rep["result"]["residual"] > 0.1


def test_classify_circle_normal(capsys):
    code, rep = _json_out(capsys, ["classify", "--builtin", "nonhomo",
                                   "--normal", "0,0,0,1"])
    assert code == 0
    assert rep["case_tag"] == "CircleNormal"
    assert rep["result"]["frenet"]["order"] == 1
    assert abs(rep["result"]["frenet"]["curvatures"][0] - 2.0) < 1e-12
    assert np.abs(np.array(rep["result"]["character_hint"])
                  - [2.0, 0, 0, 0]).max() < 1e-12


def test_classify_helix_recovers_parameters(capsys):
    code, rep = _json_out(capsys, ["classify", "--builtin", "sl2:1,2",
                                   "--normal", "1,0,0"])
    assert code == 0
    assert rep["case_tag"] == "HelixOrderTwo"
    assert rep["result"]["helix"]["recovered_a"] == 1.0
    assert rep["result"]["helix"]["recovered_b"] == 2.0


def test_classify_rejects_non_tg_normal(capsys):
    code, rep = _json_out(capsys, ["classify", "--builtin", "heisenberg",
                                   "--normal", "0,0,1"])
    assert code == 2
    assert rep["result"]["ok"] is False


def test_frenet_command(capsys):
    code, rep = _json_out(capsys, ["frenet", "--builtin", "sl2:1,2",
                                   "--normal", "1,0,0"])
    assert code == 0
    assert rep["result"]["order"] == 2
    assert rep["result"]["curvatures"] == [4.0, 2.0]


def test_curvature_command(capsys):
    code, rep = _json_out(capsys, ["curvature", "--builtin", "heisenberg"])
    assert code == 0
    diag = rep["result"]["coordinate_plane_sectionals"]
    assert np.abs(np.array(diag) - [-0.75, 0.25, 0.25]).max() < 1e-12
    assert rep["result"]["pairs"] == [[0, 1], [0, 2], [1, 2]]


def test_info_command(capsys):
    code, rep = _json_out(capsys, ["info", "--builtin", "sl2:1,1.5"])
    assert code == 0
    assert rep["result"]["dim"] == 3
    assert rep["residuals"]["jacobi"] < 1e-12
    code2 = run(["info", "--builtin", "hyperbolic2"])
    assert code2 == 0
    assert "chart" in capsys.readouterr().out


def test_search_deterministic_output(capsys):
    code, rep = _json_out(capsys, ["search", "--builtin", "sl2"])
    first = canonical_json(rep)
    assert code == 0
    code, rep2 = _json_out(capsys, ["search", "--builtin", "sl2"])
    assert canonical_json(rep2) == first
    assert rep["result"]["count"] == 2
    normals = np.array(rep["result"]["normals"])
    d = np.sqrt(5.0)
    assert np.abs(normals[0] - [1 / d, 2 / d, 0.0]).max() < 1e-9
    assert np.abs(normals[1] - [1.0, 0.0, 0.0]).max() < 1e-9
    assert max(rep["result"]["residuals"]) < 1e-9
    assert rep["result"]["continuum"] is False


def test_search_abelian_continuum(capsys):
    code, rep = _json_out(capsys, ["search", "--builtin", "abelian"])
    assert code == 0
    assert rep["result"]["continuum"] is True


def test_verify_single_entry(capsys):
    code, rep = _json_out(capsys, ["verify", "heisenberg"])
    assert code == 0
    assert rep["result"]["ok"] is True
    (entry,) = rep["result"]["entries"]
    assert entry["name"] == "heisenberg"
    assert all(row["ok"] for row in entry["checks"])


def test_verify_twisted_with_grid(capsys):
    code = run(["verify", "twisted-h2", "--tol", "grid=50"])
    out = capsys.readouterr().out
    assert code == 0
    assert "[pass] twisted-h2" in out


def test_geodesic_csv_out(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    code = run(["geodesic", "--builtin", "hyperbolic2", "--x0", "0.5,0.3",
                "--v0", "1,0", "--tmax", "1", "--out", str(path)])
    assert code == 0
    capsys.readouterr()
    raw = np.genfromtxt(path, delimiter=",", names=True)
    assert raw.dtype.names == ("t", "x1", "x2", "v1", "v2")
    assert abs(raw[-1]["x1"] - 1.5) < 1e-8


def test_out_json_report(tmp_path, capsys):
    path = tmp_path / "report.json"
    code = run(["tg-check", "--builtin", "sl2", "--normal", "1,0,0",
                "--out", str(path)])
    assert code == 0
    capsys.readouterr()
    rep = json.loads(path.read_text())
    assert rep["result"]["ok"] is True
    assert len(rep["input_digest"]) == 64
    assert "tg_residual" in rep["tolerances_used"]


def test_digest_depends_on_input(capsys):
    _, a = _json_out(capsys, ["info", "--builtin", "sl2:1,1"])
    _, b = _json_out(capsys, ["info", "--builtin", "sl2:1,1"])
    _, c = _json_out(capsys, ["info", "--builtin", "sl2:1,2"])
    assert a["input_digest"] == b["input_digest"]
    assert a["input_digest"] != c["input_digest"]


def test_tol_override_reflected(capsys):
    code, rep = _json_out(capsys, ["tg-check", "--builtin", "sl2", "--normal",
                                   "1,0,0", "--tol", "tg_residual=1e-3"])
    assert code == 0
    assert rep["tolerances_used"]["tg_residual"] == 1e-3


# -------------------------------------------------------------- error paths

def test_input_errors_exit_1(capsys):
    cases = [
        ["info", "--builtin", "so3"],
        ["classify", "--builtin", "sl2", "--normal", "1,0"],
        ["classify", "--builtin", "sl2", "--normal", "0,0,0"],
        ["tg-check", "--builtin", "sl2"],
        ["frenet", "--builtin", "sl2", "--normal", "one,0,0"],
        ["tg-check", "--builtin", "sl2", "--normal", "1,0,0",
         "--tol", "bogus=1"],
        ["tg-check", "--builtin", "sl2", "--normal", "1,0,0",
         "--tol", "tg_residual=abc"],
        ["geodesic", "--builtin", "sl2", "--x0", "0,0,0", "--v0", "1,0,0"],
        ["verify", "so3"],
    ]
    for argv in cases:
        assert run(argv) == 1, argv
        err = capsys.readouterr().err
        assert err.startswith("tgkit: error:"), argv


def test_algebra_file_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "dim": 3,
        "brackets": [{"i": 0, "j": 1, "coeffs": [0.1, 0, 2]},
                     {"i": 0, "j": 2, "coeffs": [2, -2, 0]},
                     {"i": 1, "j": 2, "coeffs": [0, -2, 0]}]}))
    assert run(["info", "--algebra", str(bad)]) == 1
    assert "jacobi" in capsys.readouterr().err.lower()
    notjson = tmp_path / "notjson.json"
    notjson.write_text("{nope")
    assert run(["info", "--algebra", str(notjson)]) == 1
    assert "invalid JSON" in capsys.readouterr().err
    assert run(["info", "--algebra", str(tmp_path / "missing.json")]) == 1
    capsys.readouterr()


def test_algebra_file_happy_path(tmp_path, capsys):
    good = tmp_path / "sl2.json"
    good.write_text(json.dumps({
        "dim": 3, "basis": ["E1", "E2", "E3"],
        "brackets": [{"i": 0, "j": 1, "coeffs": [0, 0, 2]},
                     {"i": 0, "j": 2, "coeffs": [2, -2, 0]},
                     {"i": 1, "j": 2, "coeffs": [0, -2, 0]}]}))
    code, rep = _json_out(capsys, ["classify", "--algebra", str(good),
                                   "--normal", "1,0,0"])
    assert code == 0
    assert rep["case_tag"] == "HelixOrderTwo"
    assert rep["result"]["helix"]["recovered_a"] == 1.0
    assert rep["result"]["helix"]["recovered_b"] == 1.0


# ------------------------------------------------------------ console script

def test_console_script():
    exe = shutil.which("tgkit")
    if exe:
        cmd = [exe]
    else:
        cmd = [sys.executable, "-m", "tgkit.cli"]
    out = subprocess.run(cmd + ["tg-check", "--builtin", "sl2",
                                "--subspace", "0,1,0;0,0,1"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "exit: 0" in out.stdout
