import json
import subprocess
import sys

import pytest

from wittforge.cli import main
from wittforge.gf2k import GF
from wittforge.quadgeom import QuadraticGeometry
from wittforge.quadspace import change_basis, hyperbolic_plane, random_invertible, standard_space

import numpy as np


@pytest.fixture
def files(tmp_path):
    F4 = GF(2)
    paths = {}
    spaces = {
        "h2": hyperbolic_plane(GF(1)),
        "hn": standard_space(F4, 1, True),
        "hh": standard_space(F4, 2, False),
        "hh_conj": change_basis(standard_space(F4, 2, False), random_invertible(F4, 4, np.random.default_rng(3))),
    }
    for name, S in spaces.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(S.to_json()))
        paths[name] = str(p)
    for name in ("hn", "hh"):
        p = tmp_path / f"g_{name}.json"
        p.write_text(json.dumps(QuadraticGeometry(spaces[name]).to_json()))
        paths["g_" + name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decompose(capsys, files):
    code, out, _ = run(capsys, "decompose", "--space", files["h2"])
    assert code == 0
    data = json.loads(out)
    assert data["defect"] == 0 and len(data["hyperbolic_pairs"]) == 1


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "--term", "(bV (+v vx1 vx2) vx3)")
    assert code == 0
    assert json.loads(out)["normal"] == "(+ (bV vx1 vx3) (bV vx2 vx3))"


def test_ef_game_replays(capsys, files):
    argv = ["ef-game", "--m", files["g_hn"], "--n", files["g_hh"], "--rounds", "3", "--seed", "7"]
    code, first, _ = run(capsys, *argv)
    assert code == 0
    _, second, _ = run(capsys, *argv)
    assert first == second
    data = json.loads(first)
    assert data["rounds_played"] == 3 and len(data["transcript"]) == 3


def test_seed_from_environment(capsys, files, monkeypatch):
    argv = ["ef-game", "--m", files["hh"], "--n", files["hh_conj"], "--rounds", "3"]
    monkeypatch.setenv("WITTFORGE_SEED", "7")
    _, from_env, _ = run(capsys, *argv)
    _, explicit, _ = run(capsys, *argv, "--seed", "7")
    assert from_env == explicit


def test_defect_and_isometry(capsys, files):
    _, out, _ = run(capsys, "defect", "--space", files["hn"], "--oracle")
    assert json.loads(out) == {"arf_defect": 1, "defect_oracle": 1}
    _, out, _ = run(capsys, "isometry", "--a", files["hh"], "--b", files["hh_conj"])
    assert json.loads(out)["isometric"] is True
    _, out, _ = run(capsys, "isometry", "--a", files["hh"], "--b", files["hn"])
    assert json.loads(out) == {"isometric": False, "isometry": None}


def test_witt_extend_inline_json(capsys, files):
    e1 = [[1, 0], [0, 0], [0, 0], [0, 0]]
    e3 = [[0, 0], [0, 0], [1, 0], [0, 0]]
    code, out, _ = run(capsys, "witt-extend", "--space", files["hh"], "--dom", json.dumps([e1]), "--img", json.dumps([e3]))
    assert code == 0
    assert json.loads(out)["matrix"][2][0] == [1, 0]


def test_geometry_commands(capsys, files):
    code, out, _ = run(capsys, "geometry-build", "--space", files["hn"])
    assert code == 0 and json.loads(out)["omega0"] == 1
    U = json.dumps([[[1, 0], [0, 0], [0, 0], [0, 0]]])
    _, out, _ = run(capsys, "realize-form", "--geometry", files["g_hn"], "--U", U, "--targets", "[[0, 1]]")
    assert json.loads(out)["values"] == [[0, 1]]
    _, out, _ = run(capsys, "flip-defect", "--geometry", files["g_hn"], "--U", U)
    data = json.loads(out)
    assert data["omega_before"] + data["omega_after"] == 1


def test_extend_scalars(capsys, files):
    code, out, _ = run(capsys, "extend-scalars", "--space", files["h2"], "--k", "3")
    assert code == 0 and json.loads(out)["field"]["k"] == 3
    code, _, err = run(capsys, "extend-scalars", "--geometry", files["g_hn"], "--k", "4")
    assert code == 1 and json.loads(err)["error"] == "EvenDegreeForbidden"


def test_terms(capsys, files):
    asg = json.dumps({"vx1": [[0, 0], [0, 0], [1, 0], [0, 0]]})
    _, out, _ = run(capsys, "eval-term", "--term", "(bQ qstar vx1)", "--geometry", files["g_hn"], "--assign", asg)
    assert json.loads(out) == {"sort": "K", "value": [1, 0]}
    _, out, _ = run(capsys, "equiv", "--t1", "(bV vx1 vx2)", "--t2", "(bV vx2 vx1)")
    assert json.loads(out) == {"verdict": "Equal"}
    _, out, _ = run(capsys, "equiv", "--t1", "(bQ qstar vx1)", "--t2", "(bV vx1 vx1)")
    assert json.loads(out)["verdict"] == "Counterexample"


def test_field_info(capsys):
    _, out, _ = run(capsys, "field-info", "--k", "2")
    data = json.loads(out)
    assert data["order"] == 4 and data["field"]["modulus"] == [1, 1, 1]


def test_domain_errors_are_json(capsys, files, tmp_path):
    code, out, err = run(capsys, "normalize", "--term", "(bV vx1")
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "TermSyntaxError"
    code, _, err = run(capsys, "decompose", "--space", str(tmp_path / "missing.json"))
    assert code == 1 and "error" in json.loads(err)
    bad = tmp_path / "deg.json"
    bad.write_text(json.dumps({"field": {"k": 1, "modulus": [1, 1]}, "gram": [[[0], [0]], [[0], [0]]], "qdiag": [[1], [0]]}))
    code, _, err = run(capsys, "decompose", "--space", str(bad))
    assert code == 1 and json.loads(err)["error"] == "Degenerate"


def test_output_file(capsys, files, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "--output", str(target), "decompose", "--space", files["h2"])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["defect"] == 0


def test_usage_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "wittforge", "no-such-command"], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "wittforge", "decompose"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_byte_identical_subprocess_runs(files):
    argv = [sys.executable, "-m", "wittforge", "ef-game", "--m", files["hh"], "--n", files["hh_conj"], "--rounds", "4", "--seed", "11"]
    a = subprocess.run(argv, capture_output=True)
    b = subprocess.run(argv, capture_output=True)
    assert a.returncode == 0 and a.stdout == b.stdout


def test_selftest_quick(capsys):
    code, out, err = run(capsys, "selftest", "--quick")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert len(data["checks"]) == 10
    assert err.count("[PASS]") == 10
