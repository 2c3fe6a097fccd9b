import json
import subprocess
import sys

import pytest

from lipfree import jsonio
from lipfree.cli import main
from lipfree.free_space import Molecule
from lipfree.lip_functions import LipFunction


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    space = {"points": ["e", "a", "b"], "base": "e", "dist": [[0, 1, 1], [1, 0, 2], [1, 2, 0]]}
    (tmp_path / "s.json").write_text(json.dumps(space))
    (tmp_path / "f.json").write_text(json.dumps({"space": "s.json", "values": {"e": 0, "a": 1, "b": -1}}))
    (tmp_path / "m.json").write_text(json.dumps({"space": "s.json", "coeffs": {"a": 1, "b": -1}}))
    return tmp_path


class TestCommands:
    def test_validate(self, capsys, files):
        code, out, _ = run(capsys, "validate", "--space", files / "s.json")
        assert code == 0 and "3 points" in out

    def test_validate_bad_metric(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"points": ["a", "b", "c"], "base": None, "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
        code, out, _ = run(capsys, "validate", "--space", p, "--format", "json")
        assert code == 1
        rep = json.loads(out)
        assert rep["axiom"] == "triangle" and rep["witness"] == [0, 1, 2]

    def test_lipnorm(self, capsys, files):
        code, out, _ = run(capsys, "lipnorm", "--space", files / "s.json", "--function", files / "f.json", "--format", "json")
        rep = json.loads(out)
        assert code == 0
        assert rep == {"lipschitz_number": 1.0, "sup_norm": 1.0, "lip_norm": 1.0, "vanishes_at_base": True}

    def test_space_from_reference(self, capsys, files):
        code, out, _ = run(capsys, "lipnorm", "--function", files / "f.json")
        assert code == 0 and "L(f)" in out

    def test_aenorm_certify(self, capsys, files):
        code, out, _ = run(capsys, "aenorm", "--space", files / "s.json", "--molecule", files / "m.json", "--certify", "--format", "json")
        rep = json.loads(out)
        assert code == 0
        assert rep["primal"] == rep["dual"] == 2.0 and rep["gap"] == 0
        assert rep["plan"] == [["a", "b", 1.0]]
        assert set(rep["witness"]) == {"e", "a", "b"}
        assert all(rep["checks"].values())

    def test_aenorm_exact(self, capsys, files):
        code, out, _ = run(capsys, "aenorm", "--molecule", files / "m.json", "--exact", "--format", "json")
        assert json.loads(out) == {"primal": 2, "dual": 2, "gap": 0}

    def test_pair(self, capsys, files):
        code, out, _ = run(capsys, "pair", "--function", files / "f.json", "--molecule", files / "m.json", "--format", "json")
        assert code == 0 and json.loads(out) == {"pairing": 2.0}

    def test_verify_example25(self, capsys):
        code, out, _ = run(capsys, "verify", "example25", "--n-max", 8)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("PASS example_2_5")
        rows = [l.split() for l in lines[2:]]
        assert [int(r[0]) for r in rows] == list(range(9))
        assert [float(r[3]) for r in rows] == list(range(1, 10))

    def test_example25_exact_json(self, capsys):
        code, out, _ = run(capsys, "example25", "--n-max", 2, "--exact", "--format", "json")
        rep = json.loads(out)
        assert code == 0 and rep["passed"]
        assert [r["ae_norm_primal"] for r in rep["details"]["table"]] == ["1/2", "5/8", "21/32"]

    def test_verify_with_space(self, capsys, files):
        code, out, _ = run(capsys, "verify", "lattice", "--space", files / "s.json", "--trials", 20)
        assert code == 0 and out.startswith("PASS lattice_bound")

    def test_verify_failure_exit_code(self, capsys, monkeypatch):
        from lipfree import theorem_lab as lab

        failing = lab.CheckResult("fake", passed=False, trials=1, counterexample={"assertion": "mediant"})
        monkeypatch.setitem(lab.SUITES, "lattice", lambda cfg: failing)
        code, out, _ = run(capsys, "verify", "lattice")
        assert code == 1 and out.startswith("FAIL fake")


class TestGen:
    def test_grid(self, capsys):
        code, out, _ = run(capsys, "gen", "grid", "--length", 4, "--spacing", 1)
        sp = json.loads(out)
        assert code == 0 and len(sp["points"]) == 5 and sp["base"] == sp["points"][0]

    def test_augmented_interval(self, capsys):
        code, out, _ = run(capsys, "gen", "augmented-interval", "--n", 2)
        sp = json.loads(out)
        assert len(sp["points"]) == 8 and sp["base"] == "e"

    def test_random_validates(self, capsys, tmp_path):
        out_file = tmp_path / "r.json"
        assert run(capsys, "gen", "random", "--points", 10, "--seed", 7, "--out", out_file)[0] == 0
        code, out, _ = run(capsys, "validate", "--space", out_file)
        assert code == 0 and "10 points" in out

    def test_bad_params(self, capsys):
        assert run(capsys, "gen", "grid", "--length", 1, "--spacing", 0.3)[0] == 2
        assert run(capsys, "gen", "grid", "--length", 1)[0] == 2
        assert run(capsys, "gen", "augmented-interval", "--n", 99)[0] == 2
        assert run(capsys, "gen", "random", "--points", 0)[0] == 2


class TestRoundTrip:
    @pytest.mark.parametrize("kind", [["random", "--points", "6", "--seed", "2"], ["grid", "--length", "3", "--spacing", "0.5"], ["augmented-interval", "--n", "1"]])
    @pytest.mark.parametrize("exact", [False, True])
    def test_space(self, capsys, kind, exact):
        argv = ["gen", *kind] + (["--exact"] if exact else [])
        _, out, _ = run(capsys, *argv)
        X = jsonio.space_from_json(json.loads(out), exact=exact)
        assert jsonio.dumps(jsonio.space_to_json(X)) == out

    def test_function_and_molecule(self, files):
        X = jsonio.space_from_json(files / "s.json")
        f = LipFunction.of(X, [0, 0.25, -3.5])
        m = Molecule.of(X, [0, 1.5, -0.125])
        fj = jsonio.function_to_json(f, "s.json")
        mj = jsonio.molecule_to_json(m, "s.json")
        assert jsonio.function_to_json(jsonio.function_from_json(fj, X), "s.json") == fj
        assert jsonio.molecule_to_json(jsonio.molecule_from_json(mj, X), "s.json") == mj

    def test_exact_function(self, files):
        X = jsonio.space_from_json(files / "s.json", exact=True)
        fj = {"space": "s.json", "values": {"e": 0, "a": "1/3", "b": "-2/7"}}
        assert jsonio.function_to_json(jsonio.function_from_json(fj, X), "s.json") == fj


class TestInputErrors:
    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 2 and "invalid choice" in err

    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{nope")
        code, _, err = run(capsys, "validate", "--space", p)
        assert code == 2 and "malformed" in err

    def test_mismatch(self, capsys, files):
        (files / "g.json").write_text(json.dumps({"values": {"e": 0, "zz": 1}}))
        code, _, err = run(capsys, "lipnorm", "--space", files / "s.json", "--function", files / "g.json")
        assert code == 2 and "mismatch" in err

    def test_missing_value(self, capsys, files):
        (files / "g.json").write_text(json.dumps({"values": {"e": 0}}))
        code, _, err = run(capsys, "lipnorm", "--space", files / "s.json", "--function", files / "g.json")
        assert code == 2 and "mismatch" in err

    def test_missing_file(self, capsys, files):
        code, _, err = run(capsys, "lipnorm", "--space", files / "nope.json", "--function", files / "f.json")
        assert code == 2 and "not found" in err

    def test_invalid_space_on_load(self, capsys, files):
        (files / "bad.json").write_text(json.dumps({"points": ["a", "b"], "base": "a", "dist": [[0, 1], [2, 0]]}))
        code, _, err = run(capsys, "lipnorm", "--space", files / "bad.json", "--function", files / "f.json")
        assert code == 2 and "symmetry" in err

    def test_messages_distinct(self, capsys, files, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{nope")
        (files / "g.json").write_text(json.dumps({"values": {"zz": 1}}))
        errs = [
            run(capsys, "frobnicate")[2],
            run(capsys, "validate", "--space", p)[2],
            run(capsys, "lipnorm", "--space", files / "s.json", "--function", files / "g.json")[2],
        ]
        assert len(set(errs)) == 3

    @pytest.mark.parametrize("flag", [["--trials", "0"], ["--tol", "0"], ["--tol", "-1e-3"], ["--atol", "0"]])
    def test_config_invariants(self, capsys, flag):
        assert run(capsys, "verify", "lattice", *flag)[0] == 2

    def test_unpointed_molecule(self, capsys, tmp_path):
        (tmp_path / "u.json").write_text(json.dumps({"points": ["a", "b"], "base": None, "dist": [[0, 1], [1, 0]]}))
        (tmp_path / "m.json").write_text(json.dumps({"coeffs": {"a": 1}}))
        assert run(capsys, "aenorm", "--space", tmp_path / "u.json", "--molecule", tmp_path / "m.json")[0] == 2


class TestDeterminism:
    @pytest.mark.parametrize("suite", ["amalgam", "duality", "example25", "elementary"])
    def test_byte_identical(self, capsys, suite):
        argv = ["verify", suite, "--seed", "11", "--trials", "50", "--format", "json"]
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        assert a == b and json.loads(a)["passed"]

    def test_console_script(self, tmp_path):
        cmd = [sys.executable, "-m", "lipfree.cli", "verify", "lattice", "--trials", "30", "--format", "json"]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert a == b
