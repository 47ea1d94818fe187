import json
import subprocess
import sys

import pytest

from liekit.algebra import LieAlgebra
from liekit.cli import main
from liekit.derivations import derivation_space
from liekit.families import FamilyParams, build_family, build_Q
from liekit.verify import fingerprint


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def q5(tmp_path, capsys):
    path = tmp_path / "q5.json"
    assert run(capsys, "construct", "--family", "q", "--m", "2", "-o", str(path))[0] == 0
    return path


class TestConstruct:
    def test_q5(self, q5, capsys, tmp_path):
        obj = json.loads(q5.read_text())
        assert obj["dim"] == 5 and len(obj["brackets"]) == 4
        code, out, _ = run(capsys, "construct", "--family", "q", "--m", "2", "-o", str(tmp_path / "x.json"))
        assert out.strip() == "dim 5, brackets 4"

    def test_stdout(self, capsys):
        code, out, err = run(capsys, "construct", "--family", "g5", "--m", "2")
        assert code == 0 and json.loads(out)["nilradical_dim"] == 5
        assert err.strip() == "dim 6, brackets 8"  # 4 in Q5, h acts on e1, e3, e4, e5

    def test_family3_m2(self, capsys):
        code, _, err = run(capsys, "construct", "--family", "g3", "--m", "2")
        assert code == 2 and "family 3 requires m >= 3" in err

    def test_m1(self, capsys):
        code, _, err = run(capsys, "construct", "--family", "q", "--m", "1")
        assert code == 2 and "m must be >= 2" in err

    def test_max_m(self, capsys, monkeypatch):
        monkeypatch.setenv("LIEKIT_MAX_M", "3")
        code, _, err = run(capsys, "construct", "--family", "q", "--m", "4")
        assert code == 2 and "LIEKIT_MAX_M" in err

    @pytest.mark.parametrize("argv,needle", [
        (["--family", "g1", "--m", "2"], "needs beta"),
        (["--family", "g5", "--m", "2", "--mu", "2"], "mu must be 0 or 1"),
        (["--family", "g5", "--m", "2", "--nu", "1"], "no nu"),
        (["--family", "q", "--m", "2", "--mu", "1"], "no family parameters"),
        (["--family", "g6", "--m", "3", "--beta", "1"], "family 6"),
    ])
    def test_param_errors(self, capsys, argv, needle):
        code, _, err = run(capsys, "construct", *argv)
        assert code == 2 and needle in err

    @pytest.mark.parametrize("bad", ["0.5", "1/0", "x"])
    def test_decimal_rejected(self, capsys, bad):
        with pytest.raises(SystemExit) as info:
            main(["construct", "--family", "g1", "--m", "2", "--beta", bad])
        assert info.value.code == 2

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["construct", "--family", "q", "--m", "2", "--colour", "red"])
        assert info.value.code == 2

    def test_extension_file_matches_memory(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        run(capsys, "construct", "--family", "g6", "--m", "3", "--beta", "-3", "--mu", "1", "--d", "6=2",
            "-o", str(path))
        b = build_family(FamilyParams(6, 3, beta=-3, mu=1, d={6: 2}))
        assert path.read_text() == json.dumps(b.spec.to_json_obj(), indent=2) + "\n"


class TestCheck:
    def test_jacobi_fails_on_q5(self, q5, capsys):
        code, out, _ = run(capsys, "check", str(q5), "--what", "jacobi")
        assert code == 1 and out.startswith("jacobi: fail (J(e1, e2, e3)")

    def test_solvable_and_nilpotent(self, q5, capsys):
        assert run(capsys, "check", str(q5), "--what", "solvable")[0] == 0
        assert run(capsys, "check", str(q5), "--what", "nilpotent")[0] == 0

    def test_extension_not_nilpotent(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        run(capsys, "construct", "--family", "g5", "--m", "2", "-o", str(path))
        assert run(capsys, "check", str(path), "--what", "nilpotent")[0] == 1
        assert run(capsys, "check", str(path), "--what", "solvable")[0] == 0

    def test_corrupt_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 3, "brackets": [{"a": 1, "b": 7, "out": []}]}')
        code, _, err = run(capsys, "check", str(path), "--what", "jacobi")
        assert code == 2 and "$.brackets[0].b" in err

    def test_truncated_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 3,\n')
        code, _, err = run(capsys, "check", str(path), "--what", "jacobi")
        assert code == 2 and "line" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "check", str(tmp_path / "nope.json"), "--what", "jacobi")[0] == 2


class TestReports:
    def test_derivations(self, q5, capsys):
        code, out, _ = run(capsys, "derivations", str(q5))
        obj = json.loads(out)
        assert code == 0 and obj == json.loads(json.dumps(derivation_space(build_Q(2)).to_json_obj()))

    def test_series(self, q5, capsys):
        obj = json.loads(run(capsys, "series", str(q5))[1])
        assert obj["lcs_dims"] == [5, 3, 2, 1, 0] and obj["derived_dims"] == [5, 3, 0]
        assert obj["nilpotent"] and obj["nilindex"] == 4

    def test_fingerprint_round_trip(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        run(capsys, "construct", "--family", "g2", "--m", "4", "--mu", "1", "--nu", "1", "-o", str(path))
        obj = json.loads(run(capsys, "fingerprint", str(path))[1])
        b = build_family(FamilyParams(2, 4, mu=1, nu=1))
        assert obj == json.loads(json.dumps(fingerprint(b.algebra, b.spec).to_json_obj()))

    def test_fingerprint_plain_algebra(self, q5, capsys):
        obj = json.loads(run(capsys, "fingerprint", str(q5))[1])
        assert obj["h_diagonals"] == [] and obj["center_dim"] == 1


class TestAutomorph:
    def test_shape(self, capsys):
        code, out, _ = run(capsys, "automorph", "--m", "2", "--p", "2", "--q", "3", "--a1", "4=1/2", "--a2", "5=1")
        obj = json.loads(out)
        assert code == 0 and obj["is_automorphism"] and obj["p"] == "2" and obj["q"] == "3"

    def test_forbidden_entry(self, capsys):
        code, _, err = run(capsys, "automorph", "--m", "2", "--p", "1", "--q", "1", "--a2", "3=1")
        assert code == 2 and "a_(2,3)" in err

    def test_matrix_file(self, q5, capsys, tmp_path):
        M = tmp_path / "m.json"
        rows = [["1" if i == j else "0" for j in range(5)] for i in range(5)]
        rows[0], rows[1] = rows[1], rows[0]
        M.write_text(json.dumps(rows))
        code, out, _ = run(capsys, "automorph", "--matrix", str(M), "--algebra", str(q5))
        assert code == 1 and json.loads(out)["violation"] == ["e1", "e2"]

    def test_missing_args(self, capsys):
        assert run(capsys, "automorph", "--m", "2")[0] == 2


class TestVerify:
    def test_dimension_bound_suite(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = run(capsys, "verify", "--suite", "theorem1", "--m-range", "2..3", "-o", str(path))
        assert code == 0 and "2/2 expectations met" in out
        rep = json.loads(path.read_text())
        assert [e["report"]["checks"][1]["witness"]["rank"] for e in rep["entries"]] == [2, 2]

    def test_family3_suite_at_m2(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "corollary1", "--m-range", "2..2")
        assert code == 0
        assert out.splitlines()[0].startswith("[ok] corollary1: g_(6,3)[m=2, mu=1, nu=1]: fail (expected fail)")

    def test_2m3_suite_unmet(self, capsys):
        # the Jacobi defect of the nilradical table makes these expectations fail
        code, out, _ = run(capsys, "verify", "--suite", "theorem3", "--m-range", "2..2")
        assert code == 1 and "[UNMET]" in out and "first failing check jacobi" in out

    @pytest.mark.parametrize("rng_text", ["1..3", "3..2", "x", "2..9"])
    def test_bad_range(self, capsys, rng_text):
        try:
            code = main(["verify", "--suite", "theorem1", "--m-range", rng_text])
        except SystemExit as exc:
            code = exc.code
        assert code == 2


def test_module_entry_point(tmp_path):
    path = tmp_path / "q.json"
    proc = subprocess.run([sys.executable, "-m", "liekit", "construct", "--family", "q", "--m", "3", "-o", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "dim 7, brackets 7"
    assert LieAlgebra.loads(path.read_text()) == build_Q(3)
