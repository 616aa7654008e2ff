import json

import pytest

from ramlift.cli import main

FAST = ["--grid", "64", "--rotation-iterations", "4000"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEnumerateAndStabilizer:
    def test_enumerate_json(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--d", "1", "--max-s", "5", "--format", "json")
        obj = json.loads(out)
        assert code == 0 and obj["count"] == 3
        assert [s["s"] for s in obj["signatures"]] == [[1], [3], [5]]

    def test_stabilizer_text(self, capsys):
        code, out, _ = run(capsys, "stabilizer", "--sig", "2,1,2,1,2,1,2,1,1,1,-1,-1,1,1,-1,-1")
        assert code == 0
        assert "<a, b^4>" in out and "<a, b^2>" in out

    def test_stabilizer_csv(self, capsys):
        code, out, _ = run(capsys, "stabilizer", "--sig", "2,2,1,-1", "--format", "csv")
        assert code == 0 and out.splitlines()[0] == "subgroup,generators,order,elements"

    def test_invalid_signature_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["stabilizer", "--sig", "2,1,1,1"])
        assert exc.value.code == 2


class TestClassify:
    def test_rows(self, capsys):
        code, out, _ = run(capsys, "classify", "--n", "2", "--d", "1", "--max-s", "5",
                           "--orientation", "full", "--format", "json")
        rows = [json.loads(line) for line in out.splitlines()]
        assert code == 0 and len(rows) == 3

    def test_oracle(self, capsys):
        code, out, _ = run(capsys, "classify", "--n", "2", "--d", "2", "--max-s", "2", "--oracle", "--format", "json")
        tail = json.loads(out.splitlines()[-1])["oracle"]
        assert code == 0
        assert all(v["match"] and v["classifier"] == v["oracle"] for v in tail.values())

    def test_csv_summary(self, capsys):
        code, out, _ = run(capsys, "classify", "--n", "2", "--d", "1", "--max-s", "5", "--format", "csv")
        assert out == "n,d,max_s,#classes_full,#classes_plus\n2,1,5,3,6\n"

    def test_bad_n(self, capsys):
        code, _, err = run(capsys, "classify", "--n", "1", "--d", "1", "--max-s", "1")
        assert code == 2 and "n" in err

    def test_oracle_mismatch_exit(self, capsys, monkeypatch):
        import ramlift.classify as mod

        real = mod.enumerate_classes
        monkeypatch.setattr(mod, "enumerate_classes", lambda *a, **k: real(*a, **k)[1:])
        code, _, err = run(capsys, "classify", "--n", "2", "--d", "2", "--max-s", "2", "--oracle")
        assert code == 3 and "mismatch" in err


class TestBuildCover:
    def test_certified_json(self, capsys):
        from ramlift.covers import RamifiedCover

        code, out, _ = run(capsys, "build-cover", "--sig", "2,2,-1,1", "--base", "0", "--format", "json")
        cover = RamifiedCover.from_json(json.loads(out))
        assert code == 0 and cover.certified
        assert str(cover.signature) == "(2,2,-1,1)"

    def test_degree_one(self, capsys):
        code, out, _ = run(capsys, "build-cover", "--sig", "1,1", "--base", "inf", "--format", "json")
        obj = json.loads(out)
        assert code == 0 and obj["base"] == "inf"
        assert len(obj["ram"]) == 1

    def test_construction_failure(self, capsys):
        code, _, err = run(capsys, "build-cover", "--sig", "3,3,3,1,1,1", "--n-cap", "1", "--eps-cap", "2")
        assert code == 4
        trace = json.loads(err.splitlines()[-1])["trace"]
        assert trace and all(t["result"] != "certified" for t in trace)

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        code, out, _ = run(capsys, "build-cover", "--sig", "2,2,-1,1", "--base", "inf",
                           "--format", "json", "--out", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["base"] == "inf"


class TestVerify:
    def test_standard_representation(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "2", "--sig", "1,-1", "--format", "json")
        rep = json.loads(out)
        assert code == 0 and rep["passed"]
        assert rep["sigma"]["closed_form"] == 0.5
        assert rep["header"]["grid"] == 512 and rep["header"]["precision_bits"] == 53

    def test_pi2_shape(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "2", "--sig", "2,2,-1,1", "--format", "json", *FAST)
        rep = json.loads(out)
        assert code == 0 and rep["passed"]
        assert abs(rep["sigma"]["numeric"] - 0.5**0.5) < 1e-6

    def test_nontrivial_hom(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "2", "--sig", "1,1,1,-1,-1,-1", "--hom-a", "b", *FAST)
        assert code == 0 and out.rstrip().endswith("PASS")

    def test_inadmissible(self, capsys):
        code, out, err = run(capsys, "verify", "--n", "2", "--sig", "2,2,-1,1", "--hom-a", "b", *FAST)
        assert code == 5 and "admissibility" in err
        assert json.loads(out)["failed"] == "admissibility"

    def test_tight_tolerance_names_check(self, capsys):
        code, _, err = run(capsys, "verify", "--n", "2", "--sig", "1,-1", "--tol-sigma", "1e-30", *FAST)
        assert code == 5 and "sigma" in err

    def test_cover_file(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        main(["build-cover", "--sig", "2,2,-1,1", "--base", "inf", "--format", "json", "--out", str(path)])
        code, _, _ = run(capsys, "verify", "--n", "3", "--cover", str(path), *FAST)
        assert code == 0
        main(["build-cover", "--sig", "2,2,-1,1", "--base", "0", "--format", "json", "--out", str(path)])
        code, _, err = run(capsys, "verify", "--n", "3", "--cover", str(path), *FAST)
        assert code == 2 and "infinity" in err

    def test_precision_env(self, capsys, monkeypatch):
        monkeypatch.setenv("RAMLIFT_PRECISION_BITS", "80")
        code, out, _ = run(capsys, "verify", "--n", "2", "--sig", "1,-1", "--format", "json", *FAST)
        assert code == 0 and json.loads(out)["header"]["precision_bits"] == 80
        monkeypatch.setenv("RAMLIFT_PRECISION_BITS", "many")
        code, _, _ = run(capsys, "verify", "--n", "2", "--sig", "1,-1")
        assert code == 2


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["classify", "--n", "3", "--d", "3", "--max-s", "2", "--format", "json", "--oracle"],
        ["build-cover", "--sig", "1,3,3,-1,-1,-1", "--base", "inf", "--format", "json"],
        ["verify", "--n", "2", "--sig", "2,2,-1,1", "--format", "json", "--seed", "5", *FAST],
    ])
    def test_byte_identical(self, capsys, argv):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second and first[0] == 0
