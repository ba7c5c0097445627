import copy
import json
import subprocess
import sys

import pytest

from qmckay import exactnum
from qmckay.cli import DIFF_CAP, dumps, main, run_selftest


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def verify_args(*extra, orbifold="z5-orbifold", resolution="z5-resolution", fh="0", m0="15"):
    return ("verify", "--orbifold", orbifold, "--resolution", resolution,
            "--framing-hat", fh, "--m0-max", m0, *extra)


# --- verify ----------------------------------------------------------------


def test_verify_bundled_pair(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, *verify_args("--report", str(report)))
    assert code == 0
    assert "framing relation: f = 5*fh + 2" in out
    assert "s1 = 5" in out
    assert "q4 = qh1^(-1/5)" in out
    doc = json.loads(report.read_text())
    assert doc["status"] == "pass"
    assert doc["derived"]["s1"] == 5
    assert doc["derived"]["framing_relation"]["alpha"] == "5"
    assert doc["derived"]["framing_relation"]["beta"] == "2"
    assert doc["counts"]["matched_terms"] == 86


def test_verify_self_pair(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, *verify_args("--report", str(report), resolution="z5-orbifold", m0="10"))
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["derived"]["s1"] == 1
    assert doc["derived"]["framing_relation"]["text"] == "f = 1*fh + 0"
    assert doc["derived"]["change_of_variables"]["rules"] == ["q4 = q4", "q5 = q5", "q0 = q0"]


def test_verify_perturbed_exit_3(capsys, tmp_path, perturbed_doc, write_json):
    report = tmp_path / "r.json"
    code, out, err = run(capsys, *verify_args("--report", str(report), resolution=write_json(perturbed_doc)))
    assert code == 3
    doc = json.loads(report.read_text())
    assert (doc["status"], doc["stage"]) == ("error", "solve_transition")
    assert "solve_transition" in err
    assert any("Calabi-Yau" in w for w in doc["warnings"])


def test_verify_mismatch_exit_2(capsys, tmp_path, resolution_doc, write_json):
    # flip the sign of every resolution coefficient: structure intact, values wrong
    doc = copy.deepcopy(resolution_doc)
    doc["spec"]["sign"]["linear"]["const"] = "1"
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, *verify_args("--report", str(report), resolution=write_json(doc)))
    assert code == 2
    rep = json.loads(report.read_text())
    assert rep["status"] == "fail"
    assert rep["diff"]["total_differences"] == 86
    assert len(rep["diff"]["mismatches"]) == 86
    assert f"showing at most {DIFF_CAP}" in out
    assert out.count(" != ") == DIFF_CAP


@pytest.mark.parametrize("argv", [
    verify_args(orbifold="/nonexistent.json"),
    verify_args(fh="1/0"),
    verify_args(fh="x"),
    verify_args(m0="-1"),
    ("verify", "--orbifold", "z5-orbifold"),
    ("nosuchcommand",),
])
def test_usage_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_unreadable_bundle_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, *verify_args(resolution=str(bad)))
    assert code == 1 and "error" in err


def test_report_round_trip(capsys, tmp_path):
    report = tmp_path / "r.json"
    run(capsys, *verify_args("--report", str(report), fh="3"))
    text = report.read_text()
    assert dumps(json.loads(text)) == text


def test_report_deterministic_under_jobs(capsys, tmp_path, monkeypatch):
    paths = []
    for jobs in ("1", "2"):
        p = tmp_path / f"r{jobs}.json"
        run(capsys, *verify_args("--report", str(p), "--jobs", jobs, fh="1"))
        paths.append(p.read_bytes())
    monkeypatch.setenv("QMCKAY_JOBS", "3")
    p = tmp_path / "env.json"
    run(capsys, *verify_args("--report", str(p), fh="1"))
    paths.append(p.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_non_generic_during_verify_is_structural(capsys, resolution_doc, write_json):
    doc = copy.deepcopy(resolution_doc)
    doc["spec"]["ratio_num"]["const"] = "-3"
    code, _, err = run(capsys, *verify_args(resolution=write_json(doc), m0="4"))
    assert code == 3
    assert "NonGenericFraming" in err


# --- eval ------------------------------------------------------------------


def test_eval_single_term(capsys):
    code, out, err = run(capsys, "eval", "--bundle", "z5-resolution", "--framing", "0", "--m0-max", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["terms"] == [{"monomial": {"qh0": "1"},
                             "coeff": exactnum.Cyclotomic.zeta_power(7, 10).to_json()}]
    assert err.strip() == "1 terms"


def test_eval_empty(capsys):
    code, out, _ = run(capsys, "eval", "--bundle", "z5-orbifold", "--framing", "2", "--m0-max", "0")
    assert code == 0 and json.loads(out)["terms"] == []


def test_eval_86_terms_to_file(capsys, tmp_path):
    out = tmp_path / "w.json"
    code, _, _ = run(capsys, "eval", "--bundle", "z5-orbifold", "--framing", "2",
                     "--m0-max", "15", "--out", str(out), "--jobs", "2")
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["terms"]) == 86
    assert doc["region"] == {"m0_max": 15, "variables": ["q0", "q4", "q5"]}


def test_eval_non_generic_exit_4(capsys, resolution_doc, write_json):
    doc = copy.deepcopy(resolution_doc)
    doc["spec"]["ratio_num"]["const"] = "-3"
    code, _, err = run(capsys, "eval", "--bundle", write_json(doc), "--framing", "0", "--m0-max", "2")
    assert code == 4
    assert "(1, 0, 0)" in err


def test_eval_bad_path_exit_1(capsys, tmp_path):
    assert run(capsys, "eval", "--bundle", str(tmp_path / "none.json"),
               "--framing", "0", "--m0-max", "1")[0] == 1


# --- fan -------------------------------------------------------------------


@pytest.mark.parametrize("name", ["z5-resolution", "z5-orbifold"])
def test_fan_rays(capsys, name):
    code, out, _ = run(capsys, "fan", "--bundle", name)
    assert code == 0
    assert set(out.split()) == {"(1,0)", "(0,1)", "(-2,1)", "(1,-3)"}
    assert len(out.split()) == 4


def test_fan_rank_one_exit_5(capsys, resolution_doc, write_json):
    doc = copy.deepcopy(resolution_doc)
    doc["gauge_charges"] = [doc["gauge_charges"][0]]
    assert run(capsys, "fan", "--bundle", write_json(doc))[0] == 5


def test_fan_without_gauge_charges_uses_charge_rows(capsys, resolution_doc, write_json):
    doc = copy.deepcopy(resolution_doc)
    del doc["gauge_charges"]
    code, out, _ = run(capsys, "fan", "--bundle", write_json(doc))
    assert code == 0
    assert out.split()  # nonempty primitive rays
    for ray in out.split():
        x, y = map(int, ray.strip("()").split(","))
        assert (x, y) != (0, 0)


# --- selftest --------------------------------------------------------------


def test_selftest_default(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert "1000 cases" in out
    assert "FAIL" not in out


def test_selftest_seeded_determinism():
    a, b = run_selftest(seed=7, cases=200), run_selftest(seed=7, cases=200)
    assert a["samples"] == b["samples"]
    assert a["samples"] != run_selftest(seed=8, cases=200)["samples"]


def test_selftest_corrupted_lanczos_exit_2(capsys, monkeypatch):
    coeffs = list(exactnum.LANCZOS_COEFFICIENTS)
    coeffs[3] *= 1 + 1e-6
    monkeypatch.setattr(exactnum, "LANCZOS_COEFFICIENTS", coeffs)
    code, _, err = run(capsys, "selftest", "--cases", "200")
    assert code == 2
    assert "gamma oracle" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qmckay.cli", "fan", "--bundle", "z5-resolution"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "(1,-3)" in proc.stdout
