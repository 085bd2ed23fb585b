import json
import subprocess
import sys

import pytest

from derived_intersect.cli import WINDOW_ENV, job_file_argv, main, suite_items, SUITES


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_paper_example_summary(capsys):
    code, out = run(capsys, "paper-example", "--window", "6", "--no-stability-check")
    assert code == 0
    assert "H^k(X, i*Omega_Y) = [0, 1, 0]" in out
    assert "condition (*) FAILS" in out


def test_paper_example_json(capsys):
    code, rep = run_json(capsys, "paper-example", "conic-in-p2", "--window", "4")
    assert code == 0
    res = rep["results"]
    assert rep["schema_version"] == "1.0" and rep["command"] == "paper-example"
    assert res["h_pullback_cotangent"] == [0, 4]
    assert res["condition_star"]["verdict"] == "INCONCLUSIVE"
    assert res["stability"]["stable"] is True
    assert "timing" not in rep


def test_tor_command(capsys):
    code, rep = run_json(capsys, "tor", "--ring", "x,y,z", "--ideal", "x^2,y*z", "--degree-window", "5")
    assert code == 0
    res = rep["results"]
    assert res["formal"] and res["checks"]["epsilon_chain_map"]
    assert res["tor_dims"][0] > 0


def test_tor_point_in_plane(capsys):
    code, rep = run_json(capsys, "tor", "--ring", "x,y", "--ideal", "x,y")
    assert code == 0
    assert rep["results"]["tor_dims"] == [1, 2, 1] and rep["results"]["formal"]


def test_cech_all_zero(capsys):
    code, rep = run_json(capsys, "cech", "--space", "P1xP1", "--bundle=-1,-2", "--window", "4")
    assert code == 0 and rep["results"]["dims"] == [0, 0, 0]


@pytest.mark.parametrize("suite", ["paper-example", "chain-maps"])
def test_verify_suites_pass(capsys, suite):
    code, rep = run_json(capsys, "verify", suite, "--window", "6")
    assert code == 0 and rep["results"]["pass"]


def test_tor_weighted_ring(capsys):
    code, rep = run_json(capsys, "tor", "--ring", "x,y", "--degrees", "1,2", "--ideal", "y", "--degree-window", "4")
    assert code == 0 and rep["results"]["formal"]


def test_cech_command_matches_bott(capsys):
    code, rep = run_json(capsys, "cech", "--space", "P1xP1", "--bundle=-3,1", "--bundle=0,0", "--window", "4")
    assert code == 0
    res = rep["results"]
    assert res["dims"] == res["bott_dims"] == [1, 4, 0]
    assert res["matches_bott"]


def test_cech_omega(capsys):
    code, rep = run_json(capsys, "cech", "--space", "P2", "--sheaf", "omega", "--window", "3")
    assert code == 0 and rep["results"]["dims"] == [0, 1, 0]


def test_alpha_command(capsys):
    code, rep = run_json(capsys, "alpha", "--space", "P1xP1", "--ell", "1,2", "--bundle=-4,-10", "--window", "6")
    assert code == 0
    (item,) = rep["results"]["alpha"]
    assert item["alpha"] == ["-2"] and item["zero"] is False


def test_ext_ci_named_and_custom(capsys):
    code, rep = run_json(capsys, "ext-ci", "--ci", "point", "--window", "3")
    assert code == 0 and rep["results"]["ext_dims"] == [1, 2, 1]
    code, rep = run_json(
        capsys, "ext-ci", "--space", "P2", "--section", "x0", "--window", "3", "--no-stability-check"
    )
    assert code == 0 and rep["results"]["degenerates"]


def test_verify_splitting(capsys):
    code, rep = run_json(capsys, "verify", "splitting")
    assert code == 0
    assert rep["results"]["pass"] and rep["results"]["cases"] == 6


@pytest.mark.parametrize(
    "argv, code, kind",
    [
        (["cech", "--space", "Q3", "--bundle", "1"], 2, "parse_error"),
        (["cech", "--space", "P1", "--bundle", "1,2"], 2, "parse_error"),
        (["cech", "--space", "P1", "--bundle", "-9", "--window", "2"], 3, "window_instability"),
        (["tor", "--ring", "x,y", "--ideal", "x +"], 2, "parse_error"),
        (["ext-ci", "--space", "P2", "--section", "x0*x1", "--section", "x0*x2"], 2, "parse_error"),
        (["verify", "nope"], 7, "unknown_suite"),
    ],
)
def test_error_codes(capsys, argv, code, kind):
    got, out = run(capsys, *argv)
    assert got == code
    err = json.loads(out)
    assert err["error"] == kind and err["code"] == code


def test_window_error_suggests_window(capsys):
    _, out = run(capsys, "cech", "--space", "P1", "--bundle", "-9", "--window", "2")
    assert json.loads(out)["suggested_window"] == 8


def test_env_var_sets_default_window(capsys, monkeypatch):
    monkeypatch.setenv(WINDOW_ENV, "5")
    code, rep = run_json(capsys, "cech", "--space", "P1", "--bundle", "-3")
    assert code == 0
    assert rep["job"]["window"] == 5
    assert rep["results"]["stability"]["doubled_window"] == 10
    monkeypatch.setenv(WINDOW_ENV, "many")
    code, out = run(capsys, "cech", "--space", "P1", "--bundle", "-3")
    assert code == 2


def test_job_file_and_out(capsys, tmp_path):
    job = tmp_path / "job.ini"
    job.write_text("[job]\ncommand = cech\nspace = P1xP1\nbundle = -2,0; 0,-2\nwindow = 4\nstability_check = no\n")
    assert job_file_argv(str(job))[0] == "cech"
    out_path = tmp_path / "report.json"
    code, text = run(capsys, "run", str(job), "--json", "--out", str(out_path))
    assert code == 0
    assert out_path.read_text() == text
    rep = json.loads(text)
    assert rep["results"]["dims"] == [0, 2, 0]
    assert rep["job"]["stability_check"] is False


@pytest.mark.parametrize(
    "content",
    ["command = cech\n", "[job]\nspace = P1\n", "[job]\ncommand = plot\n", "[job]\ncommand = cech\ncolour = red\n"],
)
def test_bad_job_files(capsys, tmp_path, content):
    job = tmp_path / "bad.ini"
    job.write_text(content)
    code, _ = run(capsys, "run", str(job))
    assert code == 2


def test_timing_is_opt_in(capsys):
    code, rep = run_json(capsys, "cech", "--space", "P1", "--bundle", "0", "--window", "2", "--timing")
    assert code == 0 and isinstance(rep["timing"]["seconds"], str)


def test_reports_are_deterministic(capsys):
    argv = ["alpha", "--space", "P1xP1", "--ell", "1,2", "--window", "4", "--json"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_parallel_matches_serial(capsys):
    base = ["verify", "cech-oracle", "--window", "6", "--no-stability-check", "--json"]
    serial = run(capsys, *base)
    parallel = run(capsys, *base, "--jobs", "2")
    assert serial == parallel and serial[0] == 0


def test_every_suite_has_items():
    for suite in SUITES:
        fn, items = suite_items(suite, 6, False)
        assert callable(fn) and items


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "derived_intersect.cli", "--version"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert "derived-intersect" in proc.stdout
