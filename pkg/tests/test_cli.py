"""Exit codes, report files and determinism of the command line driver."""

import csv
import json

import numpy as np
import pytest

from loopbundle import cli

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


def read_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def read_rows(path):
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


def test_verify_passes_and_reports(tmp_path):
    out = tmp_path / "report.json"
    code = cli.main(["verify", "--seed", "0", "--trials", "2", "--out", str(out)])
    assert code == 0
    payload = read_json(out)
    assert payload["schema"] == 1
    assert payload["command"] == "verify"
    assert payload["all_passed"] is True
    assert payload["failures"] == []
    assert len(payload["properties"]) >= 20
    names = {rec["name"] for rec in payload["properties"]}
    assert "cosh-inequality" in names
    assert "subbundle-counterexample" in names
    hs_rows = read_rows(tmp_path / "report-hs.csv")
    assert hs_rows[0] == ["degree", "dim", "hs_norm", "oracle_norm", "abs_err"]
    assert len(hs_rows) > 10
    assert max(float(r[4]) for r in hs_rows[1:]) < 1e-8


def test_verify_is_byte_deterministic(tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert cli.main(["verify", "--seed", "3", "--trials", "2", "--out", str(first)]) == 0
    assert cli.main(["verify", "--seed", "3", "--trials", "2", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a-hs.csv").read_bytes() == (tmp_path / "b-hs.csv").read_bytes()


def test_verify_forced_failure_exits_one(tmp_path, capsys):
    out = tmp_path / "forced.json"
    code = cli.main(
        ["verify", "--seed", "0", "--trials", "2", "--out", str(out),
         "--tol.dhat-eigenvalue-residual", "1e-16"]
    )
    assert code == 1
    captured = capsys.readouterr().out
    assert "FAIL dhat-eigenvalue-residual" in captured
    payload = read_json(out)
    assert payload["failures"] == ["dhat-eigenvalue-residual"]
    assert payload["all_passed"] is False
    assert payload["tolerance_overrides"] == {"dhat-eigenvalue-residual": 1e-16}


def test_unknown_tolerance_name_is_config_error():
    assert cli.main(["verify", "--tol.not-a-property", "1.0"]) == 2


def test_malformed_config_file(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("seed 3\n")
    assert cli.main(["--config", str(bad), "verify"]) == 2
    assert cli.main(["--config", str(tmp_path / "missing.cfg"), "verify"]) == 2


def test_config_supplies_values_and_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=3\ntrials=2\n# comment line\n")
    out_cfg = tmp_path / "cfg.json"
    assert cli.main(["--config", str(cfg), "verify", "--out", str(out_cfg)]) == 0
    assert read_json(out_cfg)["seed"] == 3
    out_flag = tmp_path / "flag.json"
    assert cli.main(["--config", str(cfg), "verify", "--seed", "5", "--out", str(out_flag)]) == 0
    assert read_json(out_flag)["seed"] == 5


def test_config_can_force_failure_via_tolerance(tmp_path):
    cfg = tmp_path / "tol.cfg"
    cfg.write_text("tol.cosh-inequality=-1\ntrials=2\n")
    assert cli.main(["--config", str(cfg), "verify"]) == 1


def test_section_sweep_su(tmp_path):
    out = tmp_path / "su.json"
    code = cli.main(["section", "--group", "SU", "--dim", "2", "--trials", "10",
                     "--seed", "1", "--out", str(out)])
    assert code == 0
    payload = read_json(out)
    assert payload["schema"] == 1
    report = payload["report"]
    assert report["group"] == "SU"
    assert report["completed"] + report["rejections"] == report["trials"]
    assert report["max_det_deviation"] < 1e-10
    assert report["max_endpoint_err"] < 1e-9
    assert report["failures"] == []


def test_section_so_needs_split_in_range():
    assert cli.main(["section", "--group", "SO", "--r", "1.5"]) == 2


def test_section_rejects_unknown_group(tmp_path):
    cfg = tmp_path / "grp.cfg"
    cfg.write_text("group=Sp\n")
    assert cli.main(["--config", str(cfg), "section"]) == 2


def test_holonomy_sphere_report(tmp_path):
    out = tmp_path / "sphere.json"
    code = cli.main(["holonomy", "--model", "sphere", "--theta", str(np.pi / 3),
                     "--modes", "4", "--r", "2", "--out", str(out)])
    assert code == 0
    payload = read_json(out)
    assert payload["schema"] == 1
    assert payload["model"] == "round-sphere-S2"
    assert payload["exponents"] == [-0.5, -0.5]
    assert all(payload["checks"].values())
    assert payload["gram_error"] < 1e-8
    rows = read_rows(tmp_path / "sphere-spectra.csv")
    assert rows[0] == ["p", "j", "eigenvalue", "weight"]
    assert len(rows) - 1 == (2 * 4 + 1) * 2
    # eigenvalue column is p - s_j; weight is cosh((p - s_j) ln r)^2
    p, j, eig, weight = rows[1]
    assert float(weight) == pytest.approx(np.cosh(float(eig) * np.log(2.0)) ** 2, rel=1e-12)


def test_holonomy_torus_is_flat(tmp_path):
    out = tmp_path / "torus.json"
    code = cli.main(["holonomy", "--model", "torus", "--winding", "1,2",
                     "--modes", "2", "--grid", "512", "--out", str(out)])
    assert code == 0
    payload = read_json(out)
    assert payload["exponents"] == [0.0, 0.0]
    assert payload["loop"]["winding"] == [1, 2]
    hol = np.array(payload["holonomy"]["re"]) + 1j * np.array(payload["holonomy"]["im"])
    assert np.max(np.abs(hol - np.eye(2))) == 0.0


def test_holonomy_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["holonomy", "--model", "su2", "--winding", "2", "--modes", "3", "--grid", "1024"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a-spectra.csv").read_bytes() == (tmp_path / "b-spectra.csv").read_bytes()


def test_holonomy_rejects_bad_annulus():
    assert cli.main(["holonomy", "--model", "torus", "--r", "0.5"]) == 2


def test_holonomy_rejects_bad_theta():
    assert cli.main(["holonomy", "--model", "sphere", "--theta", "0"]) == 2


def test_demo_counterexample(tmp_path, capsys):
    out = tmp_path / "demo.json"
    assert cli.main(["demo", "counterexample", "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "subbundle-counterexample" in captured
    payload = read_json(out)
    assert payload["all_passed"] is True
    names = [rec["name"] for rec in payload["properties"]]
    assert "subbundle-linear-phase" in names


def test_demo_rejects_unknown_name():
    with pytest.raises(SystemExit) as exc:
        cli.main(["demo", "warp-drive"])
    assert exc.value.code == 2


def test_command_is_required():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
