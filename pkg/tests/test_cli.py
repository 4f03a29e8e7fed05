"""CLI harness: config validation, exit codes, determinism, shipped suites."""
import json
import subprocess
import sys

import pytest

from lorvol.cli import ConfigError, config_hash, main, validate_config


def curve_config(**over):
    cfg = {
        "version": 1,
        "mode": "curve",
        "experiment": "segment",
        "space": {"type": "minkowski", "n": 2, "C": 1.0},
        "vertices": [[0.0, 0.0], [1.0, 0.0]],
        "tol": 1e-6,
        "expect": {"L_tau": {"value": 1.0, "tol": 0.01}},
    }
    cfg.update(over)
    return cfg


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "lorvol.cli", *args],
                          capture_output=True, text=True)
    return proc


def test_validate_rejects_wrong_version():
    with pytest.raises(ConfigError):
        validate_config(curve_config(version=2), "curve")


def test_validate_rejects_unknown_fields():
    with pytest.raises(ConfigError) as err:
        validate_config(curve_config(bogus=1), "curve")
    assert "bogus" in str(err.value)


def test_validate_rejects_mode_mismatch():
    with pytest.raises(ConfigError):
        validate_config(curve_config(), "measure")


def test_config_hash_tracks_semantic_changes():
    base = config_hash(curve_config())
    assert config_hash(curve_config()) == base
    assert config_hash(curve_config(tol=1e-7)) != base
    assert config_hash(curve_config(seed=3)) != base


def test_exit_codes(tmp_path):
    cfg = tmp_path / "seg.json"
    cfg.write_text(json.dumps(curve_config()))
    ok = run_cli(["--out", str(tmp_path), "--config", str(cfg), "curve"])
    assert ok.returncode == 0
    assert "[PASS]" in ok.stdout

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(curve_config(version=3)))
    invalid = run_cli(["--out", str(tmp_path), "--config", str(bad), "curve"])
    assert invalid.returncode == 2

    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps(curve_config(
        expect={"L_tau": {"value": 2.0, "tol": 0.01}})))
    failed = run_cli(["--out", str(tmp_path), "--config", str(wrong), "curve"])
    assert failed.returncode == 1
    assert "[FAIL]" in failed.stdout


def test_csv_reruns_byte_identical(tmp_path):
    cfg = tmp_path / "seg.json"
    cfg.write_text(json.dumps(curve_config()))
    argv = ["--out", str(tmp_path), "--config", str(cfg), "curve"]
    assert main(argv) == 0
    first = (tmp_path / "segment.csv").read_bytes()
    assert main(argv) == 0
    assert (tmp_path / "segment.csv").read_bytes() == first


def test_result_record_fields(tmp_path):
    cfg = tmp_path / "seg.json"
    cfg.write_text(json.dumps(curve_config()))
    assert main(["--out", str(tmp_path), "--config", str(cfg), "curve"]) == 0
    rec = json.loads((tmp_path / "segment.json").read_text())
    assert rec["passed"] is True
    assert rec["mode"] == "curve"
    assert rec["config_hash"] == config_hash(curve_config())
    assert rec["summary"]["L_tau"] == pytest.approx(1.0, abs=1e-6)


def test_reproduce_doubling_suite(tmp_path):
    assert main(["--out", str(tmp_path), "reproduce", "doubling"]) == 0
    rec = json.loads((tmp_path / "doubling-flat-n2.json").read_text())
    assert rec["passed"]
    assert abs(rec["summary"]["L_empirical"] - 121.0) < 6.0


def test_reproduce_bishop_gromov_suite(tmp_path):
    assert main(["--out", str(tmp_path), "reproduce", "bishop-gromov"]) == 0
    rec = json.loads((tmp_path / "bg-tcd-lattice.json").read_text())
    assert rec["passed"]
    assert rec["summary"]["cells"] == 20


def test_reproduce_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        main(["reproduce", "no-such-suite"])
