import json
import hashlib
from pathlib import Path

import pytest

from sbmlab.cli import main
from sbmlab.experiments import EXPERIMENTS, ConfigError, validate_config

STABLE = {"family": "stable", "alpha": 0.4, "a1": 1.0, "a2": 1.0,
          "delta1": 0.4, "delta2": 0.4}


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def hash_tree(root: Path) -> dict:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


def test_list(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == list(EXPERIMENTS)


def test_validate_good(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "verify-j", "spec": STABLE})
    assert main(["validate", "--config", cfg]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_unknown_key(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "verify-j", "spec": STABLE,
                                  "bogus": 1})
    assert main(["validate", "--config", cfg]) == 64
    assert "bogus" in capsys.readouterr().err


def test_validate_unknown_experiment(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "nope", "spec": STABLE})
    assert main(["validate", "--config", cfg]) == 64


def test_validate_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--config", str(p)])
    assert exc.value.code == 64


def test_missing_config_file(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--config", str(tmp_path / "absent.json")])
    assert exc.value.code == 64


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["run"])  # missing --config
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_config_validation_details():
    with pytest.raises(ConfigError):
        validate_config({"experiment": "verify-j"})
    with pytest.raises(ConfigError):
        validate_config({"experiment": "verify-j", "spec": STABLE,
                         "mc": {"N": -3}})
    with pytest.raises(ConfigError):
        validate_config({"experiment": "verify-j", "spec": STABLE,
                         "mc": {"weird": 1}})
    cfg = validate_config({"experiment": "verify-j", "spec": STABLE})
    assert cfg["d"] == 1


def test_run_writes_reports(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "verify-j", "spec": STABLE})
    code = main(["run", "--config", cfg, "--out", str(tmp_path / "runs")])
    assert code == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    rundirs = list((tmp_path / "runs" / "verify-j").iterdir())
    assert len(rundirs) == 1
    files = {p.name for p in rundirs[0].iterdir()}
    assert {"manifest.json", "report.json", "summary.txt"} <= files
    assert any(f.endswith(".csv") for f in files)
    assert any(f.endswith(".png") for f in files)
    manifest = json.loads((rundirs[0] / "manifest.json").read_text())
    assert manifest["config"]["experiment"] == "verify-j"
    assert "seed" in manifest


def test_rerun_byte_identical(tmp_path):
    doc = {"experiment": "key-integral", "spec": STABLE,
           "functional": {"kind": "profile", "beta": 1.5, "C": 1.0},
           "params": {"k_min": 3, "k_max": 5}}
    cfg = write_config(tmp_path, doc)
    outdir = tmp_path / "runs"
    assert main(["run", "--config", cfg, "--out", str(outdir)]) == 0
    first = hash_tree(outdir)
    assert main(["run", "--config", cfg, "--out", str(outdir)]) == 0
    assert hash_tree(outdir) == first
    assert len(first) >= 4


def test_seed_env_override(tmp_path, monkeypatch):
    doc = {"experiment": "overshoot", "spec": STABLE, "mc": {"N": 500}}
    cfg = write_config(tmp_path, doc)
    monkeypatch.setenv("SBMLAB_SEED", "424242")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "r")]) in (0, 2)
    rundir = next((tmp_path / "r" / "overshoot").iterdir())
    manifest = json.loads((rundir / "manifest.json").read_text())
    assert manifest["seed"] == 424242


def test_seed_flag_beats_env(tmp_path, monkeypatch):
    doc = {"experiment": "overshoot", "spec": STABLE, "mc": {"N": 500}}
    cfg = write_config(tmp_path, doc)
    monkeypatch.setenv("SBMLAB_SEED", "1")
    main(["run", "--config", cfg, "--seed", "7", "--out", str(tmp_path / "r")])
    rundir = next((tmp_path / "r" / "overshoot").iterdir())
    manifest = json.loads((rundir / "manifest.json").read_text())
    assert manifest["seed"] == 7
