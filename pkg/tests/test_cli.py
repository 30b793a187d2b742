import json
import shutil
import subprocess

import numpy as np
import pytest

from bayeshead import cli, containers

from conftest import FIXTURES


def write_config(path, body):
    path.write_text(json.dumps(body, indent=1))
    return str(path)


TINY_IRIS = {
    "experiment": "iris-hmc",
    "seed": 0,
    "sampler": {"n_warmup": 40, "n_samples": 20},
}


@pytest.fixture(scope="module")
def tiny_iris_run(tmp_path_factory):
    """One small end-to-end run shared by the artifact and inspect tests."""
    base = tmp_path_factory.mktemp("tiny_iris")
    out = base / "run"
    cfg = write_config(base / "cfg.json", dict(TINY_IRIS, out=str(out)))
    assert cli.main(["run", "--config", cfg]) == 0
    return out, cfg


# ------------------------------------------------------------- validation

def test_validate_reports_every_error_at_once(tmp_path, capsys):
    cfg = write_config(tmp_path / "bad.json", {
        "experiment": "iris-hmc",
        "tau": 1.5,
        "bogus_field": 3,
        "sampler": {"algorithm": "metropolis"},
    })
    assert cli.main(["validate", "--config", cfg]) == 1
    err = capsys.readouterr().err
    assert "seed: required integer" in err
    assert "tau: must be a number in [0, 1]" in err
    assert "bogus_field: unknown field" in err
    assert "sampler.algorithm" in err
    assert err.count("error:") >= 4


def test_validate_fills_documented_defaults(tmp_path, capsys):
    cfg = write_config(tmp_path / "ok.json",
                       {"experiment": "iris-hmc", "seed": 7})
    assert cli.main(["validate", "--config", cfg]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed["seed"] == 7
    assert parsed["s_mc"] == 30
    assert parsed["tau"] == 0.5
    assert parsed["sampler"]["n_warmup"] == 1000
    assert parsed["sampler"]["algorithm"] == "nuts"
    assert parsed["split"]["standardize"] is True
    assert parsed["model"]["prior_std"] == 1.0


def test_feature_experiments_leave_standardization_off(tmp_path, capsys):
    cfg = write_config(tmp_path / "h.json",
                       {"experiment": "head-hmc", "seed": 0})
    assert cli.main(["validate", "--config", cfg]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed["split"]["standardize"] is False
    assert parsed["split"]["train_fraction"] is None


def test_flag_overrides_beat_config_values():
    raw = {"experiment": "iris-hmc", "seed": 3, "out": "somewhere"}
    cfg = cli.normalize_config(raw, {"seed": 9, "out": None})
    assert cfg["seed"] == 9
    assert cfg["out"] == "somewhere"


def test_missing_seed_has_no_silent_default(tmp_path, capsys):
    cfg = write_config(tmp_path / "ns.json", {"experiment": "iris-hmc"})
    assert cli.main(["validate", "--config", cfg]) == 1
    assert "no wall-clock default" in capsys.readouterr().err


def test_invalid_json_is_a_config_error(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert cli.main(["validate", "--config", str(p)]) == 1
    assert "invalid JSON" in capsys.readouterr().err


def test_unknown_experiment_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path / "x.json",
                       {"experiment": "mystery", "seed": 0})
    assert cli.main(["validate", "--config", cfg]) == 1
    assert "experiment: must be one of" in capsys.readouterr().err


def test_missing_feature_file_points_at_extractor(tmp_path, capsys):
    cfg = write_config(tmp_path / "f.json", {
        "experiment": "head-laplace",
        "seed": 0,
        "dataset": str(tmp_path / "no_such.bhft"),
    })
    assert cli.main(["validate", "--config", cfg]) == 1
    err = capsys.readouterr().err
    assert "embed-extract" in err
    assert "no_such.bhft" in err


def test_missing_csv_dataset_gets_plain_not_found(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", {
        "experiment": "iris-hmc",
        "seed": 0,
        "dataset": str(tmp_path / "no_such.csv"),
    })
    assert cli.main(["validate", "--config", cfg]) == 1
    err = capsys.readouterr().err
    assert "file not found" in err
    assert "embed-extract" not in err


# -------------------------------------------------------------------- runs

def test_run_writes_a_complete_artifact_set(tiny_iris_run):
    out, _ = tiny_iris_run
    names = {p.name for p in out.iterdir()}
    for required in ("metrics.json", "chain.bhsc", "predictions.csv",
                     "reliability.svg", "coverage.svg", "predictive_bars.svg"):
        assert required in names
    assert len(names) >= 7
    payload = json.loads((out / "metrics.json").read_text())
    assert payload["n_params"] == 67
    assert payload["chain"]["divergences"] >= 0
    assert 0.0 <= payload["metrics"]["accuracy"] <= 1.0
    assert payload["decisions"]["reliability_bins"] == 10


def test_nonempty_output_dir_needs_force(tiny_iris_run, capsys):
    out, cfg = tiny_iris_run
    assert cli.main(["run", "--config", cfg]) == 2
    assert "--force" in capsys.readouterr().err


def test_rerun_with_force_is_bit_identical(tiny_iris_run, capsys):
    out, cfg = tiny_iris_run
    before_metrics = (out / "metrics.json").read_bytes()
    before_chain = (out / "chain.bhsc").read_bytes()
    assert cli.main(["run", "--config", cfg, "--force"]) == 0
    capsys.readouterr()
    assert (out / "metrics.json").read_bytes() == before_metrics
    assert (out / "chain.bhsc").read_bytes() == before_chain


def test_entries_out_of_range_is_a_runtime_error(tmp_path, capsys):
    cfg = write_config(tmp_path / "e.json", dict(
        TINY_IRIS, out=str(tmp_path / "run"), entries=[999]))
    assert cli.main(["run", "--config", cfg]) == 2
    assert "out of range" in capsys.readouterr().err


def test_tiny_prior_collapses_laplace_onto_map(tmp_path, capsys):
    out = tmp_path / "run"
    cfg = write_config(tmp_path / "c.json", {
        "experiment": "head-laplace",
        "seed": 0,
        "out": str(out),
        "model": {"prior_std": 1e-8},
        "map": {"n_steps": 100},
    })
    assert cli.main(["run", "--config", cfg]) == 0
    capsys.readouterr()
    payload = json.loads((out / "metrics.json").read_text())
    for key in ("accuracy", "ece", "mean_confidence"):
        assert abs(payload["map"][key] - payload["laplace"][key]) <= 1e-6
    assert abs(payload["confidence_delta_mean"]) <= 1e-6


def test_compare_runs_from_prediction_files_alone(tmp_path, capsys):
    first = tmp_path / "lap"
    cfg = write_config(tmp_path / "lap.json", {
        "experiment": "head-laplace",
        "seed": 1,
        "out": str(first),
        "map": {"n_steps": 100},
    })
    assert cli.main(["run", "--config", cfg]) == 0
    out = tmp_path / "cmp"
    cmp_cfg = write_config(tmp_path / "cmp.json", {
        "experiment": "compare",
        "seed": 0,
        "out": str(out),
        "compare": {"map_csv": str(first / "predictions_map.csv"),
                    "bayes_csv": str(first / "predictions_laplace.csv")},
    })
    assert cli.main(["run", "--config", cmp_cfg]) == 0
    capsys.readouterr()
    payload = json.loads((out / "metrics.json").read_text())
    assert set(payload) >= {"map", "bayes", "confidence_delta_mean"}
    assert (out / "coverage_compare.svg").exists()


def test_compare_requires_both_prediction_files(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", {
        "experiment": "compare", "seed": 0, "out": str(tmp_path / "o")})
    assert cli.main(["validate", "--config", cfg]) == 1
    err = capsys.readouterr().err
    assert "compare.map_csv" in err
    assert "compare.bayes_csv" in err


# --------------------------------------------------------------- inspection

def test_inspect_chain_reports_shape_and_diagnostics(tiny_iris_run, capsys):
    out, _ = tiny_iris_run
    assert cli.main(["inspect", str(out / "chain.bhsc")]) == 0
    text = capsys.readouterr().out
    assert "20 draws x 67 params" in text
    assert "R-hat" in text
    assert "ESS" in text
    assert "W1[8, 4]" in text


def test_inspect_dumps_chain_csv(tiny_iris_run, tmp_path, capsys):
    out, _ = tiny_iris_run
    csv_path = tmp_path / "draws.csv"
    rc = cli.main(["inspect", str(out / "chain.bhsc"), "--csv", str(csv_path)])
    assert rc == 0
    capsys.readouterr()
    lines = csv_path.read_text().splitlines()
    assert lines[0].split(",")[:2] == ["p0", "p1"]
    assert len(lines) == 21
    assert len(lines[1].split(",")) == 67


def test_inspect_feature_container(tmp_path, capsys):
    feats = np.arange(12, dtype=np.float32).reshape(4, 3)
    labels = np.array([0, 1, 0, 1], dtype=np.int64)
    path = tmp_path / "f.bhft"
    containers.write_features(path, feats, labels, 2)
    assert cli.main(["inspect", str(path)]) == 0
    assert "4 rows x 3 dims, 2 classes" in capsys.readouterr().out


def test_inspect_gaussian_and_params(tiny_iris_run, tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", {
        "experiment": "head-laplace", "seed": 2,
        "out": str(tmp_path / "run"), "map": {"n_steps": 50}})
    assert cli.main(["run", "--config", cfg]) == 0
    capsys.readouterr()
    assert cli.main(["inspect", str(tmp_path / "run" / "map_params.bhpv")]) == 0
    assert "6915 values" in capsys.readouterr().out
    rc = cli.main(["inspect", str(tmp_path / "run" / "laplace_posterior.bhgp")])
    assert rc == 0
    text = capsys.readouterr().out
    assert "6915 params" in text
    assert "variance range" in text


def test_inspect_rejects_unknown_magic(tmp_path, capsys):
    p = tmp_path / "junk.bin"
    p.write_bytes(b"WHAT" + b"\x00" * 32)
    assert cli.main(["inspect", str(p)]) == 2
    assert "unrecognized file magic" in capsys.readouterr().err


def test_console_script_is_wired(tmp_path):
    exe = shutil.which("bayeshead")
    assert exe, "console script `bayeshead` not on PATH"
    cfg = write_config(tmp_path / "v.json",
                       {"experiment": "iris-hmc", "seed": 0})
    proc = subprocess.run([exe, "validate", "--config", cfg],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["seed"] == 0
