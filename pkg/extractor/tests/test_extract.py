import json

import numpy as np
import pytest

from embed_extract import cli, extract, reduce_and_extract
from embed_extract.records import RecordError

from conftest import PRIMARY_DATA


@pytest.fixture(scope="module")
def toy768_run(tmp_path_factory):
    # shared across tests; the 768-dim encoder is the expensive one
    out = tmp_path_factory.mktemp("extract") / "feats.bhft"
    summary = extract(PRIMARY_DATA / "toy_qa.jsonl", "toy-768", out)
    return summary, out, out.read_bytes()


def test_toy_qa_schema(toy768_run):
    summary, out, _ = toy768_run
    assert summary["n_records"] == 30
    assert summary["n_classes"] == 3
    assert summary["dim"] == 768
    assert summary["dim_total"] == 2304
    assert summary["reduction_seed"] is None

    # the file must satisfy the downstream loader's invariants
    from bayeshead import data

    ds = data.load_dataset(out, "feature-binary")
    assert ds.features.shape == (30, 2304)
    assert ds.labels.shape == (30,)
    assert ds.n_classes == 3
    assert np.all((ds.labels >= 0) & (ds.labels < 3))
    assert np.all(np.isfinite(ds.features))

    with open(summary["input"]) as fh:
        expected = [json.loads(line)["label"] for line in fh if line.strip()]
    assert ds.labels.tolist() == expected


def test_rerun_is_byte_identical(toy768_run, toy_qa_path, tmp_path):
    _, _, first = toy768_run
    out = tmp_path / "again.bhft"
    extract(toy_qa_path, "toy-768", out)
    assert out.read_bytes() == first


def test_failed_run_leaves_no_file(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    out = tmp_path / "feats.bhft"
    with pytest.raises(RecordError, match="no records"):
        extract(empty, "toy-64", out)
    assert not out.exists()


def test_max_length_bounds(toy_qa_path, tmp_path):
    with pytest.raises(ValueError, match=r"\[8, 512\]"):
        extract(toy_qa_path, "toy-64", tmp_path / "x.bhft", max_length=4)
    with pytest.raises(ValueError, match=r"\[8, 512\]"):
        extract(toy_qa_path, "toy-64", tmp_path / "x.bhft", max_length=1024)


def test_truncation_is_counted(tmp_path):
    rec = {"question": " ".join(f"w{i}" for i in range(60)),
           "options": ["yes", "no"], "label": 0}
    short = {"question": "short", "options": ["yes", "no"], "label": 1}
    src = tmp_path / "long.jsonl"
    src.write_text("\n".join(json.dumps(r) for r in (rec, short)) + "\n")
    out = tmp_path / "feats.bhft"
    summary = extract(src, "toy-64", out, max_length=16)
    assert summary["truncated_records"] == 1
    assert summary["n_records"] == 2


def test_reduction_labels_match_shared_fixture(five_option_path, tmp_path):
    out = tmp_path / "reduced.bhft"
    summary = reduce_and_extract(five_option_path, "toy-64", out, seed=3)
    assert summary["n_records"] == 50
    assert summary["n_classes"] == 3
    assert summary["dim_total"] == 192
    assert summary["reduction_seed"] == 3

    expected = json.loads(
        (five_option_path.parent / "reduce_expected.json").read_text())
    want = [rec["label"] for rec in expected["3"]]

    from bayeshead import data

    ds = data.load_dataset(out, "feature-binary")
    assert ds.labels.tolist() == want


def test_reduced_vectors_are_plain_encodings(five_option_path, tmp_path):
    # reducing then encoding must equal encoding the reduced record directly
    out = tmp_path / "reduced.bhft"
    reduce_and_extract(five_option_path, "toy-64", out, seed=0)

    expected = json.loads(
        (five_option_path.parent / "reduce_expected.json").read_text())
    direct = tmp_path / "direct.jsonl"
    direct.write_text("\n".join(json.dumps(r) for r in expected["0"]) + "\n")
    out2 = tmp_path / "direct.bhft"
    extract(direct, "toy-64", out2)
    assert out.read_bytes() == out2.read_bytes()


def test_cli_success(toy_qa_path, tmp_path, capsys):
    out = tmp_path / "feats.bhft"
    rc = cli.main(["--input", str(toy_qa_path), "--model", "toy-64",
                   "--output", str(out)])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_records"] == 30
    assert summary["dim"] == 64
    assert out.exists()


def test_cli_reduce_needs_seed(five_option_path, tmp_path, capsys):
    rc = cli.main(["--input", str(five_option_path), "--model", "toy-64",
                   "--output", str(tmp_path / "x.bhft"),
                   "--reduce-five-to-three"])
    assert rc == 1
    assert "--seed" in capsys.readouterr().err


def test_cli_seed_needs_reduce_flag(toy_qa_path, tmp_path, capsys):
    rc = cli.main(["--input", str(toy_qa_path), "--model", "toy-64",
                   "--output", str(tmp_path / "x.bhft"), "--seed", "5"])
    assert rc == 1
    assert "--reduce-five-to-three" in capsys.readouterr().err


def test_cli_unknown_model(toy_qa_path, tmp_path, capsys):
    rc = cli.main(["--input", str(toy_qa_path), "--model", "toy-9000",
                   "--output", str(tmp_path / "x.bhft")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "unknown encoder" in err
    assert "toy-768" in err


def test_cli_missing_input(tmp_path, capsys):
    rc = cli.main(["--input", str(tmp_path / "nope.jsonl"), "--model",
                   "toy-64", "--output", str(tmp_path / "x.bhft")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
