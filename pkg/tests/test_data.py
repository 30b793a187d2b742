import collections
import json

import numpy as np
import pytest

from bayeshead import data

from conftest import FIXTURES


# ------------------------------------------------------------- loading

def test_bundled_iris_shape_and_classes():
    ds = data.load_iris()
    assert ds.n_rows == 150
    assert ds.n_features == 4
    assert ds.n_classes == 3


def test_bundled_toy_qa_label_counts():
    recs = data.load_toy_qa_records()
    counts = collections.Counter(r["label"] for r in recs)
    assert len(recs) == 30
    assert dict(counts) == {0: 13, 1: 11, 2: 6}


def test_bundled_toy_qa_features_align_with_records():
    ds = data.load_toy_qa_features()
    recs = data.load_toy_qa_records()
    assert (ds.n_rows, ds.n_features, ds.n_classes) == (30, 2304, 3)
    assert ds.labels.tolist() == [r["label"] for r in recs]
    assert ds.meta == recs


def test_csv_header_must_end_with_label(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b,c\n1,2,0\n")
    with pytest.raises(data.DataFormatError, match="label"):
        data.load_dataset(p)


def test_non_finite_feature_reports_row(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("f0,label\n1.0,0\nnan,1\n")
    # physical file line: header is line 1, offending record is line 3
    with pytest.raises(data.DataFormatError, match="row 3"):
        data.load_dataset(p)


def test_out_of_range_label_reports_row(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("f0,label\n1.0,0\n2.0,-1\n")
    with pytest.raises(data.DataFormatError, match="row 3"):
        data.load_dataset(p)


def test_label_equal_to_class_count_in_binary_is_rejected(tmp_path):
    from bayeshead import containers
    p = tmp_path / "x.bhft"
    containers.write_features(p, np.zeros((2, 1), np.float32),
                              np.array([0, 3]), 3)
    with pytest.raises(data.DataFormatError, match="row 2"):
        data.load_dataset(p)


def test_empty_csv_is_rejected(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("")
    with pytest.raises(data.DataFormatError, match="empty"):
        data.load_dataset(p)


def test_csv_round_trip_close_and_binary_round_trip_exact(tmp_path):
    rng = np.random.Generator(np.random.Philox(5))
    ds = data.Dataset(features=rng.normal(size=(9, 3)),
                      labels=rng.integers(0, 4, size=9), n_classes=4)
    pc = tmp_path / "a.csv"
    data.save_dataset(ds, pc)
    back = data.load_dataset(pc)
    assert np.allclose(back.features, ds.features, atol=1e-9)
    assert np.array_equal(back.labels, ds.labels)

    pb = tmp_path / "a.bhft"
    f32 = data.Dataset(features=ds.features.astype(np.float32),
                       labels=ds.labels, n_classes=4)
    data.save_dataset(f32, pb)
    back2 = data.load_dataset(pb)
    assert np.array_equal(back2.features, f32.features.astype(np.float64))


def test_unknown_extension_needs_explicit_format(tmp_path):
    with pytest.raises(data.DataFormatError, match="infer"):
        data.load_dataset(tmp_path / "x.dat")


# ------------------------------------------------------------- split

def test_split_is_a_partition():
    ds = data.load_iris()
    tr, te = data.split(ds, data.SplitSpec(train_fraction=0.8, seed=3))
    assert tr.n_rows + te.n_rows == 150
    assert tr.n_rows == 120
    joined = np.concatenate([tr.features, te.features])
    assert sorted(map(tuple, joined)) == sorted(map(tuple, ds.features))


def test_split_is_seed_deterministic():
    ds = data.load_iris()
    a = data.split(ds, data.SplitSpec(0.7, 11))
    b = data.split(ds, data.SplitSpec(0.7, 11))
    c = data.split(ds, data.SplitSpec(0.7, 12))
    assert np.array_equal(a[0].features, b[0].features)
    assert not np.array_equal(a[0].features, c[0].features)


def test_split_degenerate_fraction_is_rejected():
    with pytest.raises(ValueError):
        data.SplitSpec(0.0, 1)
    ds = data.Dataset(np.zeros((3, 1)), np.array([0, 1, 0]), 2)
    with pytest.raises(ValueError):
        data.split(ds, data.SplitSpec(0.01, 1))


# ------------------------------------------------------------- standardize

def test_standardize_two_point_symmetry():
    tr = data.Dataset(np.array([[0.0], [2.0]]), np.array([0, 1]), 2)
    te = data.Dataset(np.array([[1.0]]), np.array([0]), 2)
    str_, ste, (mean, std) = data.standardize(tr, te)
    assert np.allclose(str_.features.ravel(), [-1.0, 1.0])
    assert np.allclose(ste.features.ravel(), [0.0])
    assert mean[0] == 1.0 and std[0] == 1.0


def test_standardize_constant_column_passthrough():
    tr = data.Dataset(np.array([[5.0, 1.0], [5.0, 3.0]]), np.array([0, 1]), 2)
    te = data.Dataset(np.array([[5.0, 2.0]]), np.array([0]), 2)
    str_, _, (mean, std) = data.standardize(tr, te)
    assert np.allclose(str_.features[:, 0], [5.0, 5.0])
    assert std[1] == 1.0 and mean[1] == 2.0


def test_restandardizing_is_identity_within_1e12():
    rng = np.random.Generator(np.random.Philox(8))
    tr = data.Dataset(rng.normal(2.0, 3.0, size=(50, 4)),
                      rng.integers(0, 2, size=50), 2)
    te = data.Dataset(rng.normal(2.0, 3.0, size=(10, 4)),
                      rng.integers(0, 2, size=10), 2)
    tr1, te1, _ = data.standardize(tr, te)
    tr2, _, _ = data.standardize(tr1, te1)
    assert np.max(np.abs(tr2.features - tr1.features)) < 1e-12


# ------------------------------------------------------------- reduction

def _record(i=0):
    return {"question": "q%d" % i,
            "options": ["a", "b", "c", "d", "e"], "label": 2}


def test_reduce_keeps_correct_option_every_time():
    for seed in range(1000):
        out = data.reduce_options(_record(), seed)
        assert len(out["options"]) == 3
        assert out["options"][out["label"]] == "c"


def test_reduce_never_changes_option_text():
    for seed in range(200):
        out = data.reduce_options(_record(), seed)
        assert set(out["options"]) <= set("abcde")


def test_reduce_position_and_pair_distributions():
    pos = collections.Counter()
    pairs = collections.Counter()
    for seed in range(30000):
        out = data.reduce_options(_record(), seed)
        pos[out["label"]] += 1
        pairs[frozenset(o for o in out["options"] if o != "c")] += 1
    for k in (0, 1, 2):
        assert abs(pos[k] / 30000 - 1 / 3) < 0.02
    assert len(pairs) == 6
    for pair, n in pairs.items():
        assert abs(n / 30000 - 1 / 6) < 0.02


def test_reduce_rejects_malformed_records():
    with pytest.raises(ValueError, match="5 options"):
        data.reduce_options({"options": ["a", "b"], "label": 0}, 0)
    with pytest.raises(ValueError, match="exactly one correct"):
        data.reduce_options({"options": list("abcde"), "label": 7}, 0)
    with pytest.raises(ValueError, match="exactly one correct"):
        data.reduce_options({"options": list("abcde"), "label": None}, 0)


def test_reduce_matches_checked_in_fixture_for_five_seeds():
    records = data.load_qa_records(FIXTURES / "reduce_records.jsonl")
    with open(FIXTURES / "reduce_expected.json") as f:
        expected = json.load(f)
    assert len(records) == 50
    for seed in range(5):
        got = [data.reduce_options(rec, seed) for rec in records]
        assert got == expected[str(seed)]


def test_jsonl_loader_validates_schema(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"question": "q", "options": ["a"]}\n')
    with pytest.raises(data.DataFormatError, match="label"):
        data.load_qa_records(p)
    p.write_text("not json\n")
    with pytest.raises(data.DataFormatError, match="line 1"):
        data.load_qa_records(p)
