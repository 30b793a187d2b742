"""Datasets: loading, saving, splitting, standardization, and the
five-to-three option reduction for multiple-choice QA records.

Two on-disk formats are supported: CSV (header row, feature columns, final
integer ``label`` column) and the BHFT feature binary written by the offline
embedding extractor. Raw QA text travels as JSON-lines records
``{"question": str, "options": [str], "label": int}``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from . import containers


class DataFormatError(ValueError):
    """Raised when an input file violates the dataset formats."""


@dataclass
class Dataset:
    """Feature matrix with integer labels in [0, n_classes)."""

    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    meta: list | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n, d = self.features.shape
        if n < 1 or d < 1:
            raise ValueError(f"need at least one row and one feature, got {n}x{d}")
        if self.labels.shape != (n,):
            raise ValueError("labels length must match the number of rows")
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if not np.all(np.isfinite(self.features)):
            bad = int(np.argwhere(~np.isfinite(self.features).all(axis=1))[0, 0])
            raise ValueError(f"non-finite feature value in row {bad + 1}")
        if self.labels.min() < 0 or self.labels.max() >= self.n_classes:
            bad = int(np.argwhere(
                (self.labels < 0) | (self.labels >= self.n_classes))[0, 0])
            raise ValueError(
                f"label {self.labels[bad]} out of range [0, {self.n_classes}) "
                f"in row {bad + 1}")
        if self.meta is not None and len(self.meta) != n:
            raise ValueError("meta length must match the number of rows")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        meta = [self.meta[i] for i in idx] if self.meta is not None else None
        return Dataset(self.features[idx], self.labels[idx], self.n_classes, meta)


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic shuffled train/test partition."""

    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


def _infer_format(path) -> str:
    s = str(path)
    if s.endswith(".csv"):
        return "csv"
    if s.endswith(".bhft"):
        return "feature-binary"
    raise DataFormatError(f"{path}: cannot infer format, pass format= explicitly")


def load_dataset(path, format: str | None = None) -> Dataset:
    """Load a dataset from CSV or BHFT feature binary.

    CSV must carry a header whose final column is ``label``; the class count
    is inferred as max(label)+1. The binary header records it directly.
    """
    fmt = format or _infer_format(path)
    if fmt == "csv":
        return _load_csv(path)
    if fmt == "feature-binary":
        try:
            feats, labels, c = containers.read_features(path)
        except containers.ContainerError as e:
            raise DataFormatError(str(e)) from e
        try:
            return Dataset(feats, labels, c)
        except ValueError as e:
            raise DataFormatError(f"{path}: {e}") from e
    raise DataFormatError(f"unknown format {fmt!r}")


def _load_csv(path) -> Dataset:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if len(header) < 2 or header[-1] != "label":
            raise DataFormatError(
                f"{path}: header must end with a 'label' column, got {header}")
        d = len(header) - 1
        rows, labels = [], []
        for i, rec in enumerate(reader):
            rownum = i + 2  # 1-based, counting the header line
            if len(rec) != d + 1:
                raise DataFormatError(
                    f"{path}: row {rownum} has {len(rec)} fields, expected {d + 1}")
            try:
                vals = [float(v) for v in rec[:-1]]
            except ValueError:
                raise DataFormatError(
                    f"{path}: row {rownum} has a non-numeric feature") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataFormatError(f"{path}: row {rownum} has a non-finite feature")
            try:
                lab = int(rec[-1])
            except ValueError:
                raise DataFormatError(
                    f"{path}: row {rownum} has a non-integer label {rec[-1]!r}") from None
            rows.append(vals)
            labels.append(lab)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    labels = np.array(labels, dtype=np.int64)
    if labels.min() < 0:
        bad = int(np.argmin(labels)) + 2
        raise DataFormatError(f"{path}: row {bad} has a negative label")
    c = int(labels.max()) + 1
    if c < 2:
        c = 2
    return Dataset(np.array(rows, dtype=np.float64), labels, c)


def save_dataset(ds: Dataset, path, format: str | None = None) -> None:
    """Write a dataset back to CSV or BHFT (float32, bit-exact round trip)."""
    fmt = format or _infer_format(path)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as f:
            cols = ["f%d" % j for j in range(ds.n_features)] + ["label"]
            f.write(",".join(cols) + "\n")
            for row, lab in zip(ds.features, ds.labels):
                f.write(",".join("%.17g" % v for v in row) + ",%d\n" % lab)
    elif fmt == "feature-binary":
        containers.write_features(path, ds.features, ds.labels, ds.n_classes)
    else:
        raise DataFormatError(f"unknown format {fmt!r}")


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split. Same (spec, dataset) always gives the same parts."""
    n = ds.n_rows
    n_train = int(round(spec.train_fraction * n))
    if n_train < 1 or n - n_train < 1:
        raise ValueError(
            f"train_fraction {spec.train_fraction} leaves an empty partition for N={n}")
    rng = np.random.Generator(np.random.Philox(spec.seed))
    perm = rng.permutation(n)
    return ds.take(perm[:n_train]), ds.take(perm[n_train:])


def standardize(train: Dataset, test: Dataset):
    """Scale both sets to the train set's per-column mean 0 / population std 1.

    Zero-variance columns pass through unchanged (mean recorded 0, std 1).
    Returns (train, test, (mean, std)).
    """
    if train.n_rows < 2:
        raise ValueError("standardize needs at least 2 training rows")
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    degenerate = std == 0.0
    mean[degenerate] = 0.0
    std[degenerate] = 1.0
    tr = replace(train, features=(train.features - mean) / std)
    te = replace(test, features=(test.features - mean) / std)
    return tr, te, (mean, std)


def reduce_options(record: dict, seed: int) -> dict:
    """Reduce a 5-option QA record to 3 options.

    Two distractors are drawn uniformly without replacement from the four
    incorrect options; the correct answer lands at a uniformly random
    position among the three survivors. The stream is keyed by the seed
    together with a digest of the record text, making the selection a pure
    function of (record, seed) that the offline extractor mirrors; one seed
    covers a whole corpus without aligning answer positions across rows.
    """
    options = record.get("options")
    label = record.get("label")
    if not isinstance(options, list) or len(options) != 5:
        raise ValueError("record must carry exactly 5 options")
    if not isinstance(label, int) or isinstance(label, bool) or not 0 <= label < 5:
        raise ValueError(
            "record must mark exactly one correct option via an integer label in [0, 5)")
    material = "\x1f".join([str(record.get("question", ""))]
                           + [str(o) for o in options] + [str(label)])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    rng = np.random.Generator(np.random.Philox(
        [int(seed), int.from_bytes(digest[:8], "little")]))
    distractors = [i for i in range(5) if i != label]
    keep = rng.choice(len(distractors), size=2, replace=False)
    kept = [options[distractors[int(k)]] for k in keep]
    new_pos = int(rng.integers(3))
    new_options = kept[:new_pos] + [options[label]] + kept[new_pos:]
    out = dict(record)
    out["options"] = new_options
    out["label"] = new_pos
    return out


def load_qa_records(path) -> list[dict]:
    """Read JSON-lines QA records, validating the schema per line."""
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for i, line in enumerate(f):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"{path}: line {i + 1}: {e}") from None
            for key in ("question", "options", "label"):
                if key not in rec:
                    raise DataFormatError(f"{path}: line {i + 1} is missing {key!r}")
            records.append(rec)
    if not records:
        raise DataFormatError(f"{path}: no records")
    return records


def _bundled(name: str):
    return resources.files("bayeshead.datasets").joinpath(name)


def load_iris() -> Dataset:
    """The bundled 150x4 three-class iris CSV."""
    with resources.as_file(_bundled("iris.csv")) as p:
        return load_dataset(p, "csv")


def load_toy_qa_records() -> list[dict]:
    """The bundled 30-question, 3-option QA corpus."""
    with resources.as_file(_bundled("toy_qa.jsonl")) as p:
        return load_qa_records(p)


def load_toy_qa_features() -> Dataset:
    """The pre-extracted feature fixture for the bundled QA corpus.

    Checked in so that nothing downstream needs the extractor or an encoder;
    rows align with load_toy_qa_records() and the meta field carries the text.
    """
    with resources.as_file(_bundled("toy_qa_features.bhft")) as p:
        ds = load_dataset(p, "feature-binary")
    ds.meta = load_toy_qa_records()
    return ds
