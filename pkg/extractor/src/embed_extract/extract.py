"""The extraction pipeline: records in, feature-binary out."""

from __future__ import annotations

import numpy as np

from . import features as feature_io
from .encoder import FrozenEncoder
from .records import load_records, reduce_record

DEFAULT_MAX_LENGTH = 128


def _encode_records(records, model: str, max_length: int):
    encoder = FrozenEncoder(model)
    dim = encoder.config.dim
    n_options = len(records[0].options)
    rows = np.empty((len(records), n_options * dim), dtype=np.float32)
    truncated = 0
    for i, rec in enumerate(records):
        hit = False
        # one forward pass per option; slot i holds option i's vector
        for j, option in enumerate(rec.options):
            vec, trunc = encoder.encode(rec.question, option, max_length)
            rows[i, j * dim:(j + 1) * dim] = vec
            hit = hit or trunc
        truncated += hit
    labels = np.array([rec.label for rec in records], dtype=np.uint32)
    return rows, labels, dim, truncated


def extract(input_path, model: str, output_path,
            max_length: int = DEFAULT_MAX_LENGTH,
            reduction_seed: int | None = None) -> dict:
    """Encode every (question, option) pair and write the feature table.

    Returns a run summary. The output file is only written after every
    record encodes cleanly, so failures leave nothing behind.
    """
    if max_length < 8 or max_length > 512:
        raise ValueError("max_length must lie in [8, 512]")
    records = load_records(input_path)
    if reduction_seed is not None:
        records = [reduce_record(r, reduction_seed) for r in records]
    rows, labels, dim, truncated = _encode_records(records, model, max_length)
    n_classes = len(records[0].options)
    feature_io.write_features(output_path, rows, labels, n_classes)
    return {
        "input": str(input_path),
        "output": str(output_path),
        "model": model,
        "n_records": len(records),
        "n_classes": n_classes,
        "dim": dim,
        "dim_total": rows.shape[1],
        "max_length": max_length,
        "truncated_records": truncated,
        "cls_state": "final-layer first token, no pooler",
        "determinism": "bit-exact for fixed model name on one machine",
        "reduction_seed": reduction_seed,
    }


def reduce_and_extract(input_path, model: str, output_path, seed: int,
                       max_length: int = DEFAULT_MAX_LENGTH) -> dict:
    """Five-option records: keep the answer, sample two distractors per the
    shared seeded recipe, then extract as usual."""
    return extract(input_path, model, output_path, max_length=max_length,
                   reduction_seed=int(seed))
