"""Question records: JSON-lines loading, validation, and option reduction.

The reduction recipe is deliberately bit-compatible with the consumer
package's `reduce_options`: same digest material, same Philox keying, same
draw order. The cross-implementation fixture test keeps the two in lock
step.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np


class RecordError(ValueError):
    """Malformed record file or record contents."""


@dataclass
class QaRecord:
    question: str
    options: list
    label: int

    def as_dict(self) -> dict:
        return {"question": self.question, "options": list(self.options),
                "label": self.label}


def _validate(rec: dict, where: str) -> QaRecord:
    for key in ("question", "options", "label"):
        if key not in rec:
            raise RecordError(f"{where}: missing field '{key}'")
    question = rec["question"]
    options = rec["options"]
    label = rec["label"]
    if not isinstance(question, str) or not question:
        raise RecordError(f"{where}: question must be a nonempty string")
    if (not isinstance(options, list) or len(options) < 2
            or not all(isinstance(o, str) and o for o in options)):
        raise RecordError(
            f"{where}: options must be a list of at least 2 nonempty strings")
    if isinstance(label, bool) or not isinstance(label, int):
        raise RecordError(
            f"{where}: record must mark exactly one correct option via an "
            f"integer label")
    if not 0 <= label < len(options):
        raise RecordError(
            f"{where}: label {label} out of range [0, {len(options)})")
    return QaRecord(question, options, label)


def load_records(path) -> list[QaRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for i, line in enumerate(f):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise RecordError(f"{path}: line {i + 1}: {e}") from None
            if not isinstance(rec, dict):
                raise RecordError(f"{path}: line {i + 1}: expected an object")
            records.append(_validate(rec, f"{path}: line {i + 1}"))
    if not records:
        raise RecordError(f"{path}: no records")
    counts = {len(r.options) for r in records}
    if len(counts) > 1:
        raise RecordError(
            f"{path}: records disagree on the option count: {sorted(counts)}")
    return records


def reduce_record(record: QaRecord, seed: int) -> QaRecord:
    """Cut a 5-option record to 3: keep the answer, draw two distractors.

    Pure function of (record, seed). The stream key mixes a digest of the
    record text so one seed covers a corpus without aligning answer
    positions across rows.
    """
    options = record.options
    label = record.label
    if len(options) != 5:
        raise RecordError("record must carry exactly 5 options")
    if isinstance(label, bool) or not isinstance(label, int) or not 0 <= label < 5:
        raise RecordError(
            "record must mark exactly one correct option via an integer "
            "label in [0, 5)")
    material = "\x1f".join([str(record.question)]
                           + [str(o) for o in options] + [str(label)])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    rng = np.random.Generator(np.random.Philox(
        [int(seed), int.from_bytes(digest[:8], "little")]))
    distractors = [i for i in range(5) if i != label]
    keep = rng.choice(len(distractors), size=2, replace=False)
    kept = [options[distractors[int(k)]] for k in keep]
    new_pos = int(rng.integers(3))
    new_options = kept[:new_pos] + [options[label]] + kept[new_pos:]
    return QaRecord(record.question, new_options, new_pos)
