"""Build the bundled toy-QA feature fixture (datasets/toy_qa_features.bhft).

Stand-in for the offline embedding extractor so the library's fixtures are
self-contained: each (question, option) pair is embedded by signed sha256
hashing of lowercased character 3- and 4-grams into a 768-dim block, blocks
are scaled to L2 norm 5 (the magnitude range of real encoder pooled states)
and concatenated across the 3 options -> (30, 2304) f32.
Deterministic, no seed involved.
"""

import hashlib
import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from bayeshead import containers, data  # noqa: E402

BLOCK_DIM = 768
BLOCK_NORM = 5.0


def embed_text(text: str) -> np.ndarray:
    vec = np.zeros(BLOCK_DIM, dtype=np.float64)
    s = " " + text.lower() + " "
    for n in (3, 4):
        for i in range(len(s) - n + 1):
            h = hashlib.sha256(s[i : i + n].encode("utf-8")).digest()
            idx = int.from_bytes(h[:4], "little") % BLOCK_DIM
            sign = 1.0 if h[4] & 1 else -1.0
            vec[idx] += sign
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec *= BLOCK_NORM / norm
    return vec


def main() -> None:
    records = data.load_qa_records(ROOT / "src/bayeshead/datasets/toy_qa.jsonl")
    feats = np.zeros((len(records), 3 * BLOCK_DIM), dtype=np.float64)
    labels = np.zeros(len(records), dtype=np.int64)
    for r, rec in enumerate(records):
        if len(rec["options"]) != 3:
            raise SystemExit(f"record {r} has {len(rec['options'])} options")
        for k, option in enumerate(rec["options"]):
            feats[r, k * BLOCK_DIM : (k + 1) * BLOCK_DIM] = embed_text(
                rec["question"] + " " + option)
        labels[r] = rec["label"]
    out = ROOT / "src/bayeshead/datasets/toy_qa_features.bhft"
    containers.write_features(out, feats.astype(np.float32), labels, 3)
    print(f"wrote {out}: shape={feats.shape} labels={np.bincount(labels)}")


if __name__ == "__main__":
    main()
