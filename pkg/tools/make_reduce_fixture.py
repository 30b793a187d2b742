"""Build the shared option-reduction fixture under tests/fixtures/.

Fifty synthetic five-option records plus the expected three-option records
produced by data.reduce_options for seeds 0..4. Any other implementation of
the reduction (the offline extractor duplicates it) must match these bytes.
"""

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from bayeshead import data  # noqa: E402

WORDS = ["ledger", "orchard", "flint", "harbor", "meadow", "quarry",
         "lantern", "birch", "saddle", "furrow"]


def main() -> None:
    records = []
    for i in range(50):
        options = ["%s %d" % (WORDS[(i + 3 * k) % len(WORDS)], k) for k in range(5)]
        records.append({
            "question": "which label belongs to row %d" % i,
            "options": options,
            "label": (i * 7) % 5,
        })
    fixdir = ROOT / "tests" / "fixtures"
    fixdir.mkdir(parents=True, exist_ok=True)
    with open(fixdir / "reduce_records.jsonl", "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    expected = {}
    for seed in range(5):
        expected[str(seed)] = [data.reduce_options(rec, seed) for rec in records]
    with open(fixdir / "reduce_expected.json", "w", encoding="utf-8") as f:
        json.dump(expected, f, sort_keys=True, indent=1)
        f.write("\n")
    print("wrote", fixdir / "reduce_records.jsonl", "and reduce_expected.json")


if __name__ == "__main__":
    main()
