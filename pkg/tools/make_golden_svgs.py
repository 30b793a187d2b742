"""Regenerate the golden SVG fixtures under tests/fixtures/golden/.

Every figure is rendered from a Philox-seeded synthetic input, so the bytes
are a pure function of this script. Rerun after any intentional change to
the renderers and review the diff before committing.
"""

import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from bayeshead import metrics, model, report  # noqa: E402
from make_golden_helpers import synthetic_chain, synthetic_summaries  # noqa: E402

OUT = ROOT / "tests" / "fixtures" / "golden"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    chain = synthetic_chain()

    m1 = report.marginal_1d(chain, "w[1]", model.Prior(1.0))
    report.render_marginal_1d(m1, OUT / "marginal.svg")

    h2 = report.marginal_2d(chain, "w[0]", "w[1]")
    report.render_marginal_2d(h2, OUT / "joint.svg")

    summaries, labels = synthetic_summaries()
    report.render_predictive_bars(summaries, labels, OUT / "bars.svg")

    bins = metrics.reliability(summaries, labels)
    report.render_reliability(bins, OUT / "reliability.svg")

    curve = metrics.accuracy_coverage(summaries, labels)
    report.render_coverage([("sampled", curve), ("point", curve)],
                           OUT / "coverage.svg")

    trace = 2.0 + 3.0 * np.exp(-np.arange(120) / 20.0)
    report.render_nll_trace(trace, OUT / "trace.svg")

    for p in sorted(OUT.glob("*.svg")):
        print("wrote", p.relative_to(ROOT), p.stat().st_size, "bytes")


if __name__ == "__main__":
    main()
