"""Synthetic inputs behind the golden SVG fixtures.

Shared by tools/make_golden_svgs.py (which writes the fixtures) and
tests/test_report.py (which re-renders and compares bytes), so the two
can never drift apart.
"""

import numpy as np

from bayeshead import model, predict, sampler


def synthetic_chain() -> sampler.SampleChain:
    rng = np.random.Generator(np.random.Philox(42))
    z = rng.standard_normal((2000, 2))
    cov = np.array([[1.0, 0.85], [0.85, 1.0]])
    xy = z @ np.linalg.cholesky(cov).T
    third = 0.3 * rng.standard_normal((2000, 1)) - 1.0
    draws = np.concatenate([xy, third], axis=1)
    layout = [("w", (2,), 0), ("v", (1,), 2)]
    return sampler.SampleChain(draws=draws, accept_stats=np.ones(2000),
                               divergences=0, step_size_final=0.1, seed=42,
                               layout=layout)


def synthetic_summaries():
    rng = np.random.Generator(np.random.Philox(7))
    summaries, labels = [], []
    for i in range(6):
        logits = rng.normal(0.0, 1.5, size=(40, 3))
        probs = model.softmax(logits)
        mean = probs.mean(axis=0)
        mean = mean / mean.sum()
        std = probs.std(axis=0)
        pred = int(np.argmax(mean))
        summaries.append(predict.PredictiveSummary(
            mean_probs=mean, std_probs=std, predicted=pred,
            confidence=float(mean[pred]), n_samples_used=40))
        labels.append(int(rng.integers(3)))
    return summaries, np.array(labels)
