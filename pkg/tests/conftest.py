import pathlib

import numpy as np
import pytest

from bayeshead import data, predict

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


def make_logistic_data(n, d, seed, scale=2.0):
    """Synthetic multinomial-logistic data with a known generating process."""
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.normal(0.0, 1.0, size=(n, d))
    w_true = rng.normal(0.0, scale, size=(d, 3))
    logits = x @ w_true
    probs = np.exp(logits - logits.max(axis=1, keepdims=True))
    probs /= probs.sum(axis=1, keepdims=True)
    y = np.array([rng.choice(3, p=p) for p in probs], dtype=np.int64)
    return data.Dataset(features=x, labels=y, n_classes=3)


def make_summary(mean_probs, std=None, n_samples=10):
    mean = np.asarray(mean_probs, dtype=np.float64)
    pred = int(np.argmax(mean))
    return predict.PredictiveSummary(
        mean_probs=mean,
        std_probs=np.zeros_like(mean) if std is None else np.asarray(std),
        predicted=pred, confidence=float(mean[pred]),
        n_samples_used=n_samples)
