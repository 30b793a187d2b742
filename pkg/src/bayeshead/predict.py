"""Posterior predictive summaries and the confidence-threshold abstention
rule. Class probabilities are softmax outputs averaged over posterior
parameter draws; the per-class spread is a population standard deviation
across the draws.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import model

ABSTAIN = "abstain"
ANSWER = "answer"


@dataclass
class PredictiveSummary:
    """Per-example posterior predictive: mean and spread of the class
    probabilities over S parameter draws."""

    mean_probs: np.ndarray
    std_probs: np.ndarray
    predicted: int
    confidence: float
    n_samples_used: int

    def __post_init__(self):
        self.mean_probs = np.asarray(self.mean_probs, dtype=np.float64)
        self.std_probs = np.asarray(self.std_probs, dtype=np.float64)
        if abs(float(self.mean_probs.sum()) - 1.0) > 1e-9:
            raise ValueError("mean_probs must sum to 1")
        if np.any(self.std_probs < 0) or np.any(self.std_probs > 0.5 + 1e-12):
            raise ValueError("std of a probability lies in [0, 0.5]")


@dataclass
class Decision:
    outcome: str          # "answer" or "abstain"
    predicted: int | None
    threshold: float


def _summarize(probs: np.ndarray) -> PredictiveSummary:
    """Reduce an (S, C) stack of per-draw probability vectors."""
    mean = probs.mean(axis=0)
    std = probs.std(axis=0)          # population std: S is fixed and known
    predicted = int(np.argmax(mean))  # argmax takes the lowest index on ties
    return PredictiveSummary(mean_probs=mean, std_probs=std,
                             predicted=predicted,
                             confidence=float(mean[predicted]),
                             n_samples_used=probs.shape[0])


def posterior_predictive(arch, samples, x) -> PredictiveSummary:
    """Average softmax(forward(theta_s, x)) over every draw in the chain."""
    draws = samples.draws if hasattr(samples, "draws") else np.asarray(samples)
    if draws.ndim != 2 or draws.shape[0] < 1:
        raise ValueError("need at least one posterior draw")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (arch.input_dim,):
        raise ValueError(f"input has shape {x.shape}, expected ({arch.input_dim},)")
    probs = np.stack([model.softmax(arch.logits(d, x[None, :]))[0]
                      for d in draws])
    return _summarize(probs)


def batch_predict(arch, samples, ds) -> list[PredictiveSummary]:
    """posterior_predictive over every dataset row, order preserved.

    Each row goes through the exact single-row code path so batched and
    row-by-row results are bit-identical (matmul shape changes the BLAS
    reduction order otherwise)."""
    draws = samples.draws if hasattr(samples, "draws") else np.asarray(samples)
    if draws.ndim != 2 or draws.shape[0] < 1:
        raise ValueError("need at least one posterior draw")
    if ds.n_rows == 0:
        return []
    if ds.n_features != arch.input_dim:
        raise ValueError(
            f"dataset has {ds.n_features} features, model expects {arch.input_dim}")
    return [posterior_predictive(arch, draws, ds.features[i])
            for i in range(ds.n_rows)]


def decide(summary: PredictiveSummary, threshold: float) -> Decision:
    """Answer with the predicted class iff confidence >= threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if summary.confidence >= threshold:
        return Decision(ANSWER, summary.predicted, threshold)
    return Decision(ABSTAIN, None, threshold)


def save_summaries(path, summaries: list[PredictiveSummary], labels=None) -> None:
    """CSV export: row_id, mean_p*, std_p*, predicted, confidence, label.
    Label is blank when unknown."""
    if not summaries:
        raise ValueError("nothing to save: no summaries")
    c = summaries[0].mean_probs.size
    header = (["row_id"]
              + [f"mean_p{j}" for j in range(c)]
              + [f"std_p{j}" for j in range(c)]
              + ["predicted", "confidence", "label"])
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for i, s in enumerate(summaries):
            label = "" if labels is None else int(labels[i])
            w.writerow([i]
                       + [f"{v:.17g}" for v in s.mean_probs]
                       + [f"{v:.17g}" for v in s.std_probs]
                       + [s.predicted, f"{s.confidence:.17g}", label])


def load_summaries(path):
    """Inverse of save_summaries. Returns (summaries, labels); labels is
    None when every label field is blank."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ValueError(f"{path}: empty summaries file")
    header = rows[0]
    if header[:1] != ["row_id"] or header[-1] != "label":
        raise ValueError(f"{path}: unrecognized summaries header")
    c = sum(1 for h in header if h.startswith("mean_p"))
    if c == 0 or header[1:1 + c] != [f"mean_p{j}" for j in range(c)]:
        raise ValueError(f"{path}: unrecognized summaries header")
    summaries, labels = [], []
    for row in rows[1:]:
        mean = np.array([float(v) for v in row[1:1 + c]])
        std = np.array([float(v) for v in row[1 + c:1 + 2 * c]])
        predicted = int(row[1 + 2 * c])
        confidence = float(row[2 + 2 * c])
        summaries.append(PredictiveSummary(mean, std, predicted, confidence,
                                           n_samples_used=1))
        labels.append(None if row[3 + 2 * c] == "" else int(row[3 + 2 * c]))
    if all(l is None for l in labels):
        return summaries, None
    return summaries, np.array([(-1 if l is None else l) for l in labels])
