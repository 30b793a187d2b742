"""Calibration and selective-prediction metrics over predictive summaries:
reliability bins, expected calibration error, and the exact accuracy vs
coverage step curve. A comparison report pairs two prediction sets (point
estimate vs posterior) over the same examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReliabilityBins:
    """Equal-width confidence bins over [0,1]; the last bin is closed."""

    n_bins: int
    edges: np.ndarray        # length n_bins + 1
    counts: np.ndarray       # ints, sum to N
    mean_confidence: np.ndarray   # nan where the bin is empty
    accuracy: np.ndarray          # nan where the bin is empty

    @property
    def n_examples(self) -> int:
        return int(self.counts.sum())


@dataclass
class CoverageCurve:
    """Step curve of (threshold, answered fraction, accuracy on answered)."""

    thresholds: np.ndarray
    coverage: np.ndarray
    selective_accuracy: np.ndarray   # nan where coverage is 0

    def __len__(self) -> int:
        return len(self.thresholds)


@dataclass
class ComparisonReport:
    map_bins: ReliabilityBins
    bayes_bins: ReliabilityBins
    map_ece: float
    bayes_ece: float
    map_curve: CoverageCurve
    bayes_curve: CoverageCurve
    confidence_delta: np.ndarray   # bayes confidence minus map, per example
    map_accuracy: float
    bayes_accuracy: float


def _confidences_and_hits(summaries, labels):
    if len(summaries) != len(labels):
        raise ValueError(
            f"{len(summaries)} summaries vs {len(labels)} labels")
    if len(summaries) == 0:
        raise ValueError("need at least one prediction")
    conf = np.array([s.confidence for s in summaries], dtype=np.float64)
    pred = np.array([s.predicted for s in summaries], dtype=np.int64)
    hits = (pred == np.asarray(labels, dtype=np.int64)).astype(np.float64)
    return conf, hits


def reliability(summaries, labels, n_bins: int = 10) -> ReliabilityBins:
    """Assign each prediction's confidence to its bin; report per-bin count,
    mean confidence, and empirical accuracy (nan when empty)."""
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    conf, hits = _confidences_and_hits(summaries, labels)
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    # right-open bins except the last: confidence 1.0 lands in the top bin
    idx = np.minimum((conf * n_bins).astype(np.int64), n_bins - 1)
    counts = np.zeros(n_bins, dtype=np.int64)
    mean_conf = np.full(n_bins, np.nan)
    accuracy = np.full(n_bins, np.nan)
    for b in range(n_bins):
        mask = idx == b
        counts[b] = int(mask.sum())
        if counts[b]:
            mean_conf[b] = float(conf[mask].mean())
            accuracy[b] = float(hits[mask].mean())
    return ReliabilityBins(n_bins=n_bins, edges=edges, counts=counts,
                           mean_confidence=mean_conf, accuracy=accuracy)


def ece(bins: ReliabilityBins) -> float:
    """Count-weighted mean |accuracy - confidence| over occupied bins."""
    n = bins.n_examples
    if n == 0:
        raise ValueError("no examples behind these bins")
    total = 0.0
    for b in range(bins.n_bins):
        if bins.counts[b]:
            total += (bins.counts[b] / n) * abs(bins.accuracy[b]
                                                - bins.mean_confidence[b])
    return total


def accuracy_coverage(summaries, labels, thresholds=None) -> CoverageCurve:
    """Selective prediction curve: at each threshold, the fraction answered
    (confidence >= threshold) and the accuracy among answered. The default
    grid is the sorted unique confidences, which traces the exact curve."""
    conf, hits = _confidences_and_hits(summaries, labels)
    if thresholds is None:
        thresholds = np.unique(conf)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if thresholds.ndim != 1 or len(thresholds) == 0:
        raise ValueError("thresholds must be a nonempty 1-D grid")
    if np.any(thresholds < 0) or np.any(thresholds > 1):
        raise ValueError("thresholds must lie in [0, 1]")
    if np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be sorted ascending")
    n = len(conf)
    coverage = np.empty(len(thresholds))
    selective = np.empty(len(thresholds))
    for i, tau in enumerate(thresholds):
        answered = conf >= tau
        k = int(answered.sum())
        coverage[i] = k / n
        selective[i] = float(hits[answered].mean()) if k else np.nan
    return CoverageCurve(thresholds=thresholds, coverage=coverage,
                         selective_accuracy=selective)


def compare(map_summaries, bayes_summaries, labels) -> ComparisonReport:
    """Side-by-side calibration report over the same examples."""
    if len(map_summaries) != len(bayes_summaries):
        raise ValueError(
            f"prediction sets are misaligned: {len(map_summaries)} vs "
            f"{len(bayes_summaries)}")
    map_conf, map_hits = _confidences_and_hits(map_summaries, labels)
    bayes_conf, bayes_hits = _confidences_and_hits(bayes_summaries, labels)
    map_bins = reliability(map_summaries, labels)
    bayes_bins = reliability(bayes_summaries, labels)
    return ComparisonReport(
        map_bins=map_bins,
        bayes_bins=bayes_bins,
        map_ece=ece(map_bins),
        bayes_ece=ece(bayes_bins),
        map_curve=accuracy_coverage(map_summaries, labels),
        bayes_curve=accuracy_coverage(bayes_summaries, labels),
        confidence_delta=bayes_conf - map_conf,
        map_accuracy=float(map_hits.mean()),
        bayes_accuracy=float(bayes_hits.mean()),
    )
