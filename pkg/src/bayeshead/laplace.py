"""MAP training and the diagonal Laplace approximation.

The Gaussian posterior sits at the MAP point with per-coordinate variance
1 / (N * fisher_jj + prior precision), where the Fisher diagonal is the
dataset average of squared per-example log-likelihood gradients. Parameter
perturbations are drawn by scaling standard normals, 30 by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import containers, model
from .sampler import SampleChain

GAUSSIAN_MC_SAMPLES = 30
PRECISION_FLOOR = 1e-8

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class MapConfig:
    learning_rate: float = 1e-2
    n_steps: int = 2000
    batch_size: int | None = None   # None = full batch
    tol: float = 0.0                # gradient norm for early stop; 0 = never
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")


@dataclass
class MapEstimate:
    """MAP parameters with the optimizer's stopping record."""

    params: model.ParamVector
    grad_norm: float
    n_steps: int
    nll_trace: np.ndarray     # negative log posterior, one entry per epoch
    stopped_by: str           # "tolerance" or "budget"


@dataclass
class GaussianPosterior:
    """Diagonal Gaussian over parameters: mean at the MAP, one variance
    per coordinate."""

    mean: model.ParamVector
    variance: np.ndarray

    def __post_init__(self):
        self.variance = np.asarray(self.variance, dtype=np.float64)
        if self.variance.shape != (self.mean.values.size,):
            raise ValueError("variance length must match the mean")
        if not np.all(np.isfinite(self.variance)) or np.any(self.variance <= 0):
            raise ValueError("every variance must be strictly positive and finite")

    @property
    def n_params(self) -> int:
        return self.mean.values.size

    def save(self, path) -> None:
        containers.write_gaussian(path, self.mean.values, self.variance,
                                  self.mean.layout)

    @classmethod
    def load(cls, path) -> "GaussianPosterior":
        mean, variance, layout = containers.read_gaussian(path)
        return cls(model.ParamVector(mean, layout), variance)


def adam_maximize(value_and_grad, theta0, n_steps: int,
                  learning_rate: float = 1e-2, tol: float = 0.0):
    """Ascend a scalar objective with adaptive moments. Returns
    (theta, value, grad, trace, steps_taken, stopped_by); trace holds the
    negated objective after every update."""
    theta = np.asarray(theta0, dtype=np.float64).copy()
    val, grad = value_and_grad(theta)
    grad = np.asarray(grad, dtype=np.float64)
    if not math.isfinite(val) or not np.all(np.isfinite(grad)):
        raise FloatingPointError("non-finite loss at step 0")
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    trace = []
    stopped_by = "budget"
    steps = 0
    for t in range(1, n_steps + 1):
        if tol > 0 and float(np.linalg.norm(grad)) <= tol:
            stopped_by = "tolerance"
            break
        m = ADAM_BETA1 * m + (1 - ADAM_BETA1) * grad
        v = ADAM_BETA2 * v + (1 - ADAM_BETA2) * grad * grad
        m_hat = m / (1 - ADAM_BETA1 ** t)
        v_hat = v / (1 - ADAM_BETA2 ** t)
        theta = theta + learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        val, grad = value_and_grad(theta)
        grad = np.asarray(grad, dtype=np.float64)
        if not math.isfinite(val) or not np.all(np.isfinite(grad)):
            raise FloatingPointError(f"non-finite loss at step {t}")
        trace.append(-val)
        steps = t
    if tol > 0 and stopped_by == "budget" and steps == n_steps:
        if float(np.linalg.norm(grad)) <= tol:
            stopped_by = "tolerance"
    return theta, val, grad, np.asarray(trace), steps, stopped_by


def train_map(arch, ds, prior, config: MapConfig | None = None) -> MapEstimate:
    """Fit MAP parameters by full- or mini-batch adaptive-moment ascent of
    the log posterior. Deterministic given the seed (init and shuffle order
    both come from it)."""
    if config is None:
        config = MapConfig()
    if ds.n_rows == 0:
        raise ValueError("dataset must be nonempty")
    rng = np.random.Generator(np.random.Philox(config.seed))
    theta = config.init_scale * rng.standard_normal(arch.n_params)

    batch = config.batch_size
    if batch is None or batch >= ds.n_rows:
        def vag(th):
            return (model.log_posterior(arch, th, ds, prior),
                    model.grad_log_posterior(arch, th, ds, prior).values)

        theta, val, grad, trace, steps, stopped_by = adam_maximize(
            vag, theta, config.n_steps, config.learning_rate, config.tol)
        return MapEstimate(model.ParamVector(theta, arch.layout),
                           float(np.linalg.norm(grad)), steps, trace,
                           stopped_by)

    # mini-batch path: one trace entry per full pass over the data
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    trace = []
    steps = 0
    stopped_by = "budget"
    full_grad = model.grad_log_posterior(arch, theta, ds, prior).values
    done = False
    while steps < config.n_steps and not done:
        order = rng.permutation(ds.n_rows)
        for lo in range(0, ds.n_rows, batch):
            if steps >= config.n_steps:
                break
            part = ds.take(order[lo:lo + batch])
            # batch likelihood gradient rescaled to full-dataset size,
            # prior counted once
            g_lik = arch.loglik_grads(theta, part.features, part.labels).sum(axis=0)
            g = (ds.n_rows / part.n_rows) * g_lik + prior.grad(theta)
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(f"non-finite loss at step {steps + 1}")
            steps += 1
            m = ADAM_BETA1 * m + (1 - ADAM_BETA1) * g
            v = ADAM_BETA2 * v + (1 - ADAM_BETA2) * g * g
            m_hat = m / (1 - ADAM_BETA1 ** steps)
            v_hat = v / (1 - ADAM_BETA2 ** steps)
            theta = theta + config.learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        val = model.log_posterior(arch, theta, ds, prior)
        if not math.isfinite(val):
            raise FloatingPointError(f"non-finite loss at step {steps}")
        trace.append(-val)
        full_grad = model.grad_log_posterior(arch, theta, ds, prior).values
        if config.tol > 0 and float(np.linalg.norm(full_grad)) <= config.tol:
            stopped_by = "tolerance"
            done = True
    return MapEstimate(model.ParamVector(theta, arch.layout),
                       float(np.linalg.norm(full_grad)), steps,
                       np.asarray(trace), stopped_by)


def empirical_fisher_diag(arch, params, ds) -> np.ndarray:
    """Dataset average of squared per-example log-likelihood gradients.
    Invariant under row permutation and duplication."""
    if ds.n_rows == 0:
        raise ValueError("dataset must be nonempty")
    values = params.values if hasattr(params, "values") else np.asarray(params)
    with np.errstate(over="ignore", invalid="ignore"):
        grads = arch.loglik_grads(values, ds.features, ds.labels)
    bad = ~np.all(np.isfinite(grads), axis=1)
    if bad.any():
        idx = int(np.argmax(bad))
        raise FloatingPointError(
            f"non-finite per-example gradient at example {idx + 1}")
    return np.mean(grads * grads, axis=0)


def laplace_posterior(theta_map, fisher_diag, prior, n_examples: int,
                      floor: float = PRECISION_FLOOR) -> GaussianPosterior:
    """Gaussian posterior: precision_j = N * F_jj + 1/sigma^2, floored to
    keep the variance finite when both terms vanish."""
    if hasattr(theta_map, "params"):       # accept a MapEstimate directly
        theta_map = theta_map.params
    if not hasattr(theta_map, "values"):
        theta_map = model.ParamVector(np.asarray(theta_map, dtype=np.float64))
    fisher_diag = np.asarray(fisher_diag, dtype=np.float64)
    if fisher_diag.shape != (theta_map.values.size,):
        raise ValueError("fisher_diag length must match the parameter count")
    if np.any(fisher_diag < 0):
        raise ValueError("fisher entries must be >= 0")
    if n_examples < 1:
        raise ValueError("n_examples must be >= 1")
    if not floor > 0:
        raise ValueError("floor must be positive")
    precision = n_examples * fisher_diag + 1.0 / prior.std_dev ** 2
    variance = 1.0 / np.maximum(precision, floor)
    return GaussianPosterior(theta_map, variance)


def sample_gaussian(posterior: GaussianPosterior, n_samples: int,
                    seed: int) -> SampleChain:
    """Independent draws mean + sqrt(variance) * z packaged like a chain so
    downstream prediction code is agnostic to the posterior's origin."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    z = rng.standard_normal((n_samples, posterior.n_params))
    draws = posterior.mean.values + np.sqrt(posterior.variance) * z
    return SampleChain(draws=draws,
                       accept_stats=np.ones(n_samples),
                       divergences=0,
                       step_size_final=0.0,
                       seed=seed,
                       layout=posterior.mean.layout)
