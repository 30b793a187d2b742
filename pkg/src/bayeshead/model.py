"""Classification models over flat parameter vectors: a one-hidden-layer
tanh MLP and a multinomial logistic head, with Gaussian-prior log posterior
and exact analytic gradients.

Parameter vectors are flat float64 arrays; each architecture publishes a
layout of (name, shape, offset) entries so indexed names like ``W1[0,1]``
resolve to flat coordinates. The log prior drops its additive normalizing
constant (MAP and MCMC are shift-invariant in it).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import containers


@dataclass(frozen=True)
class Prior:
    """Isotropic Gaussian prior over all coordinates."""

    std_dev: float = 1.0

    def __post_init__(self):
        if not self.std_dev > 0:
            raise ValueError("prior std_dev must be positive")

    def log_density(self, theta: np.ndarray) -> float:
        return -0.5 * float(np.dot(theta, theta)) / self.std_dev ** 2

    def grad(self, theta: np.ndarray) -> np.ndarray:
        return -theta / self.std_dev ** 2


@dataclass
class ParamVector:
    """Flat parameter values plus the layout mapping back to named tensors.
    layout may be None for anonymous vectors (no named access)."""

    values: np.ndarray
    layout: list | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.layout is None:
            return
        total = sum(int(np.prod(shape, dtype=np.int64)) if shape else 1
                    for _, shape, _ in self.layout)
        if total != self.values.size:
            raise ValueError(
                f"layout covers {total} coordinates but vector has {self.values.size}")

    def tensor(self, name: str) -> np.ndarray:
        if self.layout is None:
            raise KeyError("parameter vector carries no layout")
        for n, shape, offset in self.layout:
            if n == name:
                size = int(np.prod(shape, dtype=np.int64)) if shape else 1
                return self.values[offset:offset + size].reshape(shape)
        raise KeyError(f"unknown parameter {name!r}; valid: "
                       f"{[n for n, _, _ in self.layout]}")


_INDEXED = re.compile(r"^(\w+)\[([0-9,\s]+)\]$")


def resolve_name(layout, indexed_name: str) -> int:
    """Map an indexed parameter name like ``W1[0,1]`` to its flat coordinate."""
    m = _INDEXED.match(indexed_name)
    if not m:
        raise KeyError(f"cannot parse parameter name {indexed_name!r}")
    name = m.group(1)
    idx = tuple(int(v) for v in m.group(2).split(","))
    for n, shape, offset in layout:
        if n == name:
            if len(idx) != len(shape):
                raise KeyError(
                    f"{indexed_name!r}: {name} has shape {shape}, got {len(idx)} indices")
            if any(not 0 <= i < s for i, s in zip(idx, shape)):
                raise KeyError(f"{indexed_name!r}: index out of bounds for {shape}")
            return offset + int(np.ravel_multi_index(idx, shape))
    valid = [n for n, _, _ in layout]
    raise KeyError(f"unknown parameter {name!r}; valid names: {valid}")


def _values(theta) -> np.ndarray:
    if isinstance(theta, ParamVector):
        return theta.values
    return np.asarray(theta, dtype=np.float64)


@dataclass(frozen=True)
class MlpArchitecture:
    """One hidden tanh layer: logits = W2 tanh(W1 x + b1) + b2."""

    input_dim: int
    hidden_dim: int
    n_classes: int
    activation: str = "tanh"

    def __post_init__(self):
        if min(self.input_dim, self.hidden_dim, self.n_classes) < 1:
            raise ValueError("all dimensions must be >= 1")
        if self.activation != "tanh":
            raise ValueError("only tanh hidden activation is supported")

    @property
    def n_params(self) -> int:
        d, h, c = self.input_dim, self.hidden_dim, self.n_classes
        return h * d + h + c * h + c

    @property
    def layout(self) -> list:
        d, h, c = self.input_dim, self.hidden_dim, self.n_classes
        return [
            ("W1", (h, d), 0),
            ("b1", (h,), h * d),
            ("W2", (c, h), h * d + h),
            ("b2", (c,), h * d + h + c * h),
        ]

    def _unpack(self, values):
        d, h, c = self.input_dim, self.hidden_dim, self.n_classes
        w1 = values[:h * d].reshape(h, d)
        b1 = values[h * d:h * d + h]
        w2 = values[h * d + h:h * d + h + c * h].reshape(c, h)
        b2 = values[h * d + h + c * h:]
        return w1, b1, w2, b2

    def logits(self, values: np.ndarray, x: np.ndarray) -> np.ndarray:
        w1, b1, w2, b2 = self._unpack(values)
        hidden = np.tanh(x @ w1.T + b1)
        return hidden @ w2.T + b2

    def loglik_grads(self, values: np.ndarray, x: np.ndarray,
                     y: np.ndarray) -> np.ndarray:
        """Per-example gradients of log p(y|x, theta), stacked N x P."""
        w1, b1, w2, b2 = self._unpack(values)
        pre = x @ w1.T + b1
        hidden = np.tanh(pre)
        probs = softmax(hidden @ w2.T + b2)
        g_logits = -probs
        g_logits[np.arange(len(y)), y] += 1.0
        delta = (g_logits @ w2) * (1.0 - hidden ** 2)
        n = x.shape[0]
        out = np.empty((n, self.n_params))
        d, h, c = self.input_dim, self.hidden_dim, self.n_classes
        out[:, :h * d] = (delta[:, :, None] * x[:, None, :]).reshape(n, h * d)
        out[:, h * d:h * d + h] = delta
        out[:, h * d + h:h * d + h + c * h] = (
            g_logits[:, :, None] * hidden[:, None, :]).reshape(n, c * h)
        out[:, h * d + h + c * h:] = g_logits
        return out


@dataclass(frozen=True)
class HeadArchitecture:
    """Multinomial logistic regression: logits = W x + b."""

    input_dim: int
    n_classes: int

    def __post_init__(self):
        if min(self.input_dim, self.n_classes) < 1:
            raise ValueError("all dimensions must be >= 1")

    @property
    def n_params(self) -> int:
        return self.n_classes * self.input_dim + self.n_classes

    @property
    def layout(self) -> list:
        d, c = self.input_dim, self.n_classes
        return [("W", (c, d), 0), ("b", (c,), c * d)]

    def _unpack(self, values):
        d, c = self.input_dim, self.n_classes
        return values[:c * d].reshape(c, d), values[c * d:]

    def logits(self, values: np.ndarray, x: np.ndarray) -> np.ndarray:
        w, b = self._unpack(values)
        return x @ w.T + b

    def loglik_grads(self, values: np.ndarray, x: np.ndarray,
                     y: np.ndarray) -> np.ndarray:
        w, b = self._unpack(values)
        probs = softmax(x @ w.T + b)
        g_logits = -probs
        g_logits[np.arange(len(y)), y] += 1.0
        n = x.shape[0]
        d, c = self.input_dim, self.n_classes
        out = np.empty((n, self.n_params))
        out[:, :c * d] = (g_logits[:, :, None] * x[:, None, :]).reshape(n, c * d)
        out[:, c * d:] = g_logits
        return out


def param_vector(arch, values=None) -> ParamVector:
    """Wrap flat values (zeros if omitted) with the architecture's layout."""
    if values is None:
        values = np.zeros(arch.n_params)
    values = _values(values)
    if values.size != arch.n_params:
        raise ValueError(f"expected {arch.n_params} parameters, got {values.size}")
    return ParamVector(values, arch.layout)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Shift-invariant softmax along the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(arch, theta, x: np.ndarray) -> np.ndarray:
    """Logits for one input vector or a batch of rows."""
    values = _values(theta)
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    if xb.shape[1] != arch.input_dim:
        raise ValueError(f"input has {xb.shape[1]} features, expected {arch.input_dim}")
    out = arch.logits(values, xb)
    return out[0] if single else out


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    m = logits.max(axis=-1, keepdims=True)
    z = logits - m
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def _per_example_loglik(arch, values, ds) -> np.ndarray:
    logits = arch.logits(values, ds.features)
    bad = ~np.isfinite(logits).all(axis=1)
    if bad.any():
        raise FloatingPointError(
            f"non-finite logits at example {int(np.argmax(bad))}")
    return _log_softmax(logits)[np.arange(ds.n_rows), ds.labels]

def log_posterior(arch, theta, ds, prior: Prior) -> float:
    """Sum of per-example log softmax likelihoods plus the Gaussian log prior
    (additive constant dropped). Compensated summation over the dataset, so
    the value is exactly invariant under row permutations."""
    if ds.n_rows < 1:
        raise ValueError("dataset is empty")
    values = _values(theta)
    loglik = math.fsum(_per_example_loglik(arch, values, ds))
    return loglik + prior.log_density(values)


def grad_log_posterior(arch, theta, ds, prior: Prior) -> ParamVector:
    """Exact analytic gradient of log_posterior."""
    if ds.n_rows < 1:
        raise ValueError("dataset is empty")
    values = _values(theta)
    with np.errstate(over="ignore", invalid="ignore"):
        grads = arch.loglik_grads(values, ds.features, ds.labels)
    if not np.all(np.isfinite(grads)):
        bad = int(np.argwhere(~np.isfinite(grads).all(axis=1))[0, 0])
        raise FloatingPointError(f"non-finite gradient at example {bad + 1}")
    total = grads.sum(axis=0) + prior.grad(values)
    return ParamVector(total, arch.layout)


def per_example_grad_loglik(arch, theta, x: np.ndarray, y: int) -> ParamVector:
    """Gradient of log p(y|x, theta) for one example (no prior term)."""
    values = _values(theta)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (arch.input_dim,):
        raise ValueError(f"input has shape {x.shape}, expected ({arch.input_dim},)")
    g = arch.loglik_grads(values, x[None, :], np.array([y]))[0]
    return ParamVector(g, arch.layout)


def save_params(path, theta: ParamVector) -> None:
    containers.write_params(path, theta.values, theta.layout)


def load_params(path) -> ParamVector:
    values, layout = containers.read_params(path)
    return ParamVector(values, layout)
