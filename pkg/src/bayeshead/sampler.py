"""Hamiltonian Monte Carlo: leapfrog integration, a fixed-length HMC
kernel, a No-U-Turn kernel with multinomial trajectory sampling, dual
averaging step-size adaptation, and chain diagnostics (split R-hat, ESS).

Randomness comes from a counter-based Philox generator seeded per chain, so
a chain is bit-reproducible on one platform and extending n_samples leaves
the earlier draws unchanged. Non-finite trajectories are flagged as
divergences and rejected, never raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import containers

DIVERGENCE_THRESHOLD = 1000.0

# dual averaging constants from the published step-size adaptation scheme
DA_GAMMA = 0.05
DA_T0 = 10.0
DA_KAPPA = 0.75


@dataclass
class HmcConfig:
    """Sampler settings shared by the fixed-length and NUTS kernels."""

    n_warmup: int
    n_samples: int
    seed: int
    target_accept: float = 0.8
    max_tree_depth: int = 10
    algorithm: str = "nuts"          # "nuts" or "hmc_fixed"
    n_leapfrog: int = 32             # trajectory length for hmc_fixed
    step_size: float | None = None   # initial step size; None = heuristic
    mass: str = "identity"           # "identity" or "diag"

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.n_warmup < 0:
            raise ValueError("n_warmup must be >= 0")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")
        if self.algorithm not in ("nuts", "hmc_fixed"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.mass not in ("identity", "diag"):
            raise ValueError(f"unknown mass option {self.mass!r}")
        if self.step_size is not None and not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.n_leapfrog < 1:
            raise ValueError("n_leapfrog must be >= 1")
        if self.algorithm == "nuts" and self.max_tree_depth < 1:
            raise ValueError("max_tree_depth must be >= 1: no trajectory possible")


@dataclass
class SampleChain:
    """Posterior draws (S x P) plus per-draw acceptance statistics."""

    draws: np.ndarray
    accept_stats: np.ndarray
    divergences: int
    step_size_final: float
    seed: int
    layout: list | None = None

    @property
    def n_samples(self) -> int:
        return self.draws.shape[0]

    @property
    def n_params(self) -> int:
        return self.draws.shape[1]

    def save(self, path) -> None:
        containers.write_chain(path, self.draws, self.accept_stats,
                               self.divergences, self.step_size_final,
                               self.seed, self.layout)

    @classmethod
    def load(cls, path) -> "SampleChain":
        return cls(**containers.read_chain(path))


def leapfrog(theta, r, grad_fn, step_size: float, n_steps: int, inv_mass=None):
    """Integrate Hamiltonian dynamics: half kick, n_steps drifts with full
    kicks between, half kick. Returns (theta, r); non-finite values are the
    caller's divergence signal, not an exception."""
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    theta = np.asarray(theta, dtype=np.float64).copy()
    r = np.asarray(r, dtype=np.float64).copy()
    inv = np.ones_like(theta) if inv_mass is None else np.asarray(inv_mass)
    with np.errstate(over="ignore", invalid="ignore"):
        r = r + 0.5 * step_size * np.asarray(grad_fn(theta), dtype=np.float64)
        for i in range(n_steps):
            theta = theta + step_size * inv * r
            g = np.asarray(grad_fn(theta), dtype=np.float64)
            r = r + (step_size if i < n_steps - 1 else 0.5 * step_size) * g
    return theta, r


class _State:
    """Position with momentum and cached log density / gradient."""

    __slots__ = ("theta", "r", "logp", "grad")

    def __init__(self, theta, r, logp, grad):
        self.theta = theta
        self.r = r
        self.logp = logp
        self.grad = grad

    def energy(self, inv_mass) -> float:
        return -self.logp + _kinetic(self.r, inv_mass)


def _safe_value_grad(log_post_fn, grad_fn, p: int):
    """Wrap the target so non-finite evaluations become -inf, not errors."""

    def f(theta):
        if not np.all(np.isfinite(theta)):
            return -np.inf, np.zeros(p)
        try:
            logp = float(log_post_fn(theta))
            grad = grad_fn(theta)
            if hasattr(grad, "values"):
                grad = grad.values
            grad = np.asarray(grad, dtype=np.float64)
        except FloatingPointError:
            return -np.inf, np.zeros(p)
        if not math.isfinite(logp) or not np.all(np.isfinite(grad)):
            return -np.inf, np.zeros(p)
        return logp, grad

    return f


def _kinetic(r, inv_mass) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        return 0.5 * float(np.dot(r, inv_mass * r))


def _momentum(rng, inv_mass) -> np.ndarray:
    return rng.standard_normal(inv_mass.size) / np.sqrt(inv_mass)


def _step(state: _State, step: float, inv_mass, value_grad) -> _State:
    """One leapfrog step of signed size `step` from a cached state."""
    with np.errstate(over="ignore", invalid="ignore"):
        r = state.r + 0.5 * step * state.grad
        theta = state.theta + step * inv_mass * r
        logp, grad = value_grad(theta)
        r = r + 0.5 * step * grad
    return _State(theta, r, logp, grad)


class _DualAveraging:
    """Step-size adaptation toward a target acceptance statistic."""

    def __init__(self, eps0: float, target: float):
        self.mu = math.log(10.0 * eps0)
        self.log_eps = math.log(eps0)
        self.log_eps_bar = 0.0
        self.h_bar = 0.0
        self.m = 0
        self.target = target

    def update(self, alpha: float) -> float:
        self.m += 1
        frac = 1.0 / (self.m + DA_T0)
        self.h_bar = (1.0 - frac) * self.h_bar + frac * (self.target - alpha)
        self.log_eps = self.mu - math.sqrt(self.m) / DA_GAMMA * self.h_bar
        w = self.m ** (-DA_KAPPA)
        self.log_eps_bar = w * self.log_eps + (1.0 - w) * self.log_eps_bar
        return math.exp(self.log_eps)

    def adapted(self) -> float:
        return math.exp(self.log_eps_bar)


def _find_reasonable_epsilon(value_grad, z: _State, rng, inv_mass) -> float:
    """Double or halve the step size until one leapfrog step crosses 50%
    acceptance (the standard initialization heuristic)."""
    eps = 1.0
    r0 = _momentum(rng, inv_mass)
    start = _State(z.theta, r0, z.logp, z.grad)
    h0 = start.energy(inv_mass)

    def log_accept(eps: float) -> float:
        h1 = _step(start, eps, inv_mass, value_grad).energy(inv_mass)
        return h0 - h1 if math.isfinite(h1) else -np.inf

    direction = 1.0 if log_accept(eps) > math.log(0.5) else -1.0
    while direction * log_accept(eps) > -direction * math.log(2.0):
        eps *= 2.0 ** direction
        if not 1e-10 < eps < 1e10:
            break
    return eps


def _hmc_transition(z, eps, rng, inv_mass, value_grad, n_leapfrog):
    r0 = _momentum(rng, inv_mass)
    # randomize trajectory length and jitter the step size; exactly periodic
    # trajectories resonate on near-Gaussian targets and stop mixing
    n_steps = int(rng.integers(1, n_leapfrog + 1))
    eps_t = eps * (0.9 + 0.2 * rng.uniform())
    cur = _State(z.theta, r0, z.logp, z.grad)
    h0 = cur.energy(inv_mass)
    prop = cur
    for _ in range(n_steps):
        prop = _step(prop, eps_t, inv_mass, value_grad)
    h1 = prop.energy(inv_mass)
    delta_h = h1 - h0
    divergent = not delta_h < DIVERGENCE_THRESHOLD  # True for nan as well
    alpha = 0.0 if divergent else math.exp(min(-delta_h, 0.0))
    if rng.uniform() < alpha:
        z = prop
    return z, alpha, divergent


class _Tree:
    __slots__ = ("left", "right", "proposal", "log_sum_w", "ok",
                 "alpha_sum", "n_alpha", "divergent")

    def __init__(self, left, right, proposal, log_sum_w, ok,
                 alpha_sum, n_alpha, divergent):
        self.left = left
        self.right = right
        self.proposal = proposal
        self.log_sum_w = log_sum_w
        self.ok = ok
        self.alpha_sum = alpha_sum
        self.n_alpha = n_alpha
        self.divergent = divergent


def _uturn(left: _State, right: _State, inv_mass) -> bool:
    d = right.theta - left.theta
    return (np.dot(d, inv_mass * left.r) < 0.0
            or np.dot(d, inv_mass * right.r) < 0.0)


def _build_tree(start: _State, depth, direction, eps, h0,
                rng, inv_mass, value_grad) -> _Tree:
    if depth == 0:
        nxt = _step(start, direction * eps, inv_mass, value_grad)
        h1 = nxt.energy(inv_mass)
        log_w = h0 - h1
        divergent = not log_w > -DIVERGENCE_THRESHOLD  # True for nan as well
        if divergent:
            log_w, alpha = -np.inf, 0.0
        else:
            alpha = math.exp(min(log_w, 0.0))
        return _Tree(left=nxt, right=nxt, proposal=nxt, log_sum_w=log_w,
                     ok=not divergent, alpha_sum=alpha, n_alpha=1,
                     divergent=divergent)

    first = _build_tree(start, depth - 1, direction, eps, h0,
                        rng, inv_mass, value_grad)
    if not first.ok:
        return first
    outer = first.right if direction > 0 else first.left
    second = _build_tree(outer, depth - 1, direction, eps, h0,
                         rng, inv_mass, value_grad)

    log_sum_w = float(np.logaddexp(first.log_sum_w, second.log_sum_w))
    proposal = first.proposal
    # multinomial choice between the halves, by their total weight
    if second.ok and log_sum_w > -np.inf:
        if rng.uniform() < math.exp(second.log_sum_w - log_sum_w):
            proposal = second.proposal
    left = first.left if direction > 0 else second.left
    right = second.right if direction > 0 else first.right
    ok = first.ok and second.ok and not _uturn(left, right, inv_mass)
    return _Tree(left=left, right=right, proposal=proposal,
                 log_sum_w=log_sum_w, ok=ok,
                 alpha_sum=first.alpha_sum + second.alpha_sum,
                 n_alpha=first.n_alpha + second.n_alpha,
                 divergent=first.divergent or second.divergent)


def _nuts_transition(z, eps, rng, inv_mass, value_grad, max_depth):
    r0 = _momentum(rng, inv_mass)
    cur = _State(z.theta, r0, z.logp, z.grad)
    h0 = cur.energy(inv_mass)
    left = cur
    right = cur
    proposal = cur
    log_sum_w = 0.0  # weight of the initial point: exp(h0 - h0)
    alpha_sum, n_alpha = 0.0, 0
    divergent = False
    for depth in range(max_depth):
        if rng.integers(2) == 1:
            sub = _build_tree(right, depth, 1, eps, h0, rng, inv_mass,
                              value_grad)
            right = sub.right
        else:
            sub = _build_tree(left, depth, -1, eps, h0, rng, inv_mass,
                              value_grad)
            left = sub.left
        alpha_sum += sub.alpha_sum
        n_alpha += sub.n_alpha
        divergent = divergent or sub.divergent
        if not sub.ok:
            break
        # biased progressive sampling: favor the freshly built half
        if rng.uniform() < math.exp(min(sub.log_sum_w - log_sum_w, 0.0)):
            proposal = sub.proposal
        log_sum_w = float(np.logaddexp(log_sum_w, sub.log_sum_w))
        if _uturn(left, right, inv_mass):
            break
    accept_stat = alpha_sum / max(n_alpha, 1)
    return proposal, accept_stat, divergent


def hmc_sample(log_post_fn, grad_fn, theta0, config: HmcConfig) -> SampleChain:
    """Fixed-trajectory-length HMC with warmup step-size adaptation."""
    def kernel(z, eps, rng, inv_mass, vg):
        return _hmc_transition(z, eps, rng, inv_mass, vg, config.n_leapfrog)

    return _sample(log_post_fn, grad_fn, theta0, config, kernel)


def nuts_sample(log_post_fn, grad_fn, theta0, config: HmcConfig) -> SampleChain:
    """No-U-Turn sampling with multinomial selection along the trajectory."""
    if config.max_tree_depth < 1:
        raise ValueError("max_tree_depth must be >= 1: no trajectory possible")

    def kernel(z, eps, rng, inv_mass, vg):
        return _nuts_transition(z, eps, rng, inv_mass, vg,
                                config.max_tree_depth)

    return _sample(log_post_fn, grad_fn, theta0, config, kernel)


def run_sampler(log_post_fn, grad_fn, theta0, config: HmcConfig) -> SampleChain:
    """Dispatch on config.algorithm."""
    if config.algorithm == "nuts":
        return nuts_sample(log_post_fn, grad_fn, theta0, config)
    return hmc_sample(log_post_fn, grad_fn, theta0, config)


def _sample(log_post_fn, grad_fn, theta0, config, kernel) -> SampleChain:
    theta0 = np.asarray(theta0, dtype=np.float64)
    p = theta0.size
    value_grad = _safe_value_grad(log_post_fn, grad_fn, p)
    logp0, grad0 = value_grad(theta0)
    if not math.isfinite(logp0):
        raise ValueError("initial point has non-finite log density")
    z = _State(theta0, np.zeros(p), logp0, grad0)
    rng = np.random.Generator(np.random.Philox(config.seed))
    inv_mass = np.ones(p)

    # two warmup phases when a diagonal mass is requested and there is room
    # to estimate one; otherwise a single step-size phase
    if config.mass == "diag" and config.n_warmup >= 40:
        phases = [(config.n_warmup // 2, True),
                  (config.n_warmup - config.n_warmup // 2, False)]
    else:
        phases = [(config.n_warmup, False)]

    step_size = config.step_size
    warmup_divergences = 0
    for phase_len, estimate_mass in phases:
        if phase_len == 0:
            continue
        eps0 = config.step_size
        if eps0 is None:
            eps0 = _find_reasonable_epsilon(value_grad, z, rng, inv_mass)
        da = _DualAveraging(eps0, config.target_accept)
        eps = eps0
        collected = np.empty((phase_len, p)) if estimate_mass else None
        for i in range(phase_len):
            z, alpha, div = kernel(z, eps, rng, inv_mass, value_grad)
            warmup_divergences += int(div)
            eps = da.update(alpha)
            if estimate_mass:
                collected[i] = z.theta
        step_size = da.adapted()
        if estimate_mass:
            # regularized draw variance, shrunk toward a small constant
            n = phase_len
            var = collected.var(axis=0)
            inv_mass = var * (n / (n + 5.0)) + 1e-3 * (5.0 / (n + 5.0))
            inv_mass = np.maximum(inv_mass, 1e-12)

    if config.n_warmup > 0 and warmup_divergences == config.n_warmup:
        raise RuntimeError(
            "every warmup trajectory diverged; try a smaller initial step_size")
    if step_size is None:
        step_size = _find_reasonable_epsilon(value_grad, z, rng, inv_mass)

    draws = np.empty((config.n_samples, p))
    accept_stats = np.empty(config.n_samples)
    divergences = 0
    for s in range(config.n_samples):
        z, alpha, div = kernel(z, step_size, rng, inv_mass, value_grad)
        draws[s] = z.theta
        accept_stats[s] = alpha
        divergences += int(div)
    return SampleChain(draws, accept_stats, divergences, float(step_size),
                       config.seed)


def _autocorr(x: np.ndarray) -> np.ndarray:
    n = len(x)
    x = x - x.mean()
    size = 1
    while size < 2 * n:
        size *= 2
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n].real / n
    if acov[0] <= 0.0:
        return np.full(n, np.nan)
    return acov / acov[0]


def _tau_geyer(x: np.ndarray) -> float:
    """Integrated autocorrelation time via the initial positive sequence:
    sum lag-pair autocorrelations until the first non-positive pair."""
    rho = _autocorr(x)
    if np.isnan(rho[0]):
        return np.inf
    total = 0.0
    k = 0
    while 2 * k + 1 < len(rho):
        gamma = rho[2 * k] + rho[2 * k + 1]
        if gamma <= 0.0:
            break
        total += gamma
        k += 1
    # tau legitimately sits below 1 for anticorrelated chains; only guard 0
    return max(2.0 * total - 1.0, 1e-12)


def diagnostics(chains) -> dict:
    """Mean acceptance, per-coordinate split R-hat and effective sample size.

    Accepts one chain, one draw matrix, or a list of either. R-hat halves
    every chain; ESS sums the per-chain estimates and values above the draw
    count are reported as computed, never clipped.
    """
    if isinstance(chains, (SampleChain, np.ndarray)):
        chains = [chains]
    draw_sets, accept = [], []
    for c in chains:
        if isinstance(c, SampleChain):
            draw_sets.append(np.asarray(c.draws, dtype=np.float64))
            accept.append(np.asarray(c.accept_stats, dtype=np.float64))
        else:
            draw_sets.append(np.asarray(c, dtype=np.float64))
    if not draw_sets:
        raise ValueError("need at least one chain")
    p = draw_sets[0].shape[1] if draw_sets[0].ndim == 2 else 0
    for d in draw_sets:
        if d.ndim != 2:
            raise ValueError("draws must be a 2-D (samples x params) array")
        if d.shape[0] < 4:
            raise ValueError("each chain needs at least 4 draws")
        if d.shape[1] != p:
            raise ValueError("chains disagree on the parameter count")

    halves = []
    for d in draw_sets:
        n = d.shape[0] // 2
        halves.extend([d[:n], d[-n:]])
    n = min(h.shape[0] for h in halves)
    seqs = np.stack([h[:n] for h in halves])  # (m, n, p)
    means = seqs.mean(axis=1)
    within = seqs.var(axis=1, ddof=1).mean(axis=0)
    between = n * means.var(axis=0, ddof=1)
    rhat = np.empty(p)
    for j in range(p):
        if within[j] == 0.0:
            rhat[j] = 1.0 if between[j] == 0.0 else np.inf
        else:
            var_plus = (n - 1) / n * within[j] + between[j] / n
            rhat[j] = math.sqrt(var_plus / within[j])

    ess = np.zeros(p)
    for d in draw_sets:
        s = d.shape[0]
        for j in range(p):
            ess[j] += s / _tau_geyer(d[:, j])

    mean_accept = float(np.mean(np.concatenate(accept))) if accept else float("nan")
    return {"mean_accept": mean_accept, "rhat": rhat, "ess": ess,
            "n_chains": len(draw_sets),
            "n_samples": int(sum(d.shape[0] for d in draw_sets))}
