"""Posterior over a small MLP on the flower data, end to end.

Samples the weight posterior with NUTS, checks the chain health, then looks
at what the posterior says: parameter marginals, a coupled weight pair, and
predictive distributions on held-out rows.

Run time is around ten seconds. Figures land in demos/out/iris/.
"""

import pathlib

import numpy as np

from bayeshead import data, metrics, model, predict, report, sampler

OUT = pathlib.Path(__file__).parent / "out" / "iris"
OUT.mkdir(parents=True, exist_ok=True)

SEED = 0

ds = data.load_iris()
train, test = data.split(ds, data.SplitSpec(0.8, SEED))
train, test, moments = data.standardize(train, test)
print(f"{ds.n_rows} rows, {train.n_rows} train / {test.n_rows} test, "
      f"{ds.n_features} features, {ds.n_classes} classes")

arch = model.MlpArchitecture(ds.n_features, 8, ds.n_classes)
prior = model.Prior(1.0)
print(f"MLP(4, 8, 3): {arch.n_params} parameters")


def logp(theta):
    return model.log_posterior(arch, theta, train, prior)


def grad(theta):
    return model.grad_log_posterior(arch, theta, train, prior).values


rng = np.random.Generator(np.random.Philox(SEED))
config = sampler.HmcConfig(n_warmup=300, n_samples=300, seed=SEED)
chain = sampler.run_sampler(logp, grad, 0.1 * rng.standard_normal(arch.n_params),
                            config)
chain.layout = arch.layout

diag = sampler.diagnostics(chain)
print(f"sampled {chain.n_samples} draws, {chain.divergences} divergences, "
      f"mean accept {diag['mean_accept']:.3f}")
print(f"max split R-hat {np.max(diag['rhat']):.4f}, "
      f"min ESS {np.min(diag['ess']):.1f}")

# predictive distributions average the softmax over all posterior draws
summaries = predict.batch_predict(arch, chain, test)
hits = np.mean([s.predicted == test.labels[i] for i, s in enumerate(summaries)])
bins = metrics.reliability(summaries, test.labels)
print(f"test accuracy {hits:.4f}, ECE {metrics.ece(bins):.4f}")

# a single weight marginal against its prior, and the most coupled pair
report.render_marginal_1d(report.marginal_1d(chain, "W1[0,1]", prior),
                          OUT / "marginal_W1_0_1.svg")
names = [f"W1[{i},{j}]" for i in range(2) for j in range(2)]
idx = [model.resolve_name(arch.layout, n) for n in names]
corr = np.corrcoef(chain.draws[:, idx].T)
np.fill_diagonal(corr, 0.0)
a, b = np.unravel_index(np.argmax(np.abs(corr)), corr.shape)
print(f"most coupled of {names}: {names[a]} vs {names[b]} "
      f"(corr {corr[a, b]:+.2f})")
report.render_marginal_2d(report.marginal_2d(chain, names[a], names[b]),
                          OUT / "joint.svg")

# abstention: answering only above a confidence threshold trades coverage
# for accuracy
curve = metrics.accuracy_coverage(summaries, test.labels)
for t, cov, sel in list(zip(curve.thresholds, curve.coverage,
                            curve.selective_accuracy))[:: max(1, len(curve) // 5)]:
    print(f"  threshold {t:.3f}: answers {cov:5.1%}, accuracy {sel:.4f}")
report.render_coverage(curve, OUT / "coverage.svg")

report.render_predictive_bars([summaries[i] for i in (0, 2, 3)],
                              [test.labels[i] for i in (0, 2, 3)],
                              OUT / "predictive_bars.svg")
print(f"figures in {OUT}")
