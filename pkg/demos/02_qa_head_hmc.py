"""Full HMC posterior over a classification head on frozen text features.

The bundled fixture holds 30 three-way multiple-choice rows encoded as
question/option pair features (3 x 768 dims per row). The head has 6915
parameters, so NUTS is slower here; expect half a minute.

Figures land in demos/out/qa_hmc/.
"""

import pathlib

import numpy as np

from bayeshead import data, metrics, model, predict, report, sampler

OUT = pathlib.Path(__file__).parent / "out" / "qa_hmc"
OUT.mkdir(parents=True, exist_ok=True)

SEED = 0

ds = data.load_toy_qa_features()
print(f"{ds.n_rows} rows x {ds.n_features} feature dims, "
      f"{ds.n_classes} classes")

# the corpus is tiny, so the original setup evaluates on the training rows
arch = model.HeadArchitecture(ds.n_features, ds.n_classes)
prior = model.Prior(1.0)
print(f"head parameters: {arch.n_params}")


def logp(theta):
    return model.log_posterior(arch, theta, ds, prior)


def grad(theta):
    return model.grad_log_posterior(arch, theta, ds, prior).values


rng = np.random.Generator(np.random.Philox(SEED))
config = sampler.HmcConfig(n_warmup=200, n_samples=200, seed=SEED)
chain = sampler.run_sampler(logp, grad, 0.1 * rng.standard_normal(arch.n_params),
                            config)
chain.layout = arch.layout

diag = sampler.diagnostics(chain)
print(f"{chain.n_samples} draws, {chain.divergences} divergences, "
      f"accept {diag['mean_accept']:.3f}, "
      f"max split R-hat {np.max(diag['rhat']):.4f}, "
      f"min ESS {np.min(diag['ess']):.1f}")

summaries = predict.batch_predict(arch, chain, ds)
hits = np.mean([s.predicted == ds.labels[i] for i, s in enumerate(summaries)])
bins = metrics.reliability(summaries, ds.labels)
conf = np.mean([s.confidence for s in summaries])
print(f"accuracy {hits:.4f}, ECE {metrics.ece(bins):.4f}, "
      f"mean confidence {conf:.4f}")

report.render_reliability(bins, OUT / "reliability.svg")
report.render_coverage(metrics.accuracy_coverage(summaries, ds.labels),
                       OUT / "coverage.svg")

# per-question posterior predictive spread: wide error bars mean the
# posterior disagrees with itself about that row
report.render_predictive_bars([summaries[i] for i in (0, 2, 3)],
                              [ds.labels[i] for i in (0, 2, 3)],
                              OUT / "predictive_bars.svg")
most_uncertain = int(np.argmin([s.confidence for s in summaries]))
s = summaries[most_uncertain]
print(f"least confident row {most_uncertain}: mean probs "
      f"{np.round(s.mean_probs, 3)}, spread {np.round(s.std_probs, 3)}")
print(f"figures in {OUT}")
