"""Posterior uncertainty for small classifiers: HMC/NUTS and diagonal
Laplace posteriors over MLP and linear softmax heads, posterior predictive
summaries with abstention, calibration metrics, and SVG reports.
"""

from .data import (Dataset, SplitSpec, load_dataset, save_dataset, split,
                   standardize, reduce_options, load_qa_records, load_iris,
                   load_toy_qa_records, load_toy_qa_features)
from .model import (Prior, ParamVector, MlpArchitecture, HeadArchitecture,
                    param_vector, resolve_name, softmax, forward,
                    log_posterior, grad_log_posterior, per_example_grad_loglik,
                    save_params, load_params)
from .sampler import (HmcConfig, SampleChain, leapfrog, hmc_sample,
                      nuts_sample, run_sampler, diagnostics)
from .laplace import (MapConfig, MapEstimate, GaussianPosterior,
                      adam_maximize, train_map, empirical_fisher_diag,
                      laplace_posterior, sample_gaussian, GAUSSIAN_MC_SAMPLES)
from .predict import (PredictiveSummary, Decision, posterior_predictive,
                      batch_predict, decide, save_summaries, load_summaries)
from .metrics import (ReliabilityBins, CoverageCurve, ComparisonReport,
                      reliability, ece, accuracy_coverage, compare)
from .report import (Marginal1D, Histogram2D, marginal_1d, marginal_2d,
                     render_marginal_1d, render_marginal_2d,
                     render_predictive_bars, render_reliability,
                     render_coverage)

__version__ = "0.1.0"
