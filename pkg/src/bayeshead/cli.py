"""Command-line front end: run the three experiments from a JSON config,
validate configs, and inspect binary artifacts.

Precedence is flags > config file > documented defaults. Every run writes
metrics.json (bit-identical across reruns of the same config and seed),
prediction CSVs, binary artifacts, and SVG figures into the output
directory, which is never overwritten without --force.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import numpy as np

from . import data, laplace, metrics, model, predict, report, sampler

EXPERIMENTS = ("iris-hmc", "head-hmc", "head-laplace", "compare")

# decision metadata echoed into every metrics.json
DECISIONS = {
    "fisher_scaling": "precision_j = N * fisher_jj + 1 / prior_std^2",
    "confidence": "max of the mean predictive probabilities",
    "tie_break": "lowest class index",
    "reliability_bins": 10,
    "threshold_grid": "sorted unique confidences",
    "contours": "histogram mass accumulation, 60x60 bins",
    "std_kind": "population",
}

_EXTRACTOR_HINT = ("feature file not found; extract features with the "
                   "embed-extract tool or point `dataset` at the bundled "
                   "fixture")


class ConfigError(ValueError):
    """Carries the full list of validation problems."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _defaults(experiment: str) -> dict:
    cfg = {
        "experiment": experiment,
        "seed": None,
        "out": f"runs/{experiment}",
        "dataset": None,
        "tau": 0.5,
        "entries": [0, 2, 3],
        "s_mc": 30,
        "model": {"hidden_dim": 8, "prior_std": 1.0},
        "split": {"train_fraction": 0.8, "standardize": True},
        "sampler": {"algorithm": "nuts", "n_warmup": 1000, "n_samples": 1000,
                    "target_accept": 0.8, "max_tree_depth": 10,
                    "step_size": None, "n_leapfrog": 32, "mass": "identity"},
        "map": {"learning_rate": 0.01, "n_steps": 2000, "tol": 0.0},
        "compare": {"map_csv": None, "bayes_csv": None},
    }
    if experiment == "head-hmc":
        # the toy corpus is sampled in full, as in the original experiment
        cfg["split"] = {"train_fraction": None, "standardize": False}
        cfg["sampler"].update(n_warmup=500, n_samples=500)
    elif experiment == "head-laplace":
        # point-estimate vs posterior calibration needs held-out rows
        cfg["split"] = {"train_fraction": 0.67, "standardize": False}
    return cfg


def _merge(base: dict, override: dict, path: str, errors: list) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            errors.append(f"{where}: unknown field")
            continue
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                errors.append(f"{where}: expected an object")
                continue
            out[key] = _merge(base[key], value, where, errors)
            continue
        out[key] = value
    return out


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return (isinstance(v, (int, float)) and not isinstance(v, bool))


def _check(cfg: dict, errors: list) -> None:
    exp = cfg.get("experiment")
    if not _is_int(cfg.get("seed")):
        errors.append("seed: required integer (no wall-clock default)")
    if not isinstance(cfg.get("out"), str) or not cfg["out"]:
        errors.append("out: required string")
    if not (_is_num(cfg.get("tau")) and 0.0 <= cfg["tau"] <= 1.0):
        errors.append("tau: must be a number in [0, 1]")
    if not (_is_int(cfg.get("s_mc")) and cfg["s_mc"] >= 1):
        errors.append("s_mc: must be an integer >= 1")
    entries = cfg.get("entries")
    if (not isinstance(entries, list) or not entries
            or not all(_is_int(e) and e >= 0 for e in entries)):
        errors.append("entries: must be a nonempty list of integers >= 0")

    m = cfg["model"]
    if not (_is_int(m.get("hidden_dim")) and m["hidden_dim"] >= 1):
        errors.append("model.hidden_dim: must be an integer >= 1")
    if not (_is_num(m.get("prior_std")) and m["prior_std"] > 0):
        errors.append("model.prior_std: must be a positive number")

    sp = cfg["split"]
    tf = sp.get("train_fraction")
    if tf is not None and not (_is_num(tf) and 0.0 < tf < 1.0):
        errors.append("split.train_fraction: must be in (0, 1) or null")
    if not isinstance(sp.get("standardize"), bool):
        errors.append("split.standardize: must be true or false")

    sa = cfg["sampler"]
    if sa.get("algorithm") not in ("nuts", "hmc_fixed"):
        errors.append("sampler.algorithm: must be 'nuts' or 'hmc_fixed'")
    if not (_is_int(sa.get("n_warmup")) and sa["n_warmup"] >= 0):
        errors.append("sampler.n_warmup: must be an integer >= 0")
    if not (_is_int(sa.get("n_samples")) and sa["n_samples"] >= 1):
        errors.append("sampler.n_samples: must be an integer >= 1")
    if not (_is_num(sa.get("target_accept")) and 0.0 < sa["target_accept"] < 1.0):
        errors.append("sampler.target_accept: must be in (0, 1)")
    if not (_is_int(sa.get("max_tree_depth")) and sa["max_tree_depth"] >= 1):
        errors.append("sampler.max_tree_depth: must be an integer >= 1")
    ss = sa.get("step_size")
    if ss is not None and not (_is_num(ss) and ss > 0):
        errors.append("sampler.step_size: must be a positive number or null")
    if not (_is_int(sa.get("n_leapfrog")) and sa["n_leapfrog"] >= 1):
        errors.append("sampler.n_leapfrog: must be an integer >= 1")
    if sa.get("mass") not in ("identity", "diag"):
        errors.append("sampler.mass: must be 'identity' or 'diag'")

    mp = cfg["map"]
    if not (_is_num(mp.get("learning_rate")) and mp["learning_rate"] > 0):
        errors.append("map.learning_rate: must be a positive number")
    if not (_is_int(mp.get("n_steps")) and mp["n_steps"] >= 0):
        errors.append("map.n_steps: must be an integer >= 0")
    if not (_is_num(mp.get("tol")) and mp["tol"] >= 0):
        errors.append("map.tol: must be a number >= 0")

    ds_path = cfg.get("dataset")
    if ds_path is not None:
        if not isinstance(ds_path, str):
            errors.append("dataset: must be a path string or null")
        elif not os.path.exists(ds_path):
            if exp in ("head-hmc", "head-laplace"):
                errors.append(f"dataset: {ds_path}: {_EXTRACTOR_HINT}")
            else:
                errors.append(f"dataset: {ds_path}: file not found")

    if exp == "compare":
        for key in ("map_csv", "bayes_csv"):
            p = cfg["compare"].get(key)
            if not isinstance(p, str) or not p:
                errors.append(f"compare.{key}: required path")
            elif not os.path.exists(p):
                errors.append(f"compare.{key}: {p}: file not found")


def normalize_config(raw: dict, overrides: dict | None = None) -> dict:
    """Merge defaults <- config <- flag overrides, then validate everything,
    reporting all problems at once."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["config: must be a JSON object"])
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(
            [f"experiment: must be one of {', '.join(EXPERIMENTS)}"])
    cfg = _merge(_defaults(exp), raw, "", errors)
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[key] = value
    _check(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


def validate_config(path, overrides: dict | None = None) -> dict:
    """Load a JSON config file and normalize it; raises ConfigError with the
    aggregated error list."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise ConfigError([f"config: {e}"]) from None
    except json.JSONDecodeError as e:
        raise ConfigError([f"config: {path}: invalid JSON: {e}"]) from None
    return normalize_config(raw, overrides)


# ------------------------------------------------------------------- runs


def _fig_name(param: str) -> str:
    return (param.replace("[", "_").replace("]", "")
            .replace(",", "_").replace(" ", ""))


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and (obj != obj):   # nan -> null
        return None
    return obj


def _write_metrics(out: str, payload: dict) -> None:
    path = os.path.join(out, "metrics.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_json_ready(payload), f, indent=2, sort_keys=True)
        f.write("\n")


def _bins_dict(bins: metrics.ReliabilityBins) -> dict:
    return {
        "n_bins": bins.n_bins,
        "edges": bins.edges,
        "counts": bins.counts,
        "mean_confidence": bins.mean_confidence,
        "accuracy": bins.accuracy,
    }


def _curve_dict(curve: metrics.CoverageCurve) -> dict:
    return {
        "thresholds": curve.thresholds,
        "coverage": curve.coverage,
        "selective_accuracy": curve.selective_accuracy,
    }


def _eval_block(summaries, labels, tau: float):
    bins = metrics.reliability(summaries, labels)
    curve = metrics.accuracy_coverage(summaries, labels)
    hits = np.array([s.predicted == labels[i] for i, s in enumerate(summaries)])
    conf = np.array([s.confidence for s in summaries])
    answered = conf >= tau
    block = {
        "accuracy": float(hits.mean()),
        "ece": metrics.ece(bins),
        "mean_confidence": float(conf.mean()),
        "reliability": _bins_dict(bins),
        "coverage_curve": _curve_dict(curve),
        "abstention": {
            "tau": tau,
            "coverage": float(answered.mean()),
            "selective_accuracy": (float(hits[answered].mean())
                                   if answered.any() else None),
        },
    }
    return block, bins, curve


def _check_entries(entries, n_rows: int, what: str) -> None:
    bad = [e for e in entries if e >= n_rows]
    if bad:
        raise ValueError(
            f"entries {bad} out of range for the {what} set of {n_rows} rows")


def _load_experiment_dataset(cfg: dict) -> data.Dataset:
    exp = cfg["experiment"]
    if cfg["dataset"] is not None:
        try:
            return data.load_dataset(cfg["dataset"])
        except FileNotFoundError:
            if exp in ("head-hmc", "head-laplace"):
                raise FileNotFoundError(
                    f"{cfg['dataset']}: {_EXTRACTOR_HINT}") from None
            raise
    if exp == "iris-hmc":
        return data.load_iris()
    try:
        return data.load_toy_qa_features()
    except FileNotFoundError:
        raise FileNotFoundError(_EXTRACTOR_HINT) from None


def _split_dataset(ds, cfg):
    tf = cfg["split"]["train_fraction"]
    if tf is None:
        train = eval_ds = ds
        used = "full"
    else:
        train, eval_ds = data.split(ds, data.SplitSpec(tf, cfg["seed"]))
        used = "test"
    if cfg["split"]["standardize"]:
        if tf is None:
            train, eval_ds, _ = data.standardize(train, train)
        else:
            train, eval_ds, _ = data.standardize(train, eval_ds)
    return train, eval_ds, used


def _chain_summary(chain: sampler.SampleChain) -> dict:
    diag = sampler.diagnostics(chain)
    return {
        "n_samples": chain.n_samples,
        "n_params": chain.n_params,
        "divergences": chain.divergences,
        "step_size_final": chain.step_size_final,
        "mean_accept": diag["mean_accept"],
        "max_rhat": float(np.max(diag["rhat"])),
        "min_ess": float(np.min(diag["ess"])),
    }


def _sampler_config(cfg: dict) -> sampler.HmcConfig:
    sa = cfg["sampler"]
    return sampler.HmcConfig(
        n_warmup=sa["n_warmup"], n_samples=sa["n_samples"], seed=cfg["seed"],
        target_accept=sa["target_accept"], max_tree_depth=sa["max_tree_depth"],
        algorithm=sa["algorithm"], n_leapfrog=sa["n_leapfrog"],
        step_size=sa["step_size"], mass=sa["mass"])


def _init_theta(cfg: dict, n_params: int) -> np.ndarray:
    # separate stream from the chain's so init and momenta never collide
    seq = np.random.SeedSequence(cfg["seed"], spawn_key=(1,))
    rng = np.random.Generator(np.random.Philox(seq))
    return 0.1 * rng.standard_normal(n_params)


def _sample_posterior(cfg, arch, train, prior) -> sampler.SampleChain:
    def logp(theta):
        return model.log_posterior(arch, theta, train, prior)

    def grad(theta):
        return model.grad_log_posterior(arch, theta, train, prior).values

    chain = sampler.run_sampler(logp, grad, _init_theta(cfg, arch.n_params),
                                _sampler_config(cfg))
    chain.layout = arch.layout
    return chain


def run_iris_hmc(cfg: dict, out: str) -> dict:
    ds = _load_experiment_dataset(cfg)
    train, eval_ds, split_used = _split_dataset(ds, cfg)
    arch = model.MlpArchitecture(ds.n_features, cfg["model"]["hidden_dim"],
                                 ds.n_classes)
    prior = model.Prior(cfg["model"]["prior_std"])
    print(f"model parameters: {arch.n_params}")
    chain = _sample_posterior(cfg, arch, train, prior)
    chain.save(os.path.join(out, "chain.bhsc"))

    summaries = predict.batch_predict(arch, chain, eval_ds)
    predict.save_summaries(os.path.join(out, "predictions.csv"), summaries,
                           eval_ds.labels)
    block, bins, curve = _eval_block(summaries, eval_ds.labels, cfg["tau"])

    figures = []
    for name in ("W1[0,1]", "b2[1]"):
        fig = f"marginal_{_fig_name(name)}.svg"
        report.render_marginal_1d(report.marginal_1d(chain, name, prior),
                                  os.path.join(out, fig))
        figures.append(fig)

    # candidate coordinates for the joint marginals; the pair with the
    # smallest |correlation| shows near-independence, the largest coupling
    h = min(2, cfg["model"]["hidden_dim"])
    cands = [f"W1[{i},{j}]" for i in range(h) for j in range(min(2, ds.n_features))]
    cands += [f"W2[{i},{j}]" for i in range(min(2, ds.n_classes)) for j in range(h)]
    idx = [model.resolve_name(arch.layout, n) for n in cands]
    sub = chain.draws[:, idx]
    corr = np.corrcoef(sub.T)
    best_lo, best_hi = None, None
    for a in range(len(cands)):
        for b in range(a + 1, len(cands)):
            r = abs(float(corr[a, b]))
            if best_lo is None or r < best_lo[0]:
                best_lo = (r, cands[a], cands[b])
            if best_hi is None or r > best_hi[0]:
                best_hi = (r, cands[a], cands[b])
    pairs = {"low_corr": best_lo, "high_corr": best_hi}
    for tag, (r, nx, ny) in pairs.items():
        fig = f"joint_{tag}.svg"
        report.render_marginal_2d(report.marginal_2d(chain, nx, ny),
                                  os.path.join(out, fig))
        figures.append(fig)

    _check_entries(cfg["entries"], eval_ds.n_rows, split_used)
    picked = [summaries[e] for e in cfg["entries"]]
    report.render_predictive_bars(picked,
                                  [eval_ds.labels[e] for e in cfg["entries"]],
                                  os.path.join(out, "predictive_bars.svg"))
    report.render_reliability(bins, os.path.join(out, "reliability.svg"))
    report.render_coverage(curve, os.path.join(out, "coverage.svg"))
    figures += ["predictive_bars.svg", "reliability.svg", "coverage.svg"]

    return {
        "experiment": cfg["experiment"],
        "config": cfg,
        "decisions": dict(DECISIONS, eval_split=split_used),
        "dataset": {"n_rows": ds.n_rows, "n_train": train.n_rows,
                    "n_eval": eval_ds.n_rows, "n_features": ds.n_features,
                    "n_classes": ds.n_classes},
        "n_params": arch.n_params,
        "chain": _chain_summary(chain),
        "joint_pairs": {k: {"corr": v[0], "x": v[1], "y": v[2]}
                        for k, v in pairs.items()},
        "metrics": block,
        "entries": {str(e): {"mean_probs": summaries[e].mean_probs,
                             "std_probs": summaries[e].std_probs,
                             "predicted": summaries[e].predicted,
                             "label": int(eval_ds.labels[e])}
                    for e in cfg["entries"]},
        "figures": figures,
    }


def run_head_hmc(cfg: dict, out: str) -> dict:
    ds = _load_experiment_dataset(cfg)
    train, eval_ds, split_used = _split_dataset(ds, cfg)
    arch = model.HeadArchitecture(ds.n_features, ds.n_classes)
    prior = model.Prior(cfg["model"]["prior_std"])
    print(f"head parameters: {arch.n_params}")
    chain = _sample_posterior(cfg, arch, train, prior)
    chain.save(os.path.join(out, "chain.bhsc"))

    summaries = predict.batch_predict(arch, chain, eval_ds)
    predict.save_summaries(os.path.join(out, "predictions.csv"), summaries,
                           eval_ds.labels)
    block, bins, curve = _eval_block(summaries, eval_ds.labels, cfg["tau"])

    _check_entries(cfg["entries"], eval_ds.n_rows, split_used)
    picked = [summaries[e] for e in cfg["entries"]]
    report.render_predictive_bars(picked,
                                  [eval_ds.labels[e] for e in cfg["entries"]],
                                  os.path.join(out, "predictive_bars.svg"))
    report.render_reliability(bins, os.path.join(out, "reliability.svg"))
    report.render_coverage(curve, os.path.join(out, "coverage.svg"))

    return {
        "experiment": cfg["experiment"],
        "config": cfg,
        "decisions": dict(DECISIONS, eval_split=split_used),
        "dataset": {"n_rows": ds.n_rows, "n_train": train.n_rows,
                    "n_eval": eval_ds.n_rows, "n_features": ds.n_features,
                    "n_classes": ds.n_classes},
        "n_params": arch.n_params,
        "chain": _chain_summary(chain),
        "metrics": block,
        "entries": {str(e): {"mean_probs": summaries[e].mean_probs,
                             "std_probs": summaries[e].std_probs,
                             "predicted": summaries[e].predicted,
                             "label": int(eval_ds.labels[e])}
                    for e in cfg["entries"]},
        "figures": ["predictive_bars.svg", "reliability.svg", "coverage.svg"],
    }


def run_head_laplace(cfg: dict, out: str) -> dict:
    ds = _load_experiment_dataset(cfg)
    train, eval_ds, split_used = _split_dataset(ds, cfg)
    arch = model.HeadArchitecture(ds.n_features, ds.n_classes)
    prior = model.Prior(cfg["model"]["prior_std"])
    print(f"head parameters: {arch.n_params}")

    map_cfg = laplace.MapConfig(learning_rate=cfg["map"]["learning_rate"],
                                n_steps=cfg["map"]["n_steps"],
                                tol=cfg["map"]["tol"], seed=cfg["seed"])
    est = laplace.train_map(arch, train, prior, map_cfg)
    model.save_params(os.path.join(out, "map_params.bhpv"), est.params)
    figures = ["predictive_bars_map.svg", "predictive_bars_laplace.svg",
               "reliability_map.svg", "reliability_laplace.svg",
               "coverage_compare.svg"]
    if est.nll_trace.size:
        report.render_nll_trace(est.nll_trace,
                                os.path.join(out, "nll_trace.svg"))
        figures.append("nll_trace.svg")

    fisher = laplace.empirical_fisher_diag(arch, est.params, train)
    posterior = laplace.laplace_posterior(est.params, fisher, prior,
                                          train.n_rows)
    posterior.save(os.path.join(out, "laplace_posterior.bhgp"))
    draws = laplace.sample_gaussian(posterior, cfg["s_mc"], cfg["seed"])
    draws.save(os.path.join(out, "laplace_draws.bhsc"))

    map_chain = sampler.SampleChain(
        draws=est.params.values[None, :], accept_stats=np.ones(1),
        divergences=0, step_size_final=0.0, seed=cfg["seed"],
        layout=arch.layout)
    map_summaries = predict.batch_predict(arch, map_chain, eval_ds)
    lap_summaries = predict.batch_predict(arch, draws, eval_ds)
    predict.save_summaries(os.path.join(out, "predictions_map.csv"),
                           map_summaries, eval_ds.labels)
    predict.save_summaries(os.path.join(out, "predictions_laplace.csv"),
                           lap_summaries, eval_ds.labels)

    comparison = metrics.compare(map_summaries, lap_summaries, eval_ds.labels)
    map_block, map_bins, map_curve = _eval_block(map_summaries,
                                                 eval_ds.labels, cfg["tau"])
    lap_block, lap_bins, lap_curve = _eval_block(lap_summaries,
                                                 eval_ds.labels, cfg["tau"])

    _check_entries(cfg["entries"], eval_ds.n_rows, split_used)
    for tag, summ in (("map", map_summaries), ("laplace", lap_summaries)):
        picked = [summ[e] for e in cfg["entries"]]
        report.render_predictive_bars(
            picked, [eval_ds.labels[e] for e in cfg["entries"]],
            os.path.join(out, f"predictive_bars_{tag}.svg"),
            title=f"Posterior predictive ({tag})")
    report.render_reliability(map_bins,
                              os.path.join(out, "reliability_map.svg"),
                              title="Reliability (MAP)")
    report.render_reliability(lap_bins,
                              os.path.join(out, "reliability_laplace.svg"),
                              title="Reliability (Laplace)")
    report.render_coverage([("MAP", map_curve), ("Laplace", lap_curve)],
                           os.path.join(out, "coverage_compare.svg"))

    return {
        "experiment": cfg["experiment"],
        "config": cfg,
        "decisions": dict(DECISIONS, eval_split=split_used),
        "dataset": {"n_rows": ds.n_rows, "n_train": train.n_rows,
                    "n_eval": eval_ds.n_rows, "n_features": ds.n_features,
                    "n_classes": ds.n_classes},
        "n_params": arch.n_params,
        "s_mc": cfg["s_mc"],
        "map_fit": {"grad_norm": est.grad_norm, "n_steps": est.n_steps,
                    "stopped_by": est.stopped_by,
                    "final_nll": (float(est.nll_trace[-1])
                                  if est.nll_trace.size else None)},
        "map": map_block,
        "laplace": lap_block,
        "confidence_delta_mean": float(comparison.confidence_delta.mean()),
        "figures": figures,
    }


def run_compare(cfg: dict, out: str) -> dict:
    map_summ, map_labels = predict.load_summaries(cfg["compare"]["map_csv"])
    bay_summ, bay_labels = predict.load_summaries(cfg["compare"]["bayes_csv"])
    labels = map_labels if map_labels is not None else bay_labels
    if labels is None:
        raise ValueError("neither predictions file carries labels")
    if (map_labels is not None and bay_labels is not None
            and not np.array_equal(map_labels, bay_labels)):
        raise ValueError("the two prediction files disagree on labels")
    comparison = metrics.compare(map_summ, bay_summ, labels)
    report.render_reliability(comparison.map_bins,
                              os.path.join(out, "reliability_map.svg"),
                              title="Reliability (MAP)")
    report.render_reliability(comparison.bayes_bins,
                              os.path.join(out, "reliability_bayes.svg"),
                              title="Reliability (posterior)")
    report.render_coverage(
        [("MAP", comparison.map_curve), ("posterior", comparison.bayes_curve)],
        os.path.join(out, "coverage_compare.svg"))
    return {
        "experiment": cfg["experiment"],
        "config": cfg,
        "decisions": dict(DECISIONS),
        "map": {"ece": comparison.map_ece,
                "accuracy": comparison.map_accuracy,
                "reliability": _bins_dict(comparison.map_bins),
                "coverage_curve": _curve_dict(comparison.map_curve)},
        "bayes": {"ece": comparison.bayes_ece,
                  "accuracy": comparison.bayes_accuracy,
                  "reliability": _bins_dict(comparison.bayes_bins),
                  "coverage_curve": _curve_dict(comparison.bayes_curve)},
        "confidence_delta_mean": float(comparison.confidence_delta.mean()),
        "figures": ["reliability_map.svg", "reliability_bayes.svg",
                    "coverage_compare.svg"],
    }


_RUNNERS = {
    "iris-hmc": run_iris_hmc,
    "head-hmc": run_head_hmc,
    "head-laplace": run_head_laplace,
    "compare": run_compare,
}


def run_experiment(cfg: dict, force: bool = False) -> str:
    """Execute a normalized config; returns the output directory."""
    out = cfg["out"]
    if os.path.isdir(out) and os.listdir(out) and not force:
        raise RuntimeError(
            f"output directory {out} is not empty; pass --force to overwrite")
    os.makedirs(out, exist_ok=True)
    payload = _RUNNERS[cfg["experiment"]](cfg, out)
    _write_metrics(out, payload)
    return out


# -------------------------------------------------------------- inspection


def inspect_path(path) -> str:
    """Human-readable summary of any binary artifact, keyed by magic."""
    with open(path, "rb") as f:
        magic = f.read(4)
    lines = [f"{path}:"]
    if magic == b"BHSC":
        chain = sampler.SampleChain.load(path)
        lines.append(f"  chain: {chain.n_samples} draws x "
                     f"{chain.n_params} params")
        lines.append(f"  seed {chain.seed}, final step size "
                     f"{chain.step_size_final:.6g}, "
                     f"{chain.divergences} divergences")
        if chain.layout:
            shapes = ", ".join(f"{n}{list(s)}" for n, s, _ in chain.layout)
            lines.append(f"  layout: {shapes}")
        if chain.n_samples >= 4:
            diag = sampler.diagnostics(chain)
            lines.append(f"  mean accept {diag['mean_accept']:.3f}, "
                         f"max split R-hat {np.max(diag['rhat']):.4f}, "
                         f"min ESS {np.min(diag['ess']):.1f}")
    elif magic == b"BHFT":
        ds = data.load_dataset(path, "feature-binary")
        lines.append(f"  features: {ds.n_rows} rows x {ds.n_features} dims, "
                     f"{ds.n_classes} classes")
    elif magic == b"BHPV":
        pv = model.load_params(path)
        lines.append(f"  params: {pv.values.size} values")
        if pv.layout:
            shapes = ", ".join(f"{n}{list(s)}" for n, s, _ in pv.layout)
            lines.append(f"  layout: {shapes}")
    elif magic == b"BHGP":
        gp = laplace.GaussianPosterior.load(path)
        lines.append(f"  gaussian posterior: {gp.n_params} params")
        lines.append(f"  variance range [{gp.variance.min():.3e}, "
                     f"{gp.variance.max():.3e}]")
    else:
        raise ValueError(f"{path}: unrecognized file magic {magic!r}")
    return "\n".join(lines)


def _dump_chain_csv(path, csv_path) -> None:
    chain = sampler.SampleChain.load(path)
    with open(csv_path, "w", encoding="utf-8") as f:
        f.write(",".join(f"p{j}" for j in range(chain.n_params)) + "\n")
        for row in chain.draws:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")


# --------------------------------------------------------------------- cli


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayeshead",
        description="Posterior uncertainty experiments for small classifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="override the output directory")
    p_run.add_argument("--seed", type=int, help="override the seed")
    p_run.add_argument("--force", action="store_true",
                       help="allow writing into a non-empty directory")

    p_val = sub.add_parser("validate", help="check a config and print it")
    p_val.add_argument("--config", required=True)

    p_ins = sub.add_parser("inspect", help="summarize a binary artifact")
    p_ins.add_argument("path")
    p_ins.add_argument("--csv", help="dump chain draws to CSV, one row per draw")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        try:
            cfg = validate_config(args.config)
        except ConfigError as e:
            for err in e.errors:
                print(f"error: {err}", file=sys.stderr)
            return 1
        print(json.dumps(_json_ready(cfg), indent=2, sort_keys=True))
        return 0

    if args.command == "run":
        try:
            cfg = validate_config(args.config,
                                  {"out": args.out, "seed": args.seed})
        except ConfigError as e:
            for err in e.errors:
                print(f"error: {err}", file=sys.stderr)
            return 1
        try:
            out = run_experiment(cfg, force=args.force)
        except Exception as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        print(f"wrote {out}")
        return 0

    if args.command == "inspect":
        try:
            print(inspect_path(args.path))
            if args.csv:
                _dump_chain_csv(args.path, args.csv)
                print(f"wrote {args.csv}")
        except Exception as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
