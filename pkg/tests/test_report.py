import numpy as np
import pytest

from bayeshead import metrics, model, report, sampler

from conftest import FIXTURES, make_summary

import make_golden_helpers as golden


def test_prior_curve_integrates_to_one():
    chain = golden.synthetic_chain()
    m = report.marginal_1d(chain, "w[0]", model.Prior(1.3))
    # Simpson's rule on the stored uniform grid (odd point count)
    x, y = m.prior_x, m.prior_density
    h = x[1] - x[0]
    integral = (h / 3) * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
    assert abs(integral - 1.0) < 1e-6


def test_posterior_histogram_matches_prior_for_prior_samples():
    rng = np.random.Generator(np.random.Philox(50))
    draws = rng.normal(0.0, 1.0, size=(20000, 1))
    chain = sampler.SampleChain(draws=draws, accept_stats=np.ones(20000),
                                divergences=0, step_size_final=0.1, seed=50,
                                layout=[("w", (1,), 0)])
    m = report.marginal_1d(chain, "w[0]", model.Prior(1.0))
    centers = 0.5 * (m.edges[:-1] + m.edges[1:])
    expect = np.exp(-0.5 * centers ** 2) / np.sqrt(2 * np.pi)
    assert np.max(np.abs(m.density - expect)) < 0.1


def test_unknown_parameter_name_lists_valid_names():
    chain = golden.synthetic_chain()
    with pytest.raises(KeyError, match="valid names"):
        report.marginal_1d(chain, "W9[0,0]", model.Prior(1.0))


def test_chain_without_layout_is_rejected():
    chain = sampler.SampleChain(draws=np.zeros((10, 2)),
                                accept_stats=np.ones(10), divergences=0,
                                step_size_final=0.1, seed=1)
    with pytest.raises(KeyError, match="layout"):
        report.marginal_1d(chain, "w[0]", model.Prior(1.0))


# ------------------------------------------------------------- contours

def synthetic_normal_chain(corr, n=40000, seed=51):
    rng = np.random.Generator(np.random.Philox(seed))
    cov = np.array([[1.0, corr], [corr, 1.0]])
    draws = rng.standard_normal((n, 2)) @ np.linalg.cholesky(cov).T
    return sampler.SampleChain(draws=draws, accept_stats=np.ones(n),
                               divergences=0, step_size_final=0.1, seed=seed,
                               layout=[("w", (2,), 0)])


def test_sixty_eight_percent_contour_mass():
    chain = synthetic_normal_chain(0.0)
    h = report.marginal_2d(chain, "w[0]", "w[1]")
    mass = h.enclosed_mass(0.683)
    assert 0.63 <= mass <= 0.73


def test_credible_masses_are_monotone():
    chain = synthetic_normal_chain(0.4)
    h = report.marginal_2d(chain, "w[0]", "w[1]")
    masses = [h.enclosed_mass(m) for m in report.CREDIBLE_MASSES]
    assert masses[0] <= masses[1] <= masses[2]
    for target, got in zip(report.CREDIBLE_MASSES, masses):
        assert got >= target - 1e-12


def test_contour_tilt_follows_correlation_sign():
    for corr in (0.9, -0.9):
        chain = synthetic_normal_chain(corr, seed=52)
        h = report.marginal_2d(chain, "w[0]", "w[1]")
        dens = h.density()
        inside = dens >= h.levels[0.683]
        xc = 0.5 * (h.x_edges[:-1] + h.x_edges[1:])
        yc = 0.5 * (h.y_edges[:-1] + h.y_edges[1:])
        xs, ys = np.meshgrid(xc, yc, indexing="ij")
        w = h.counts * inside
        mx = (w * xs).sum() / w.sum()
        my = (w * ys).sum() / w.sum()
        cov_xy = (w * (xs - mx) * (ys - my)).sum() / w.sum()
        assert np.sign(cov_xy) == np.sign(corr)


def test_identical_axes_rejected():
    chain = synthetic_normal_chain(0.0)
    with pytest.raises(ValueError, match="distinct"):
        report.marginal_2d(chain, "w[0]", "w[0]")


def test_degenerate_constant_draws_still_bin():
    draws = np.zeros((100, 2))
    chain = sampler.SampleChain(draws=draws, accept_stats=np.ones(100),
                                divergences=0, step_size_final=0.1, seed=1,
                                layout=[("w", (2,), 0)])
    h = report.marginal_2d(chain, "w[0]", "w[1]")
    assert h.counts.sum() == 100


# ------------------------------------------------------------- rendering

GOLDEN = FIXTURES / "golden"


def _assert_matches_golden(render, name, tmp_path, sidecars=()):
    out = tmp_path / name
    render(out)
    assert out.read_bytes() == (GOLDEN / name).read_bytes()
    # the same call twice must be byte-stable
    out2 = tmp_path / ("again_" + name)
    render(out2)
    assert out2.read_bytes() == out.read_bytes()
    for side in sidecars:
        got = tmp_path / side
        assert got.read_bytes() == (GOLDEN / side).read_bytes()


def test_marginal_1d_golden(tmp_path):
    chain = golden.synthetic_chain()
    m = report.marginal_1d(chain, "w[1]", model.Prior(1.0))
    _assert_matches_golden(
        lambda p: report.render_marginal_1d(m, p), "marginal.svg", tmp_path,
        sidecars=["marginal.csv", "marginal.prior.csv"])


def test_marginal_2d_golden(tmp_path):
    chain = golden.synthetic_chain()
    h = report.marginal_2d(chain, "w[0]", "w[1]")
    _assert_matches_golden(
        lambda p: report.render_marginal_2d(h, p), "joint.svg", tmp_path,
        sidecars=["joint.counts.csv", "joint.levels.csv"])


def test_predictive_bars_golden(tmp_path):
    summaries, labels = golden.synthetic_summaries()
    _assert_matches_golden(
        lambda p: report.render_predictive_bars(summaries, labels, p),
        "bars.svg", tmp_path, sidecars=["bars.csv"])


def test_reliability_golden(tmp_path):
    summaries, labels = golden.synthetic_summaries()
    bins = metrics.reliability(summaries, labels)
    _assert_matches_golden(
        lambda p: report.render_reliability(bins, p), "reliability.svg",
        tmp_path, sidecars=["reliability.csv"])


def test_coverage_golden(tmp_path):
    summaries, labels = golden.synthetic_summaries()
    curve = metrics.accuracy_coverage(summaries, labels)
    _assert_matches_golden(
        lambda p: report.render_coverage([("sampled", curve), ("point", curve)], p),
        "coverage.svg", tmp_path, sidecars=["coverage.csv"])


def test_nll_trace_golden(tmp_path):
    trace = 2.0 + 3.0 * np.exp(-np.arange(120) / 20.0)
    _assert_matches_golden(
        lambda p: report.render_nll_trace(trace, p), "trace.svg", tmp_path,
        sidecars=["trace.csv"])


def test_bars_mark_predicted_and_truth(tmp_path):
    summaries, labels = golden.synthetic_summaries()
    out = tmp_path / "bars.svg"
    report.render_predictive_bars(summaries, labels, out)
    svg = out.read_text()
    for i in range(len(summaries)):
        assert f'id="pred-{i}"' in svg
        assert f'id="truth-{i}"' in svg


def test_empty_inputs_raise_not_render(tmp_path):
    with pytest.raises(ValueError):
        report.render_predictive_bars([], np.zeros(0, np.int64), tmp_path / "x.svg")
    with pytest.raises(ValueError):
        report.render_coverage([], tmp_path / "x.svg")
    empty = metrics.CoverageCurve(thresholds=np.zeros(0), coverage=np.zeros(0),
                                  selective_accuracy=np.zeros(0))
    with pytest.raises(ValueError):
        report.render_coverage(empty, tmp_path / "x.svg")


def test_oversize_output_is_rejected(tmp_path):
    n = 300000
    curve = metrics.CoverageCurve(
        thresholds=np.linspace(0, 1, n),
        coverage=np.linspace(1, 0, n),
        selective_accuracy=np.linspace(0.5, 1.0, n))
    with pytest.raises(ValueError, match="2 MB|2MB|too large"):
        report.render_coverage(curve, tmp_path / "big.svg")


def test_svg_declares_no_external_resources():
    for name in ("marginal.svg", "joint.svg", "bars.svg",
                 "reliability.svg", "coverage.svg", "trace.svg"):
        svg = (GOLDEN / name).read_text()
        assert "http://" not in svg.replace("http://www.w3.org", "")
        assert "href" not in svg
