"""Figure artifacts and their SVG renderers: 1-D prior-vs-posterior
overlays, 2-D credible-contour marginals, per-example predictive bars,
reliability diagrams, and coverage curves.

Rendering is deliberately dependency-free and byte-deterministic: the same
artifact always produces the same SVG, so figures can be golden-file
tested. Every plotted series is mirrored to a CSV sidecar next to the SVG.
Contours come from histogram mass accumulation, not kernel densities; the
figure footer text records that choice.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import model

CREDIBLE_MASSES = (0.683, 0.954, 0.997)

HIST_BINS_1D = 40
HIST_BINS_2D = 60
PRIOR_GRID_POINTS = 1025
PRIOR_GRID_SIGMAS = 6.0

_LEVEL_COLORS = {0.683: "#d62728", 0.954: "#ff7f0e", 0.997: "#1f77b4"}


@dataclass
class Marginal1D:
    """Posterior histogram of one coordinate with its analytic prior curve."""

    name: str
    edges: np.ndarray          # HIST_BINS_1D + 1
    density: np.ndarray        # HIST_BINS_1D, normalized to integrate to 1
    prior_x: np.ndarray
    prior_density: np.ndarray
    n_samples: int


@dataclass
class Histogram2D:
    """Joint histogram of two coordinates with credible-mass thresholds.

    levels maps each target mass to the bin-density threshold whose
    super-level set encloses at least that much sample mass.
    """

    name_x: str
    name_y: str
    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray         # (HIST_BINS_2D, HIST_BINS_2D) ints, sum = S
    levels: dict
    n_samples: int

    def density(self) -> np.ndarray:
        area = ((self.x_edges[1] - self.x_edges[0])
                * (self.y_edges[1] - self.y_edges[0]))
        return self.counts / (self.n_samples * area)

    def enclosed_mass(self, target_mass: float) -> float:
        """Sample mass inside the super-level set for one target."""
        dens = self.density()
        thr = self.levels[target_mass]
        return float(self.counts[dens >= thr].sum()) / self.n_samples


def _resolve(chain, name: str) -> int:
    if chain.layout is None:
        raise KeyError("chain carries no parameter layout")
    return model.resolve_name(chain.layout, name)


def marginal_1d(chain, name: str, prior: model.Prior) -> Marginal1D:
    """40-bin density histogram of one parameter plus the prior's Gaussian
    density tabulated on a grid spanning +-6 prior std deviations."""
    idx = _resolve(chain, name)
    x = np.asarray(chain.draws)[:, idx]
    density, edges = np.histogram(x, bins=HIST_BINS_1D, density=True)
    s = prior.std_dev
    grid = np.linspace(-PRIOR_GRID_SIGMAS * s, PRIOR_GRID_SIGMAS * s,
                       PRIOR_GRID_POINTS)
    pd = np.exp(-0.5 * (grid / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
    return Marginal1D(name=name, edges=edges, density=density,
                      prior_x=grid, prior_density=pd,
                      n_samples=x.size)


def _padded_edges(x: np.ndarray, n_bins: int) -> np.ndarray:
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.1 * (hi - lo)
    return np.linspace(lo - pad, hi + pad, n_bins + 1)


def marginal_2d(chain, name_x: str, name_y: str) -> Histogram2D:
    """60x60 histogram over a 10%-padded bounding box; credible thresholds
    found by sorting bin densities and accumulating mass."""
    if name_x == name_y:
        raise ValueError("need two distinct parameter names")
    ix = _resolve(chain, name_x)
    iy = _resolve(chain, name_y)
    draws = np.asarray(chain.draws)
    x, y = draws[:, ix], draws[:, iy]
    x_edges = _padded_edges(x, HIST_BINS_2D)
    y_edges = _padded_edges(y, HIST_BINS_2D)
    counts, _, _ = np.histogram2d(x, y, bins=[x_edges, y_edges])
    counts = counts.astype(np.int64)
    s = x.size
    area = (x_edges[1] - x_edges[0]) * (y_edges[1] - y_edges[0])
    flat = np.sort(counts.ravel())[::-1]
    cum = np.cumsum(flat)
    levels = {}
    for mass in CREDIBLE_MASSES:
        k = int(np.searchsorted(cum, mass * s))
        k = min(k, flat.size - 1)
        levels[mass] = flat[k] / (s * area)
    return Histogram2D(name_x=name_x, name_y=name_y, x_edges=x_edges,
                       y_edges=y_edges, counts=counts, levels=levels,
                       n_samples=s)


# ---------------------------------------------------------------- rendering

_W, _H = 560, 400
_ML, _MR, _MT, _MB = 62, 18, 34, 48


def _f(v: float) -> str:
    # short, locale-free float formatting keeps the bytes stable
    return format(float(v), ".6g")


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{_H}" viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{_esc(title)}</text>',
        ]
        self.x0 = self.x1 = self.y0 = self.y1 = 0.0

    def set_limits(self, x0, x1, y0, y1):
        self.x0, self.x1 = float(x0), float(x1)
        self.y0, self.y1 = float(y0), float(y1)

    def px(self, x: float) -> float:
        return _ML + (x - self.x0) / (self.x1 - self.x0) * (_W - _ML - _MR)

    def py(self, y: float) -> float:
        return _H - _MB - (y - self.y0) / (self.y1 - self.y0) * (_H - _MT - _MB)

    def axes(self, xlabel: str, ylabel: str):
        left, right = _ML, _W - _MR
        top, bottom = _MT, _H - _MB
        self.parts.append(
            f'<rect x="{left}" y="{top}" width="{right - left}" '
            f'height="{bottom - top}" fill="none" stroke="#444" '
            'stroke-width="1"/>')
        for t in np.linspace(self.x0, self.x1, 5):
            x = self.px(t)
            self.parts.append(
                f'<line x1="{_f(x)}" y1="{bottom}" x2="{_f(x)}" '
                f'y2="{bottom + 4}" stroke="#444"/>')
            self.parts.append(
                f'<text x="{_f(x)}" y="{bottom + 16}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="10">{_f(round(t, 6))}</text>')
        for t in np.linspace(self.y0, self.y1, 5):
            y = self.py(t)
            self.parts.append(
                f'<line x1="{left - 4}" y1="{_f(y)}" x2="{left}" '
                f'y2="{_f(y)}" stroke="#444"/>')
            self.parts.append(
                f'<text x="{left - 7}" y="{_f(y + 3)}" text-anchor="end" '
                f'font-family="sans-serif" font-size="10">{_f(round(t, 6))}</text>')
        self.parts.append(
            f'<text x="{(left + right) / 2:.0f}" y="{_H - 10}" '
            'text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{_esc(xlabel)}</text>')
        self.parts.append(
            f'<text x="14" y="{(top + bottom) / 2:.0f}" text-anchor="middle" '
            'font-family="sans-serif" font-size="11" '
            f'transform="rotate(-90 14 {(top + bottom) / 2:.0f})">'
            f'{_esc(ylabel)}</text>')

    def footer(self, text: str):
        self.parts.append(
            f'<text x="{_ML}" y="{_MT - 6}" font-family="sans-serif" '
            f'font-size="9" fill="#666">{_esc(text)}</text>')

    def polyline(self, xs, ys, color: str, width=1.5, dash=None,
                 elem_id=None):
        pts = " ".join(f"{_f(self.px(x))},{_f(self.py(y))}"
                       for x, y in zip(xs, ys))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        ident = f' id="{elem_id}"' if elem_id else ""
        self.parts.append(
            f'<polyline{ident} points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{extra}/>')

    def rect(self, x, y, w, h, fill, stroke="none", width=1.0, elem_id=None,
             cls=None):
        ident = f' id="{elem_id}"' if elem_id else ""
        klass = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<rect{ident}{klass} x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" '
            f'height="{_f(h)}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_f(width)}"/>')

    def data_rect(self, x_lo, x_hi, y_lo, y_hi, **kw):
        self.rect(self.px(x_lo), self.py(y_hi),
                  self.px(x_hi) - self.px(x_lo),
                  self.py(y_lo) - self.py(y_hi), **kw)

    def vline(self, x, y_lo, y_hi, color, width=1.0, elem_id=None):
        ident = f' id="{elem_id}"' if elem_id else ""
        self.parts.append(
            f'<line{ident} x1="{_f(self.px(x))}" y1="{_f(self.py(y_lo))}" '
            f'x2="{_f(self.px(x))}" y2="{_f(self.py(y_hi))}" '
            f'stroke="{color}" stroke-width="{_f(width)}"/>')

    def label(self, x_px, y_px, text, color="#222", size=10, anchor="start"):
        self.parts.append(
            f'<text x="{_f(x_px)}" y="{_f(y_px)}" text-anchor="{anchor}" '
            f'font-family="sans-serif" font-size="{size}" '
            f'fill="{color}">{_esc(text)}</text>')

    def save(self, path):
        self.parts.append("</svg>")
        data = "\n".join(self.parts) + "\n"
        raw = data.encode("utf-8")
        if len(raw) > 2 * 1024 * 1024:
            raise ValueError("rendered SVG exceeds 2 MB")
        with open(path, "wb") as f:
            f.write(raw)


def _esc(s: str) -> str:
    return (str(s).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _sidecar(path, suffix: str = "") -> str:
    base = str(path)
    if base.endswith(".svg"):
        base = base[:-4]
    return f"{base}{suffix}.csv"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def render_marginal_1d(m: Marginal1D, path) -> None:
    """Prior curve in gray, posterior density histogram outline in black."""
    y_max = 1.08 * max(float(m.density.max(initial=0.0)),
                       float(m.prior_density.max()))
    x_lo = min(float(m.edges[0]), float(m.prior_x[0]))
    x_hi = max(float(m.edges[-1]), float(m.prior_x[-1]))
    c = _Canvas(f"Marginal posterior of {m.name}")
    c.set_limits(x_lo, x_hi, 0.0, y_max if y_max > 0 else 1.0)
    c.axes(m.name, "density")
    c.footer(f"S={m.n_samples}, {HIST_BINS_1D}-bin histogram; "
             "gray curve: prior density")
    c.polyline(m.prior_x, m.prior_density, "#999999", width=1.2)
    # histogram as a step outline
    xs, ys = [m.edges[0]], [0.0]
    for i in range(len(m.density)):
        xs.extend([m.edges[i], m.edges[i + 1]])
        ys.extend([m.density[i], m.density[i]])
    xs.append(m.edges[-1])
    ys.append(0.0)
    c.polyline(xs, ys, "#222222", width=1.5, elem_id="posterior")
    c.save(path)
    _write_csv(_sidecar(path), ["bin_lo", "bin_hi", "density"],
               [[_f(m.edges[i]), _f(m.edges[i + 1]), _f(m.density[i])]
                for i in range(len(m.density))])
    _write_csv(_sidecar(path, ".prior"), ["x", "density"],
               [[_f(x), _f(d)] for x, d in zip(m.prior_x, m.prior_density)])


def render_marginal_2d(h: Histogram2D, path) -> None:
    """Grayscale bin heatmap with colored outlines around the cells inside
    each credible super-level set."""
    c = _Canvas(f"Joint posterior of {h.name_x} and {h.name_y}")
    c.set_limits(h.x_edges[0], h.x_edges[-1], h.y_edges[0], h.y_edges[-1])
    c.axes(h.name_x, h.name_y)
    c.footer(f"S={h.n_samples}; histogram contours, masses "
             + "/".join(_f(m) for m in sorted(h.levels)))
    dens = h.density()
    peak = dens.max()
    n = h.counts.shape[0]
    for i in range(n):
        for j in range(n):
            if h.counts[i, j] == 0:
                continue
            shade = 235 - int(200 * dens[i, j] / peak)
            c.data_rect(h.x_edges[i], h.x_edges[i + 1],
                        h.y_edges[j], h.y_edges[j + 1],
                        fill=f"rgb({shade},{shade},{shade})")
    for mass in sorted(h.levels, reverse=True):
        thr = h.levels[mass]
        color = _LEVEL_COLORS.get(mass, "#000000")
        tag = f"level{int(round(mass * 1000))}"
        for i in range(n):
            for j in range(n):
                if dens[i, j] >= thr:
                    c.data_rect(h.x_edges[i], h.x_edges[i + 1],
                                h.y_edges[j], h.y_edges[j + 1],
                                fill="none", stroke=color, width=0.8,
                                cls=tag)
    c.save(path)
    rows = [[i, j, int(h.counts[i, j])]
            for i in range(n) for j in range(n) if h.counts[i, j]]
    _write_csv(_sidecar(path, ".counts"), ["x_bin", "y_bin", "count"], rows)
    _write_csv(_sidecar(path, ".levels"),
               ["mass", "density_threshold", "enclosed_mass"],
               [[_f(mass), _f(h.levels[mass]), _f(h.enclosed_mass(mass))]
                for mass in sorted(h.levels)])


def render_predictive_bars(summaries, labels, path,
                           title="Posterior predictive (mean +/- 1 std)") -> None:
    """Grouped probability bars per example. The predicted class bar carries
    id pred-<row>; the true class marker carries id truth-<row>."""
    if not summaries:
        raise ValueError("nothing to plot: no summaries")
    n = len(summaries)
    n_classes = summaries[0].mean_probs.size
    c = _Canvas(title)
    c.set_limits(0.0, float(n), 0.0, 1.0)
    c.axes("example", "probability")
    c.footer(f"N={n}, C={n_classes}, S={summaries[0].n_samples_used}; "
             "outlined bar: predicted class; tick: true label")
    group_w = 1.0
    bar_w = group_w / (n_classes + 1)
    shades = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b2"]
    for i, s in enumerate(summaries):
        for k in range(n_classes):
            x_lo = i + bar_w * (k + 0.5)
            x_hi = x_lo + bar_w
            mean = float(s.mean_probs[k])
            std = float(s.std_probs[k])
            is_pred = k == s.predicted
            c.data_rect(x_lo, x_hi, 0.0, mean,
                        fill=shades[k % len(shades)],
                        stroke="#222222" if is_pred else "none",
                        width=1.4 if is_pred else 1.0,
                        elem_id=f"pred-{i}" if is_pred else None)
            mid = 0.5 * (x_lo + x_hi)
            c.vline(mid, max(mean - std, 0.0), min(mean + std, 1.0),
                    "#333333", width=1.0)
        if labels is not None:
            k = int(labels[i])
            x_lo = i + bar_w * (k + 0.5)
            mid = x_lo + 0.5 * bar_w
            x_px, y_px = c.px(mid), c.py(0.0)
            c.parts.append(
                f'<path id="truth-{i}" d="M {_f(x_px - 4)} {_f(y_px + 10)} '
                f'L {_f(x_px + 4)} {_f(y_px + 10)} L {_f(x_px)} '
                f'{_f(y_px + 3)} Z" fill="#222222"/>')
    c.save(path)
    rows = []
    for i, s in enumerate(summaries):
        for k in range(n_classes):
            rows.append([i, k, _f(s.mean_probs[k]), _f(s.std_probs[k]),
                         s.predicted,
                         "" if labels is None else int(labels[i])])
    _write_csv(_sidecar(path),
               ["row_id", "class", "mean", "std", "predicted", "label"],
               rows)


def render_reliability(bins, path, title="Reliability diagram") -> None:
    """Accuracy bars over confidence bins with the identity diagonal."""
    c = _Canvas(title)
    c.set_limits(0.0, 1.0, 0.0, 1.0)
    c.axes("confidence", "empirical accuracy")
    c.footer(f"N={bins.n_examples}, {bins.n_bins} equal-width bins")
    c.polyline([0.0, 1.0], [0.0, 1.0], "#999999", width=1.0, dash="4 3")
    for b in range(bins.n_bins):
        if bins.counts[b] == 0:
            continue
        c.data_rect(bins.edges[b], bins.edges[b + 1], 0.0,
                    float(bins.accuracy[b]),
                    fill="#4c72b0", stroke="#224466", width=0.8)
        c.vline(0.5 * (bins.edges[b] + bins.edges[b + 1]),
                float(bins.accuracy[b]), float(bins.mean_confidence[b]),
                "#c44e52", width=1.6)
    c.save(path)
    _write_csv(_sidecar(path),
               ["bin_lo", "bin_hi", "count", "mean_confidence", "accuracy"],
               [[_f(bins.edges[b]), _f(bins.edges[b + 1]),
                 int(bins.counts[b]),
                 "" if bins.counts[b] == 0 else _f(bins.mean_confidence[b]),
                 "" if bins.counts[b] == 0 else _f(bins.accuracy[b])]
                for b in range(bins.n_bins)])


def render_coverage(curves, path,
                    title="Selective prediction: accuracy vs coverage") -> None:
    """Step curves of selective accuracy against coverage. Accepts one
    curve or a list of (name, curve) pairs for overlays."""
    if hasattr(curves, "thresholds"):
        curves = [("", curves)]
    if not curves:
        raise ValueError("nothing to plot: no coverage curves")
    for _, curve in curves:
        if len(curve) == 0:
            raise ValueError("cannot render an empty coverage curve")
    accs = np.concatenate([curve.selective_accuracy[~np.isnan(
        curve.selective_accuracy)] for _, curve in curves])
    if accs.size == 0:
        raise ValueError("cannot render a coverage curve with no answered points")
    y_lo = max(0.0, float(accs.min()) - 0.05)
    c = _Canvas(title)
    c.set_limits(0.0, 1.0, y_lo, 1.0)
    c.axes("coverage", "selective accuracy")
    c.footer("thresholds at the unique confidence values; "
             "confidence = max mean probability")
    colors = ["#222222", "#4c72b0", "#c44e52", "#55a868"]
    for ci, (name, curve) in enumerate(curves):
        ok = ~np.isnan(curve.selective_accuracy)
        cov = curve.coverage[ok]
        acc = curve.selective_accuracy[ok]
        order = np.argsort(cov, kind="stable")
        cov, acc = cov[order], acc[order]
        xs, ys = [], []
        for i in range(len(cov)):
            if i > 0:
                xs.append(cov[i])
                ys.append(acc[i - 1])
            xs.append(cov[i])
            ys.append(acc[i])
        color = colors[ci % len(colors)]
        c.polyline(xs, ys, color, width=1.6,
                   elem_id=f"series-{ci}" if name else "series")
        if name:
            c.label(_W - _MR - 6, _MT + 16 + 14 * ci, name, color=color,
                    anchor="end")
    c.save(path)
    rows = []
    for name, curve in curves:
        for i in range(len(curve)):
            sa = curve.selective_accuracy[i]
            rows.append([name, _f(curve.thresholds[i]), _f(curve.coverage[i]),
                         "" if math.isnan(sa) else _f(sa)])
    _write_csv(_sidecar(path),
               ["series", "threshold", "coverage", "selective_accuracy"],
               rows)


def render_nll_trace(trace, path, title="Training negative log posterior") -> None:
    """Optimizer trace: one point per epoch."""
    trace = np.asarray(trace, dtype=np.float64)
    if trace.size == 0:
        raise ValueError("cannot render an empty trace")
    lo, hi = float(trace.min()), float(trace.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    c = _Canvas(title)
    c.set_limits(0.0, float(trace.size), lo, hi)
    c.axes("epoch", "negative log posterior")
    c.polyline(np.arange(1, trace.size + 1), trace, "#222222", width=1.4)
    c.save(path)
    _write_csv(_sidecar(path), ["epoch", "nll"],
               [[i + 1, _f(v)] for i, v in enumerate(trace)])
