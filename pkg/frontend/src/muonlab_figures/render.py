"""Figure rendering from muonlab result CSVs.

Seven figure types map one-to-one onto the study's plots: eigenvalue
distributions, aligned and absolute improvement bars, averaged loss
trajectories, the median hitting-time sweep, and the line-search
objective-gap and diagnostics panels. Output is vector (SVG by default)
and deterministic: fixed style, fixed hash salt, no timestamps.
"""

from __future__ import annotations

import json
import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schemas import SchemaError, load_rows, to_float  # noqa: E402

FIGURES = (
    "eig_distributions",
    "improvement_bars_aligned",
    "improvement_bars_absolute",
    "avg_trajectories",
    "median_hitting",
    "linesearch_gap",
    "linesearch_diag",
)

#: bar clipping rule: a method whose final loss fell below CLIP_RATIO of
#: its initial loss is drawn clipped at CLIP_ORDERS orders of decrease
CLIP_RATIO = 1e-5
CLIP_ORDERS = 8.0

#: trajectory plots clip the loss axis at this floor
TRAJECTORY_FLOOR = 1e-5

#: fixed, versioned style: colors by method tag, shared band alpha
METHOD_COLORS = {
    "gd": "#1f77b4",
    "adam": "#2ca02c",
    "muon_exact": "#d62728",
    "muon_ns": "#ff7f0e",
    "gd_ls": "#1f77b4",
    "greedy": "#d62728",
}
BAND_ALPHA = 0.25
_FALLBACK_CYCLE = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


def _color(tag: str, i: int) -> str:
    return METHOD_COLORS.get(tag, _FALLBACK_CYCLE[i % len(_FALLBACK_CYCLE)])


def _style():
    plt.rcParams.update({
        "svg.hashsalt": "muonlab-figures",
        "svg.fonttype": "none",  # keep labels as text elements, not glyph paths
        "figure.dpi": 100,
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
    })


def _save(fig, out_path: str):
    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    fig.savefig(out_path, metadata={"Date": None} if out_path.endswith(".svg") else None)
    plt.close(fig)


def _ordered_kinds(rows):
    seen = []
    for r in rows:
        if r["kind"] not in seen:
            seen.append(r["kind"])
    return seen


def render_eig_distributions(csv_dir, out_path):
    rows = load_rows(csv_dir, "spectra.csv")
    by_kind = defaultdict(list)
    for r in rows:
        by_kind[r["kind"]].append(to_float(r["eigenvalue"]))
    kinds = _ordered_kinds(rows)
    ncols = 4
    nrows = math.ceil(len(kinds) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.0 * ncols, 2.4 * nrows))
    axes = np.atleast_1d(axes).ravel()
    for ax in axes[len(kinds):]:
        ax.set_visible(False)
    for i, kind in enumerate(kinds):
        vals = np.array(by_kind[kind])
        bins = np.geomspace(max(vals.min(), 1e-6), vals.max() * 1.0001, 30)
        axes[i].hist(vals, bins=bins, color="#1f77b4")
        axes[i].set_xscale("log")
        axes[i].set_title(kind)
        axes[i].set_xlabel("eigenvalue")
        axes[i].set_ylabel("count")
    fig.suptitle("Hessian eigenvalue distributions")
    fig.tight_layout()
    _save(fig, out_path)


def _bars_by_kind(rows):
    data = defaultdict(dict)
    for r in rows:
        data[r["kind"]][r["method"]] = (
            to_float(r["initial_loss"]), to_float(r["final_best_loss"]),
            to_float(r["orders"]))
    return data


def _gd_reduction_order(data):
    """Kinds sorted by increasing loss reduction achieved by gd."""
    def gd_orders(kind):
        entry = data[kind].get("gd")
        return entry[2] if entry else 0.0
    return sorted(data, key=gd_orders)


def render_improvement_bars(csv_dir, out_path, aligned: bool):
    rows = load_rows(csv_dir, "bars.csv")
    data = _bars_by_kind(rows)
    kinds = _gd_reduction_order(data)
    methods = sorted({r["method"] for r in rows})
    width = 0.8 / len(methods)
    fig, ax = plt.subplots(figsize=(1.6 * len(kinds) + 2, 3.6))
    x = np.arange(len(kinds))
    for j, method in enumerate(methods):
        pos = x + (j - (len(methods) - 1) / 2) * width
        if aligned:
            heights = []
            for kind in kinds:
                init, final, orders = data[kind][method]
                if final < CLIP_RATIO * init:
                    orders = min(orders, CLIP_ORDERS)
                heights.append(-orders)
            ax.bar(pos, heights, width, label=method, color=_color(method, j))
        else:
            for k, kind in enumerate(kinds):
                init, final, _ = data[kind][method]
                final = max(final, CLIP_RATIO)
                ax.bar(pos[k], final - init, width, bottom=init,
                       color=_color(method, j),
                       label=method if k == 0 else None)
    ax.set_xticks(x)
    ax.set_xticklabels(kinds, rotation=30, ha="right")
    if aligned:
        ax.set_ylabel("orders of magnitude of loss decrease")
        ax.set_title("Loss reduction, aligned at the common initial level")
    else:
        ax.set_yscale("log")
        ax.set_ylabel("loss level")
        ax.set_title("Initial and final loss levels")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def render_avg_trajectories(csv_dir, out_path):
    rows = load_rows(csv_dir, "trajectories.csv")
    kinds = _ordered_kinds(rows)
    by_panel = defaultdict(lambda: defaultdict(list))
    for r in rows:
        by_panel[r["kind"]][r["method"]].append(
            (int(r["step"]), to_float(r["loss_median"]),
             to_float(r["loss_q025"]), to_float(r["loss_q975"])))
    fig, axes = plt.subplots(1, len(kinds), figsize=(4.6 * len(kinds), 3.4),
                             squeeze=False)
    for i, kind in enumerate(kinds):
        ax = axes[0][i]
        for j, (method, pts) in enumerate(sorted(by_panel[kind].items())):
            pts.sort()
            steps = np.array([p[0] for p in pts])
            med = np.maximum([p[1] for p in pts], TRAJECTORY_FLOOR)
            lo = np.array([p[2] for p in pts])
            hi = np.array([p[3] for p in pts])
            ax.plot(steps, med, label=method, color=_color(method, j))
            if not (np.isnan(lo).all() or np.isnan(hi).all()):
                ax.fill_between(steps, np.maximum(lo, TRAJECTORY_FLOOR),
                                np.maximum(hi, TRAJECTORY_FLOOR),
                                color=_color(method, j), alpha=BAND_ALPHA,
                                linewidth=0)
        ax.set_yscale("log")
        ax.set_title(kind)
        ax.set_xlabel("step")
        ax.set_ylabel("loss")
        ax.legend()
    fig.suptitle("Median loss trajectories with central-95% bands")
    fig.tight_layout()
    _save(fig, out_path)


def _hitting_cap(csv_dir, rows) -> float:
    """Cap line level: metadata when present, else the largest quantile."""
    meta = os.path.join(csv_dir, "metadata.json")
    if os.path.isfile(meta):
        try:
            doc = json.loads(open(meta, encoding="utf-8").read())
            if isinstance(doc.get("T"), (int, float)):
                return float(doc["T"])
        except (OSError, ValueError):
            pass
    return max(to_float(r["q975"]) for r in rows)


def render_median_hitting(csv_dir, out_path):
    rows = load_rows(csv_dir, "hitting.csv")
    rows.sort(key=lambda r: to_float(r["sigma"]))
    sigma = np.array([to_float(r["sigma"]) for r in rows])
    med = np.array([to_float(r["median"]) for r in rows])
    lo = np.array([to_float(r["q025"]) for r in rows])
    hi = np.array([to_float(r["q975"]) for r in rows])
    baseline = to_float(rows[0]["baseline"])
    cap = _hitting_cap(csv_dir, rows)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(sigma, med, color="#1f77b4", label="median hitting time")
    if not (np.isnan(lo).all() or np.isnan(hi).all()):
        ax.fill_between(sigma, lo, hi, color="#1f77b4", alpha=BAND_ALPHA,
                        linewidth=0, label="central 95%")
    ax.axhline(cap, linestyle="--", color="black", label="cap")
    ax.axhline(baseline, linestyle="--", color="gray", label="noiseless crossing")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("noise level")
    ax.set_ylabel("steps to target")
    ax.set_title("Hitting time vs projection noise")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def _linesearch_panels(csv_dir, out_path, metrics, title):
    rows = load_rows(csv_dir, "linesearch_summary.csv")
    policies = sorted({r["policy"] for r in rows})
    fig, axes = plt.subplots(1, len(metrics), figsize=(4.8 * len(metrics), 3.4),
                             squeeze=False)
    for m, (prefix, label) in enumerate(metrics):
        ax = axes[0][m]
        for j, policy in enumerate(policies):
            pts = sorted((int(r["step"]),
                          to_float(r[f"{prefix}_median"]),
                          to_float(r[f"{prefix}_q025"]),
                          to_float(r[f"{prefix}_q975"]))
                         for r in rows if r["policy"] == policy)
            steps = np.array([p[0] for p in pts])
            med = np.array([p[1] for p in pts])
            lo = np.array([p[2] for p in pts])
            hi = np.array([p[3] for p in pts])
            ax.plot(steps, med, label=policy, color=_color(policy, j))
            if not (np.isnan(lo).all() or np.isnan(hi).all()):
                ax.fill_between(steps, lo, hi, color=_color(policy, j),
                                alpha=BAND_ALPHA, linewidth=0)
        ax.set_yscale("log")
        ax.set_xlabel("step")
        ax.set_ylabel(label)
        ax.legend()
    fig.suptitle(title)
    fig.tight_layout()
    _save(fig, out_path)


def render_linesearch_gap(csv_dir, out_path):
    _linesearch_panels(csv_dir, out_path, [("gap", "objective gap")],
                       "Exact line search: objective gap")


def render_linesearch_diag(csv_dir, out_path):
    _linesearch_panels(csv_dir, out_path,
                       [("gnorm", "gradient norm"), ("dist", "distance to optimum")],
                       "Exact line search: diagnostics")


_RENDERERS = {
    "eig_distributions": render_eig_distributions,
    "improvement_bars_aligned":
        lambda d, o: render_improvement_bars(d, o, aligned=True),
    "improvement_bars_absolute":
        lambda d, o: render_improvement_bars(d, o, aligned=False),
    "avg_trajectories": render_avg_trajectories,
    "median_hitting": render_median_hitting,
    "linesearch_gap": render_linesearch_gap,
    "linesearch_diag": render_linesearch_diag,
}


def render(figure: str, csv_dir: str, out_dir: str, fmt: str = "svg") -> str:
    """Render one figure type; returns the output path."""
    if figure not in _RENDERERS:
        raise SchemaError(f"unknown figure {figure!r}; choose from {FIGURES}")
    _style()
    out_path = os.path.join(out_dir, f"{figure}.{fmt}")
    _RENDERERS[figure](csv_dir, out_path)
    return out_path
