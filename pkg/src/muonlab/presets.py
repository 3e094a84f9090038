"""Named experiment presets and their CSV output sets.

Each preset regenerates one table or figure data set at the reference
scale (n=100, T=500, lr grid {1e-1, 1e-2, 1e-3}, 100 seeds unless noted)
and writes deterministic CSVs plus a metadata.json describing the exact
configuration. Rerunning with the same base seed reproduces the files
byte for byte.
"""

from __future__ import annotations

import platform
import sys
import time

import numpy as np

from . import csvio, harness, line_search, sign_dynamics
from .optimizers import PRECISION_NOTE, OptimizerSpec, Schedule
from .problems import SPECTRUM_KINDS, SpectrumSpec, generate_spectrum
from .rng import RandomStream, derive_seed

DEFAULT_LR_GRID = (1e-1, 1e-2, 1e-3)
DEFAULT_N = 100
DEFAULT_T = 500
DEFAULT_SEEDS = 100

#: run-index purposes for presets that build their own instances
_PURPOSE_FIG5_PROBLEM = 101
_PURPOSE_FIG5_INIT = 102


def _spec(method="muon", projection="exact", momentum="none", schedule_kind="constant",
          T=DEFAULT_T, mu=0.95) -> OptimizerSpec:
    sched = Schedule(kind=schedule_kind, lr0=0.1, lr_final=1e-3, horizon=T, lr_steps=T)
    return OptimizerSpec(method=method, projection=projection, momentum=momentum,
                         mu=mu, schedule=sched)


def _versions() -> dict:
    import scipy

    from . import __version__
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "muonlab": __version__,
    }


def _metadata(out_dir, preset, base_seed, *, lr_grid=None, T=None, n=None,
              seeds=None, schedule=None, extra=None):
    doc = {
        "preset": preset,
        "base_seed": base_seed,
        "lr_grid": list(lr_grid) if lr_grid else None,
        "T": T,
        "n": n,
        "seeds": seeds,
        "schedule": schedule,
        "precision_note": PRECISION_NOTE,
        "versions": _versions(),
    }
    if extra:
        doc.update(extra)
    csvio.write_metadata(f"{out_dir}/metadata.json", doc)


def _write_spectra(out_dir, kinds, n, base_seed):
    """Eigenvalues of each family's (fixed) instance (fig 1 input)."""
    rows = []
    for kind in kinds:
        spec = SpectrumSpec(kind=kind, n=n)
        stream = RandomStream(harness.problem_stream_seed(base_seed, kind))
        s = generate_spectrum(spec, stream)
        rows.extend([kind, i, float(v)] for i, v in enumerate(s))
    csvio.write_csv(f"{out_dir}/spectra.csv", ["kind", "index", "eigenvalue"], rows)


def _comparison_preset(preset, out_dir, base_seed, spec_a, spec_b, *,
                       kinds=SPECTRUM_KINDS, seeds=DEFAULT_SEEDS, T=DEFAULT_T,
                       n=DEFAULT_N, lr_grid=DEFAULT_LR_GRID, threads=1,
                       milestone_mode="per-t", track_stationarity=False,
                       progress=None):
    """Shared machinery for the win-rate / ratio table presets."""
    t0 = time.perf_counter()
    milestones = (max(1, T // 10), max(1, T // 2), T)
    job = harness.GridJob(base_seed=base_seed, n=n, T=T, lr_grid=tuple(lr_grid),
                          kinds=tuple(kinds), specs=(spec_a, spec_b),
                          track_stationarity=track_stationarity)
    results = harness.run_grid(job, seeds, threads=threads, progress=progress)
    seed_list = range(seeds)
    la, lb = spec_a.label, spec_b.label

    win_rows, ratio_rows, best_rows = [], [], []
    for kind in kinds:
        for t in milestones:
            rate, used = harness.win_rate(results, kind, la, lb, job.lr_grid,
                                          seed_list, t, milestone_mode)
            win_rows.append([kind, t, la, lb, rate, used])
            mean, half = harness.ratio_stats(results, kind, la, lb, job.lr_grid,
                                             seed_list, t, milestone_mode)
            ratio_rows.append([kind, t, mean, half])
        for label in (la, lb):
            for seed in seed_list:
                by_lr = {lr: results[(kind, label, lr, seed)] for lr in job.lr_grid}
                vals = harness.milestone_values(by_lr, milestones, milestone_mode)
                best_rows.extend([kind, label, t, seed, vals[t]] for t in milestones)
    csvio.write_csv(f"{out_dir}/winrates.csv",
                    ["kind", "milestone", "method_a", "method_b", "win_rate", "n_seeds"],
                    win_rows)
    csvio.write_csv(f"{out_dir}/ratios.csv",
                    ["kind", "milestone", "mean", "half_width"], ratio_rows)
    csvio.write_csv(f"{out_dir}/bestloss.csv",
                    ["kind", "method", "milestone", "seed", "best_loss"], best_rows)

    if track_stationarity:
        stat_rows = []
        for (kind, label, lr, seed), entry in sorted(results.items()):
            if "stationarity" in entry:
                lhs, rhs, holds = entry["stationarity"]
                stat_rows.append([kind, lr, seed, lr, lhs, rhs, int(holds)])
        csvio.write_csv(f"{out_dir}/stationarity.csv",
                        ["kind", "lr", "seed", "alpha", "lhs", "rhs", "holds"],
                        stat_rows)

    _write_spectra(out_dir, kinds, n, base_seed)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, preset, base_seed, lr_grid=lr_grid, T=T, n=n, seeds=seeds,
              schedule={"a": spec_a.schedule.kind, "b": spec_b.schedule.kind},
              extra={"milestone_mode": milestone_mode, "milestones": list(milestones),
                     "method_a": spec_a.to_json(), "method_b": spec_b.to_json(),
                     "runtime_seconds": runtime})
    return {"runs": len(results), "rows": len(win_rows), "runtime_seconds": runtime}


def run_table1(out_dir, base_seed=0, seeds=DEFAULT_SEEDS, T=DEFAULT_T,
               lr_grid=DEFAULT_LR_GRID, kinds=SPECTRUM_KINDS, threads=1,
               milestone_mode="per-t", schedule="constant", progress=None):
    """Exact-projection orthogonalized update (no momentum) vs GD."""
    spec_a = _spec(schedule_kind=schedule, T=T)
    spec_b = _spec(method="gd", schedule_kind="constant", T=T)
    return _comparison_preset("table1_exact_vs_gd", out_dir, base_seed, spec_a, spec_b,
                              kinds=kinds, seeds=seeds, T=T, lr_grid=lr_grid,
                              threads=threads, milestone_mode=milestone_mode,
                              track_stationarity=(schedule == "constant"),
                              progress=progress)


def run_table2(out_dir, base_seed=0, seeds=DEFAULT_SEEDS, T=DEFAULT_T,
               lr_grid=DEFAULT_LR_GRID, kinds=SPECTRUM_KINDS, threads=1,
               milestone_mode="per-t", schedule="constant", progress=None):
    """Polynomial (approximate) projection vs exact projection, no momentum."""
    spec_a = _spec(projection="polar_express", schedule_kind=schedule, T=T)
    spec_b = _spec(projection="exact", schedule_kind=schedule, T=T)
    return _comparison_preset("table2_ns_vs_exact", out_dir, base_seed, spec_a, spec_b,
                              kinds=kinds, seeds=seeds, T=T, lr_grid=lr_grid,
                              threads=threads, milestone_mode=milestone_mode,
                              progress=progress)


#: Loss floor at which the runaway method's bars are clipped (fig 2 rule).
BARS_CLIP_FLOOR = 1e-5
BARS_CLIP_KEY = ("gd", "max_spiked")


def run_fig2(out_dir, base_seed=0, seeds=DEFAULT_SEEDS, T=DEFAULT_T,
             lr_grid=DEFAULT_LR_GRID, kinds=SPECTRUM_KINDS, threads=1,
             schedule="constant", progress=None, **_):
    """Orders-of-magnitude loss decrease bars per spectrum family."""
    t0 = time.perf_counter()
    spec_a = _spec(schedule_kind=schedule, T=T)
    spec_b = _spec(method="gd", schedule_kind="constant", T=T)
    job = harness.GridJob(base_seed=base_seed, n=DEFAULT_N, T=T, lr_grid=tuple(lr_grid),
                          kinds=tuple(kinds), specs=(spec_a, spec_b))
    results = harness.run_grid(job, seeds, threads=threads, progress=progress)
    rows = []
    for kind in kinds:
        for label in (spec_a.label, spec_b.label):
            floor = BARS_CLIP_FLOOR if (label, kind) == BARS_CLIP_KEY else None
            l0, best, orders = harness.improvement_orders(
                results, kind, label, job.lr_grid, range(seeds), T, clip_floor=floor)
            rows.append([kind, label, l0, best, orders])
    csvio.write_csv(f"{out_dir}/bars.csv",
                    ["kind", "method", "initial_loss", "final_best_loss", "orders"],
                    rows)
    _write_spectra(out_dir, kinds, DEFAULT_N, base_seed)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, "fig2_bars", base_seed, lr_grid=lr_grid, T=T, n=DEFAULT_N,
              seeds=seeds, schedule=schedule,
              extra={"clip_floor": BARS_CLIP_FLOOR, "clip_key": list(BARS_CLIP_KEY),
                     "runtime_seconds": runtime})
    return {"runs": len(results), "rows": len(rows), "runtime_seconds": runtime}


def run_fig3(out_dir, base_seed=0, seeds=DEFAULT_SEEDS, T=DEFAULT_T,
             lr_grid=DEFAULT_LR_GRID, kinds=("min_spiked", "max_spiked"), threads=1,
             schedule="constant", progress=None, **_):
    """Median + central-95% loss trajectories of the best-lr runs."""
    t0 = time.perf_counter()
    specs = (
        _spec(method="gd", schedule_kind="constant", T=T),
        _spec(method="adam", schedule_kind="constant", T=T),
        _spec(projection="exact", schedule_kind=schedule, T=T),
        _spec(projection="polar_express", schedule_kind=schedule, T=T),
    )
    job = harness.GridJob(base_seed=base_seed, n=DEFAULT_N, T=T, lr_grid=tuple(lr_grid),
                          kinds=tuple(kinds), specs=specs)
    results = harness.run_grid(job, seeds, threads=threads, progress=progress)
    rows = []
    for kind in kinds:
        for spec in specs:
            curves = harness.best_loss_curves(results, kind, spec.label,
                                              job.lr_grid, range(seeds))
            med, lo, hi = harness.curve_quantiles(curves)
            rows.extend([kind, spec.label, t, med[t], lo[t], hi[t]]
                        for t in range(T + 1))
    csvio.write_csv(f"{out_dir}/trajectories.csv",
                    ["kind", "method", "step", "loss_median", "loss_q025", "loss_q975"],
                    rows)
    _write_spectra(out_dir, kinds, DEFAULT_N, base_seed)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, "fig3_avg_trajectories", base_seed, lr_grid=lr_grid, T=T,
              n=DEFAULT_N, seeds=seeds, schedule=schedule,
              extra={"methods": [s.label for s in specs], "runtime_seconds": runtime})
    return {"runs": len(results), "rows": len(rows), "runtime_seconds": runtime}


def _sigma_sweep_preset(preset, out_dir, base_seed, grid, n_samples, progress=None):
    t0 = time.perf_counter()
    config = sign_dynamics.f1_config(n_samples=n_samples)
    summaries = sign_dynamics.sigma_sweep(config, grid, base_seed)
    rows = sign_dynamics.summaries_to_rows(summaries)
    csvio.write_csv(f"{out_dir}/hitting.csv",
                    ["sigma", "median", "q025", "q975", "frac_capped", "baseline",
                     "n_samples", "seed"],
                    rows)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, preset, base_seed, n=None, T=config.n_max,
              seeds=n_samples, schedule=None,
              extra={"alpha": config.alpha, "eps": config.eps, "s0": config.s0,
                     "eps_convention": config.eps_convention,
                     "sigma_grid": [float(s) for s in grid],
                     "runtime_seconds": runtime})
    return {"runs": len(grid) * n_samples, "rows": len(rows), "runtime_seconds": runtime}


def run_fig4(out_dir, base_seed=0, seeds=None, progress=None, **_):
    """Median hitting time vs noise level on the reference 1-D preset."""
    n_samples = seeds if seeds else 10_000
    return _sigma_sweep_preset("fig4_median_hitting", out_dir, base_seed,
                               list(sign_dynamics.F1_SIGMA_GRID), n_samples, progress)


def run_appF(out_dir, base_seed=0, seeds=None, progress=None, **_):
    """Denser noise grid over the same 1-D preset."""
    n_samples = seeds if seeds else 10_000
    grid = [float(s) for s in np.logspace(-3.0, 1.0, 49)]
    return _sigma_sweep_preset("appF_sigma_sweep", out_dir, base_seed, grid,
                               n_samples, progress)


FIG5_KAPPA = 1e3


def run_fig5(out_dir, base_seed=0, seeds=DEFAULT_SEEDS, T=100, threads=1,
             progress=None, **_):
    """Greedy direction policy vs line-search GD on the spiked instance.

    One shared problem (A = Q diag(1, ..., 1, kappa) Q^T), seeds vary only
    the initialization.
    """
    t0 = time.perf_counter()
    n = DEFAULT_N
    problem = line_search.counterexample_instance(
        n, FIG5_KAPPA, RandomStream(derive_seed(base_seed, _PURPOSE_FIG5_PROBLEM)))
    rows = []
    per_policy = {"gd_ls": {}, "greedy": {}}
    with harness.single_threaded_blas():
        for seed in range(seeds):
            W0 = line_search.init_matrix(
                n, RandomStream(derive_seed(base_seed,
                                            (_PURPOSE_FIG5_INIT << 32) | seed)))
            gd, greedy = line_search.run_linesearch_comparison(problem, W0, T, seed=seed)
            for run in (gd, greedy):
                per_policy[run.policy][seed] = run
                for t in range(T + 1):
                    rows.append([run.policy, seed, t, run.gap[t], run.grad_norm[t],
                                 run.dist[t], run.chosen[t] if t < T else ""])
            if progress:
                progress(seed + 1, seeds)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    csvio.write_csv(f"{out_dir}/linesearch.csv",
                    ["policy", "seed", "step", "gap", "grad_norm", "dist", "chosen"],
                    rows)

    summary_rows = []
    for policy in ("gd_ls", "greedy"):
        runs = per_policy[policy]
        quants = {}
        for name in ("gap", "grad_norm", "dist"):
            stack = np.stack([np.asarray(getattr(runs[s], name)) for s in sorted(runs)])
            quants[name] = np.quantile(stack, [0.5, 0.025, 0.975], axis=0)
        for t in range(T + 1):
            summary_rows.append([
                policy, t,
                quants["gap"][0][t], quants["gap"][1][t], quants["gap"][2][t],
                quants["grad_norm"][0][t], quants["grad_norm"][1][t], quants["grad_norm"][2][t],
                quants["dist"][0][t], quants["dist"][1][t], quants["dist"][2][t],
            ])
    csvio.write_csv(f"{out_dir}/linesearch_summary.csv",
                    ["policy", "step",
                     "gap_median", "gap_q025", "gap_q975",
                     "gnorm_median", "gnorm_q025", "gnorm_q975",
                     "dist_median", "dist_q025", "dist_q975"],
                    summary_rows)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, "fig5_greedy", base_seed, T=T, n=n, seeds=seeds,
              schedule=None,
              extra={"kappa": FIG5_KAPPA, "runtime_seconds": runtime})
    return {"runs": 2 * seeds, "rows": len(rows), "runtime_seconds": runtime}


def run_appD_vanishing(out_dir, base_seed=0, seeds=DEFAULT_SEEDS, T=DEFAULT_T,
                       lr_grid=DEFAULT_LR_GRID, kinds=SPECTRUM_KINDS, threads=1,
                       milestone_mode="per-t", progress=None, **_):
    """Cosine-annealed update variants vs constant-lr GD win rates."""
    t0 = time.perf_counter()
    milestones = (max(1, T // 10), max(1, T // 2), T)
    gd = _spec(method="gd", schedule_kind="constant", T=T)
    variants = (
        _spec(projection="exact", momentum="none", schedule_kind="cosine", T=T),
        _spec(projection="exact", momentum="nesterov", schedule_kind="cosine", T=T),
        _spec(projection="polar_express", momentum="none", schedule_kind="cosine", T=T),
        _spec(projection="polar_express", momentum="nesterov", schedule_kind="cosine", T=T),
    )
    job = harness.GridJob(base_seed=base_seed, n=DEFAULT_N, T=T, lr_grid=tuple(lr_grid),
                          kinds=tuple(kinds), specs=variants + (gd,))
    results = harness.run_grid(job, seeds, threads=threads, progress=progress)
    win_rows = []
    for spec in variants:
        for kind in kinds:
            for t in milestones:
                rate, used = harness.win_rate(results, kind, spec.label, gd.label,
                                              job.lr_grid, range(seeds), t,
                                              milestone_mode)
                win_rows.append([kind, t, spec.label, gd.label, rate, used])
    csvio.write_csv(f"{out_dir}/winrates.csv",
                    ["kind", "milestone", "method_a", "method_b", "win_rate", "n_seeds"],
                    win_rows)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, "appD_vanishing_lr", base_seed, lr_grid=lr_grid, T=T,
              n=DEFAULT_N, seeds=seeds, schedule="cosine",
              extra={"methods": [s.label for s in variants],
                     "milestone_mode": milestone_mode, "runtime_seconds": runtime})
    return {"runs": len(results), "rows": len(win_rows), "runtime_seconds": runtime}


def run_appD6(out_dir, base_seed=0, seeds=20, T=DEFAULT_T, lr_grid=DEFAULT_LR_GRID,
              kinds=SPECTRUM_KINDS, threads=1, progress=None, **_):
    """Gradient condition numbers along best-lr GD and orthogonalized runs.

    Defaults to 20 seeds: every logged step pays a full SVD, and the
    output is a diagnostic profile rather than a gated table.
    """
    t0 = time.perf_counter()
    specs = (_spec(method="gd", T=T), _spec(projection="exact", T=T))
    job = harness.GridJob(base_seed=base_seed, n=DEFAULT_N, T=T, lr_grid=tuple(lr_grid),
                          kinds=tuple(kinds), specs=specs, track_grad_cond=True)
    results = harness.run_grid(job, seeds, threads=threads, progress=progress)
    rows = []
    for kind in kinds:
        for spec in specs:
            traces = []
            for seed in range(seeds):
                by_lr = {lr: results[(kind, spec.label, lr, seed)] for lr in job.lr_grid}
                lr, _ = harness.best_lr_curve(by_lr)
                traces.append(np.asarray(by_lr[lr]["grad_cond"]))
            stack = np.stack(traces)
            q = np.quantile(stack, [0.5, 0.025, 0.975], axis=0)
            rows.extend([kind, spec.label, t, q[0][t], q[1][t], q[2][t]]
                        for t in range(T))
    csvio.write_csv(f"{out_dir}/gradcond.csv",
                    ["kind", "method", "step", "cond_median", "cond_q025", "cond_q975"],
                    rows)
    runtime = time.perf_counter() - t0
    _metadata(out_dir, "appD6_grad_conditioning", base_seed, lr_grid=lr_grid, T=T,
              n=DEFAULT_N, seeds=seeds, schedule="constant",
              extra={"runtime_seconds": runtime})
    return {"runs": len(results), "rows": len(rows), "runtime_seconds": runtime}


PRESETS = {
    "table1_exact_vs_gd": (run_table1,
                           "win rates + loss ratios, exact projection vs GD (table 1)"),
    "table2_ns_vs_exact": (run_table2,
                           "win rates + loss ratios, polynomial vs exact projection (table 2)"),
    "fig2_bars": (run_fig2, "orders-of-magnitude loss decrease bars (fig 2)"),
    "fig3_avg_trajectories": (run_fig3,
                              "median loss trajectories with 95% bands (fig 3)"),
    "fig4_median_hitting": (run_fig4,
                            "median 1-D hitting time vs noise level (fig 4)"),
    "fig5_greedy": (run_fig5,
                    "greedy direction policy vs line-search GD (fig 5 / fig 7)"),
    "appD_vanishing_lr": (run_appD_vanishing,
                          "cosine-annealed variants vs GD win rates (appendix ablation)"),
    "appD6_grad_conditioning": (run_appD6,
                                "gradient condition numbers along training (appendix diagnostics)"),
    "appF_sigma_sweep": (run_appF,
                         "denser noise grid for the 1-D hitting sweep (appendix)"),
}


class UnknownPresetError(ValueError):
    """Preset name not in the registry."""


def run_preset(name, out_dir, base_seed=0, **kwargs):
    if name not in PRESETS:
        raise UnknownPresetError(f"unknown preset {name!r}")
    fn, _ = PRESETS[name]
    return fn(out_dir, base_seed=base_seed, **kwargs)


def list_presets() -> str:
    lines = [f"{name}: {desc}" for name, (_, desc) in PRESETS.items()]
    return "\n".join(lines)
