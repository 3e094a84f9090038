"""Experiment grids: runs, best-lr selection, win rates, ratios.

A grid is a pure map over (spectrum kind, seed) cells; each cell
regenerates its problem and initialization from derived sub-streams and
runs every (method, lr) combination on them, so methods are always
compared on identical instances. Assembly sorts by key before writing,
making CSV output independent of worker count and execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .optimizers import run_trajectory, stationarity_bound_check
from .problems import SPECTRUM_KINDS, SpectrumSpec, build_problem
from .rng import RandomStream, derive_seed

#: Purpose tags for sub-stream derivation within one (kind, seed) cell.
_PURPOSE_PROBLEM = 1
_PURPOSE_INIT = 2


class AllDivergedError(RuntimeError):
    """Every learning rate diverged for a (method, seed) key."""


class KeyMissingError(KeyError):
    """A requested (kind, method, lr, seed) run is absent."""


@contextmanager
def single_threaded_blas():
    """Pin BLAS pools to one thread; keeps output identical across worker
    counts and avoids oversubscription (the matrices are tiny anyway)."""
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        yield
        return
    with threadpool_limits(limits=1):
        yield


@dataclass(frozen=True)
class GridJob:
    """Everything a worker needs to run one (kind, seed) cell.

    By default one problem instance is drawn per spectrum family and the
    seed index varies only the initialization, mirroring the reference
    protocol ("for each fixed quadratic, sample 100 initializations").
    Set problem_per_seed=True to redraw the instance for every seed.
    """

    base_seed: int
    n: int
    T: int
    lr_grid: tuple
    kinds: tuple
    specs: tuple  # OptimizerSpec templates; lr0 is overridden per grid value
    s_min: float = 1e-3
    s_max: float = 10.0
    problem_per_seed: bool = False
    track_stationarity: bool = False
    track_grad_cond: bool = False


def _kind_index(kind: str) -> int:
    return SPECTRUM_KINDS.index(kind)


def _cell_run_index(kind: str, seed_idx: int, purpose: int) -> int:
    return ((_kind_index(kind) + 1) << 44) | ((seed_idx + 1) << 4) | purpose


def problem_stream_seed(base_seed: int, kind: str, instance: int = 0) -> int:
    """Seed of the stream that generates a problem instance of this kind."""
    return derive_seed(base_seed, _cell_run_index(kind, instance, _PURPOSE_PROBLEM))


def cell_problem(job: GridJob, kind: str, seed_idx: int):
    spec = SpectrumSpec(kind=kind, n=job.n, s_min=job.s_min, s_max=job.s_max)
    instance = seed_idx if job.problem_per_seed else 0
    stream = RandomStream(problem_stream_seed(job.base_seed, kind, instance))
    return build_problem(spec, stream)


def cell_init(job: GridJob, kind: str, seed_idx: int) -> np.ndarray:
    stream = RandomStream(derive_seed(job.base_seed,
                                      _cell_run_index(kind, seed_idx, _PURPOSE_INIT)))
    return (1.0 / np.sqrt(job.n)) * stream.standard_normal((job.n, job.n))


def _run_cell(args):
    """Run all (spec, lr) combinations for one (kind, seed) cell."""
    job, kind, seed_idx = args
    with single_threaded_blas():
        problem = cell_problem(job, kind, seed_idx)
        W0 = cell_init(job, kind, seed_idx)
        out = {}
        for spec in job.specs:
            track_stat = (job.track_stationarity and spec.method == "muon"
                          and spec.projection == "exact"
                          and spec.momentum == "none"
                          and spec.schedule.kind == "constant")
            for lr in job.lr_grid:
                s = spec.with_lr(lr)
                rec = run_trajectory(
                    problem, W0, s, job.T, seed=seed_idx,
                    log_grad_norms=track_stat,
                    log_grad_cond=job.track_grad_cond,
                )
                entry = {
                    "losses": rec.losses,
                    "diverged": rec.diverged,
                }
                if track_stat:
                    lhs, rhs, holds = stationarity_bound_check(
                        rec, lips=job.s_max, d=min(problem.W_star.shape), alpha=lr)
                    entry["stationarity"] = (lhs, rhs, holds)
                if job.track_grad_cond:
                    entry["grad_cond"] = rec.grad_cond
                out[(spec.label, lr)] = entry
    return kind, seed_idx, out


def run_grid(job: GridJob, n_seeds: int, threads: int = 1, progress=None) -> dict:
    """Map the grid; returns {(kind, label, lr, seed): run entry}.

    With threads <= 1 everything runs inline in this process; otherwise a
    process pool is used. Results are identical either way.
    """
    tasks = [(job, kind, s) for kind in job.kinds for s in range(n_seeds)]
    results = {}
    done = 0

    def absorb(kind, seed_idx, out):
        nonlocal done
        for (label, lr), entry in out.items():
            results[(kind, label, lr, seed_idx)] = entry
        done += 1
        if progress:
            progress(done, len(tasks))

    if threads <= 1:
        for t in tasks:
            absorb(*_run_cell(t))
    else:
        chunk = max(1, len(tasks) // (8 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for kind, seed_idx, out in pool.map(_run_cell, tasks, chunksize=chunk):
                absorb(kind, seed_idx, out)
    return results


def running_min(losses: np.ndarray) -> np.ndarray:
    return np.minimum.accumulate(losses)


def best_lr_curve(runs_by_lr: dict) -> tuple[float, np.ndarray]:
    """Select the lr whose run attains the smallest loss up to the horizon.

    runs_by_lr maps lr -> run entry with "losses" and "diverged". Diverged
    runs never participate. Returns (lr, running-min curve); ties break
    toward the larger lr for determinism.
    """
    best = None
    for lr in sorted(runs_by_lr, reverse=True):
        entry = runs_by_lr[lr]
        if entry["diverged"]:
            continue
        rm = running_min(entry["losses"])
        if best is None or rm[-1] < best[1][-1]:
            best = (lr, rm)
    if best is None:
        raise AllDivergedError("all learning rates diverged for this key")
    return best


def milestone_values(runs_by_lr: dict, milestones, mode: str = "per-t") -> dict:
    """Best loss up to each milestone t.

    mode "horizon": one lr is chosen on the full horizon and its
    running-min curve is read at each t. mode "per-t": the lr is
    re-selected at every milestone.
    """
    if mode == "horizon":
        _, rm = best_lr_curve(runs_by_lr)
        return {t: float(rm[t]) for t in milestones}
    if mode != "per-t":
        raise ValueError(f"unknown milestone mode {mode!r}")
    curves = [running_min(e["losses"]) for e in runs_by_lr.values() if not e["diverged"]]
    if not curves:
        raise AllDivergedError("all learning rates diverged for this key")
    return {t: float(min(c[t] for c in curves)) for t in milestones}


def _paired_values(results, kind, label_a, label_b, lr_grid, seeds, milestones, mode):
    """Per-seed milestone values for both methods on shared instances.

    Seeds for which either method has all learning rates diverged are
    dropped from the comparison (and counted by callers via len()).
    """
    pairs = {}
    for seed in seeds:
        try:
            by_lr_a = {lr: results[(kind, label_a, lr, seed)] for lr in lr_grid}
            by_lr_b = {lr: results[(kind, label_b, lr, seed)] for lr in lr_grid}
        except KeyError as exc:
            raise KeyMissingError(str(exc)) from exc
        try:
            va = milestone_values(by_lr_a, milestones, mode)
            vb = milestone_values(by_lr_b, milestones, mode)
        except AllDivergedError:
            continue
        pairs[seed] = (va, vb)
    return pairs


def win_rate(results, kind, label_a, label_b, lr_grid, seeds, milestone,
             mode: str = "per-t") -> tuple[float, int]:
    """Fraction of paired seeds where A's best loss beats B's at milestone."""
    pairs = _paired_values(results, kind, label_a, label_b, lr_grid, seeds,
                           (milestone,), mode)
    if len(pairs) < 2:
        raise AllDivergedError(f"fewer than 2 comparable seeds for {kind}")
    wins = sum(1 for va, vb in pairs.values() if va[milestone] < vb[milestone])
    return wins / len(pairs), len(pairs)


def ratio_stats(results, kind, label_a, label_b, lr_grid, seeds, milestone,
                mode: str = "per-t") -> tuple[float, float]:
    """Mean and 1.96 SE of per-seed best-loss ratios B/A (>1 favors A)."""
    pairs = _paired_values(results, kind, label_a, label_b, lr_grid, seeds,
                           (milestone,), mode)
    if len(pairs) < 2:
        raise AllDivergedError(f"fewer than 2 comparable seeds for {kind}")
    ratios = np.array([vb[milestone] / va[milestone] for va, vb in pairs.values()])
    half = 1.96 * float(np.std(ratios, ddof=1)) / np.sqrt(len(ratios))
    return float(np.mean(ratios)), half


def improvement_orders(results, kind, label, lr_grid, seeds, horizon,
                       clip_floor: float | None = None) -> tuple[float, float, float]:
    """(mean initial loss, mean final best loss, mean orders of decrease).

    orders = log10(L0 / best), with best clamped at clip_floor when given
    (the plot-compatibility rule for runaway methods).
    """
    l0s, bests = [], []
    for seed in seeds:
        by_lr = {lr: results[(kind, label, lr, seed)] for lr in lr_grid}
        _, rm = best_lr_curve(by_lr)
        best = float(rm[horizon])
        if clip_floor is not None:
            best = max(best, clip_floor)
        l0s.append(float(by_lr[lr_grid[0]]["losses"][0]))
        bests.append(best)
    l0s = np.array(l0s)
    bests = np.array(bests)
    orders = np.log10(l0s / np.maximum(bests, 1e-300))
    return float(np.mean(l0s)), float(np.mean(bests)), float(np.mean(orders))


def best_loss_curves(results, kind, label, lr_grid, seeds) -> dict[int, np.ndarray]:
    """Per-seed raw loss curve of the best-lr run (for trajectory plots)."""
    out = {}
    for seed in seeds:
        by_lr = {lr: results[(kind, label, lr, seed)] for lr in lr_grid}
        lr, _ = best_lr_curve(by_lr)
        out[seed] = by_lr[lr]["losses"]
    return out


def curve_quantiles(curves: dict[int, np.ndarray]):
    """(median, q025, q975) arrays across seeds, per step."""
    stack = np.stack([curves[s] for s in sorted(curves)])
    q = np.quantile(stack, [0.5, 0.025, 0.975], axis=0)
    return q[0], q[1], q[2]
