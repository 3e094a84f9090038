"""Acceptance gate: full-scale reproduction criteria.

Each test covers one criterion at its stated tolerance and prints one
[PASS]/[FAIL] line. The heavy preset runs (n=100, T=500, 100 seeds) come
from session fixtures in conftest.py, so the grid is computed once.
"""

import math
import time

import numpy as np

from muonlab.csvio import read_csv
from muonlab.linalg import haar_orthogonal, polar_factor
from muonlab.optimizers import (
    POLAR_EXPRESS_COEFFS,
    OptimizerSpec,
    Schedule,
    polar_express,
    run_trajectory,
)
from muonlab.problems import (
    SpectrumSpec,
    build_problem,
    gradient,
    isotropic_problem,
    loss,
)
from muonlab.line_search import (
    counterexample_instance,
    exact_step_size,
    greedy_step,
    init_matrix,
    one_step_decrease,
)
from muonlab.presets import _PURPOSE_FIG5_INIT, _PURPOSE_FIG5_PROBLEM, FIG5_KAPPA
from muonlab.rng import RandomStream, derive_seed
from muonlab.sign_dynamics import f1_config, simulate_hitting_times

from conftest import ACCEPTANCE_SEED

MILESTONES = {"t10": "50", "t50": "250", "T": "500"}


def report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def _win_table(path):
    _, rows = read_csv(path)
    table = {}
    for r in rows:
        table[(r["kind"], r["milestone"])] = float(r["win_rate"])
    return table


def _ratio_table(path):
    _, rows = read_csv(path)
    return {(r["kind"], r["milestone"]): float(r["mean"]) for r in rows}


def test_criterion_table1_win_rates(table1_dir):
    """Exact-projection updates vs GD: binary win pattern across spectra."""
    wins = _win_table(table1_dir / "winrates.csv")
    failures = []
    for kind in ("min_spiked", "geometric_decay_to_max"):
        for t in ("50", "250", "500"):
            if wins[(kind, t)] != 1.0:
                failures.append(f"{kind}@{t}={wins[(kind, t)]}")
    for kind in ("max_spiked", "uniform", "gaussian", "linear_decay_to_max"):
        for t in ("50", "250", "500"):
            if wins[(kind, t)] != 0.0:
                failures.append(f"{kind}@{t}={wins[(kind, t)]}")
    # u_shaped flips at the last milestone; +-0.1 tolerance there only
    for t in ("50", "250"):
        if wins[("u_shaped", t)] != 0.0:
            failures.append(f"u_shaped@{t}={wins[('u_shaped', t)]}")
    if not (wins[("u_shaped", "500")] >= 0.9):
        failures.append(f"u_shaped@500={wins[('u_shaped', '500')]}")

    # binary-family stability: disjoint 50-seed halves agree exactly
    _, rows = read_csv(table1_dir / "bestloss.csv")
    best = {}
    for r in rows:
        best[(r["kind"], r["method"], r["milestone"], int(r["seed"]))] = \
            float(r["best_loss"])
    for kind in ("min_spiked", "uniform", "gaussian", "geometric_decay_to_max"):
        for t in ("50", "250", "500"):
            halves = []
            for lo, hi in ((0, 50), (50, 100)):
                w = np.mean([best[(kind, "muon_exact", t, s)]
                             < best[(kind, "gd", t, s)] for s in range(lo, hi)])
                halves.append(w)
            if halves[0] != halves[1]:
                failures.append(f"half-split {kind}@{t}: {halves}")
    ok = report("table1 win rates", not failures,
                "pattern matches, 50-seed halves agree"
                if not failures else "; ".join(failures))
    assert ok


def test_criterion_ratio_magnitudes(table1_dir):
    """Best-loss ratio magnitudes at t=T for three reference families."""
    ratios = _ratio_table(table1_dir / "ratios.csv")
    checks = {
        "min_spiked>=100": ratios[("min_spiked", "500")] >= 100,
        "geometric in [20,300]": 20 <= ratios[("geometric_decay_to_max", "500")] <= 300,
        "uniform<=0.1": ratios[("uniform", "500")] <= 0.1,
    }
    detail = (f"min_spiked={ratios[('min_spiked', '500')]:.1f} "
              f"geometric={ratios[('geometric_decay_to_max', '500')]:.1f} "
              f"uniform={ratios[('uniform', '500')]:.3f}")
    ok = report("ratio magnitudes", all(checks.values()),
                detail + "".join(f" [{k} fails]" for k, v in checks.items() if not v))
    assert ok


def test_criterion_table2_ns_vs_exact(table2_dir):
    """Polynomial projection vs exact projection win rates."""
    wins = _win_table(table2_dir / "winrates.csv")
    failures = []
    if wins[("min_spiked", "500")] < 0.8:
        failures.append(f"min_spiked@500={wins[('min_spiked', '500')]}")
    if wins[("max_spiked", "500")] < 0.7:
        failures.append(f"max_spiked@500={wins[('max_spiked', '500')]}")
    for kind in ("uniform", "gaussian", "linear_decay_to_max", "u_shaped",
                 "geometric_decay_to_max"):
        for t in ("50", "250"):
            if wins[(kind, t)] > 0.1:
                failures.append(f"{kind}@{t}={wins[(kind, t)]}")
    ok = report("table2 NS vs exact", not failures,
                "pattern matches" if not failures else "; ".join(failures))
    assert ok


def test_criterion_grid_confinement():
    """Pre-projection momentum modes stay on the singular-value lattice."""
    t0 = time.perf_counter()
    stream = RandomStream(202)
    d = 3
    p = isotropic_problem(d)
    worst = 0.0
    for case in range(100):
        alpha = 0.02 + 0.25 * float(stream.random(()))
        s0 = 0.2 + stream.random(d)
        U = haar_orthogonal(d, stream)
        V = haar_orthogonal(d, stream)
        W0 = (U * s0) @ V.T
        for momentum in ("none", "standard", "nesterov"):
            spec = OptimizerSpec(method="muon", projection="exact",
                                 momentum=momentum, mu=0.9,
                                 schedule=Schedule(kind="constant", lr0=alpha))
            rec = run_trajectory(p, W0, spec, 12, keep_iterates=True)
            for W in rec.iterates:
                for sigma in np.linalg.svd(W, compute_uv=False):
                    dist = min(
                        min(abs((sigma - s) % alpha), alpha - abs((sigma - s) % alpha))
                        for s in np.concatenate([s0, -s0]))
                    worst = max(worst, dist)
    confined = worst <= 1e-9

    # Orthogonal-SGDM measurably leaves the lattice
    spec = OptimizerSpec(method="muon", projection="exact", momentum="post",
                         mu=0.9, schedule=Schedule(kind="constant", lr0=0.1))
    rec = run_trajectory(isotropic_problem(1), np.array([[1.0]]), spec, 10,
                         keep_iterates=True)
    offs = []
    for W in rec.iterates:
        sigma = abs(W[0, 0])
        r = abs((sigma - 1.0) % 0.1)
        offs.append(min(r, 0.1 - r))
    escaped = max(offs) > 1e-6
    elapsed = time.perf_counter() - t0
    ok = report("grid confinement", confined and escaped and elapsed < 1.0,
                f"max lattice dist={worst:.2e}, post-projection max offset="
                f"{max(offs):.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_epsilon_dependence():
    """Cycle entry step, floor loss scaling, one-step GD solve."""
    stream = RandomStream(303)
    d = 6
    p = isotropic_problem(d)
    ok_cycle = True
    ok_floor = True
    for _ in range(20):
        alpha = 0.03 + 0.2 * float(stream.random(()))
        s0 = 0.3 + 2.0 * stream.random(d)
        U = haar_orthogonal(d, stream)
        V = haar_orthogonal(d, stream)
        spec = OptimizerSpec(method="muon", projection="exact", momentum="none",
                             schedule=Schedule(kind="constant", lr0=alpha))
        k = int(np.ceil(s0.max() / alpha))
        rec = run_trajectory(p, (U * s0) @ V.T, spec, k + 6, keep_iterates=True)
        # each scalar recursion flips sign exactly at ceil(s0_i / alpha)
        for s_init in s0:
            s = s_init
            flip = None
            for t in range(1, k + 7):
                s = s - alpha * np.sign(s)
                if flip is None and s < 0:
                    flip = t
            if flip != int(np.ceil(s_init / alpha)):
                ok_cycle = False
        # the slowest direction still sits above alpha two steps before entry
        if k >= 2:
            sv = np.linalg.svd(rec.iterates[k - 2], compute_uv=False)
            if sv.max() <= alpha:
                ok_cycle = False
        # from entry on, every singular value lies in the 2-cycle band
        for W in rec.iterates[k - 1:]:
            sv = np.linalg.svd(W, compute_uv=False)
            if not np.all(0.5 * sv**2 <= alpha**2 / 2 + 1e-12):
                ok_floor = False
    # GD with lr=1 solves the isotropic quadratic in one step
    W0 = stream.standard_normal((d, d))
    gd = OptimizerSpec(method="gd", schedule=Schedule(kind="constant", lr0=1.0))
    rec = run_trajectory(p, W0, gd, 1)
    ok_gd = rec.losses[1] <= 1e-20
    ok = report("epsilon dependence", ok_cycle and ok_floor and ok_gd,
                f"cycle entry at ceil(max|s0|/alpha), floor <= alpha^2/2, "
                f"one-step GD loss={rec.losses[1]:.1e}")
    assert ok


def test_criterion_stationarity_bound(table1_dir):
    """Descent-lemma inequality holds on every constant-step exact run."""
    _, rows = read_csv(table1_dir / "stationarity.csv")
    n_total = len(rows)
    n_hold = sum(r["holds"] == "1" for r in rows)
    margin = min(float(r["rhs"]) - float(r["lhs"]) for r in rows)
    ok = report("stationarity bound", n_hold == n_total and n_total >= 2100,
                f"{n_hold}/{n_total} runs hold, min margin={margin:.3e}")
    assert ok


def test_criterion_fig4_shape(fig4_dir):
    """Hitting-time sweep: slow endpoints, fast interior, non-monotone."""
    _, rows = read_csv(fig4_dir / "hitting.csv")
    med = [float(r["median"]) for r in rows]
    baseline = int(rows[0]["baseline"])
    runtime = float((fig4_dir / "runtime.txt").read_text())
    checks = {
        "left endpoint >= 900": med[0] >= 900,
        "right endpoint >= 900": med[-1] >= 900,
        "interior min <= 3x baseline": min(med) <= 3 * baseline,
        "non-monotone": any(
            med[i] > med[j] < med[k]
            for i in range(len(med)) for j in range(i + 1, len(med))
            for k in range(j + 1, len(med)) if med[j] <= 3 * baseline),
        "runtime < 120 s": runtime < 120.0,
    }
    detail = (f"medians: left={med[0]:.0f} min={min(med):.0f} right={med[-1]:.0f}, "
              f"baseline={baseline}, runtime={runtime:.1f}s")
    ok = report("fig4 shape", all(checks.values()),
                detail + "".join(f" [{k} fails]" for k, v in checks.items() if not v))
    assert ok


def test_criterion_propositions_statistical():
    """Reachability at moderate noise; slow hitting at extreme noise."""
    cfg = f1_config(sigma=0.3)
    times, hit = simulate_hitting_times(cfg, RandomStream(derive_seed(ACCEPTANCE_SEED, 71)))
    frac_hit = float(hit.mean())
    checks = {"sigma=0.3 hit>=0.95": frac_hit >= 0.95}
    details = [f"P(hit|0.3)={frac_hit:.4f}"]
    n_tail = 5 * cfg.baseline  # 55
    for sigma in (1e-3, 10.0):
        cfg_s = f1_config(sigma=sigma)
        times, _ = simulate_hitting_times(
            cfg_s, RandomStream(derive_seed(ACCEPTANCE_SEED, int(sigma * 1000))))
        p_tail = float((times > n_tail).mean())
        checks[f"sigma={sigma:g} P(T>55)>=0.9"] = p_tail >= 0.9
        details.append(f"P(T>55|{sigma:g})={p_tail:.4f}")
    ok = report("propositions 1-2", all(checks.values()),
                ", ".join(details)
                + "".join(f" [{k} fails]" for k, v in checks.items() if not v))
    assert ok


def test_criterion_fig5_counterexample(fig5_dir):
    """Greedy picks the polar step everywhere yet loses end to end."""
    _, rows = read_csv(fig5_dir / "linesearch.csv")
    greedy_steps = [r for r in rows if r["policy"] == "greedy" and r["chosen"]]
    frac_stiefel = np.mean([r["chosen"] == "stiefel" for r in greedy_steps])
    finals = {"gd_ls": [], "greedy": []}
    for r in rows:
        if r["step"] == "100":
            finals[r["policy"]].append(float(r["gap"]))
    med_gd = float(np.median(finals["gd_ls"]))
    med_greedy = float(np.median(finals["greedy"]))

    # replay a few trajectories to assert the per-step decrease comparison
    # directly: the polar step's exact line-search decrease dominates
    problem = counterexample_instance(
        100, FIG5_KAPPA,
        RandomStream(derive_seed(ACCEPTANCE_SEED, _PURPOSE_FIG5_PROBLEM)))
    dominance = True
    for seed in range(3):
        W = init_matrix(100, RandomStream(derive_seed(ACCEPTANCE_SEED,
                                                      (_PURPOSE_FIG5_INIT << 32) | seed)))
        for _ in range(100):
            g = gradient(problem, W)
            d_st = polar_factor(g)
            if one_step_decrease(problem, W, d_st) <= one_step_decrease(problem, W, g):
                dominance = False
                break
            W, _ = greedy_step(problem, W)
    checks = {
        "stiefel chosen at 100% of steps": frac_stiefel == 1.0,
        "delta(St) > delta(GD) along trajectory": dominance,
        "GD final gap 10x smaller": med_gd * 10 <= med_greedy,
    }
    ok = report("fig5 counterexample", all(checks.values()),
                f"stiefel fraction={frac_stiefel:.3f}, median final gap "
                f"gd={med_gd:.3e} greedy={med_greedy:.3e}"
                + "".join(f" [{k} fails]" for k, v in checks.items() if not v))
    assert ok


def test_criterion_oracle_equivalences():
    """Closed forms match brute-force oracles at stated tolerances."""
    stream = RandomStream(404)

    # exact step size vs dense scan (with parabolic vertex refinement)
    p = build_problem(SpectrumSpec("uniform", n=15), stream)
    ok_alpha = True
    for _ in range(3):
        W = stream.standard_normal((15, 15)) / 3.0
        D = gradient(p, W)
        a_star = exact_step_size(p, W, D)
        alphas = np.linspace(0.0, 2.5 * a_star, 100_000)
        vals = np.array([loss(p, W - a * D) for a in alphas])
        i = int(np.clip(np.argmin(vals), 1, len(alphas) - 2))
        f0, f1, f2 = vals[i - 1: i + 2]
        h = alphas[1] - alphas[0]
        a_grid = alphas[i] + 0.5 * h * (f0 - f2) / (f0 - 2 * f1 + f2)
        if abs(a_grid - a_star) > 1e-8 * abs(a_star):
            ok_alpha = False

    # gradient vs central finite differences
    ok_grad = True
    W = stream.standard_normal((15, 15)) / 3.0
    g = gradient(p, W)
    for _ in range(5):
        D = stream.standard_normal((15, 15))
        D /= np.linalg.norm(D)
        fd = (loss(p, W + 1e-6 * D) - loss(p, W - 1e-6 * D)) / 2e-6
        if abs(fd - float(np.vdot(g, D))) > 1e-5 * max(1.0, abs(fd)):
            ok_grad = False

    # polar express on diagonal inputs vs scalar polynomial composition
    ok_pe = True
    for _ in range(5):
        vals = 10.0 ** (stream.random(12) * 3 - 3)
        out = polar_express(np.diag(vals))
        x = vals / (1.02 * np.linalg.norm(vals) + 1e-6)
        for a, b, c in POLAR_EXPRESS_COEFFS:
            x = a * x + b * x**3 + c * x**5
        if np.abs(np.diag(out) - x).max() > 1e-10:
            ok_pe = False

    ok = report("oracle equivalences", ok_alpha and ok_grad and ok_pe,
                f"step-size scan={'ok' if ok_alpha else 'FAIL'}, "
                f"finite differences={'ok' if ok_grad else 'FAIL'}, "
                f"polar express scalar={'ok' if ok_pe else 'FAIL'}")
    assert ok


def test_table1_runtime_report(table1_dir):
    """Informational: wall time of the table1 grid on this machine.

    The 20-minute target assumes a multi-core laptop; the measured time is
    reported rather than asserted because it scales with the worker count.
    """
    import json
    import os
    doc = json.loads((table1_dir / "metadata.json").read_text())
    rt = doc.get("runtime_seconds", float("nan"))
    threads = os.environ.get("MUONLAB_THREADS", str(os.cpu_count() or 1))
    report("table1 runtime (target: <20 min parallelized on a laptop)", True,
           f"{rt:.0f}s with {threads} worker(s)")
    assert math.isfinite(rt)
