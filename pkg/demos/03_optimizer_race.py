"""GD, Adam, and orthogonalized updates on two spiked spectra.

min_spiked (one large eigenvalue, mass at the bottom) favors the
orthogonalized update; max_spiked (one small eigenvalue, mass at the top)
favors GD, despite both sharing the condition number 1e4. Learning rates
are tuned per method by the best loss reached within the budget.
"""

import numpy as np

from muonlab import RandomStream, SpectrumSpec, build_problem, run_trajectory
from muonlab.harness import best_lr_curve
from muonlab.optimizers import OptimizerSpec, Schedule

T = 300
n = 80
LR_GRID = (1e-1, 1e-2, 1e-3)

METHODS = {
    "gd": dict(method="gd"),
    "adam": dict(method="adam"),
    "muon_exact": dict(method="muon", projection="exact"),
    "muon_ns": dict(method="muon", projection="polar_express"),
}

for kind in ("min_spiked", "max_spiked"):
    stream = RandomStream(5)
    problem = build_problem(SpectrumSpec(kind, n=n), stream)
    W0 = stream.standard_normal((n, n)) / np.sqrt(n)
    print(f"\n{kind} (n={n}, T={T}), best-tuned losses:")
    print(f"  {'method':12s} {'best lr':>8s} {'loss@T/10':>12s} "
          f"{'loss@T/2':>12s} {'loss@T':>12s}")
    for name, kwargs in METHODS.items():
        runs = {}
        for lr in LR_GRID:
            spec = OptimizerSpec(schedule=Schedule(kind="constant", lr0=lr),
                                 **kwargs)
            rec = run_trajectory(problem, W0, spec, T)
            runs[lr] = {"losses": rec.losses, "diverged": rec.diverged}
        lr, rm = best_lr_curve(runs)
        print(f"  {name:12s} {lr:8g} {rm[T // 10]:12.4e} "
              f"{rm[T // 2]:12.4e} {rm[T]:12.4e}")
