"""Synthetic, schema-conforming results directory for renderer tests."""

import math

import pytest

KINDS = ("max_spiked", "min_spiked", "uniform")


def _write(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


@pytest.fixture()
def results_dir(tmp_path):
    d = tmp_path / "results"
    d.mkdir()

    rows = []
    for k, kind in enumerate(KINDS):
        for i in range(50):
            rows.append([kind, i, 10.0 * (0.9 ** (i + k)) + 1e-3])
    _write(d / "spectra.csv", ["kind", "index", "eigenvalue"], rows)

    bars = []
    for k, kind in enumerate(KINDS):
        bars.append([kind, "gd", 450.0, 450.0 * 10 ** -(2 + 3 * k), 2.0 + 3 * k])
        bars.append([kind, "muon_exact", 450.0, 450.0 * 1e-4, 4.0])
    # gd on max_spiked: final below 1e-5 of initial -> clipped at 8 orders
    bars[0] = ["max_spiked", "gd", 450.0, 450.0 * 1e-9, 9.0]
    _write(d / "bars.csv",
           ["kind", "method", "initial_loss", "final_best_loss", "orders"], bars)

    traj = []
    for kind in KINDS[:2]:
        for method in ("gd", "muon_exact"):
            for t in range(0, 21):
                med = 100.0 * math.exp(-0.3 * t) + 1e-4
                if method == "gd" and kind == "min_spiked":
                    # empty optional band columns: line rendered without band
                    traj.append([kind, method, t, med, "", ""])
                else:
                    traj.append([kind, method, t, med, med * 0.5, med * 2.0])
    _write(d / "trajectories.csv",
           ["kind", "method", "step", "loss_median", "loss_q025", "loss_q975"],
           traj)

    hit = []
    sigmas = [1e-3, 1e-2, 1e-1, 1.0, 10.0]
    medians = [1000, 600, 15, 40, 300]
    for s, m in zip(sigmas, medians):
        hit.append([s, m, max(m * 0.5, 1), min(m * 2.0, 1000), 0.1, 11, 100, 7])
    _write(d / "hitting.csv",
           ["sigma", "median", "q025", "q975", "frac_capped", "baseline",
            "n_samples", "seed"], hit)

    ls = []
    for policy, rate in (("gd_ls", 0.5), ("greedy", 0.05)):
        for t in range(0, 16):
            g = 10.0 * math.exp(-rate * t)
            ls.append([policy, t, g, g * 0.8, g * 1.2,
                       g * 0.3, g * 0.2, g * 0.4,
                       g * 2.0, g * 1.5, g * 2.5])
    _write(d / "linesearch_summary.csv",
           ["policy", "step", "gap_median", "gap_q025", "gap_q975",
            "gnorm_median", "gnorm_q025", "gnorm_q975",
            "dist_median", "dist_q025", "dist_q975"], ls)
    return d
