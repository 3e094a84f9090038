"""Grid confinement of exact-projection updates on 0.5 ||W||_F^2.

With exact polar projection and a constant step, every singular value
moves by exactly +-alpha per step, so iterates stay on the lattice
s0 + alpha Z, enter a 2-cycle after ceil(|s0|/alpha) steps, and never
reach losses below the alpha^2/2-per-direction floor. Momentum placed
before projection preserves the lattice; accumulating momentum on
projected directions (Orthogonal-SGDM) escapes it.
"""

import numpy as np

from muonlab import (
    OptimizerSpec,
    RandomStream,
    Schedule,
    SignDynConfig,
    haar_orthogonal,
    isotropic_problem,
    momentum_variant_1d,
    run_trajectory,
)

alpha = 0.1
d = 4
stream = RandomStream(11)
s0 = np.array([0.83, 0.55, 0.37, 0.21])
U = haar_orthogonal(d, stream)
V = haar_orthogonal(d, stream)
W0 = (U * s0) @ V.T
problem = isotropic_problem(d)

spec = OptimizerSpec(method="muon", projection="exact", momentum="none",
                     schedule=Schedule(kind="constant", lr0=alpha))
rec = run_trajectory(problem, W0, spec, 14, keep_iterates=True)

print(f"exact updates, alpha={alpha}: singular values per step")
for t, W in enumerate(rec.iterates):
    sv = np.sort(np.linalg.svd(W, compute_uv=False))[::-1]
    print(f"  t={t:2d} sigma={np.array2string(sv, precision=3)} "
          f"loss={rec.losses[t]:.5f}")

k = int(np.ceil(s0.max() / alpha))
floor = d * alpha**2 / 2
print(f"\n2-cycle entered at step ceil(max s0/alpha) = {k}")
print(f"loss floor bound d*alpha^2/2 = {floor:.4f}; observed late losses "
      f"{rec.losses[k:].min():.4f}..{rec.losses[k:].max():.4f}")

print("\n1-D momentum variants from s0=1.0, eta=0.1, mu=0.9 (first 6 values):")
cfg = SignDynConfig(alpha=alpha, s0=1.0, eps=0.01)
for variant in ("std_pre", "nesterov_pre", "orth_sgdm"):
    traj = momentum_variant_1d(cfg, variant, mu=0.9, steps=5)
    on = all(abs(round((x - 1.0) / alpha) * alpha - (x - 1.0)) < 1e-9 for x in traj)
    print(f"  {variant:13s} {np.array2string(traj, precision=4)}  "
          f"on lattice: {on}")
