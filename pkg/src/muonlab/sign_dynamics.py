"""One-dimensional exact and noisy sign dynamics.

The scalar recursion s <- s - alpha (sign(s) + sigma xi) is the
per-singular-value picture of the orthogonalized update on the isotropic
quadratic 0.5 s^2. With sigma = 0 the iterates live on the lattice
s0 + alpha Z and generically cycle without reaching small targets; noise
restores reachability, with hitting times that are non-monotone in sigma.

Target-set convention: the engine works with an interval half-width eps
(hit when |s| <= eps). half_width_from_loss converts a loss-level target
into the equivalent half-width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .rng import RandomStream, derive_seed

VARIANTS_1D = ("orth_sgdm", "std_pre", "nesterov_pre")


class UnknownVariantError(ValueError):
    """1-D momentum variant tag not recognized."""


def half_width_from_loss(eps_loss: float) -> float:
    """Interval half-width such that 0.5 s^2 <= eps_loss iff |s| <= width."""
    return math.sqrt(2.0 * eps_loss)


def loss_from_half_width(eps: float) -> float:
    return 0.5 * eps * eps


@dataclass(frozen=True)
class SignDynConfig:
    """Parameters of one noisy-sign Monte Carlo experiment.

    eps is an interval half-width (eps_convention records that). The
    reference preset (f1_config) uses alpha=0.1, eps=alpha/5 and
    s0 = 10 alpha + 1.3 eps, placing the noiseless lattice strictly
    outside the target interval.
    """

    alpha: float = 0.1
    sigma: float = 0.0
    eps: float = 0.02
    s0: float = 1.026
    n_max: int = 1000
    n_samples: int = 10_000
    eps_convention: str = "interval"

    def __post_init__(self):
        if self.alpha <= 0 or self.eps <= 0:
            raise ValueError("alpha and eps must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.n_max < 1 or self.n_samples < 1:
            raise ValueError("n_max and n_samples must be >= 1")

    @property
    def baseline(self) -> int:
        """Noiseless first-crossing step count: ceil(|s0| / alpha)."""
        return int(math.ceil(abs(self.s0) / self.alpha))


def f1_config(sigma: float = 0.0, n_samples: int = 10_000, n_max: int = 1000) -> SignDynConfig:
    """Reference noisy-sign preset: alpha=0.1, eps=alpha/5, s0=10a+1.3e."""
    alpha = 0.1
    eps = alpha / 5.0
    return SignDynConfig(alpha=alpha, sigma=sigma, eps=eps,
                         s0=10.0 * alpha + 1.3 * eps,
                         n_max=n_max, n_samples=n_samples)


#: Log grid of noise levels used by the reference sweep (1e-3 .. 10).
F1_SIGMA_GRID = tuple(np.logspace(-3.0, 1.0, 25))


def step_1d(s: float, alpha: float, sigma: float, xi: float) -> float:
    """s - alpha (sign(s) + sigma xi), with sign(0) = 0."""
    return s - alpha * (np.sign(s) + sigma * xi)


def hitting_time(config: SignDynConfig, stream: RandomStream) -> int:
    """First t with |s_t| <= eps, capped at n_max."""
    s = config.s0
    for t in range(config.n_max + 1):
        if abs(s) <= config.eps:
            return t
        if t == config.n_max:
            break
        xi = float(stream.standard_normal(())) if config.sigma > 0 else 0.0
        s = step_1d(s, config.alpha, config.sigma, xi)
    return config.n_max


def simulate_hitting_times(config: SignDynConfig, stream: RandomStream):
    """Vectorized Monte Carlo over n_samples trajectories.

    Returns (times, hit): capped hitting times min(T, n_max) and a mask of
    trajectories that actually entered the target within the cap. Noise is
    drawn only for still-running trajectories; each draw is fresh, so the
    sampled law is exact.
    """
    n = config.n_samples
    s = np.full(n, config.s0, dtype=np.float64)
    times = np.full(n, config.n_max, dtype=np.int64)
    hit = np.zeros(n, dtype=bool)
    alive = np.arange(n)

    for t in range(config.n_max + 1):
        inside = np.abs(s[alive]) <= config.eps
        if inside.any():
            just = alive[inside]
            times[just] = t
            hit[just] = True
            alive = alive[~inside]
        if alive.size == 0 or t == config.n_max:
            break
        sa = s[alive]
        drift = np.sign(sa)
        if config.sigma > 0:
            drift = drift + config.sigma * stream.standard_normal(alive.size)
        s[alive] = sa - config.alpha * drift
    return times, hit


@dataclass(frozen=True)
class HittingTimeSummary:
    """Median and central-95% quantiles of capped hitting times."""

    sigma: float
    median: float
    q025: float
    q975: float
    frac_capped: float
    baseline: int
    n_samples: int
    seed: int


def monte_carlo_summary(config: SignDynConfig, base_seed: int) -> HittingTimeSummary:
    """Summary statistics of min(T, n_max) over config.n_samples runs."""
    times, hit = simulate_hitting_times(config, RandomStream(base_seed))
    q025, med, q975 = np.quantile(times, [0.025, 0.5, 0.975])
    return HittingTimeSummary(
        sigma=config.sigma, median=float(med), q025=float(q025), q975=float(q975),
        frac_capped=float(1.0 - hit.mean()), baseline=config.baseline,
        n_samples=config.n_samples, seed=base_seed,
    )


def sigma_sweep(config: SignDynConfig, sigma_grid, base_seed: int) -> list[HittingTimeSummary]:
    """One summary per noise level, each from its own sub-stream."""
    grid = [float(s) for s in sigma_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("sigma grid must be sorted ascending")
    return [
        monte_carlo_summary(replace(config, sigma=s), derive_seed(base_seed, k))
        for k, s in enumerate(grid)
    ]


def momentum_variant_1d(config: SignDynConfig, variant: str, mu: float, steps: int) -> np.ndarray:
    """Noiseless scalar trajectories of the three momentum placements.

    orth_sgdm accumulates momentum on projected (sign) directions and can
    leave the lattice; std_pre and nesterov_pre project the blend, so the
    per-step move is always +-eta and the lattice persists.
    """
    if variant not in VARIANTS_1D:
        raise UnknownVariantError(f"unknown 1-D variant {variant!r}")
    if not (0.0 <= mu < 1.0):
        raise ValueError("mu must lie in [0, 1)")
    eta = config.alpha
    s = config.s0
    m = 0.0
    out = np.empty(steps + 1)
    out[0] = s
    for t in range(steps):
        if variant == "orth_sgdm":
            m = mu * m + (1.0 - mu) * np.sign(s)
            s = s - eta * m
        elif variant == "std_pre":
            g = s
            m = mu * m + (1.0 - mu) * g
            s = s - eta * np.sign(m)
        else:  # nesterov_pre
            g = s
            m = mu * m + (1.0 - mu) * g
            m_tilde = mu * m + (1.0 - mu) * g
            s = s - eta * np.sign(m_tilde)
        out[t + 1] = s
    return out


def summaries_to_rows(summaries: list[HittingTimeSummary]) -> list[dict]:
    """Rows for the hitting-time CSV schema."""
    return [
        {
            "sigma": s.sigma, "median": s.median, "q025": s.q025, "q975": s.q975,
            "frac_capped": s.frac_capped, "baseline": s.baseline,
            "n_samples": s.n_samples, "seed": s.seed,
        }
        for s in summaries
    ]
