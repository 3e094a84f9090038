"""Optimizers: GD, Adam, and the orthogonalized-update family.

The orthogonalized ("muon") step follows the speedrun reference update
order exactly: momentum blend, projection of the blended direction,
rectangular scale factor, parameter step, then decoupled weight decay.
Projection is either the exact polar factor or the five-iteration
Polar Express polynomial scheme. All arithmetic is float64; the bf16
cast in the reference implementation is deliberately not emulated (see
PRECISION_NOTE), so runs isolate algorithmic rather than rounding
effects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import problems
from .linalg import ShapeMismatchError, svd

PRECISION_NOTE = "polar_express evaluated in float64 (reference casts to bf16)"

#: Quintic coefficient triplets (a, b, c) for the five Polar Express iterations.
POLAR_EXPRESS_COEFFS = (
    (8.156554524902461, -22.48329292557795, 15.878769915207462),
    (4.042929935166739, -2.808917465908714, 0.5000178451051316),
    (3.8916678022926607, -2.772484153217685, 0.5060648178503393),
    (3.285753657755655, -2.3681294933425376, 0.46449024233003106),
    (2.3465413258596377, -1.7097828382687081, 0.42323551169305323),
)

PROJECTIONS = ("exact", "polar_express")
MOMENTUM_MODES = ("none", "standard", "nesterov", "post")
METHODS = ("gd", "adam", "muon")

#: Loss level beyond which a run is declared diverged and padded with +inf.
DIVERGENCE_CAP = 1e12

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class UnknownVariantError(ValueError):
    """Method, projection, momentum mode or schedule tag not recognized."""


def polar_express(G: np.ndarray) -> np.ndarray:
    """Approximate polar factor via five fixed quintic iterations.

    Transposes tall inputs, normalizes by 1.02 * frobenius + 1e-6, then
    applies X <- a X + (b A + c A^2) X with A = X X^T per iteration. An
    all-zero input maps to the zero matrix.
    """
    X = np.asarray(G, dtype=np.float64)
    fro = math.sqrt(float(np.sum(X * X)))
    if fro == 0.0:
        return np.zeros_like(X)
    transposed = X.shape[0] > X.shape[1]
    if transposed:
        X = X.T
    X = X / (1.02 * fro + 1e-6)
    for a, b, c in POLAR_EXPRESS_COEFFS:
        A = X @ X.T
        B = b * A + c * (A @ A)
        X = a * X + B @ X
    if transposed:
        X = X.T
    return X


def speedrun_lr(step: int, S: int, cooldown_frac: float = 0.55) -> float:
    """Speedrun learning-rate multiplier (piecewise ramp with late cooldown)."""
    x = step / S
    cooldown_weight = max(0.0, min(1.0, (1 - x) / cooldown_frac))
    lr_min = 0.1
    lr_max = 1.0 + 0.52 * (x > 1 / 3) + 0.21 * (x > 2 / 3)
    return lr_min + cooldown_weight * (lr_max - lr_min)


def speedrun_momentum(step: int, T: int, warmup: int = 300, cooldown: int = 50) -> float:
    """Speedrun momentum schedule: 0.85 -> 0.95 warmup, late cooldown back."""
    warmup_frac = max(0.0, min(1.0, step / warmup))
    cooldown_frac = max(0.0, min(1.0, (T - cooldown - step) / cooldown))
    momentum_min = 0.85
    momentum_max = 0.95
    return momentum_min + min(warmup_frac, cooldown_frac) * (momentum_max - momentum_min)


@dataclass(frozen=True)
class Schedule:
    """Learning-rate schedule.

    kind "constant": lr_t = lr0.
    kind "cosine":   lr_t = lr_final + (lr0 - lr_final) (1 + cos(pi t / T)) / 2.
    kind "speedrun": lr_t = lr0 * speedrun_lr(t, S); also supplies the
    momentum schedule via speedrun_momentum(t, T, warmup, cooldown).
    """

    kind: str = "constant"
    lr0: float = 0.1
    lr_final: float = 1e-3
    horizon: int = 500
    lr_steps: int = 500
    warmup: int = 300
    cooldown: int = 50

    def __post_init__(self):
        if self.kind not in ("constant", "cosine", "speedrun"):
            raise UnknownVariantError(f"unknown schedule kind {self.kind!r}")
        if self.lr0 <= 0:
            raise ValueError("lr0 must be positive")
        if self.kind == "cosine" and self.lr_final > self.lr0:
            raise ValueError("cosine schedule needs lr_final <= lr0")

    def lr_at(self, step: int) -> float:
        if self.kind == "constant":
            return self.lr0
        if self.kind == "cosine":
            return self.lr_final + (self.lr0 - self.lr_final) * (
                1.0 + math.cos(math.pi * step / self.horizon)) / 2.0
        return self.lr0 * speedrun_lr(step, self.lr_steps)


@dataclass(frozen=True)
class OptimizerSpec:
    """Method identity: family, projection, momentum placement, schedule.

    `momentum` is one of "none", "standard" (buffer projected), "nesterov"
    (blend of buffer and gradient projected; the reference default) or
    "post" (raw gradient projected, momentum accumulated afterwards).
    """

    method: str = "muon"
    projection: str = "exact"
    momentum: str = "none"
    mu: float = 0.95
    schedule: Schedule = field(default_factory=Schedule)
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise UnknownVariantError(f"unknown method {self.method!r}")
        if self.projection not in PROJECTIONS:
            raise UnknownVariantError(f"unknown projection {self.projection!r}")
        if self.momentum not in MOMENTUM_MODES:
            raise UnknownVariantError(f"unknown momentum mode {self.momentum!r}")
        if not (0.0 <= self.mu < 1.0):
            raise ValueError("mu must lie in [0, 1)")

    @property
    def label(self) -> str:
        """Stable tag used in CSV output and run keys."""
        if self.method != "muon":
            tag = self.method
        else:
            proj = "exact" if self.projection == "exact" else "ns"
            tag = f"muon_{proj}"
            if self.momentum != "none":
                tag += f"_{self.momentum}"
        if self.schedule.kind == "cosine":
            tag += "_cos"
        elif self.schedule.kind == "speedrun":
            tag += "_sr"
        return tag

    def with_lr(self, lr: float) -> "OptimizerSpec":
        return replace(self, schedule=replace(self.schedule, lr0=lr))

    def momentum_at(self, step: int) -> float:
        if self.schedule.kind == "speedrun":
            return speedrun_momentum(step, self.schedule.horizon,
                                     self.schedule.warmup, self.schedule.cooldown)
        return self.mu

    def to_json(self) -> str:
        doc = {
            "method": self.method, "projection": self.projection,
            "momentum": self.momentum, "mu": self.mu,
            "weight_decay": self.weight_decay,
            "schedule": {
                "kind": self.schedule.kind, "lr0": self.schedule.lr0,
                "lr_final": self.schedule.lr_final, "horizon": self.schedule.horizon,
                "lr_steps": self.schedule.lr_steps, "warmup": self.schedule.warmup,
                "cooldown": self.schedule.cooldown,
            },
        }
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(doc: str | dict) -> "OptimizerSpec":
        d = json.loads(doc) if isinstance(doc, str) else dict(doc)
        sched = d.get("schedule", {})
        return OptimizerSpec(
            method=d.get("method", "muon"),
            projection=d.get("projection", "exact"),
            momentum=d.get("momentum", "none"),
            mu=float(d.get("mu", 0.95)),
            weight_decay=float(d.get("weight_decay", 0.0)),
            schedule=Schedule(**sched) if sched else Schedule(),
        )


@dataclass
class OptimizerState:
    """Mutable per-run state: iterate, momentum buffer, Adam moments."""

    W: np.ndarray
    v: np.ndarray | None = None
    step: int = 0
    m1: np.ndarray | None = None
    m2: np.ndarray | None = None
    #: singular values of the most recently projected matrix (exact mode only)
    last_proj_sigma: np.ndarray | None = None


def init_state(W0: np.ndarray, spec: OptimizerSpec) -> OptimizerState:
    st = OptimizerState(W=np.array(W0, dtype=np.float64))
    if spec.method == "muon" and spec.momentum != "none":
        st.v = np.zeros_like(st.W)
    if spec.method == "adam":
        st.m1 = np.zeros_like(st.W)
        st.m2 = np.zeros_like(st.W)
    return st


def _project(M: np.ndarray, projection: str):
    """(direction, singular values or None) for the requested projection."""
    if projection == "exact":
        r = svd(M)
        return r.U @ r.V.T, r.singular_values
    return polar_express(M), None


def muon_step(state: OptimizerState, grad: np.ndarray, spec: OptimizerSpec) -> OptimizerState:
    """One orthogonalized update, mutating and returning `state`.

    Pre-projection modes blend momentum first and project the blend;
    the "post" mode projects the raw gradient and accumulates momentum
    on projected directions instead.
    """
    if grad.shape != state.W.shape:
        raise ShapeMismatchError("gradient shape does not match iterate")
    lr = spec.schedule.lr_at(state.step)
    mu = spec.momentum_at(state.step)

    if spec.momentum == "none":
        direction, sigma = _project(grad, spec.projection)
    elif spec.momentum == "standard":
        state.v = mu * state.v + (1.0 - mu) * grad
        direction, sigma = _project(state.v, spec.projection)
    elif spec.momentum == "nesterov":
        state.v = mu * state.v + (1.0 - mu) * grad
        m = mu * state.v + (1.0 - mu) * grad
        direction, sigma = _project(m, spec.projection)
    else:  # post: Orthogonal-SGDM
        u, sigma = _project(grad, spec.projection)
        state.v = mu * state.v + (1.0 - mu) * u
        direction = state.v

    state.last_proj_sigma = sigma
    scale = math.sqrt(max(1.0, state.W.shape[0] / state.W.shape[1]))
    state.W -= lr * scale * direction
    if spec.weight_decay:
        state.W -= lr * spec.weight_decay * state.W
    state.step += 1
    return state


def gd_step(state: OptimizerState, grad: np.ndarray, spec: OptimizerSpec) -> OptimizerState:
    if grad.shape != state.W.shape:
        raise ShapeMismatchError("gradient shape does not match iterate")
    state.W -= spec.schedule.lr_at(state.step) * grad
    state.step += 1
    return state


def adam_step(state: OptimizerState, grad: np.ndarray, spec: OptimizerSpec) -> OptimizerState:
    """Standard Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8)."""
    if grad.shape != state.W.shape:
        raise ShapeMismatchError("gradient shape does not match iterate")
    lr = spec.schedule.lr_at(state.step)
    t = state.step + 1
    state.m1 = ADAM_BETA1 * state.m1 + (1.0 - ADAM_BETA1) * grad
    state.m2 = ADAM_BETA2 * state.m2 + (1.0 - ADAM_BETA2) * (grad * grad)
    m_hat = state.m1 / (1.0 - ADAM_BETA1 ** t)
    v_hat = state.m2 / (1.0 - ADAM_BETA2 ** t)
    state.W -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    state.step += 1
    return state


_STEP_FN = {"gd": gd_step, "adam": adam_step, "muon": muon_step}


@dataclass
class TrajectoryRecord:
    """Per-step log of one (problem, method, lr, seed) run.

    losses has length T+1 including the initial loss; a diverged run keeps
    its prefix and carries +inf from the first capped step onward.
    Diagnostic arrays cover the visited iterates W_0..W_{T-1} (the ones at
    which gradients were evaluated); `dist` covers W_0..W_T.
    """

    method: str
    lr: float
    seed: int
    losses: np.ndarray
    diverged: bool = False
    diverged_at: int | None = None
    grad_fro: np.ndarray | None = None
    grad_nuclear: np.ndarray | None = None
    grad_cond: np.ndarray | None = None
    dist: np.ndarray | None = None
    iterates: list | None = None


def run_trajectory(problem, W0: np.ndarray, spec: OptimizerSpec, T: int,
                   seed: int = 0,
                   log_grad_norms: bool = False,
                   log_grad_cond: bool = False,
                   log_dist: bool = False,
                   keep_iterates: bool = False) -> TrajectoryRecord:
    """Run T steps from W0 and log losses (plus requested diagnostics).

    A loss above DIVERGENCE_CAP (or non-finite) marks the run diverged;
    remaining entries become +inf and stepping stops, but the record is
    returned normally so sweeps can discard it during selection.

    For the exact-projection momentum-free orthogonalized update the
    nuclear norm and condition number of the gradient are read off the
    projection's own factorization; other methods pay one extra SVD per
    step when those diagnostics are requested.
    """
    if W0.shape != problem.W_star.shape:
        raise ShapeMismatchError("W0 shape does not match problem")
    step_fn = _STEP_FN[spec.method]
    state = init_state(W0, spec)

    losses = np.empty(T + 1)
    losses[0] = problems.loss(problem, state.W)
    grad_fro = np.empty(T) if log_grad_norms else None
    grad_nuc = np.empty(T) if log_grad_norms else None
    grad_cond = np.empty(T) if log_grad_cond else None
    dist = np.empty(T + 1) if log_dist else None
    iterates = [state.W.copy()] if keep_iterates else None
    if log_dist:
        dist[0] = float(np.linalg.norm(state.W - problem.W_star))

    # sigma of the projected matrix equals sigma of the gradient only here
    sigma_is_grad = (spec.method == "muon" and spec.projection == "exact"
                     and spec.momentum in ("none", "post"))
    need_sigma = (log_grad_norms or log_grad_cond)

    diverged = False
    diverged_at = None
    n_done = T
    for t in range(T):
        g = problems.gradient(problem, state.W)
        if log_grad_norms:
            grad_fro[t] = float(np.linalg.norm(g))
        if need_sigma and not sigma_is_grad:
            s = svd(g).singular_values
            if log_grad_norms:
                grad_nuc[t] = float(np.sum(s))
            if log_grad_cond:
                grad_cond[t] = np.inf if s[-1] < 1e-300 else float(s[0] / s[-1])
        state = step_fn(state, g, spec)
        if need_sigma and sigma_is_grad:
            s = state.last_proj_sigma
            if log_grad_norms:
                grad_nuc[t] = float(np.sum(s))
            if log_grad_cond:
                grad_cond[t] = np.inf if s[-1] < 1e-300 else float(s[0] / s[-1])
        losses[t + 1] = problems.loss(problem, state.W)
        if log_dist:
            dist[t + 1] = float(np.linalg.norm(state.W - problem.W_star))
        if keep_iterates:
            iterates.append(state.W.copy())
        if not np.isfinite(losses[t + 1]) or losses[t + 1] > DIVERGENCE_CAP:
            diverged = True
            diverged_at = t + 1
            losses[t + 1:] = np.inf
            n_done = t + 1
            break

    if diverged:
        for arr in (grad_fro, grad_nuc, grad_cond):
            if arr is not None:
                arr[n_done:] = np.inf
        if dist is not None:
            dist[n_done + 1:] = np.inf

    return TrajectoryRecord(
        method=spec.label, lr=spec.schedule.lr0, seed=seed, losses=losses,
        diverged=diverged, diverged_at=diverged_at,
        grad_fro=grad_fro, grad_nuclear=grad_nuc, grad_cond=grad_cond,
        dist=dist, iterates=iterates,
    )


def stationarity_bound_check(record: TrajectoryRecord, lips: float, d: int,
                             alpha: float, l_star: float = 0.0):
    """Descent-lemma stationarity inequality for constant-step exact runs.

    Returns (lhs, rhs, holds) where lhs is the smallest logged nuclear
    gradient norm and rhs = (L(W_0) - L*) / (T alpha) + lips d alpha / 2.
    """
    if record.grad_nuclear is None:
        raise problems.MissingDiagnosticsError("gradient norms were not logged")
    T = len(record.losses) - 1
    finite = record.grad_nuclear[np.isfinite(record.grad_nuclear)]
    lhs = float(np.min(finite))
    rhs = (float(record.losses[0]) - l_star) / (T * alpha) + 0.5 * lips * d * alpha
    return lhs, rhs, lhs <= rhs
