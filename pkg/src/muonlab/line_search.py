"""Exact line search on quadratics and the greedy direction policy.

On L(W) = 0.5<W, AW> + <B, W> + c the optimal step along a direction D
is alpha*(D) = <grad, D> / <D, AD> with one-step decrease
Delta(D) = <grad, D>^2 / (2 <D, AD>). The greedy policy compares the
decrease of the raw gradient direction against its polar factor and takes
the better step; per-step superiority of the polar direction does not
imply faster end-to-end convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import problems
from .linalg import haar_orthogonal, normal_matrix, polar_factor
from .problems import QuadraticProblem, make_problem
from .rng import RandomStream


class DegenerateDirectionError(ValueError):
    """<D, AD> is numerically zero; the ray carries no curvature."""


def _curvature(p: QuadraticProblem, D: np.ndarray) -> float:
    q = float(np.vdot(D, p.A @ D))
    if q <= 1e-300:
        raise DegenerateDirectionError("direction has vanishing curvature <D, AD>")
    return q


def exact_step_size(p: QuadraticProblem, W: np.ndarray, D: np.ndarray) -> float:
    """Minimizer of alpha -> L(W - alpha D) over the real line."""
    g = problems.gradient(p, W)
    return float(np.vdot(g, D)) / _curvature(p, D)


def one_step_decrease(p: QuadraticProblem, W: np.ndarray, D: np.ndarray) -> float:
    """L(W) - L(W - alpha*(D) D), always >= 0."""
    g = problems.gradient(p, W)
    num = float(np.vdot(g, D))
    return num * num / (2.0 * _curvature(p, D))


def greedy_step(p: QuadraticProblem, W: np.ndarray):
    """Take the better of the gradient and polar line-search steps.

    Returns (W_next, tag) with tag "gd" or "stiefel"; ties go to the
    gradient step.
    """
    g = problems.gradient(p, W)
    d_st = polar_factor(g)
    delta_gd = one_step_decrease(p, W, g)
    delta_st = one_step_decrease(p, W, d_st)
    if delta_gd >= delta_st:
        D, tag = g, "gd"
    else:
        D, tag = d_st, "stiefel"
    return W - exact_step_size(p, W, D) * D, tag


def counterexample_instance(n: int, kappa: float, stream: RandomStream) -> QuadraticProblem:
    """Homogeneous quadratic with spectrum (kappa, 1, ..., 1).

    A = Q diag(kappa, 1, ..., 1) Q^T with Q Haar orthogonal; B = 0, c = 0,
    W_star = 0. On this instance the greedy policy keeps choosing the
    polar step while plain line-search GD converges far faster.
    """
    if n < 2 or kappa <= 1:
        raise ValueError("need n >= 2 and kappa > 1")
    s = np.ones(n)
    s[0] = kappa
    Q = haar_orthogonal(n, stream)
    return make_problem(s, Q, Q, np.zeros((n, n)),
                        descriptor={"kind": "counterexample", "n": n, "kappa": kappa})


@dataclass
class LineSearchRun:
    """Per-step metrics of one line-search trajectory.

    gap, grad_norm and dist cover iterates W_0..W_T (length T+1);
    chosen has one tag per executed step (length T).
    """

    policy: str
    seed: int = 0
    gap: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    dist: list = field(default_factory=list)
    chosen: list = field(default_factory=list)


def run_linesearch_comparison(p: QuadraticProblem, W0: np.ndarray, T: int, seed: int = 0):
    """Run exact-line-search GD and the greedy policy from the same W0.

    Returns (gd_run, greedy_run). The objective gap is non-increasing for
    both policies since every accepted step is a line-search minimizer.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    l_star = problems.loss(p, p.W_star)

    def log(run: LineSearchRun, W):
        run.gap.append(problems.loss(p, W) - l_star)
        run.grad_norm.append(float(np.linalg.norm(problems.gradient(p, W))))
        run.dist.append(float(np.linalg.norm(W - p.W_star)))

    gd = LineSearchRun(policy="gd_ls", seed=seed)
    W = W0.copy()
    log(gd, W)
    for _ in range(T):
        g = problems.gradient(p, W)
        W = W - exact_step_size(p, W, g) * g
        gd.chosen.append("gd")
        log(gd, W)

    greedy = LineSearchRun(policy="greedy", seed=seed)
    W = W0.copy()
    log(greedy, W)
    for _ in range(T):
        W, tag = greedy_step(p, W)
        greedy.chosen.append(tag)
        log(greedy, W)

    return gd, greedy


def init_matrix(n: int, stream: RandomStream) -> np.ndarray:
    """Initialization with i.i.d. N(0, 1/n) entries."""
    return normal_matrix(n, n, 1.0 / np.sqrt(n), stream)
