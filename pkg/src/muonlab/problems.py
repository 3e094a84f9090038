"""Controlled-spectrum quadratic problems.

A problem is a noiseless planted least-squares instance
L(W) = ||X W - Y||_F^2 / (2 n d_out) whose Hessian A = X^T X / (n d_out)
has a prescribed eigenvalue spectrum. Seven spectrum families share the
endpoints (s_min, s_max) and hence the condition number, differing only
in shape. Loss and gradient are evaluated through the cached quadratic
so stepping never touches X.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import ShapeMismatchError, condition_number, haar_orthogonal, normal_matrix
from .rng import RandomStream

#: Spectrum families, in canonical reporting order.
SPECTRUM_KINDS = (
    "max_spiked",
    "min_spiked",
    "uniform",
    "gaussian",
    "linear_decay_to_max",
    "u_shaped",
    "geometric_decay_to_max",
)


class UnknownKindError(ValueError):
    """Spectrum kind not in SPECTRUM_KINDS."""


@dataclass(frozen=True)
class SpectrumSpec:
    """Recipe for an eigenvalue spectrum on [s_min, s_max].

    Kind-specific parameters: `gauss_k` truncation width for the gaussian
    family, `geom_ratio` for the geometric progression, `beta_alpha` for
    the symmetric-Beta u-shape.
    """

    kind: str
    n: int
    s_min: float = 1e-3
    s_max: float = 10.0
    gauss_k: float = 3.0
    geom_ratio: float = 0.9
    beta_alpha: float = 0.2

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise UnknownKindError(f"unknown spectrum kind {self.kind!r}")
        if not (0 < self.s_min < self.s_max):
            raise ValueError("need 0 < s_min < s_max")
        if self.n < 2:
            raise ValueError("need n >= 2")


def _sorted_with_endpoints(values: np.ndarray, s_min: float, s_max: float) -> np.ndarray:
    s = np.sort(values)[::-1].copy()
    s[0] = s_max
    s[-1] = s_min
    return s


def generate_spectrum(spec: SpectrumSpec, stream: RandomStream) -> np.ndarray:
    """Eigenvalues sorted non-increasing, all inside [s_min, s_max].

    Random kinds sort the raw draws and pin the extremes to the exact
    endpoints. The geometric family is fully deterministic: it follows
    max(s_min, s_max * q^(i-1)), which already starts at s_max and is
    clipped below at s_min.
    """
    n, lo, hi = spec.n, spec.s_min, spec.s_max
    kind = spec.kind
    if kind == "max_spiked":
        s = np.full(n, hi)
        s[-1] = lo
        return s
    if kind == "min_spiked":
        s = np.full(n, lo)
        s[0] = hi
        return s
    if kind == "uniform":
        return _sorted_with_endpoints(lo + (hi - lo) * stream.random(n), lo, hi)
    if kind == "gaussian":
        k = spec.gauss_k
        mid = 0.5 * (lo + hi)
        width = (hi - lo) / (2.0 * k)
        z = np.clip(stream.standard_normal(n), -k, k)
        return _sorted_with_endpoints(mid + width * z, lo, hi)
    if kind == "linear_decay_to_max":
        u = stream.random(n)
        return _sorted_with_endpoints(hi - (hi - lo) * np.sqrt(u), lo, hi)
    if kind == "u_shaped":
        z = stream.beta(spec.beta_alpha, spec.beta_alpha, n)
        return _sorted_with_endpoints(lo + (hi - lo) * z, lo, hi)
    if kind == "geometric_decay_to_max":
        return np.maximum(lo, hi * spec.geom_ratio ** np.arange(n, dtype=np.float64))
    raise UnknownKindError(f"unknown spectrum kind {kind!r}")


@dataclass
class QuadraticProblem:
    """Planted quadratic L(W) = 0.5<W,AW> + <B,W> + c with minimizer W_star.

    A is symmetric PSD with the prescribed eigenvalues; B = -A @ W_star and
    c = 0.5<W_star, A W_star>, so L(W) = 0.5<W - W_star, A (W - W_star)>
    exactly. The backing least-squares data (X, Y) is kept for
    cross-validation only.
    """

    X: np.ndarray
    Y: np.ndarray
    W_star: np.ndarray
    A: np.ndarray
    B: np.ndarray
    c: float
    eigenvalues: np.ndarray
    descriptor: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def s_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def s_min(self) -> float:
        return float(self.eigenvalues[-1])


def make_problem(eigenvalues, U, V, W_star, descriptor=None) -> QuadraticProblem:
    """Assemble a problem from spectrum, singular bases and planted optimum.

    X = U diag(sqrt(n d_out s_i)) V^T, so A = X^T X / (n d_out) has
    eigenvalues s_i with eigenbasis V.
    """
    s = np.asarray(eigenvalues, dtype=np.float64)
    n, d_out = W_star.shape
    sigma = np.sqrt(n * d_out * s)
    X = (U * sigma) @ V.T
    A = (X.T @ X) / (n * d_out)
    A = 0.5 * (A + A.T)
    Y = X @ W_star
    B = -A @ W_star
    c = float(np.sum(Y * Y) / (2.0 * n * d_out))
    return QuadraticProblem(
        X=X, Y=Y, W_star=W_star, A=A, B=B, c=c,
        eigenvalues=s, descriptor=dict(descriptor or {}),
    )


def build_problem(spec: SpectrumSpec, stream: RandomStream) -> QuadraticProblem:
    """Fresh problem instance: spectrum, Haar bases U, V, planted W_star.

    Draw order from the stream is fixed (spectrum, U, V, W_star) so a
    given seed always regenerates the same instance. W_star entries are
    i.i.d. N(0, 1/n), matching the initialization scale.
    """
    s = generate_spectrum(spec, stream)
    n = spec.n
    U = haar_orthogonal(n, stream)
    V = haar_orthogonal(n, stream)
    W_star = normal_matrix(n, n, 1.0 / np.sqrt(n), stream)
    return make_problem(s, U, V, W_star, descriptor={
        "kind": spec.kind, "n": n, "s_min": spec.s_min, "s_max": spec.s_max,
    })


def isotropic_problem(d: int) -> QuadraticProblem:
    """L(W) = 0.5 ||W||_F^2 as a QuadraticProblem (A = I, W_star = 0)."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return QuadraticProblem(
        X=np.sqrt(d * d) * eye, Y=zero.copy(), W_star=zero.copy(),
        A=eye, B=zero.copy(), c=0.0, eigenvalues=np.ones(d),
        descriptor={"kind": "isotropic", "n": d, "s_min": 1.0, "s_max": 1.0},
    )


def _check_shape(p: QuadraticProblem, W: np.ndarray):
    if W.shape != p.W_star.shape:
        raise ShapeMismatchError(
            f"iterate shape {W.shape} does not match problem shape {p.W_star.shape}")


def loss(p: QuadraticProblem, W: np.ndarray) -> float:
    """Quadratic loss, evaluated in the cancellation-free centered form."""
    _check_shape(p, W)
    D = W - p.W_star
    return 0.5 * float(np.vdot(D, p.A @ D))


def gradient(p: QuadraticProblem, W: np.ndarray) -> np.ndarray:
    """grad L(W) = A (W - W_star)."""
    _check_shape(p, W)
    return p.A @ (W - p.W_star)


def loss_expanded(p: QuadraticProblem, W: np.ndarray) -> float:
    """Loss via 0.5<W,AW> + <B,W> + c; cross-check for the centered form."""
    _check_shape(p, W)
    return 0.5 * float(np.vdot(W, p.A @ W)) + float(np.vdot(p.B, W)) + p.c


def loss_least_squares(p: QuadraticProblem, W: np.ndarray) -> float:
    """Loss via ||X W - Y||_F^2 / (2 n d_out); cross-check oracle."""
    _check_shape(p, W)
    R = p.X @ W - p.Y
    n, d_out = p.Y.shape
    return float(np.sum(R * R) / (2.0 * n * d_out))


def gradient_condition_trace(p: QuadraticProblem, record) -> list[float]:
    """Per-step condition numbers of the gradient along a trajectory.

    Accepts a TrajectoryRecord with logged condition numbers, or with
    retained iterates (then the numbers are computed here). Exact optima
    yield the +inf sentinel.
    """
    conds = getattr(record, "grad_cond", None)
    if conds is not None:
        return [float(x) for x in conds]
    iterates = getattr(record, "iterates", None)
    if iterates is None:
        raise MissingDiagnosticsError(
            "trajectory has neither condition numbers nor iterates logged")
    return [condition_number(gradient(p, W)) for W in iterates]


class MissingDiagnosticsError(RuntimeError):
    """Requested diagnostics were not logged during the run."""


def problem_descriptor_json(kind: str, n: int, s_min: float, s_max: float, seed: int) -> str:
    """JSON descriptor from which a problem is regenerated (never stored raw)."""
    return json.dumps(
        {"kind": kind, "n": n, "s_min": s_min, "s_max": s_max, "seed": seed},
        sort_keys=True,
    )


def problem_from_descriptor(doc: str | dict) -> QuadraticProblem:
    d = json.loads(doc) if isinstance(doc, str) else dict(doc)
    spec = SpectrumSpec(kind=d["kind"], n=int(d["n"]),
                        s_min=float(d["s_min"]), s_max=float(d["s_max"]))
    return build_problem(spec, RandomStream(int(d["seed"])))
