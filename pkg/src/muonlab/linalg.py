"""Dense linear algebra on float64 matrices.

Matrices are plain 2-D C-contiguous float64 numpy arrays throughout the
package. The thin SVD here is the workhorse behind the polar factor,
norms, and condition numbers; it calls LAPACK's divide-and-conquer
driver directly since it sits on the hot path of every orthogonalized
optimizer step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs

from .rng import RandomStream


class LinalgError(Exception):
    """Base class for linear algebra failures."""


class NonFiniteError(LinalgError):
    """Input contains NaN or Inf."""


class NonConvergenceError(LinalgError):
    """LAPACK did not converge; signals pathological input."""


class ShapeMismatchError(LinalgError):
    """Operand shapes are incompatible."""


_dgesdd = get_lapack_funcs(("gesdd",), (np.empty((2, 2), dtype=np.float64),))[0]


def as_matrix(M) -> np.ndarray:
    """Validate and return M as a 2-D C-contiguous float64 array."""
    A = np.ascontiguousarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeMismatchError(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def _check_finite(M: np.ndarray):
    if not np.isfinite(M).all():
        raise NonFiniteError("matrix contains NaN or Inf entries")


@dataclass
class SvdResult:
    """Thin SVD M = U @ diag(singular_values) @ V.T.

    U is d1 x d and V is d2 x d with orthonormal columns, d = min(d1, d2),
    singular values sorted non-increasing and >= 0.
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.T


def svd(M) -> SvdResult:
    """Thin SVD via LAPACK dgesdd.

    Raises NonFiniteError on NaN/Inf input and NonConvergenceError if the
    driver fails to converge.
    """
    A = as_matrix(M)
    _check_finite(A)
    u, s, vt, info = _dgesdd(A, compute_uv=1, full_matrices=0)
    if info != 0:
        raise NonConvergenceError(f"dgesdd failed to converge (info={info})")
    return SvdResult(U=u, singular_values=s, V=np.ascontiguousarray(vt.T))


def polar_factor(M) -> np.ndarray:
    """Orthogonal polar factor U @ V.T of the thin SVD of M.

    For singular values at (or numerically near) zero the corresponding
    U, V columns from the factorization are kept, so the result is an
    arbitrary-but-deterministic member of the polar-factor set there.
    """
    r = svd(M)
    return r.U @ r.V.T


def haar_orthogonal(n: int, stream: RandomStream) -> np.ndarray:
    """Haar-distributed n x n orthogonal matrix.

    Q factor of the QR decomposition of an i.i.d. standard normal matrix,
    with the R diagonal signs normalized positive so the map from seed to
    matrix is a deterministic function.
    """
    if n < 1:
        raise ShapeMismatchError("n must be >= 1")
    G = stream.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    d = np.diag(R).copy()
    d[d == 0.0] = 1.0
    return Q * np.sign(d)


def matrix_norms(M) -> tuple[float, float, float]:
    """(frobenius, spectral, nuclear) norms, all from the same spectrum.

    Computing the Frobenius norm from the singular values keeps the
    ordering spectral <= frobenius <= nuclear robust in floating point.
    """
    s = svd(M).singular_values
    return float(np.sqrt(np.sum(s * s))), float(s[0]), float(np.sum(s))


#: Returned by condition_number when sigma_min is numerically zero.
INF_CONDITION = np.inf

_SIGMA_MIN_FLOOR = 1e-300


def condition_number(M) -> float:
    """sigma_max / sigma_min, or +inf when sigma_min < 1e-300."""
    s = svd(M).singular_values
    smin = float(s[-1])
    if smin < _SIGMA_MIN_FLOOR:
        return INF_CONDITION
    return float(s[0]) / smin


def normal_matrix(rows: int, cols: int, scale: float, stream: RandomStream) -> np.ndarray:
    """rows x cols matrix with i.i.d. N(0, scale^2) entries."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    return scale * stream.standard_normal((rows, cols))
