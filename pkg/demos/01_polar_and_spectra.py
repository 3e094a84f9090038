"""Polar factors and controlled Hessian spectra.

Walks through the basic building blocks: thin SVD, the orthogonal polar
factor, Haar-orthogonal sampling, and the seven eigenvalue families that
share endpoints (1e-3, 10) and hence the condition number 1e4 while
differing in shape.
"""

import numpy as np

from muonlab import (
    RandomStream,
    SpectrumSpec,
    SPECTRUM_KINDS,
    build_problem,
    condition_number,
    generate_spectrum,
    gradient,
    haar_orthogonal,
    loss,
    matrix_norms,
    polar_factor,
    svd,
)

stream = RandomStream(2024)

# --- polar factor -----------------------------------------------------------
M = stream.standard_normal((5, 5))
P = polar_factor(M)
print("polar factor of a random 5x5 matrix:")
print("  ||P^T P - I||_F =", np.linalg.norm(P.T @ P - np.eye(5)))
r = svd(M)
print("  sigma(M)        =", np.round(r.singular_values, 3))
print("  P == U V^T       ->", np.allclose(P, r.U @ r.V.T))

Q = haar_orthogonal(5, stream)
print("  P(5Q) == Q       ->", np.allclose(polar_factor(5 * Q), Q))

fro, spec_norm, nuc = matrix_norms(M)
print(f"  norms: frobenius={fro:.3f} spectral={spec_norm:.3f} nuclear={nuc:.3f}")

# --- spectrum families ------------------------------------------------------
print("\nspectrum families (n=10 preview, endpoints 1e-3 and 10):")
for kind in SPECTRUM_KINDS:
    s = generate_spectrum(SpectrumSpec(kind, n=10), stream)
    print(f"  {kind:24s} {np.array2string(s, precision=3, floatmode='fixed')}")

# --- a full problem instance ------------------------------------------------
problem = build_problem(SpectrumSpec("min_spiked", n=60), stream)
W0 = stream.standard_normal((60, 60)) / np.sqrt(60)
print("\nmin_spiked problem, n=60:")
print("  kappa(A)        =", condition_number(problem.A))
print("  loss(W_star)    =", loss(problem, problem.W_star))
print("  loss(W0)        =", loss(problem, W0))
print("  ||grad(W_star)|| =", np.linalg.norm(gradient(problem, problem.W_star)))
