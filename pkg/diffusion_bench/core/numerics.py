"""
Dense linear algebra shared by the samplers: φ-functions of exponential
integrators, functions of symmetric matrices, and Gaussian draws with a
given covariance.

Matrix arguments may be single `(d, d)` matrices or stacks `(..., d, d)`.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import SymmetryError
from .rng import RandomSource

__all__ = [
    "phi_functions",
    "sym_matrix_function",
    "sample_gaussian_with_cov",
    "check_symmetric",
    "symmetrize",
]

SERIES_THRESHOLD = 1e-4
"""
Below this magnitude, φ-functions are evaluated by their Taylor series.
"""

SYMMETRY_TOL = 1e-8

# Taylor coefficients 1/(k+1)! and 1/(k+2)!, k = 0..5
_PHI1_SERIES = np.array([1.0, 1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720])
_PHI2_SERIES = np.array([1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720, 1 / 5040])


def phi_functions(z: ArrayLike) -> tuple[NDArray, NDArray]:
    """
    Evaluate `φ₁(z) = (eᶻ-1)/z` and `φ₂(z) = (eᶻ-1-z)/z²` elementwise,
    using their Taylor series near 0.

    :param z: Finite scalar or array
    :returns: `(phi1, phi2)` with the shape of `z`
    """
    z = np.asarray(z, dtype=float)

    small = np.abs(z) < SERIES_THRESHOLD
    z_safe = np.where(small, 1.0, z)

    em1 = np.expm1(z_safe)
    phi1 = em1 / z_safe
    phi2 = (em1 - z_safe) / (z_safe * z_safe)

    if np.any(small):
        # Horner evaluation of the truncated series
        phi1_series = np.zeros_like(z)
        phi2_series = np.zeros_like(z)
        for c1, c2 in zip(_PHI1_SERIES[::-1], _PHI2_SERIES[::-1]):
            phi1_series = phi1_series * z + c1
            phi2_series = phi2_series * z + c2

        phi1 = np.where(small, phi1_series, phi1)
        phi2 = np.where(small, phi2_series, phi2)

    return phi1, phi2


def symmetrize(A: NDArray) -> NDArray:
    """
    Return the symmetric part of a (stack of) square matrices.
    """
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def check_symmetric(A: NDArray, tol: float = SYMMETRY_TOL):
    """
    Raise {obj}`SymmetryError` if `‖A - Aᵀ‖_F > tol·‖A‖_F` for any matrix
    of the stack.
    """
    assert A.ndim >= 2 and A.shape[-1] == A.shape[-2], f"Not square: {A.shape}"

    diff = np.linalg.norm(A - np.swapaxes(A, -1, -2), axis=(-2, -1))
    norm = np.linalg.norm(A, axis=(-2, -1))

    bad = diff > tol * norm
    if np.any(bad):
        rel = float(np.max(diff[bad] / norm[bad]))
        raise SymmetryError(rel, tol)


def sym_matrix_function(
    A: ArrayLike, f: Callable[[NDArray], NDArray]
) -> NDArray:
    """
    Apply a scalar function to a symmetric matrix through its
    eigendecomposition `A = QΛQᵀ`, returning `Q f(Λ) Qᵀ`.

    :param A: Symmetric matrix or stack of symmetric matrices
    :param f: Vectorized scalar function applied to the eigenvalues
    """
    A = np.asarray(A, dtype=float)
    check_symmetric(A)

    eigvals, Q = np.linalg.eigh(A)
    result = (Q * f(eigvals)[..., None, :]) @ np.swapaxes(Q, -1, -2)

    return symmetrize(result)


def sample_gaussian_with_cov(C: ArrayLike, rng: RandomSource) -> NDArray:
    """
    Draw `C^{1/2} z` with `z` standard normal. Slightly negative eigenvalues
    from round-off are clamped to 0.

    :param C: Covariance matrix `(d, d)` or stack `(n, d, d)`; one draw per matrix
    :param rng: Generator to draw `z` from
    :returns: Array of shape `C.shape[:-1]`
    """
    C = np.asarray(C, dtype=float)
    check_symmetric(C)

    eigvals, Q = np.linalg.eigh(C)

    top = np.max(eigvals, axis=-1, keepdims=True)
    assert np.all(
        eigvals >= -1e-10 * np.maximum(top, 0.0) - 1e-14
    ), "Covariance is not positive semi-definite"

    scale = np.sqrt(np.clip(eigvals, 0.0, None))

    z = rng.standard_normal(C.shape[:-1])

    # Q diag(scale) Qᵀ z
    coeffs = np.einsum("...ji,...j->...i", Q, z)
    return np.einsum("...ij,...j->...i", Q, scale * coeffs)
