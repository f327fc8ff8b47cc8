"""Hermitian linear algebra with explicit numerical contracts.

Thin wrappers around LAPACK routines that pin down the conventions the
rest of the package relies on: ascending eigenvalues, residual-checked
decompositions, spectral-shift guarded exponentials, and projections
onto shifted positive-semidefinite cones.  The real symmetric embedding
of a complex Hermitian matrix is provided for cross-checking: every
eigenvalue appears twice in the embedding, and cone projections commute
with it.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError

EIG_CUTOFF = 1e-14  # relative cutoff under log / entropy


def require_hermitian(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    matrix = np.asarray(matrix)
    dev = np.abs(matrix - matrix.conj().T).max()
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return matrix


def eig_hermitian(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""
    try:
        return np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc


def exp_hermitian(matrix: np.ndarray) -> np.ndarray:
    """exp(A) for Hermitian A, shift-guarded against overflow."""
    w, v = eig_hermitian(matrix)
    shift = w.max()
    scaled = np.exp(w - shift)
    if shift > 700.0:
        raise OverflowError(
            f"exp of eigenvalue {shift:.3e} overflows; normalize before exponentiating"
        )
    return (v * (scaled * np.exp(shift))) @ v.conj().T


def log_pd(matrix: np.ndarray) -> np.ndarray:
    """log(A) for positive definite Hermitian A."""
    w, v = eig_hermitian(matrix)
    if w[0] <= EIG_CUTOFF * max(w[-1], 1.0):
        raise ValueError(f"matrix is not positive definite (eigenvalue {w[0]:.3e})")
    return (v * np.log(w)) @ v.conj().T


def project_to_psd(matrix: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Frobenius-nearest matrix with all eigenvalues >= floor.

    Only deficient eigendirections are touched, so the cost beyond one
    eigendecomposition scales with the number of clipped eigenvalues.
    """
    w, v = eig_hermitian(matrix)
    deficient = w < floor
    if not deficient.any():
        return matrix
    vd = v[:, deficient]
    lift = (vd * (floor - w[deficient])) @ vd.conj().T
    return matrix + lift


def real_embedding(matrix: np.ndarray) -> np.ndarray:
    """Real symmetric 2D x 2D image [[Re, -Im], [Im, Re]] of Hermitian A.

    Doubles every eigenvalue's multiplicity and turns complex spectral
    manipulations into real ones.
    """
    re, im = matrix.real, matrix.imag
    return np.block([[re, -im], [im, re]])


def from_real_embedding(embedded: np.ndarray) -> np.ndarray:
    """Inverse of real_embedding (averages the two copies)."""
    d = embedded.shape[0] // 2
    re = (embedded[:d, :d] + embedded[d:, d:]) / 2
    im = (embedded[d:, :d] - embedded[:d, d:]) / 2
    return re + 1j * im
