"""
Complex linear algebra helpers shared by the whole simulator.

Everything here operates on plain numpy arrays (complex128). The sizes
involved are small (covariance matrices up to 64x64, Gram matrices up to
KxK with K of order 3), so clarity and robustness win over asymptotics.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

HERMITIAN_ASYMMETRY_TOL = 1e-8
RANK_RATIO_TOL = 1e-12


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the operation."""


class SingularMatrixError(np.linalg.LinAlgError):
    """Gram matrix is numerically rank deficient."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (real, sorted descending) and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(a):
    """
    Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Hermitian matrix. Asymmetry up to ``HERMITIAN_ASYMMETRY_TOL`` (max
        entry of ``a - a^H``) is tolerated; the input is symmetrized as
        ``(a + a^H) / 2`` before factorization.

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted descending, eigenvector columns paired with them.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    asym = 0.0 if a.size == 0 else float(np.max(np.abs(a - a.conj().T)))
    if asym > HERMITIAN_ASYMMETRY_TOL:
        raise DomainError(
            f"matrix is not Hermitian: max |a - a^H| = {asym:.3e} "
            f"exceeds {HERMITIAN_ASYMMETRY_TOL:.0e}"
        )
    h = (a + a.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    return EigenDecomposition(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def least_squares(x, y):
    """
    Complex least squares via the normal equations, beta = (X^H X)^{-1} X^H y.

    Solved with a Cholesky factorization of the Gram matrix; on a failed
    factorization a single jitter of ``1e-14 * trace / k`` is added to the
    diagonal and the factorization retried once.

    Raises
    ------
    SingularMatrixError
        If the Gram matrix is rank deficient (smallest eigenvalue below
        ``RANK_RATIO_TOL`` times the largest), reporting the conditioning
        ratio.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).ravel()
    if x.ndim != 2:
        raise DimensionError(f"design matrix must be 2-D, got shape {x.shape}")
    m, k = x.shape
    if m < k:
        raise DimensionError(f"design matrix must be tall, got shape {x.shape}")
    if y.shape[0] != m:
        raise DimensionError(f"rhs length {y.shape[0]} does not match {m} rows")

    gram = x.conj().T @ x
    gram = (gram + gram.conj().T) / 2.0
    w = np.linalg.eigvalsh(gram)
    largest = float(w[-1])
    smallest = float(w[0])
    if largest <= 0.0 or smallest < RANK_RATIO_TOL * largest:
        ratio = smallest / largest if largest > 0.0 else np.inf
        raise SingularMatrixError(
            f"rank-deficient Gram matrix: conditioning ratio "
            f"min/max eigenvalue = {ratio:.3e} below {RANK_RATIO_TOL:.0e}"
        )

    rhs = x.conj().T @ y
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        jitter = 1e-14 * np.real(np.trace(gram)) / k
        chol = np.linalg.cholesky(gram + jitter * np.eye(k))
    z = solve_triangular(chol, rhs, lower=True)
    return solve_triangular(chol.conj().T, z, lower=False)


def kron(a, b):
    """Kronecker product of two matrices (or column vectors)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim > 2 or b.ndim > 2:
        raise DimensionError("kron operands must be at most 2-D")
    return np.kron(a, b)


def hadamard(a, b):
    """Entrywise (Hadamard) product; shapes must match exactly."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b
