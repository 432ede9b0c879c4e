"""Dense complex linear algebra kernels for small Hermitian problems.

Covariance matrices here are tiny (M <= 8 antennas), so the standard
eigenproblem is delegated to LAPACK through numpy while the Cholesky
factorization is written out explicitly to control the pivot tolerance
and its failure mode.
"""
import numpy as np

from .errors import DefinitenessError, InvalidInputError, NumericalError

# Relative Frobenius tolerance below which an input counts as Hermitian.
HERMITIAN_RTOL = 1e-10


def _as_hermitian(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    scale = np.linalg.norm(a)
    if scale > 0.0 and np.linalg.norm(a - a.conj().T) > HERMITIAN_RTOL * scale:
        raise InvalidInputError(f"{name} is not Hermitian within {HERMITIAN_RTOL:g} relative")
    return a


def hermitian_eig(a):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with real eigenvalues in ascending
    order and orthonormal eigenvectors in the columns.
    """
    a = _as_hermitian(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    return w, v


def cholesky(a):
    """Lower-triangular L with L @ L^H = A for Hermitian positive definite A.

    The pivot tolerance is 1e-12 * trace(A) / M; a pivot at or below it
    raises DefinitenessError. Relative tolerances keep the routine agnostic
    to the absolute power scale of the input.
    """
    a = _as_hermitian(a)
    m = a.shape[0]
    tol = 1e-12 * max(float(a.trace().real), 0.0) / m
    low = np.zeros_like(a)
    for j in range(m):
        pivot = float(a[j, j].real) - float(np.sum((low[j, :j] * low[j, :j].conj()).real))
        if pivot <= tol:
            raise DefinitenessError(
                f"pivot {pivot:.3e} at column {j} is below tolerance {tol:.3e}; "
                "matrix is not positive definite"
            )
        low[j, j] = np.sqrt(pivot)
        if j + 1 < m:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j].conj()) / low[j, j]
    return low


def generalized_hermitian_eig(c1, c0):
    """Solve C1 g = lambda C0 g for Hermitian C1 and Hermitian PD C0.

    Cholesky-reduces the pencil: with C0 = L L^H the problem becomes the
    standard eigenproblem of L^-1 C1 L^-H, and g = L^-H u. Eigenvalues come
    back real and ascending; each returned column is renormalized to unit
    Euclidean norm (the back-transform does not preserve it).
    """
    c1 = _as_hermitian(c1, "C1")
    low = cholesky(c0)
    low_inv = np.linalg.inv(low)
    s = low_inv @ c1 @ low_inv.conj().T
    s = 0.5 * (s + s.conj().T)  # fold reduction roundoff back to Hermitian
    w, u = hermitian_eig(s)
    v = low_inv.conj().T @ u
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    return w, v
