"""Spectral radius and operator 2-norm estimation for reservoir matrices.

Small matrices are handled with dense LAPACK routines; large ones with
seeded power iteration plus sparse-eigensolver and dense fallbacks, so
that results are deterministic for a fixed input.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .errors import NumericalError

logger = logging.getLogger(__name__)

# Below this order a dense eigendecomposition is cheaper than iterating.
_DENSE_EIG_MAX = 64
# Dense SVD is used while m*n stays below this, or when one side is tiny.
_DENSE_SVD_MAX_ELEMS = 2_000_000
_DENSE_SVD_MAX_MINDIM = 64
# Power-iteration budget per restart, and number of seeded restarts.
_POWER_MAX_ITER = 1000
_POWER_RESTARTS = 5
# Above this order the Arnoldi solver runs before power iteration: random
# reservoir spectra fill a disk, so the dominant magnitude is nearly
# degenerate and power iteration would exhaust its budget first.
_ARNOLDI_FIRST_MIN = 1024
# Hard ceiling for the last-resort dense eigendecomposition.
_DENSE_FALLBACK_MAX = 8192


def _as_linear_operator(matrix):
    """Return (matvec, rmatvec, shape) for a dense array or sparse matrix."""
    if sp.issparse(matrix):
        csr = matrix.tocsr()
        csc = csr.tocsc().T.tocsr()  # transpose once, kept in row form
        return (lambda v: csr @ v), (lambda v: csc @ v), csr.shape
    arr = np.asarray(matrix, dtype=float)
    return (lambda v: arr @ v), (lambda v: arr.T @ v), arr.shape


def _power_iteration_radius(matvec, n, rtol):
    """Estimate |lambda_max| by power iteration with seeded restarts.

    Returns None when no restart converges, which happens for instance
    when the dominant eigenvalues form a complex-conjugate pair.
    """
    for restart in range(_POWER_RESTARTS):
        rng = np.random.default_rng(restart)
        v = rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            continue
        v /= norm
        estimate = 0.0
        for _ in range(_POWER_MAX_ITER):
            w = matvec(v)
            norm = np.linalg.norm(w)
            if norm == 0.0:
                return 0.0
            v_next = w / norm
            estimate = float(abs(v @ w))
            residual = np.linalg.norm(w - estimate * np.sign(v @ w) * v)
            v = v_next
            if residual <= 0.1 * rtol * max(estimate, 1e-300):
                return estimate
    return None


def _arnoldi_radius(matrix, n, rtol):
    """Estimate |lambda_max| with ARPACK, or None when it fails.

    The Krylov subspace is kept well above the ARPACK default: random
    reservoir spectra cluster near the dominant magnitude, and a small
    subspace can stagnate on a subdominant pair while reporting
    convergence.
    """
    try:
        vals = scipy.sparse.linalg.eigs(
            matrix,
            k=min(6, n - 2),
            which="LM",
            tol=rtol,
            ncv=min(n - 1, 96),
            return_eigenvectors=False,
            v0=np.random.default_rng(0).standard_normal(n),
        )
        return float(np.max(np.abs(vals)))
    except Exception:
        return None


def spectral_radius(matrix, rtol: float = 1e-6) -> float:
    """Largest eigenvalue magnitude of a square dense or sparse matrix.

    Matrices of order <= 64 use a dense eigendecomposition. Moderate ones
    use power iteration with an ARPACK fallback for complex dominant
    pairs; large ones go to ARPACK first, where power iteration would
    stall on a near-degenerate dominant magnitude. A dense decomposition
    is the last resort before raising NumericalError.
    """
    if sp.issparse(matrix):
        shape = matrix.shape
    else:
        matrix = np.asarray(matrix, dtype=float)
        shape = matrix.shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"spectral radius needs a square matrix, got shape {shape}")
    n = shape[0]
    if n == 0:
        return 0.0
    if n <= _DENSE_EIG_MAX:
        dense = matrix.toarray() if sp.issparse(matrix) else matrix
        return float(np.max(np.abs(np.linalg.eigvals(dense))))

    if n > _ARNOLDI_FIRST_MIN:
        estimate = _arnoldi_radius(matrix, n, rtol)
        if estimate is not None:
            return estimate
        logger.debug("ARPACK failed; trying power iteration")

    matvec, _, _ = _as_linear_operator(matrix)
    estimate = _power_iteration_radius(matvec, n, rtol)
    if estimate is not None:
        return estimate

    if n <= _ARNOLDI_FIRST_MIN:
        logger.debug("power iteration did not converge; falling back to ARPACK")
        estimate = _arnoldi_radius(matrix, n, rtol)
        if estimate is not None:
            return estimate

    logger.debug("iterative estimates failed; falling back to dense eigendecomposition")
    if n <= _DENSE_FALLBACK_MAX:
        dense = matrix.toarray() if sp.issparse(matrix) else matrix
        return float(np.max(np.abs(np.linalg.eigvals(dense))))
    raise NumericalError(
        f"spectral radius estimation failed to converge for a {n}x{n} matrix"
    )


def operator_norm(matrix, rtol: float = 1e-6) -> float:
    """Largest singular value of a dense or sparse matrix.

    Small and thin matrices use a dense SVD. Larger ones use power
    iteration on M^T M, whose dominant eigenvalue is real and
    non-negative, with sparse-SVD and dense fallbacks.
    """
    if sp.issparse(matrix):
        shape = matrix.shape
    else:
        matrix = np.asarray(matrix, dtype=float)
        shape = matrix.shape
    if len(shape) != 2:
        raise ValueError(f"operator norm needs a 2-d matrix, got shape {shape}")
    m, n = shape
    if m == 0 or n == 0:
        return 0.0
    if m * n <= _DENSE_SVD_MAX_ELEMS or min(m, n) <= _DENSE_SVD_MAX_MINDIM:
        dense = matrix.toarray() if sp.issparse(matrix) else matrix
        return float(np.linalg.svd(dense, compute_uv=False)[0])

    matvec, rmatvec, _ = _as_linear_operator(matrix)
    gram = lambda v: rmatvec(matvec(v))  # noqa: E731
    estimate = _power_iteration_radius(gram, n, rtol)
    if estimate is not None:
        return float(np.sqrt(estimate))

    logger.debug("power iteration on M^T M did not converge; trying sparse SVD")
    try:
        k = 1
        vals = scipy.sparse.linalg.svds(
            matrix,
            k=k,
            return_singular_vectors=False,
            v0=np.random.default_rng(0).standard_normal(min(m, n)),
        )
        return float(np.max(vals))
    except Exception:
        logger.debug("sparse SVD failed; falling back to dense SVD")

    if m * n <= _DENSE_FALLBACK_MAX**2:
        dense = matrix.toarray() if sp.issparse(matrix) else matrix
        return float(np.linalg.svd(dense, compute_uv=False)[0])
    raise NumericalError(
        f"operator norm estimation failed to converge for a {m}x{n} matrix"
    )
