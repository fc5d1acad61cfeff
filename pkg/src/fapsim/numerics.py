"""Complex dense linear algebra backbone.

Thin, validated wrappers around LAPACK (via numpy.linalg) so the rest of the
package shares one set of conventions: economy SVD with descending singular
values, minimum-norm least squares, and a Cholesky-based log-determinant in
base 2.
"""

import numpy as np

from .errors import DomainError, InvalidInputError

HERMITIAN_RTOL = 1e-9


def _as_matrix(a, name):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a 2-D matrix with at least one row and column")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def svd(a):
    """Economy SVD: returns (U, sigma, V) with A = U @ diag(sigma) @ V.conj().T.

    Singular values are sorted descending; U and V have orthonormal columns.
    """
    a = _as_matrix(a, "a")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.conj().T


def least_squares(a, b):
    """Minimum-norm solution X of min ||A X - B||_F for a tall matrix A.

    Uses an SVD-based (rank-revealing) solver, so a rank-deficient A still
    yields the minimum-norm minimizer instead of failing like the
    normal-equation inverse would.
    """
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[0] < a.shape[1]:
        raise InvalidInputError(f"a must have rows >= cols, got {a.shape}")
    if a.shape[0] != b.shape[0]:
        raise InvalidInputError(f"row mismatch: a has {a.shape[0]} rows, b has {b.shape[0]}")
    x, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    return x


def log_det_hermitian(a):
    """log2 determinant of a Hermitian positive definite matrix via Cholesky."""
    a = _as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"a must be square, got {a.shape}")
    scale = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > HERMITIAN_RTOL * max(scale, 1e-300):
        raise InvalidInputError("a is not Hermitian within tolerance")
    h = 0.5 * (a + a.conj().T)
    try:
        chol = np.linalg.cholesky(h)
    except np.linalg.LinAlgError as exc:
        raise DomainError("matrix is not positive definite") from exc
    return float(2.0 * np.sum(np.log2(np.real(np.diag(chol)))))
