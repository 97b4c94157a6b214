"""Small dense real matrix algebra.

Matrices are two-dimensional ``float64`` numpy arrays.  Vectors are stored as
``n x 1`` columns (or ``1 x n`` rows), never as 1-D arrays, so every formula in
the package reads as a plain matrix product.

Elimination, Cholesky and the symmetric eigensolver are written out here
rather than delegated to LAPACK: their thresholds are part of the package's
contracts, and the test-suite uses ``numpy.linalg`` as an independent oracle.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractError, NonFiniteError, ShapeError, SingularMatrixError

Matrix = np.ndarray

SYMMETRY_RTOL = 1e-10
JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(data, name: str = "matrix") -> Matrix:
    """Convert ``data`` to a finite 2-D float64 array.

    1-D input becomes a column vector.  Raises ``ShapeError`` for empty or
    higher-dimensional input and ``NonFiniteError`` for NaN/inf entries.
    """
    a = np.array(data, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim != 2:
        raise ShapeError(f"{name}: expected a 2-D matrix, got {a.ndim} dimensions")
    if a.size == 0:
        raise ShapeError(f"{name}: matrix must have at least one row and column")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name}: entries must be finite")
    return a


def identity(n: int) -> Matrix:
    return np.eye(n)


def frobenius(a: Matrix) -> float:
    return float(np.sqrt(np.sum(np.square(a))))


def max_abs(a: Matrix) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def vec(a: Matrix) -> Matrix:
    """Column-stacking vectorization, returned as a column."""
    return np.reshape(a, (-1, 1), order="F")


def unvec(v: Matrix, rows: int, cols: int) -> Matrix:
    """Inverse of :func:`vec`."""
    return np.reshape(v, (rows, cols), order="F")


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product ``a @ b`` with a shape check naming both operands."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def _require_square(a: Matrix, what: str) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} requires a square matrix, got {a.shape}")
    return a.shape[0]


def singular_threshold(a: Matrix) -> float:
    return 1e-12 * max_abs(a) * a.shape[0]


def solve_linear(a: Matrix, rhs: Matrix) -> Matrix:
    """Solve ``a @ X = rhs`` by Gaussian elimination with row pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot falls to or below ``1e-12 * max|a| * n``.
    """
    n = _require_square(a, "solve_linear")
    if rhs.ndim != 2 or rhs.shape[0] != n:
        raise ShapeError(f"right-hand side {rhs.shape} does not match {a.shape}")

    threshold = singular_threshold(a)
    k = rhs.shape[1]
    aug = np.hstack([a.astype(np.float64), rhs.astype(np.float64)])
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot_row, col]) <= threshold:
            raise SingularMatrixError(
                f"matrix is singular to working precision (pivot {col} "
                f"= {aug[pivot_row, col]:.3e}, threshold {threshold:.3e})"
            )
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        factors = aug[col + 1 :, col] / aug[col, col]
        aug[col + 1 :, col:] -= np.outer(factors, aug[col, col:])

    x = np.empty((n, k))
    for row in range(n - 1, -1, -1):
        x[row] = (aug[row, n:] - aug[row, row + 1 : n] @ x[row + 1 :]) / aug[row, row]
    return x


def inverse(a: Matrix) -> Matrix:
    return solve_linear(a, identity(_require_square(a, "inverse")))


def rank(a: Matrix, tol: float | None = None) -> int:
    """Numerical rank: pivots above ``tol`` in row-pivoted elimination.

    The default tolerance is ``1e-9 * max(rows, cols) * max|a|``.
    """
    rows, cols = a.shape
    if tol is None:
        tol = 1e-9 * max(rows, cols) * max_abs(a)
    if tol < 0:
        raise ContractError("rank tolerance must be non-negative")
    work = a.astype(np.float64).copy()
    r = 0
    for col in range(cols):
        if r == rows:
            break
        pivot_row = r + int(np.argmax(np.abs(work[r:, col])))
        if abs(work[pivot_row, col]) <= tol:
            continue
        work[[r, pivot_row]] = work[[pivot_row, r]]
        factors = work[r + 1 :, col] / work[r, col]
        work[r + 1 :, col:] -= np.outer(factors, work[r, col:])
        r += 1
    return r


def is_symmetric(a: Matrix, rtol: float = SYMMETRY_RTOL) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return max_abs(a - a.T) <= rtol * max(max_abs(a), 1e-300)


def _require_symmetric(a: Matrix, what: str) -> int:
    n = _require_square(a, what)
    if not is_symmetric(a):
        raise ContractError(f"{what} requires a symmetric matrix")
    return n


def cholesky_pd(a: Matrix) -> Matrix | None:
    """Lower-triangular ``L`` with ``L @ L.T == a``, or ``None`` if ``a`` is not PD.

    A pivot at or below ``1e-12 * max(diag(a))`` counts as not positive
    definite.  Asymmetric input raises ``ContractError``.
    """
    n = _require_symmetric(a, "cholesky_pd")
    floor = 1e-12 * float(np.max(np.diag(a)))
    L = np.zeros((n, n))
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > floor or pivot <= 0.0:
            return None
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def is_positive_definite(a: Matrix) -> bool:
    return cholesky_pd(a) is not None


def sym_eigen(a: Matrix) -> list[float]:
    """Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``1e-12 * ||a||_F``.
    """
    n = _require_symmetric(a, "sym_eigen")
    work = 0.5 * (a + a.T)
    stop = JACOBI_RTOL * frobenius(a)

    def off_norm(m: Matrix) -> float:
        return frobenius(m - np.diag(np.diag(m)))

    for _ in range(JACOBI_MAX_SWEEPS):
        if off_norm(work) <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                diff = work[q, q] - work[p, p]
                if abs(diff) + abs(apq) * 1e18 == abs(diff):
                    # |theta| would overflow; tan of the rotation angle is ~ apq / diff.
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # Apply the rotation J^T work J on rows/columns p and q.
                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q
                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
    return sorted(float(v) for v in np.diag(work))


def spectral_norm(a: Matrix) -> float:
    """Operator 2-norm, ``sqrt(lambda_max(a^T a))``."""
    gram = a.T @ a
    gram = 0.5 * (gram + gram.T)
    return float(np.sqrt(max(sym_eigen(gram)[-1], 0.0)))


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    return np.kron(a, b)
