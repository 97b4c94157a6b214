"""Discrete Lyapunov equation ``P - A^T P A = Q`` and Schur-stability certificates.

The sign convention is the one under which the Lyapunov increment along
``x_{i+1} = A x_i`` equals ``-x_i^T Q x_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from . import linalg
from .errors import (
    ContractError,
    NoConvergenceError,
    NotSchurStableError,
    ShapeError,
    SingularMatrixError,
)
from .linalg import Matrix


@dataclass(frozen=True)
class LyapunovSolution:
    P: Matrix
    residual: float
    method: Literal["direct", "iterative"]
    iterations: int = 0


class SchurCertificate(NamedTuple):
    stable: bool
    p: Matrix | None


def _check_inputs(a_cl: Matrix, q: Matrix) -> int:
    n = a_cl.shape[0]
    if a_cl.ndim != 2 or a_cl.shape != (n, n):
        raise ShapeError(f"closed-loop matrix must be square, got {a_cl.shape}")
    if q.shape != (n, n):
        raise ShapeError(f"Q must be {n}x{n} to match the closed loop, got {q.shape}")
    if linalg.cholesky_pd(q) is None:
        raise ContractError("Q must be symmetric positive definite")
    return n


def lyapunov_residual(a_cl: Matrix, q: Matrix, p: Matrix) -> float:
    """Frobenius norm of ``P - A^T P A - Q``."""
    return linalg.frobenius(p - a_cl.T @ p @ a_cl - q)


def solve_direct(a_cl: Matrix, q: Matrix) -> LyapunovSolution:
    """Solve through the vectorized system ``(I - A^T kron A^T) vec(P) = vec(Q)``.

    Raises ``NotSchurStableError`` when the Kronecker system is singular or
    the symmetrized solution is not positive definite.
    """
    n = _check_inputs(a_cl, q)
    at = a_cl.T
    system = linalg.identity(n * n) - linalg.kronecker(at, at)
    try:
        p_vec = linalg.solve_linear(system, linalg.vec(q))
    except SingularMatrixError as exc:
        raise NotSchurStableError(
            "closed loop is not Schur stable: Lyapunov system is singular"
        ) from exc
    p = linalg.unvec(p_vec, n, n)
    p = 0.5 * (p + p.T)
    if not np.all(np.isfinite(p)) or linalg.cholesky_pd(p) is None:
        raise NotSchurStableError(
            "closed loop is not Schur stable: Lyapunov solution is not positive definite"
        )
    return LyapunovSolution(p, lyapunov_residual(a_cl, q, p), "direct", 0)


def solve_iterative(
    a_cl: Matrix,
    q: Matrix,
    tol: float = 1e-12,
    max_iter: int = 10_000,
    patience: int = 50,
) -> LyapunovSolution:
    """Fixed-point iteration ``P <- A^T P A + Q`` starting from ``P = Q``.

    Stops when successive iterates differ by at most ``tol`` in Frobenius
    norm.  Large solutions can stall above an absolute ``tol`` at their
    rounding floor, so the iteration also stops once the step is below
    ``1e-10 * ||P||_F`` and has not shrunk for ``patience`` iterations.
    Divergence (iterate norm above ``1e12 * ||Q||_F``) raises
    ``NotSchurStableError``; an exhausted budget raises ``NoConvergenceError``.
    """
    _check_inputs(a_cl, q)
    blowup = 1e12 * linalg.frobenius(q)
    at = a_cl.T
    p = q.copy()
    smallest, stalled = float("inf"), 0
    for k in range(1, max_iter + 1):
        p_next = at @ p @ a_cl + q
        change = linalg.frobenius(p_next - p)
        p = p_next
        size = linalg.frobenius(p)
        if not np.isfinite(change) or size > blowup:
            raise NotSchurStableError(
                f"Lyapunov iteration diverged after {k} iterations; "
                "closed loop is not Schur stable"
            )
        if change < smallest:
            smallest, stalled = change, 0
        else:
            stalled += 1
        if change <= tol or (stalled >= patience and change <= 1e-10 * size):
            p = 0.5 * (p + p.T)
            return LyapunovSolution(p, lyapunov_residual(a_cl, q, p), "iterative", k)
    raise NoConvergenceError(f"Lyapunov iteration did not converge in {max_iter} iterations")


def schur_certificate(a_cl: Matrix) -> SchurCertificate:
    """Stable iff ``solve_direct(a_cl, I)`` produces a positive definite witness."""
    if a_cl.ndim != 2 or a_cl.shape[0] != a_cl.shape[1]:
        raise ShapeError(f"closed-loop matrix must be square, got {a_cl.shape}")
    try:
        sol = solve_direct(a_cl, linalg.identity(a_cl.shape[0]))
    except NotSchurStableError:
        return SchurCertificate(False, None)
    return SchurCertificate(True, sol.P)
