"""Plant/reference models, feedback gain assignment and tracking gains.

Given a plant ``x+ = A x + B u, y = C x`` and a reference model
``xm+ = Am xm, ym = Cm xm``, the tracking gains are::

    R  = C (A+BK)^-1 B K
    G  = R^T (R R^T)^-1 Cm
    Ge = (A+BK)^-1 B K G
    H  = B^T (B B^T)^-1 Ge Am

and the control law ``u = K x + (H - K G) xm`` makes ``x - Ge xm`` evolve
under ``A + BK`` alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import (
    Assumption2Error,
    ClosedLoopSingularError,
    FullRowRankError,
    NotSchurStableError,
    ShapeError,
    SingularMatrixError,
    SynthesisError,
)
from .linalg import Matrix
from .lyapunov import lyapunov_residual, schur_certificate, solve_direct

IDENTITY_RTOL = 1e-9


def _shape_error(field: str, expected: tuple[int, int], got: tuple[int, ...]) -> ShapeError:
    return ShapeError(f"{field}: expected shape {expected[0]}x{expected[1]}, got {got[0]}x{got[1]}")


@dataclass(frozen=True)
class PlantModel:
    A: Matrix
    B: Matrix
    C: Matrix
    x0: Matrix

    def __post_init__(self):
        for field in ("A", "B", "C", "x0"):
            object.__setattr__(self, field, linalg.as_matrix(getattr(self, field), field))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise _shape_error("A", (n, n), self.A.shape)
        if self.B.shape[0] != n:
            raise _shape_error("B", (n, self.B.shape[1]), self.B.shape)
        if self.C.shape[1] != n:
            raise _shape_error("C", (self.C.shape[0], n), self.C.shape)
        if self.x0.shape != (n, 1):
            raise _shape_error("x0", (n, 1), self.x0.shape)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class ReferenceModel:
    Am: Matrix
    Cm: Matrix
    x0m: Matrix

    def __post_init__(self):
        for field in ("Am", "Cm", "x0m"):
            object.__setattr__(self, field, linalg.as_matrix(getattr(self, field), field))
        nm = self.Am.shape[0]
        if self.Am.shape != (nm, nm):
            raise _shape_error("Am", (nm, nm), self.Am.shape)
        if self.Cm.shape[1] != nm:
            raise _shape_error("Cm", (self.Cm.shape[0], nm), self.Cm.shape)
        if self.x0m.shape != (nm, 1):
            raise _shape_error("x0m", (nm, 1), self.x0m.shape)

    @property
    def nm(self) -> int:
        return self.Am.shape[0]

    @property
    def p(self) -> int:
        return self.Cm.shape[0]

    def check_against(self, plant: PlantModel) -> None:
        """The reference output must have the plant's output dimension."""
        if self.p != plant.p:
            raise _shape_error("Cm", (plant.p, self.nm), self.Cm.shape)


@dataclass(frozen=True)
class TrackingGains:
    K: Matrix
    Q: Matrix
    P: Matrix
    R: Matrix
    G: Matrix
    Ge: Matrix
    H: Matrix
    a_cl: Matrix


class Controllability(NamedTuple):
    controllable: bool
    ctrb: Matrix


@dataclass(frozen=True)
class GainReport:
    """Residuals of the algebraic identities behind the error recursion."""

    c_ge: float
    b_h: float
    acl_ge: float
    lyapunov: float
    c_ge_limit: float
    b_h_limit: float
    acl_ge_limit: float
    lyapunov_limit: float

    @property
    def c_ge_ok(self) -> bool:
        return self.c_ge <= self.c_ge_limit

    @property
    def b_h_ok(self) -> bool:
        return self.b_h <= self.b_h_limit

    @property
    def acl_ge_ok(self) -> bool:
        return self.acl_ge <= self.acl_ge_limit

    @property
    def lyapunov_ok(self) -> bool:
        return self.lyapunov <= self.lyapunov_limit

    @property
    def passed(self) -> bool:
        return self.c_ge_ok and self.b_h_ok and self.acl_ge_ok and self.lyapunov_ok

    def failures(self) -> list[str]:
        checks = {
            "C*Ge = Cm": self.c_ge_ok,
            "B*H = Ge*Am": self.b_h_ok,
            "(A+BK)*Ge = B*K*G": self.acl_ge_ok,
            "Lyapunov residual": self.lyapunov_ok,
        }
        return [name for name, ok in checks.items() if not ok]


def controllability_matrix(A: Matrix, B: Matrix) -> Matrix:
    blocks = [B]
    for _ in range(A.shape[0] - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def is_controllable(plant: PlantModel) -> Controllability:
    ctrb = controllability_matrix(plant.A, plant.B)
    return Controllability(linalg.rank(ctrb) == plant.n, ctrb)


def right_inverse_solve(B: Matrix, rhs: Matrix) -> Matrix:
    """``B^T (B B^T)^-1 rhs``; raises ``FullRowRankError`` if ``B B^T`` is singular."""
    try:
        return B.T @ linalg.solve_linear(B @ B.T, rhs)
    except SingularMatrixError as exc:
        raise FullRowRankError("B B^T is singular: B does not have full row rank") from exc


def place_gain(plant: PlantModel, a_cl_target) -> Matrix:
    """Feedback gain ``K`` with ``A + B K == a_cl_target``.

    Requires ``B`` of full row rank, in which case any target is reachable
    through the right inverse of ``B``.
    """
    target = linalg.as_matrix(a_cl_target, "a_cl_target")
    if target.shape != plant.A.shape:
        raise _shape_error("a_cl_target", plant.A.shape, target.shape)
    delta = target - plant.A
    K = right_inverse_solve(plant.B, delta)
    residual = linalg.frobenius(plant.B @ K - delta)
    if residual > IDENTITY_RTOL * (1.0 + linalg.frobenius(delta)):
        raise SynthesisError(f"target closed loop not achievable (residual {residual:.3e})")
    return K


def tracking_gains(
    plant: PlantModel, reference: ReferenceModel, k, q=None
) -> TrackingGains:
    """Build ``R, G, Ge, H`` and the Lyapunov witness ``P`` for gain ``k``.

    ``q`` defaults to the identity.  The closed loop ``A + B k`` must be
    invertible and Schur stable, and ``R R^T`` and ``B B^T`` invertible.
    """
    reference.check_against(plant)
    K = linalg.as_matrix(k, "K")
    if K.shape != (plant.m, plant.n):
        raise _shape_error("K", (plant.m, plant.n), K.shape)
    Q = linalg.identity(plant.n) if q is None else linalg.as_matrix(q, "Q")

    a_cl = plant.A + plant.B @ K
    BK = plant.B @ K
    try:
        acl_inv_bk = linalg.solve_linear(a_cl, BK)
    except SingularMatrixError as exc:
        raise ClosedLoopSingularError("target closed loop must be invertible (A+BK is singular)") from exc
    cert = schur_certificate(a_cl)
    if not cert.stable:
        raise NotSchurStableError("A+BK is not Schur stable")
    P = cert.p if q is None else solve_direct(a_cl, Q).P

    R = plant.C @ acl_inv_bk
    try:
        G = R.T @ linalg.solve_linear(R @ R.T, reference.Cm)
    except SingularMatrixError as exc:
        raise Assumption2Error("R R^T is singular") from exc
    Ge = acl_inv_bk @ G
    try:
        H = right_inverse_solve(plant.B, Ge @ reference.Am)
    except FullRowRankError as exc:
        raise Assumption2Error("B B^T is singular") from exc

    gains = TrackingGains(K=K, Q=Q, P=P, R=R, G=G, Ge=Ge, H=H, a_cl=a_cl)
    report = validate_gains(gains, plant, reference)
    if not report.passed:
        raise Assumption2Error("tracking identities fail: " + ", ".join(report.failures()))
    return gains


def validate_gains(
    gains: TrackingGains, plant: PlantModel, reference: ReferenceModel
) -> GainReport:
    BKG = plant.B @ gains.K @ gains.G
    GeAm = gains.Ge @ reference.Am
    f = linalg.frobenius
    return GainReport(
        c_ge=f(plant.C @ gains.Ge - reference.Cm),
        b_h=f(plant.B @ gains.H - GeAm),
        acl_ge=f(gains.a_cl @ gains.Ge - BKG),
        lyapunov=lyapunov_residual(gains.a_cl, gains.Q, gains.P),
        c_ge_limit=IDENTITY_RTOL * (1.0 + f(reference.Cm)),
        b_h_limit=IDENTITY_RTOL * (1.0 + f(GeAm)),
        acl_ge_limit=IDENTITY_RTOL * (1.0 + f(BKG)),
        lyapunov_limit=IDENTITY_RTOL * (1.0 + f(gains.Q)),
    )
