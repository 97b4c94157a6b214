"""Tolerability of initial-state disturbances.

A disturbance is (epsilon, T)-tolerable when the output error satisfies
``||y_i - ym_i|| <= epsilon`` for every ``i >= T``.  A finite simulation only
sees ``i <= horizon``; the remaining tail is covered by the geometric bound

    ||e_i|| <= ||C|| * sqrt(V_T / lambda_min(P)) * gamma ** ((i - T) / 2),
    gamma = 1 - lambda_min(Q) / lambda_max(P),

which follows from ``V_{i+1} = V_i - xtilde_i^T Q xtilde_i <= gamma * V_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ContractError, SynthesisError
from .linalg import Matrix
from .simulator import Disturbance, Trajectory, simulate, simulate_perturbed
from .synthesis import PlantModel, ReferenceModel, TrackingGains, place_gain, tracking_gains

BISECTION_STEPS = 8


@dataclass(frozen=True)
class ToleranceSpec:
    epsilon: float
    T: int

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ContractError(f"epsilon must be a positive finite number, got {self.epsilon}")
        if int(self.T) != self.T or self.T < 0:
            raise ContractError(f"T must be a nonnegative integer, got {self.T}")
        object.__setattr__(self, "T", int(self.T))


@dataclass(frozen=True)
class Certificate:
    gamma: float
    lambda_min_P: float
    lambda_max_P: float
    lambda_min_Q: float
    V_T: float
    C_norm: float
    T: int

    def bound_at(self, i: int) -> float:
        if i < self.T:
            raise ContractError(f"certificate only covers steps i >= {self.T}, got {i}")
        if self.V_T == 0.0:
            return 0.0
        return self.C_norm * math.sqrt(self.V_T / self.lambda_min_P) * self.gamma ** ((i - self.T) / 2)


@dataclass(frozen=True)
class ToleranceResult:
    tolerable: bool
    max_err_after_T: float
    certified_tail: bool


def certify_tolerable(
    gains: TrackingGains, C: Matrix, xtilde_T: Matrix, spec: ToleranceSpec
) -> tuple[Certificate, bool]:
    """Build the tail certificate from ``xtilde_T`` and test it against ``spec.epsilon``.

    The bound decays monotonically, so ``bound_at(T) <= epsilon`` certifies
    every later step as well.
    """
    if getattr(gains, "P", None) is None or getattr(gains, "Q", None) is None:
        raise ContractError("gains carry no Lyapunov witness P, Q")
    eig_p = linalg.sym_eigen(gains.P)
    eig_q = linalg.sym_eigen(gains.Q)
    lam_min_p, lam_max_p, lam_min_q = eig_p[0], eig_p[-1], eig_q[0]
    if lam_min_p <= 0 or lam_min_q <= 0:
        raise ContractError("P and Q must be positive definite")
    gamma = min(max(1.0 - lam_min_q / lam_max_p, 0.0), 1.0)
    V_T = max(float((xtilde_T.T @ gains.P @ xtilde_T)[0, 0]), 0.0)
    cert = Certificate(
        gamma=gamma,
        lambda_min_P=lam_min_p,
        lambda_max_P=lam_max_p,
        lambda_min_Q=lam_min_q,
        V_T=V_T,
        C_norm=linalg.spectral_norm(C),
        T=spec.T,
    )
    return cert, cert.bound_at(spec.T) <= spec.epsilon


def trajectory_certificate(traj: Trajectory, T: int) -> Certificate:
    """Certificate anchored at recorded step ``T`` of ``traj``."""
    if T > traj.horizon:
        raise ContractError(f"T = {T} exceeds the trajectory horizon {traj.horizon}")
    spec = ToleranceSpec(1.0, T)
    cert, _ = certify_tolerable(traj.gains, traj.plant.C, traj.steps[T].xtilde, spec)
    return cert


def _tail_certified(traj: Trajectory, epsilon: float) -> bool:
    cert = trajectory_certificate(traj, traj.horizon)
    return cert.bound_at(traj.horizon + 1) <= epsilon


def check_tolerable(traj: Trajectory, spec: ToleranceSpec) -> ToleranceResult:
    """Decide tolerability over the recorded steps plus the certified tail."""
    if spec.T > traj.horizon:
        raise ContractError(f"T = {spec.T} exceeds the trajectory horizon {traj.horizon}")
    errs = traj.e_norms[spec.T :]
    max_err = float(errs.max())
    tail = _tail_certified(traj, spec.epsilon)
    return ToleranceResult(bool(max_err <= spec.epsilon) and tail, max_err, tail)


def minimal_tolerance_time(traj: Trajectory, epsilon: float) -> int | None:
    """Smallest ``T`` for which the run is (epsilon, T)-tolerable, or ``None``."""
    if not epsilon > 0:
        raise ContractError("epsilon must be positive")
    if not _tail_certified(traj, epsilon):
        return None
    above = np.flatnonzero(traj.e_norms > epsilon)
    T = 0 if above.size == 0 else int(above[-1]) + 1
    return T if T <= traj.horizon else None


@dataclass
class SearchPoint:
    c: float
    max_err_after_T: float | None
    tolerable: bool
    skipped: str | None = None


@dataclass
class SearchResult:
    """Outcome of :func:`synthesize_tolerant_gain`.

    On success ``c``/``K``/``gains`` describe the least aggressive passing
    contraction found.  On failure they describe the best configuration seen
    (smallest ``max_err_after_T``), if any could be built.
    """

    success: bool
    c: float | None
    K: Matrix | None
    gains: TrackingGains | None
    T_achieved: int | None
    max_err_after_T: float | None
    evaluated: list[SearchPoint] = field(default_factory=list)

    @property
    def skipped(self) -> list[SearchPoint]:
        return [p for p in self.evaluated if p.skipped is not None]


def synthesize_tolerant_gain(
    plant: PlantModel,
    reference: ReferenceModel,
    d: Disturbance | None,
    spec: ToleranceSpec,
    base_target,
    c_min: float = 0.05,
    steps: int = 20,
    q=None,
    horizon: int = 200,
) -> SearchResult:
    """Search contractions ``c * base_target`` for a gain meeting ``spec``.

    The grid ``c = 1 ... c_min`` is scanned downward; the first passing point
    is then refined by bisection against the last failing one so the result
    is the mildest contraction that still works.
    """
    base = linalg.as_matrix(base_target, "base_target")
    if not 0 < c_min <= 1 or steps < 1:
        raise ContractError("search needs 0 < c_min <= 1 and steps >= 1")
    if spec.T > horizon:
        raise ContractError(f"T = {spec.T} exceeds the search horizon {horizon}")

    evaluated: list[SearchPoint] = []
    runs: dict[float, tuple[TrackingGains, Trajectory, ToleranceResult]] = {}

    def evaluate(c: float) -> bool:
        try:
            K = place_gain(plant, c * base)
            gains = tracking_gains(plant, reference, K, q)
            if d is None:
                traj = simulate(plant, reference, gains, horizon)
            else:
                traj = simulate_perturbed(plant, reference, gains, d, horizon)
        except (SynthesisError, ArithmeticError) as exc:
            evaluated.append(SearchPoint(c, None, False, skipped=str(exc)))
            return False
        result = check_tolerable(traj, spec)
        runs[c] = (gains, traj, result)
        evaluated.append(SearchPoint(c, result.max_err_after_T, result.tolerable))
        return result.tolerable

    grid = [1.0] if steps == 1 else list(np.linspace(1.0, c_min, steps))
    passing = failing = None
    for c in grid:
        c = float(c)
        if evaluate(c):
            passing = c
            break
        failing = c

    if passing is not None and failing is not None:
        lo, hi = passing, failing
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if evaluate(mid):
                lo = mid
            else:
                hi = mid
        passing = lo

    if passing is not None:
        gains, traj, result = runs[passing]
        return SearchResult(
            success=True,
            c=passing,
            K=gains.K,
            gains=gains,
            T_achieved=minimal_tolerance_time(traj, spec.epsilon),
            max_err_after_T=result.max_err_after_T,
            evaluated=evaluated,
        )

    if not runs:
        return SearchResult(False, None, None, None, None, None, evaluated)
    best_c = min(runs, key=lambda c: runs[c][2].max_err_after_T)
    gains, traj, result = runs[best_c]
    return SearchResult(
        success=False,
        c=best_c,
        K=gains.K,
        gains=gains,
        T_achieved=minimal_tolerance_time(traj, spec.epsilon),
        max_err_after_T=result.max_err_after_T,
        evaluated=evaluated,
    )
