"""Closed-loop simulation under ``u = K x + (H - K G) xm`` and step-wise proof checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ContractError, NumericOverflowError, ShapeError
from .linalg import Matrix
from .synthesis import PlantModel, ReferenceModel, TrackingGains

DEFAULT_HORIZON = 200


@dataclass(frozen=True)
class Disturbance:
    """Initial-state disturbance: the plant starts from ``alpha * x0 + beta``."""

    alpha: float
    beta: Matrix

    def __post_init__(self):
        alpha = float(self.alpha)
        if not np.isfinite(alpha):
            raise ContractError("alpha must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", linalg.as_matrix(self.beta, "beta"))

    def apply(self, x0: Matrix) -> Matrix:
        if self.beta.shape != x0.shape:
            raise ShapeError(f"beta: expected shape {x0.shape[0]}x1, got {self.beta.shape[0]}x{self.beta.shape[1]}")
        return self.alpha * x0 + self.beta


@dataclass(frozen=True)
class StepRecord:
    i: int
    x: Matrix
    xm: Matrix
    xtilde: Matrix
    u: Matrix
    y: Matrix
    ym: Matrix
    e: Matrix
    e_norm: float
    V: float
    dV: float | None


@dataclass
class Trajectory:
    steps: list[StepRecord]
    horizon: int
    gains: TrackingGains
    plant: PlantModel
    reference: ReferenceModel
    disturbance: Disturbance | None = None

    @property
    def e_norms(self) -> np.ndarray:
        return np.array([s.e_norm for s in self.steps])

    @property
    def x_start(self) -> Matrix:
        return self.steps[0].x


def control_input(gains: TrackingGains, x: Matrix, xm: Matrix) -> Matrix:
    n = gains.K.shape[1]
    if x.shape != (n, 1) or xm.shape != (gains.G.shape[1], 1):
        raise ShapeError(f"control_input: state {x.shape} / reference state {xm.shape} do not conform to K {gains.K.shape}, G {gains.G.shape}")
    return gains.K @ x + (gains.H - gains.K @ gains.G) @ xm


def _run(
    plant: PlantModel,
    reference: ReferenceModel,
    gains: TrackingGains,
    x_start: Matrix,
    horizon: int,
    disturbance: Disturbance | None,
) -> Trajectory:
    if horizon < 1:
        raise ContractError("horizon must be at least 1")
    reference.check_against(plant)
    A, B, C = plant.A, plant.B, plant.C
    Am, Cm, Ge, P = reference.Am, reference.Cm, gains.Ge, gains.P
    feedforward = gains.H - gains.K @ gains.G

    steps: list[StepRecord] = []
    x, xm = x_start, reference.x0m
    V_prev = None
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(horizon + 1):
            xtilde = x - Ge @ xm
            u = gains.K @ x + feedforward @ xm
            y = C @ x
            ym = Cm @ xm
            e = y - ym
            V = float((xtilde.T @ P @ xtilde)[0, 0])
            # A NaN/inf anywhere in x or u propagates into these sums.
            if not (math.isfinite(V) and math.isfinite(float(x.sum())) and math.isfinite(float(u.sum()))):
                raise NumericOverflowError(i)
            steps.append(
                StepRecord(
                    i, x, xm, xtilde, u, y, ym, e, math.sqrt(float((e.T @ e)[0, 0])), V,
                    None if V_prev is None else V - V_prev,
                )
            )
            V_prev = V
            x = A @ x + B @ u
            xm = Am @ xm
    return Trajectory(steps, horizon, gains, plant, reference, disturbance)


def simulate(
    plant: PlantModel,
    reference: ReferenceModel,
    gains: TrackingGains,
    horizon: int = DEFAULT_HORIZON,
) -> Trajectory:
    """Run the nominal closed loop from ``plant.x0`` for ``horizon`` steps."""
    return _run(plant, reference, gains, plant.x0, horizon, None)


def simulate_perturbed(
    plant: PlantModel,
    reference: ReferenceModel,
    gains: TrackingGains,
    d: Disturbance,
    horizon: int = DEFAULT_HORIZON,
) -> Trajectory:
    """Same as :func:`simulate` but starting from ``d.alpha * x0 + d.beta``."""
    return _run(plant, reference, gains, d.apply(plant.x0), horizon, d)


@dataclass
class Theorem1Report:
    """Residuals of the error recursion, the Lyapunov increment and ``e = C xtilde``.

    ``recursion[i]`` compares step ``i+1`` with ``a_cl @ xtilde_i``;
    ``increment[i]`` is ``|dV_{i+1} + xtilde_i^T Q xtilde_i|``;
    ``output[i]`` is ``||e_i - C xtilde_i||``.
    """

    recursion: np.ndarray
    increment: np.ndarray
    output: np.ndarray
    tolerance: float
    v_monotone: bool
    v_strictly_decreasing: bool

    @property
    def max_recursion(self) -> float:
        return float(self.recursion.max(initial=0.0))

    @property
    def max_increment(self) -> float:
        return float(self.increment.max(initial=0.0))

    @property
    def max_output(self) -> float:
        return float(self.output.max(initial=0.0))

    @property
    def passed(self) -> bool:
        return (
            max(self.max_recursion, self.max_increment, self.max_output) <= self.tolerance
            and self.v_monotone
        )


def verify_theorem1(
    traj: Trajectory, gains: TrackingGains, strict_floor: float = 1e-12
) -> Theorem1Report:
    """Check the recorded trajectory against the closed-form error dynamics.

    ``V`` must be nonincreasing (up to the residual tolerance) everywhere;
    strict decrease is reported separately for steps where
    ``||xtilde_i|| > strict_floor``.
    """
    C = traj.plant.C
    steps = traj.steps
    xt0 = steps[0].xtilde
    tol = 1e-9 * (1.0 + float(np.sum(xt0 * xt0)))

    recursion, increment, output = [], [], []
    monotone = strict = True
    for cur, nxt in zip(steps, steps[1:]):
        recursion.append(linalg.frobenius(nxt.xtilde - gains.a_cl @ cur.xtilde))
        quad = float((cur.xtilde.T @ gains.Q @ cur.xtilde)[0, 0])
        increment.append(abs(nxt.dV + quad))
        # Near V = 0 the recorded values jitter at rounding level.
        if nxt.V > cur.V + tol:
            monotone = False
        if linalg.frobenius(cur.xtilde) > strict_floor and not nxt.V < cur.V:
            strict = False
    for s in steps:
        output.append(linalg.frobenius(s.e - C @ s.xtilde))

    return Theorem1Report(
        recursion=np.array(recursion),
        increment=np.array(increment),
        output=np.array(output),
        tolerance=tol,
        v_monotone=monotone,
        v_strictly_decreasing=strict,
    )
