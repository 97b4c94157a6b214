"""Output tracking and model following for discrete-time linear systems.

Synthesizes linear tracking controllers from a Lyapunov witness, simulates
the closed loop against a reference model, checks the error recursion step
by step, and decides tolerability of initial-state disturbances.
"""
from .errors import (
    Assumption2Error,
    ClosedLoopSingularError,
    ContractError,
    FullRowRankError,
    LyaptrackError,
    NoConvergenceError,
    NonFiniteError,
    NotSchurStableError,
    NumericOverflowError,
    ShapeError,
    SingularMatrixError,
    SynthesisError,
)
from .lyapunov import (
    LyapunovSolution,
    lyapunov_residual,
    schur_certificate,
    solve_direct,
    solve_iterative,
)
from .simulator import (
    Disturbance,
    StepRecord,
    Trajectory,
    control_input,
    simulate,
    simulate_perturbed,
    verify_theorem1,
)
from .synthesis import (
    PlantModel,
    ReferenceModel,
    TrackingGains,
    is_controllable,
    place_gain,
    tracking_gains,
    validate_gains,
)
from .tolerance import (
    Certificate,
    ToleranceSpec,
    certify_tolerable,
    check_tolerable,
    minimal_tolerance_time,
    synthesize_tolerant_gain,
)

__version__ = "0.1.0"
