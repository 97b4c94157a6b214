"""Exception hierarchy shared by every module of the package."""


class LyaptrackError(Exception):
    """Base class for all errors raised by lyaptrack."""


class ShapeError(LyaptrackError, ValueError):
    """Operands have incompatible dimensions."""


class ContractError(LyaptrackError, ValueError):
    """An input violates a documented precondition (symmetry, ranges, ...)."""


class NonFiniteError(LyaptrackError, ValueError):
    """A NaN or infinite entry was supplied where a finite matrix is required."""


class SingularMatrixError(LyaptrackError, ArithmeticError):
    """Elimination met a pivot below the singularity threshold."""


class NotSchurStableError(LyaptrackError, ArithmeticError):
    """A closed-loop matrix has spectral radius >= 1 (no PD Lyapunov witness)."""


class NoConvergenceError(NotSchurStableError):
    """The fixed-point Lyapunov iteration exhausted its iteration budget."""


class SynthesisError(LyaptrackError, ValueError):
    """Gain construction failed."""


class FullRowRankError(SynthesisError):
    """B B^T is singular, so no right inverse of B exists."""


class ClosedLoopSingularError(SynthesisError):
    """A + BK is singular; the tracking gains need its inverse."""


class Assumption2Error(SynthesisError):
    """One of the tracking gains R, G, G_e, H cannot be formed."""

    remedy = "a different model must be chosen"

    def __init__(self, message: str):
        super().__init__(f"{message}; {self.remedy}")


class NumericOverflowError(LyaptrackError, ArithmeticError):
    """A simulation produced a non-finite value."""

    def __init__(self, step: int, quantity: str = "state"):
        self.step = step
        super().__init__(f"non-finite {quantity} encountered at step {step}")
