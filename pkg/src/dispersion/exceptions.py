from __future__ import annotations


class DispersionError(ValueError):
    """Base class for invalid input or numerical breakdown in the dispersion library."""


class NegativeWeightError(DispersionError):
    pass


class NonFiniteWeightError(DispersionError):
    pass


class ZeroMassError(DispersionError):
    pass


class NotNormalizedError(DispersionError):
    pass


class OutOfDomainError(DispersionError):
    pass


class TruncationTooSmallError(DispersionError):
    pass


class MeanMismatchError(DispersionError):
    pass


class StepUnstableError(DispersionError):
    """Raised when an RK4 step produces weights below the negativity tolerance.

    Attributes:
        time: The time at which the step started, if known.
        suggested_dt: A conservative step size for the current truncation.

    """

    def __init__(self, msg: str, *, time: float | None = None, suggested_dt: float | None = None) -> None:
        super().__init__(msg)
        self.time = time
        self.suggested_dt = suggested_dt


class NonUniformSamplingError(DispersionError):
    pass


class OffGridError(DispersionError):
    pass


class InvalidPlacementError(DispersionError):
    pass


class StateCorruptedError(DispersionError):
    pass


class WindowTooSmallError(DispersionError):
    pass


class AllFlooredError(DispersionError):
    pass


class InitSpecError(DispersionError):
    pass
