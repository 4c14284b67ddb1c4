"""Exception hierarchy shared by all modules."""


class PentagramError(Exception):
    """Base class for every error raised by this package."""


class DegeneracyError(PentagramError):
    """Raised when data sits on a non-generic locus (exit code 3 in the CLI)."""


class DegenerateLine(DegeneracyError):
    pass


class DegenerateIntersection(DegeneracyError):
    pass


class DegenerateDiagonal(DegeneracyError):
    pass


class DegenerateChain(DegeneracyError):
    pass


class MapUndefined(DegeneracyError):
    pass


class MapUndefinedAtStep(MapUndefined):
    """The pentagram map failed partway through an orbit.

    ``step`` is the index of the state at which the map could not be applied
    and ``orbit`` holds the states computed so far.
    """

    def __init__(self, step, orbit, cause=None):
        super().__init__(f"pentagram map undefined at step {step}: {cause}")
        self.step = step
        self.orbit = orbit
        self.cause = cause


class IndivisibilityViolated(PentagramError, ValueError):
    """The (a, b) coordinates require n not divisible by 3."""


class UnsupportedN(PentagramError, ValueError):
    pass


class InconsistentLift(PentagramError):
    pass


class NoPreimage(PentagramError):
    pass


class DegenerateLambda(DegeneracyError):
    pass


class ConstraintViolated(PentagramError, ValueError):
    pass


class SupportMismatch(PentagramError):
    pass


class ZeroZ(PentagramError, ValueError):
    pass


class NonGeneric(DegeneracyError):
    pass


class Degenerate(DegeneracyError):
    pass


class NearBranchPoint(DegeneracyError):
    pass


class SheetTrackingFailed(PentagramError):
    pass


class DivisionByZero(PentagramError, ZeroDivisionError):
    pass


class GenerationFailed(PentagramError):
    pass
