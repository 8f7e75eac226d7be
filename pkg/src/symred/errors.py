"""Exception types shared across the package."""


class SymredError(Exception):
    """Base class for all package-specific errors."""


class StratumError(SymredError):
    """Point lies in a stratum where the reduction hypotheses fail
    (the origin, or the cylinder axis where stabilizers jump)."""


class ToleranceError(SymredError):
    """A residual exceeded its admission tolerance (e.g. a point handed to
    the reduced chart is not on the zero momentum level)."""


class DegenerateWindowError(SymredError):
    """An energy window touches a critical value of the reduced Hamiltonian."""


class NoTurningPointError(SymredError):
    """The classically allowed radial set for the requested energy is empty
    or unbounded inside the configured radial window."""


class StepSizeError(SymredError):
    """The fixed-step symplectic integrator could not meet the drift
    tolerance within the configured maximum number of steps."""


class GridError(SymredError):
    """Radial grid below the resolution floor for the requested (h, window)."""


class AmbiguityError(SymredError):
    """An eigenvalue sits within its error estimate of a window edge, so the
    count is ambiguous.  Carries both admissible counts."""

    def __init__(self, message, count_low, count_high):
        super().__init__(message)
        self.count_low = count_low
        self.count_high = count_high


class NonIntegerMultiplicityError(SymredError):
    """The Haar average defining the trivial-representation multiplicity did
    not round cleanly to an integer (wrong stabilizer or quadrature failure)."""


class QuadratureError(SymredError):
    """Adaptive quadrature failed to reach its target error.  Carries the
    achieved error bound."""

    def __init__(self, message, achieved_error):
        super().__init__(message)
        self.achieved_error = achieved_error


class PhaseUnwrapError(SymredError):
    """The h-grid is too coarse for unambiguous phase unwrapping in the
    action regression."""


class ConfigError(SymredError):
    """Invalid experiment configuration; the message names the field."""
