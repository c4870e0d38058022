"""
Errors raised by the relcoulomb library.

Library code raises these; the verification pipeline and the CLI catch them,
log them and turn them into exit codes.
"""


class RelCoulombError(Exception):
    """Base class for all library errors"""


class DomainError(RelCoulombError, ValueError):
    """Argument outside the domain where a quantity is defined"""


class DegenerateCoupling(DomainError):
    """(2l+1)^2 - 4 alpha^2 Z^2 <= 0: the effective angular momentum is complex"""


class OutOfRange(DomainError):
    """Scalar parameter outside its admissible interval"""


class Unbound(DomainError):
    """Phase point is not on a bound orbit"""


class SubBarrier(DomainError):
    """Angular momentum below alpha Z for a point claimed to be on an orbit"""


class GridOutOfDomain(DomainError):
    """Evaluation grid leaves the open half line (0, inf)"""


class UnsupportedState(RelCoulombError):
    """Operation not available for the given state density"""


class MaxSubdivisions(RelCoulombError):
    """Adaptive quadrature could not reach the requested tolerance"""

    def __init__(self, message: str, value: float = float("nan"), error: float = float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


class EmptyBatch(RelCoulombError):
    """Monte Carlo estimate requested from an empty sample"""


class Collision(RelCoulombError):
    """Trajectory reached the collision radius"""


class ToleranceFailure(RelCoulombError):
    """ODE integrator failed to meet its tolerance"""
