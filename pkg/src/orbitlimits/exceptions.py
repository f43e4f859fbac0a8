"""Exception hierarchy shared by all modules."""


class OrbitLimitsError(Exception):
    """Base class for every error raised by the package."""


class InvalidPermutation(OrbitLimitsError, ValueError):
    pass


class OrderBoundExceeded(OrbitLimitsError):
    pass


class LatticeBoundExceeded(OrbitLimitsError):
    pass


class NotASubgroup(OrbitLimitsError, ValueError):
    pass


class NotPGroup(OrbitLimitsError, ValueError):
    pass


class DimensionMismatch(OrbitLimitsError, ValueError):
    pass


class DimensionBoundExceeded(OrbitLimitsError):
    pass


class ActionUndefined(OrbitLimitsError, KeyError):
    pass


class DegreeBoundExceeded(OrbitLimitsError):
    pass


class LiftFailed(OrbitLimitsError):
    """Raised when a chain lift cannot be solved; means exactness is broken."""


class AxiomViolation(OrbitLimitsError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class HypothesisUnmet(OrbitLimitsError, ValueError):
    pass


class EmptyB(OrbitLimitsError):
    pass


class MemoryBoundExceeded(OrbitLimitsError):
    def __init__(self, degree, predicted, bound):
        super().__init__(
            f"degree {degree}: predicted {predicted} nonzeros exceeds bound {bound}"
        )
        self.degree = degree
        self.predicted = predicted
        self.bound = bound


class OrderingViolation(OrbitLimitsError, ValueError):
    pass
