"""Exception hierarchy shared by every module."""


class HypError(Exception):
    """Base class for all package errors."""


class DegenerateConfiguration(HypError, ValueError):
    """Points that must be distinct coincide."""


class SharedEndpoint(DegenerateConfiguration):
    """Two geodesics share an ideal endpoint."""


class NotCrossing(HypError, ValueError):
    """An intersection was requested for geodesics that do not cross."""


class ValidationFailed(HypError, ValueError):
    """A lamination violates its invariants.

    ``violations`` lists every offending leaf or leaf pair.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class CrossingLeaves(ValidationFailed):
    pass


class LeavesShareEndpoint(ValidationFailed, SharedEndpoint):
    pass


class NonpositiveWeight(ValidationFailed):
    pass


class NumericalFailure(HypError, ArithmeticError):
    """A numerical routine could not deliver a trustworthy value."""


class BranchGuard(NumericalFailure):
    """A cross-ratio left the safe half-plane of the principal logarithm."""


class SlowConvergence(NumericalFailure):
    pass


class ToleranceNotMet(NumericalFailure):
    """Adaptive quadrature ran out of budget; ``result`` holds the best value."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class StencilFailure(NumericalFailure):
    pass


class PathEvaluationFailure(NumericalFailure):
    pass


class AllZero(NumericalFailure):
    pass
