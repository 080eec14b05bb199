"""Exception hierarchy for the interpolation-constant pipeline."""


class InterpConstError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateTriangle(InterpConstError, ValueError):
    pass


class InvalidDegree(InterpConstError, ValueError):
    pass


class SingularDofMatrix(InterpConstError):
    pass


class MidpointNotANode(InterpConstError):
    pass


class AssemblyRankError(InterpConstError):
    pass


class NotSPD(InterpConstError):
    pass


class NoConvergence(InterpConstError):
    def __init__(self, iterations, best_residual, message=None):
        self.iterations = iterations
        self.best_residual = best_residual
        super().__init__(
            message
            or f"eigensolver did not converge after {iterations} iterations "
            f"(best residual {best_residual:.3e})"
        )


class EmptySpectrum(InterpConstError):
    pass


class InconsistentBounds(InterpConstError):
    pass
