"""Exception hierarchy shared across the package."""


class InputError(ValueError):
    """Malformed user input (graph, matrix, flux literal, ...)."""


class DuplicateEdgeError(InputError):
    pass


class SelfLoopError(InputError):
    pass


class VertexRangeError(InputError):
    pass


class DisconnectedGraphError(InputError):
    pass


class GraphMismatchError(InputError):
    pass


class NumericalError(ArithmeticError):
    """Base class for failures that carry a numerical margin."""

    def __init__(self, message, margin=None, where=None):
        super().__init__(message)
        self.margin = margin
        self.where = where


class NonSimpleEigenvalue(NumericalError):
    pass


class VanishingEigenvector(NumericalError):
    pass


class Indeterminate(NumericalError):
    """A comparison fell inside its safety margin."""


class SolverBreakdown(NumericalError):
    """Eigensolver failed to converge or to pair embedded eigenvalues."""


class RetriesExhausted(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
