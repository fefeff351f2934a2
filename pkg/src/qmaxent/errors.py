"""Exception hierarchy shared by the library and the CLI."""


class QMaxEntError(Exception):
    """Base class for all library errors."""


class InvalidInputError(QMaxEntError, ValueError):
    """Malformed operator, state, basis or dimension mismatch."""


class DomainError(QMaxEntError, ValueError):
    """A scalar function is undefined on part of an operator's spectrum."""


class InfeasibleError(QMaxEntError):
    """Constraint targets that no density matrix can satisfy.

    ``constraint`` holds the index (in the caller's ordering) of the
    worst-violated or contradictory constraint, when one can be named.
    """

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class ConvergenceError(QMaxEntError):
    """The dual minimization stopped before reaching the constraint tolerance."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class PreconditionError(QMaxEntError):
    """A scenario was called with inputs outside its stated assumptions."""


class InconsistentInputError(QMaxEntError):
    """A state does not reproduce the targets a max-entropy state was solved for."""


class UnsupportedError(QMaxEntError):
    """Operation is not defined for this kind of input (e.g. non-square channel)."""
