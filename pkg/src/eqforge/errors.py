"""Exception hierarchy shared by all eqforge modules."""


class EqforgeError(Exception):
    """Base class for library errors."""


class DomainError(EqforgeError, ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalAmbiguityError(EqforgeError):
    """A rank decision fell inside the ambiguous singular-value band."""

    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class NumericalInconsistencyError(EqforgeError):
    """A quantity that must be an integer was not close to one."""


class ContinuationError(EqforgeError):
    """Newton correction failed during branch continuation."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
