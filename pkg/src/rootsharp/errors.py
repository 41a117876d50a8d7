class RootsharpError(Exception):
    """Base class for library errors."""


class DomainError(RootsharpError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RootsharpError, ArithmeticError):
    """A series or iteration did not converge."""


class DegenerateParameterError(RootsharpError, ValueError):
    """Parameters sit on a removable singularity of the chosen formula."""


class DepthError(RootsharpError, ValueError):
    """Recursion depth beyond what the nested quadrature supports."""


class PreconditionError(RootsharpError, ValueError):
    """Inputs violate a stated precondition."""
