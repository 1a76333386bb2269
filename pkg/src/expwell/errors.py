"""Exception hierarchy shared by every module in the package."""


class ExpWellError(Exception):
    """Base class for all errors raised by :mod:`expwell`."""


class DomainError(ExpWellError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(ExpWellError):
    """The requested accuracy cannot be delivered by the chosen method."""


class ConvergenceError(ExpWellError):
    """An iterative procedure (quadrature, ODE march, series) did not converge."""


class BracketError(ExpWellError):
    """A root scan missed a root or produced an inconsistent ordering."""


class SingularWronskianError(ExpWellError):
    """A seed Wronskian vanishes on the evaluation range."""


class BoxTooSmallError(ExpWellError):
    """The finite-difference box truncates an eigenfunction too early."""
