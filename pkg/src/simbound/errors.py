"""Exception hierarchy shared across the package."""


class SimboundError(Exception):
    """Base class for every error raised by simbound."""


class DomainError(SimboundError, ValueError):
    """An argument lies outside the domain of a function."""


class InfeasibleError(SimboundError, ValueError):
    """A parameter combination does not describe a valid distribution."""


class InfeasibleTripleError(InfeasibleError):
    """``(p1, p2, eta)`` admits no joint law of two 0/1 variables."""


class CouplingInfeasibleError(InfeasibleError):
    """The pair cannot be written as ``(X1 W, X2 W)`` (negatively correlated errors)."""


class NaiveBayesInfeasibleError(InfeasibleError):
    """No Naive Bayes parameters reproduce the requested error rate and similarity."""


class ParseError(SimboundError, ValueError):
    """Malformed prediction-matrix input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
