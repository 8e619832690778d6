"""Exception hierarchy shared by every analyzer module."""


class KLAnalyzerError(Exception):
    """Base class for all analyzer errors."""


class DimensionMismatch(KLAnalyzerError):
    """Operands disagree on the ambient dimension."""


class DomainError(KLAnalyzerError):
    """Evaluation requested outside the domain of an oracle."""


class NotStationary(KLAnalyzerError):
    """A certificate was requested at a point that is not stationary."""


class SingularHessian(KLAnalyzerError):
    """The relevant Hessian block is numerically singular; the analytic
    certificate refuses and the caller should fall back to sampling."""


class NonsingularityFails(KLAnalyzerError):
    """The graphical-derivative nonsingularity test produced a nonzero
    violating direction."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PatternExplosion(KLAnalyzerError):
    """Too many complementarity patterns to enumerate exactly."""


class UnsupportedClass(KLAnalyzerError):
    """The requested operation is not defined for this function class."""


class ProxDiverged(KLAnalyzerError):
    """The proximal subproblem solver did not locate a minimizer."""


class EmptyBudget(KLAnalyzerError):
    """A sampling budget with no samples was supplied."""


class InsufficientSamples(KLAnalyzerError):
    """Too few valid samples survived the filters for a stable estimate."""


class NoConvergence(KLAnalyzerError):
    """An iterative kernel exhausted its iteration cap."""


class SingularMatrix(KLAnalyzerError):
    """A dense linear solve met a numerically zero pivot."""


class ProblemFormatError(KLAnalyzerError):
    """A problem-definition file is malformed or inconsistent."""
