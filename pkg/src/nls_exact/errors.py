"""Exception hierarchy shared by every module of the package."""


class NLSError(Exception):
    """Base class for all package errors."""


class EllipticDomainError(NLSError, ValueError):
    """Modulus outside [0, 1] or a non-finite argument."""


class EllipticDivergence(NLSError, ArithmeticError):
    """The complete elliptic integral diverges (modulus 1)."""


class ParameterError(NLSError, ValueError):
    """A family received missing, unknown or malformed parameters."""


class SignConditionViolated(NLSError, ValueError):
    """A sign/radicand predicate of a solution family does not hold."""


class DegenerateParams(NLSError, ValueError):
    """Parameters that make a family formula degenerate."""


class OutOfDomain(NLSError, ValueError):
    """Evaluation requested outside the declared time domain."""


class SingularPoint(NLSError, ValueError):
    """Evaluation requested on (or too close to) a singular surface."""


class InapplicableOp(NLSError, ValueError):
    """Symmetry operation not applicable to the given solution."""


class StencilNearSingularity(NLSError, ValueError):
    """A finite-difference stencil would reach a singular surface."""


class DomainExceeded(NLSError, ValueError):
    """A finite-difference stencil leaves the time domain."""


class AllPointsSkipped(NLSError, RuntimeError):
    """Every sampled point of a verification box was excluded."""


class IneligibleFamily(NLSError, ValueError):
    """The family cannot seed a periodic propagation."""


class NonFiniteField(NLSError, FloatingPointError):
    """The propagated field developed inf/nan values."""
