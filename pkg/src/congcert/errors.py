"""Exception types shared across the package."""


class CongcertError(Exception):
    """Base class for all package errors."""


class InvalidParameter(CongcertError, ValueError):
    """A constructor or operation argument violates its preconditions."""


class ModulusMismatch(CongcertError, ValueError):
    """Two series with different moduli were combined."""


class NonUnitConstantTerm(CongcertError, ValueError):
    """Inversion requested for a factor whose constant term is not a unit."""


class IndexOutOfRange(CongcertError, IndexError):
    """Coefficient index outside the stored prefix."""


class EmptyMultiset(CongcertError, ValueError):
    """A period computation needs a nonempty part multiset."""


class InvalidWindow(CongcertError, ValueError):
    """Periodicity check window is too small for the candidate period."""


class NoPeriodFound(CongcertError):
    """The formula period failed the empirical prefix check; signals a bug."""


class RuleValidationFailed(CongcertError):
    """A rewrite produced a series that differs from its input. Unsound; abort."""


class SplitFailed(CongcertError):
    """A factor is neither a periodic-head denominator nor provably supported
    on multiples of the progression modulus."""


class CertificateFailed(CongcertError):
    """The numeric tail-support check failed below the validation length."""


class SpaceTooLarge(CongcertError):
    """Candidate enumeration exceeded the configured cap."""


class ComplexityGuard(CongcertError):
    """Brute-force enumeration refused an input above its configured cap."""


class ParseError(CongcertError, ValueError):
    """Instance file is syntactically malformed."""


class SemanticError(CongcertError, ValueError):
    """Instance file parsed but declares inconsistent values."""
