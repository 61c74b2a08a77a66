"""Exception hierarchy.

Every error belongs to one of three families, which the command line maps to
exit codes: :class:`UsageError` (1), :class:`PhysicsError` (2) and
:class:`NumericError` (3).
"""


class EmsqError(Exception):
    exit_code = 1


class UsageError(EmsqError):
    """Bad input: malformed files, invalid options, too few samples."""

    exit_code = 1


class PhysicsError(EmsqError):
    """The request is well formed but physically meaningless (unstable, unphysical)."""

    exit_code = 2


class NumericError(EmsqError):
    """A numerical procedure could not produce a trustworthy result."""

    exit_code = 3


# input / usage
class ConfigError(UsageError):
    pass


class FormatError(UsageError):
    """A file or JSON document does not follow its documented format."""


class BatchMismatch(UsageError):
    pass


class InsufficientSamples(BatchMismatch):
    pass


class InsufficientPoints(UsageError):
    pass


class EmptyRange(UsageError):
    pass


# physics / domain
class UnphysicalCovariance(PhysicsError):
    pass


class NotNormalForm(PhysicsError):
    pass


class DegenerateState(PhysicsError):
    pass


class UnstableSystem(PhysicsError):
    pass


# numerics
class SingularCovariance(NumericError):
    pass


class NumericallyIllConditioned(NumericError):
    pass


class DenominatorSingular(NumericError):
    pass


class IntegrationFailure(NumericError):
    pass


class CholeskyFailure(NumericError):
    pass


class DegenerateDesign(NumericError):
    pass
