"""
Exception hierarchy for the Simignore toolkit.

Every error carries a short machine-readable ``code`` (the class name) and the
process exit status the command line maps it to.
"""


class SimignoreError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 2

    @property
    def code(self) -> str:
        return type(self).__name__


class UsageError(SimignoreError):
    """Bad command-line usage"""
    exit_code = 1


class ValidationError(SimignoreError, ValueError):
    """Input failed validation (shapes, ranges, file contents)"""


# token-space
class ZeroImageTokens(ValidationError):
    pass


class ZeroUserTokens(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class NonFiniteValues(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


# embed-pipeline / selection
class EmptyFeatureMap(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class KOutOfRange(ValidationError):
    pass


class BudgetOutOfRange(ValidationError):
    pass


# attention-analysis
class BatchNotOne(ValidationError):
    pass


class SegmentationMismatch(ValidationError):
    pass


class NotPerfectSquare(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


# cluster-analysis
class DegenerateCovariance(ValidationError):
    pass


class ClusterIdOutOfRange(ValidationError):
    pass


class NonMonotonePredicate(ValidationError):
    pass


# tensor files
class BadMagic(ValidationError):
    pass


class BadVersion(ValidationError):
    pass


class TruncatedPayload(ValidationError):
    pass


class DimOverflow(ValidationError):
    pass


# configuration / plumbing
class ManifestError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class UnknownPlugin(ValidationError):
    pass
