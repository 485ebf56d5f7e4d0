"""Exception hierarchy shared by every module in the package."""


class SkaError(Exception):
    """Base class for all package errors."""


class ConfigError(SkaError, ValueError):
    """Raised when inputs violate a documented invariant (CLI exit code 1)."""


class BudgetExceeded(SkaError):
    """Raised when an exhaustive enumeration would exceed its state cap."""


class SecrecyViolation(SkaError):
    """Raised when a secrecy or agreement property fails to hold."""


# finite field
class MismatchedField(ConfigError):
    pass


class ZeroInverse(SkaError, ZeroDivisionError):
    pass


class DuplicateAbscissa(ConfigError):
    pass


class WrongCount(ConfigError):
    pass


# codec
class InvalidParams(ConfigError):
    pass


class LengthMismatch(ConfigError):
    pass


class InsufficientShares(SkaError):
    pass


class InconsistentShares(SkaError):
    pass


# protocol
class ParamViolation(ConfigError):
    pass


class AlreadyDiscussed(SkaError):
    pass


class BadMask(SkaError):
    pass


class NoSharedMaterial(ConfigError):
    pass


# analysis
class InvalidPartition(ConfigError):
    pass


class Overflow(SkaError, OverflowError):
    pass


class OracleDisagreement(SkaError, AssertionError):
    """Two independent computations of the same quantity disagree."""
