"""Exception types shared across the package."""


class PolyclosureError(Exception):
    """Base class for all errors raised by this package."""


class VocabularyMismatch(PolyclosureError, ValueError):
    """Two structures were combined that do not share a vocabulary."""


class PreconditionError(PolyclosureError, ValueError):
    """An operation was called outside its documented domain."""


class BudgetExceeded(PolyclosureError):
    """An exhaustive search would exceed its configured size guard."""


class InvariantViolation(PolyclosureError, AssertionError):
    """A checked postcondition or loop invariant failed.

    This always indicates a bug in the implementation (or a bad certificate
    handed in by the caller), never a property of the input.
    """
