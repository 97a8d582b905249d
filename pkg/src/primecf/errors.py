"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class RefinementLimitError(RuntimeError):
    """A lazy exact-real source ran out of bits before resolving a digit."""
