"""Exception hierarchy shared by every module."""


class OscError(Exception):
    """Base class for all package errors."""


class DomainError(OscError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(OscError, ValueError):
    """A value violates a data-type invariant (masses, supports, ordering)."""


class ContractError(OscError):
    """A precondition or postcondition of an operation does not hold."""


class CoverageError(ContractError):
    """A map is undefined on a set of positive measure."""


class RefusalError(OscError):
    """The request exceeds a hard size cap."""


class ParseError(OscError, ValueError):
    """Malformed textual input."""
