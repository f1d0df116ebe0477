"""Exception hierarchy shared by all modules."""


class LmcApartError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LmcApartError, ValueError):
    """Malformed text input (LMC documents, rationals, formulas, proofs)."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ValidationError(LmcApartError, ValueError):
    """Well-formed input that violates a semantic constraint."""


class MissingValue(LmcApartError, KeyError):
    """A support state has no value in the map being integrated."""

    def __str__(self):
        return Exception.__str__(self)


class UnknownState(LmcApartError, LookupError):
    pass


class UnknownGenerator(LmcApartError, LookupError):
    pass


class NotNonexpansive(LmcApartError, ValueError):
    pass


class InvalidProof(LmcApartError):
    """Raised when a proof is rejected by the checker where validity is required."""

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report
