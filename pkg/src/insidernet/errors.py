"""Exception hierarchy shared across the pipeline stages."""

from __future__ import annotations


class InsiderNetError(Exception):
    """Base class for all package errors."""


class UnreadableStream(InsiderNetError):
    pass


class StrictModeViolation(InsiderNetError):
    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0]
        super().__init__(
            f"{len(self.errors)} malformed row(s); first at line {first.line}: {first.reason}"
        )


class CompanyMismatch(InsiderNetError):
    pass


class EmptySequence(InsiderNetError):
    pass


class UnknownNode(InsiderNetError, KeyError):
    pass


class DegenerateInput(InsiderNetError, ValueError):
    pass


class MissingPrice(InsiderNetError):
    pass


class MissingQuote(InsiderNetError):
    pass


class EmptySeries(InsiderNetError, ValueError):
    pass


class InfeasibleConfig(InsiderNetError, ValueError):
    pass


class UnknownClique(InsiderNetError, KeyError):
    pass


class EmptyStructure(InsiderNetError, ValueError):
    pass


class IoFailure(InsiderNetError, OSError):
    pass
