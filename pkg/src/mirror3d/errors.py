"""Exception hierarchy shared by every layer of the package."""


class Mirror3dError(Exception):
    """Base class for all package errors."""


class NotExact(Mirror3dError, ValueError):
    """A pair of lattice maps does not form a short exact sequence."""


class LengthMismatch(Mirror3dError, ValueError):
    """Two integer vectors that must be paired have different lengths."""


class RankMismatch(Mirror3dError, ValueError):
    """Operands live over tori of different rank."""


class ChartMismatch(Mirror3dError, ValueError):
    """Chart maps cannot be composed: target of one is not source of the other."""


class UndefinedMap(Mirror3dError, ValueError):
    """A gluing map needed for a check does not exist."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BoundExceeded(Mirror3dError):
    """An enumeration would exceed its configured size cap."""


class NotFaithful(Mirror3dError, ValueError):
    """The torus action has a nontrivial kernel."""


class UnsupportedBrane(Mirror3dError, ValueError):
    """Brane data falls outside the toric Hori-Vafa regime."""


class DegenerateFibration(Mirror3dError, ValueError):
    """The fibration map has rank below the torus rank."""


class UnsupportedRank(Mirror3dError, ValueError):
    """Root data of rank two or more is not handled."""


class ParseError(Mirror3dError, ValueError):
    """Input text could not be parsed."""

    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(Mirror3dError, ValueError):
    """Input parsed but is not shape-consistent."""


class UnknownCommand(Mirror3dError, ValueError):
    """The requested CLI command does not exist."""
