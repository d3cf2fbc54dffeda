"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class SqlTemplateError(Exception):
    """Base class for all data errors raised by this package."""


class EmptyInput(SqlTemplateError, ValueError):
    """Nothing left to work on (no tokens, no profiles, no records)."""


class LexError(SqlTemplateError):
    """Raised when SQL text cannot be tokenized."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} at offset {position}"
        super().__init__(message)
        self.position = position


class UnterminatedString(LexError):
    pass


class UnterminatedComment(LexError):
    pass


class UnexpectedCharacter(LexError):
    pass


class MultipleStatements(LexError):
    pass


class CatalogError(SqlTemplateError):
    pass


class ParseError(CatalogError):
    pass


class DuplicateTable(CatalogError):
    pass


class EmptyCatalog(CatalogError):
    pass


class WrongLevel(SqlTemplateError):
    pass


class MissingCatalog(SqlTemplateError):
    pass


class FormatError(SqlTemplateError):
    pass


class LevelMismatch(SqlTemplateError):
    pass


class EmptyInventory(SqlTemplateError):
    pass


class DegenerateSpectrum(SqlTemplateError):
    pass


class TooFewPairs(SqlTemplateError):
    pass


class UnknownProxy(SqlTemplateError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""
