"""Exception hierarchy.

Every error carries an exit code so the CLI can map failures to stable
ranges: 1x parsing, 2x algebra, 3x descent preconditions, 4x verification.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


# -- 1x: problem-file parsing ------------------------------------------------

class ParseError(EngineError):
    exit_code = 10

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}: {message}" if column is None else \
                f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnresolvedReference(ParseError):
    exit_code = 11


class IllFormedMorphism(ParseError):
    exit_code = 12


# -- 2x: algebra -------------------------------------------------------------

class FieldMismatch(EngineError):
    exit_code = 20


class RingMismatch(EngineError):
    exit_code = 21


class DivisionByZero(EngineError):
    exit_code = 22


class UnsupportedShape(EngineError):
    """Polynomial outside the factorization engine's supported shapes."""

    exit_code = 23


class UndecidedPrimality(EngineError):
    """A decomposition leaf could not be certified prime.

    Surfaced to the caller instead of guessing: the splitting rules are
    deliberately corpus-sufficient, not complete.
    """

    exit_code = 24


class NotMinimal(EngineError):
    exit_code = 25


class NonExactDivision(EngineError):
    """Internal consistency failure; indicates a bug, never user data."""

    exit_code = 26


class NotContaining(EngineError):
    exit_code = 27


class SaturationDivergence(EngineError):
    exit_code = 28


# -- 3x: descent preconditions -----------------------------------------------

class NotUniversallyGeneralizing(EngineError):
    exit_code = 30


class NotClosedImmersion(EngineError):
    exit_code = 31


class EmptyFiber(EngineError):
    exit_code = 32


class EmptyScope(EngineError):
    exit_code = 33


# -- 4x: verification --------------------------------------------------------

class VerificationFailure(EngineError):
    exit_code = 40


class GoldenMismatch(VerificationFailure):
    exit_code = 41
