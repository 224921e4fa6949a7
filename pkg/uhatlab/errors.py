"""Exception hierarchy for uhatlab.

Every failure the library reports is a ``UhatLabError`` so the CLI can map
them all onto exit code 2.
"""


class UhatLabError(Exception):
    """Root of all uhatlab errors."""


# Evaluation

class EvaluationError(UhatLabError):
    """Raised while evaluating an expression or running a program."""


class TypeMismatch(EvaluationError):
    pass


class UnresolvedReference(EvaluationError):
    pass


class NegativeExponent(EvaluationError):
    pass


class UnknownLetter(EvaluationError):
    pass


class NonTotalTable(EvaluationError):
    pass


class StaticCheckError(UhatLabError):
    """A recognizer violates a structural rule (layer order, sides, ...)."""


# Fixtures

class FixtureError(UhatLabError):
    pass


class AlphabetTooSmall(FixtureError):
    pass


class InvalidDepth(FixtureError):
    pass


class UnknownOracle(FixtureError):
    pass


# Passes

class PassError(UhatLabError):
    """A transformation pass cannot be applied to its input."""


class CarrierMismatch(PassError):
    pass


class NonSeparableScorePresent(PassError):
    pass


class InitializationLacksPosition(PassError):
    pass


class MissingPositionInInit(PassError):
    pass


class NonBinaryScore(PassError):
    pass


class NotColumnOnlyForm(PassError):
    pass


class NonBinaryValues(PassError):
    pass


class UnsupportedLine(PassError):
    pass


class ZeroGapDegenerate(PassError):
    pass


class EnumerationBudgetExceeded(UhatLabError):
    pass


BudgetExceeded = EnumerationBudgetExceeded


# Logic

class LogicError(UhatLabError):
    pass


class PositionOutOfRange(LogicError):
    pass


class UnknownMonPred(LogicError):
    pass


class EmptyWord(LogicError):
    pass


class ModeFormulaMismatch(LogicError):
    pass


class FreeVariable(LogicError):
    pass


# Analysis

class AnalysisError(UhatLabError):
    pass


class CycleDetected(AnalysisError):
    pass


class ArityViolation(AnalysisError):
    pass


class NonInjectiveEncoding(AnalysisError):
    pass


class DslSyntaxError(UhatLabError):
    """Parse failure with a 1-based source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SerializationError(UhatLabError):
    """JSON document that does not describe a known tree."""
