"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CASError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CASError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class ValidationError(CASError):
    pass


class EmptyParse(CASError):
    pass


# grounding / execution


class GroundingError(CASError):
    reason = "ungroundable"


class UnknownAction(GroundingError):
    reason = "unknown_action"


class ArityMismatch(GroundingError):
    reason = "arity"


class UnknownEntity(GroundingError):
    reason = "unknown_entity"


class RoleMismatch(GroundingError):
    reason = "role"


class NotApplicable(CASError):
    pass


# LLM backends


class LLMError(CASError):
    pass


class NetworkError(LLMError):
    pass


class RateLimited(LLMError):
    pass


class FixtureMiss(LLMError):
    def __init__(self, fingerprint: str, model_id: str = ""):
        self.fingerprint = fingerprint
        self.model_id = model_id
        super().__init__(f"no fixture for fingerprint {fingerprint} (model {model_id!r})")


class MalformedResponse(LLMError):
    pass


# pipeline


class EmptyShortlist(CASError):
    pass


class StageError(CASError):
    """Wraps any failure inside a pipeline run, tagged with the stage name."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage={stage}: {type(cause).__name__}: {cause}")


# statistics


class DegenerateSample(CASError):
    pass


class AllZeroDifferences(CASError):
    pass


class EmptyInput(CASError):
    pass
