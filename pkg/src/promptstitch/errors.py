"""Exception types shared across the package."""
from __future__ import annotations


class PromptstitchError(Exception):
    """Base class for all package errors."""


class ContractError(PromptstitchError):
    """An argument violated a documented precondition."""


class CorpusError(PromptstitchError):
    """Corpus ingestion failed on a malformed document."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RecordError(CorpusError):
    """One corpus record is unusable; the rest of the corpus still parses."""


class UnknownRoleError(PromptstitchError):
    """A role was referenced that the frame or header does not carry."""


class FeatureDetectionError(PromptstitchError):
    """Verb feature detection failed (usually a missing POS tag)."""


class PromptParseError(PromptstitchError):
    """A serialized prompt could not be parsed."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"offset {offset}: {message}"
        super().__init__(message)


class TaggedParseError(PromptstitchError):
    """A tagged generation could not be parsed."""


class ProgramParseError(PromptstitchError):
    """A perturbation program could not be parsed."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"offset {offset}: {message}"
        super().__init__(message)


class RecipeInapplicableError(PromptstitchError):
    """The sentence lacks the structure a recipe needs."""


class RecipeParameterError(PromptstitchError):
    """A recipe was invoked with missing or malformed parameters."""


class TransportError(PromptstitchError):
    """An HTTP backend could not be reached or kept failing."""


class SchemaError(PromptstitchError):
    """A backend response did not match the published schema."""
