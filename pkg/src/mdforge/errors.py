"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class MdforgeError(Exception):
    """Base class for all mdforge failures."""


class ContractViolation(MdforgeError, ValueError):
    """A caller broke a documented precondition (bad range, bad level, ...)."""


class EmptyDocumentError(MdforgeError):
    """Cleaning reduced a document to nothing."""


class DegenerateInputError(MdforgeError):
    """Input that no construction can turn into a document (e.g. zero units)."""


class IngestError(MdforgeError):
    """The input stream itself could not be read."""


class SelfValidationError(MdforgeError):
    """A synthesized target failed validation against its own spec."""

    def __init__(self, seed_index: int, variant_index: int, detail: str) -> None:
        super().__init__(
            f"self-validation failed for seed={seed_index} variant={variant_index}: {detail}"
        )
        self.seed_index = seed_index
        self.variant_index = variant_index
