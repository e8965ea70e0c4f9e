"""Deterministic synthesis and validation of Markdown-formatting training data.

Plain-text seed documents are cleaned and cut into atomic units, a
structural spec is sampled per (seed, variant), and a target Markdown
document is built that satisfies that structural spec by construction. The same
validator that checks generated targets scores external model outputs.
"""

from .checks import (
    CHECK_NAMES,
    CheckResult,
    CompositeScore,
    ValidationReport,
    composite,
    content_preservation,
    run_checks,
    structure_score,
    validate_markdown,
)
from .dataset import DatasetEntry, build_entry, generate
from .errors import (
    ContractViolation,
    DegenerateInputError,
    EmptyDocumentError,
    IngestError,
    MdforgeError,
    SelfValidationError,
)
from .model import VALIDATOR_VERSION, AtomicUnit, BlockType, MarkdownDocument, StructuralSpec, UnitKind
from .parser import parse_markdown
from .sampler import DrawKey, draw64, draw_range, sample_spec
from .segment import clean, ingest, segment
from .synth import render_markdown, render_prompt, synthesize

__version__ = "0.1.0"

__all__ = [
    "AtomicUnit", "BlockType", "CHECK_NAMES", "CheckResult", "CompositeScore", "ContractViolation",
    "DatasetEntry", "DegenerateInputError", "DrawKey", "EmptyDocumentError", "IngestError",
    "MarkdownDocument", "MdforgeError", "SelfValidationError", "StructuralSpec", "UnitKind",
    "VALIDATOR_VERSION", "ValidationReport", "build_entry", "clean", "composite",
    "content_preservation", "draw64", "draw_range", "generate", "ingest", "parse_markdown",
    "render_markdown", "render_prompt", "run_checks", "sample_spec", "segment", "structure_score",
    "synthesize", "validate_markdown",
]
