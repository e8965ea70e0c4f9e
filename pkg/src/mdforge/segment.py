"""Seed ingestion, rule-based cleaning and atomic-unit segmentation."""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import EmptyDocumentError, IngestError
from .model import METADATA_RE, AtomicUnit, UnitKind

CATEGORIES: tuple[str, ...] = (
    "academic",
    "official",
    "technical",
    "legal",
    "business",
    "educational",
    "news",
    "reference",
)
DEFAULT_CATEGORY = "reference"

_ATX_RE = re.compile(r"^#{1,6}[ \t]+(.*)$")
_CLOSING_HASHES_RE = re.compile(r"(?:^|[ \t]+)#+[ \t]*$")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class SeedDocument:
    id: int
    category: str
    raw_text: str


@dataclass(frozen=True)
class IngestResult:
    documents: list[SeedDocument]
    discarded: int


def _record_text(line: str) -> tuple[str, str] | None:
    try:
        record = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(record, dict):
        return None
    text = record.get("text")
    if not isinstance(text, str) or not text.strip():
        return None
    category = record.get("category", DEFAULT_CATEGORY)
    if category not in CATEGORIES:
        return None
    return text, category


def ingest(stream: IO[str] | Iterable[str]) -> IngestResult:
    """Read JSON-lines seed records, keeping well-formed ones in input order.

    Blank lines are not records. Anything else that fails to decode, is not
    an object, lacks a non-empty string ``text`` or names an unknown category
    is counted as discarded.
    """
    documents: list[SeedDocument] = []
    discarded = 0
    try:
        for line in stream:
            if not line.strip():
                continue
            parsed = _record_text(line)
            if parsed is None:
                discarded += 1
                continue
            text, category = parsed
            documents.append(SeedDocument(len(documents), category, text))
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read seed stream: {exc}") from exc
    return IngestResult(documents, discarded)


def _is_dropped_control(ch: str) -> bool:
    return ch != "\n" and unicodedata.category(ch) == "Cc"


def clean(raw_text: str) -> str:
    """Normalize line endings, tabs, control characters and blank-line runs.

    Raises EmptyDocumentError when nothing survives.
    """
    text = raw_text.replace("\r\n", "\n").replace("\r", "\n").replace("\t", "    ")
    text = "".join(ch for ch in text if not _is_dropped_control(ch))
    text = "\n".join(line.rstrip() for line in text.split("\n"))
    # 3+ blank lines is 4+ consecutive newlines
    text = re.sub(r"\n{4,}", "\n\n", text)
    text = text.strip("\n")
    if not text.strip():
        raise EmptyDocumentError("document reduced to nothing")
    return text


def normalize_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def heading_text(line: str) -> str | None:
    """Return the content of an ATX heading line, or None if it is not one."""
    m = _ATX_RE.match(line)
    if m is None:
        if re.fullmatch(r"#{1,6}", line):
            return ""
        return None
    text = m.group(1).strip()
    while True:
        trimmed = _CLOSING_HASHES_RE.sub("", text).strip()
        trimmed = re.sub(r"^#{1,6}(?:[ \t]+|$)", "", trimmed)
        if trimmed == text:
            return text
        text = trimmed


def _single_letter_before(text: str, pos: int) -> bool:
    """True if the period at ``pos`` ends a one-letter word ("J.", "e.g.")."""
    if pos < 1 or not text[pos - 1].isalpha():
        return False
    return pos < 2 or not text[pos - 2].isalpha()


def sentence_boundaries(text: str) -> list[int]:
    """End offsets (exclusive) of sentences in a single prose block.

    Splits after ``.``, ``?`` or ``!`` that is followed by whitespace and an
    uppercase letter, or by end of text. Never splits inside parentheses or
    after a period closing a single-letter word.
    """
    ends: list[int] = []
    depth = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch in ".?!" and depth == 0:
            if ch == "." and _single_letter_before(text, i):
                continue
            j = i + 1
            if j == n:
                ends.append(n)
                continue
            if not text[j].isspace():
                continue
            while j < n and text[j].isspace():
                j += 1
            if j < n and text[j].isupper():
                ends.append(i + 1)
    if not ends or ends[-1] != n:
        ends.append(n)
    return ends


def split_sentences(block: str) -> list[str]:
    """Split one prose block into whitespace-normalized sentences."""
    out: list[str] = []
    start = 0
    for end in sentence_boundaries(block):
        piece = normalize_ws(block[start:end])
        if piece:
            out.append(piece)
        start = end
    return out


def segment(cleaned_text: str) -> list[AtomicUnit]:
    """Split cleaned text into ordered heading, metadata and sentence units.

    Metadata fields are recognized only in the document head: after any
    leading headings, one contiguous run of ``Key: Value`` lines (blank
    lines allowed inside the run). Prose blocks are separated by blank lines
    and headings; sentences never cross a block boundary.
    """
    pieces: list[tuple[UnitKind, str]] = []
    prose: list[str] = []
    # head states: "pre" (headings/blank only so far), "meta" (inside run), "body"
    state = "pre"

    def flush() -> None:
        if prose:
            for sentence in split_sentences("\n".join(prose)):
                pieces.append((UnitKind.SENTENCE, sentence))
            prose.clear()

    for line in cleaned_text.split("\n"):
        stripped = normalize_ws(line)
        if not stripped:
            flush()
            continue
        title = heading_text(stripped)
        if title is not None:
            flush()
            if state == "meta":
                state = "body"
            if title:
                pieces.append((UnitKind.HEADING, title))
            continue
        if state in ("pre", "meta") and METADATA_RE.match(stripped):
            state = "meta"
            pieces.append((UnitKind.METADATA, stripped))
            continue
        state = "body"
        prose.append(stripped)
    flush()
    return [AtomicUnit(i, kind, text) for i, (kind, text) in enumerate(pieces)]
