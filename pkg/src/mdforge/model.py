"""Shared domain types: atomic units, structural specs and the block tree.

Documents reference content by unit index rather than by copied text; text
is resolved against the unit sequence only when rendering. Parsed documents
reuse the same block classes with plain strings in place of indices.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence, Union

from .errors import ContractViolation

VALIDATOR_VERSION = "mdforge-validator/1"
SAMPLER_VERSION = 1

METADATA_RE = re.compile(r"^([A-Za-z0-9][A-Za-z0-9 \-]{0,39}): (\S.*)$")


class UnitKind(str, enum.Enum):
    HEADING = "Heading"
    METADATA = "MetadataField"
    SENTENCE = "Sentence"


class BlockType(str, enum.Enum):
    """Structured block types a spec may permit."""

    BULLET_LIST = "BulletList"
    TABLE = "Table"
    BLOCKQUOTE = "Blockquote"
    ORDERED_LIST = "OrderedList"
    CODE_FENCE = "CodeFence"


# Canonical order; also the synthesizer's per-section rotation.
BLOCK_ROTATION: tuple[BlockType, ...] = (
    BlockType.BULLET_LIST,
    BlockType.TABLE,
    BlockType.BLOCKQUOTE,
    BlockType.ORDERED_LIST,
    BlockType.CODE_FENCE,
)

SENTINELS: tuple[str, ...] = (
    "(no additional content)",
    "(intentionally left blank)",
    "(see above)",
)


@dataclass(frozen=True, slots=True)
class AtomicUnit:
    index: int
    kind: UnitKind
    text: str

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ContractViolation(f"unit index must be >= 0, got {self.index}")
        if not self.text or self.text != self.text.strip() or "\n" in self.text:
            raise ContractViolation(f"unit text must be non-empty, trimmed, single-line: {self.text!r}")
        if self.kind is UnitKind.HEADING and self.text.startswith("#") and _looks_like_atx(self.text):
            raise ContractViolation(f"heading unit still carries '#' markers: {self.text!r}")
        if self.kind is UnitKind.METADATA and not METADATA_RE.match(self.text):
            raise ContractViolation(f"metadata unit is not 'Key: Value': {self.text!r}")


def _looks_like_atx(text: str) -> bool:
    return re.match(r"^#{1,6}(\s|$)", text) is not None


def check_unit_sequence(units: Sequence[AtomicUnit]) -> None:
    for expected, unit in enumerate(units):
        if unit.index != expected:
            raise ContractViolation(f"unit indices must be consecutive from 0; position {expected} has {unit.index}")


@dataclass(frozen=True)
class StructuralSpec:
    seed_index: int
    variant_index: int
    difficulty: int
    section_count: int
    max_list_depth: int
    list_item_count: int
    blockquote_count: int
    allowed_blocks: frozenset[BlockType]
    wrap_width: int | None
    validator_version: str = VALIDATOR_VERSION

    def __post_init__(self) -> None:
        if self.difficulty not in (1, 2, 3):
            raise ContractViolation(f"difficulty must be 1, 2 or 3, got {self.difficulty}")
        if self.section_count < 1 or self.max_list_depth < 1 or self.list_item_count < 1:
            raise ContractViolation("section_count, max_list_depth and list_item_count must be >= 1")
        if self.blockquote_count < 0:
            raise ContractViolation("blockquote_count must be >= 0")
        if self.wrap_width is not None and self.wrap_width < 20:
            raise ContractViolation(f"wrap_width must be >= 20, got {self.wrap_width}")
        object.__setattr__(self, "allowed_blocks", frozenset(BlockType(b) for b in self.allowed_blocks))

    def to_dict(self) -> dict:
        return {
            "seed_index": self.seed_index,
            "variant_index": self.variant_index,
            "difficulty": self.difficulty,
            "section_count": self.section_count,
            "max_list_depth": self.max_list_depth,
            "list_item_count": self.list_item_count,
            "blockquote_count": self.blockquote_count,
            "allowed_blocks": [b.value for b in BLOCK_ROTATION if b in self.allowed_blocks],
            "wrap_width": self.wrap_width,
            "validator_version": self.validator_version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StructuralSpec":
        try:
            return cls(
                seed_index=int(data["seed_index"]),
                variant_index=int(data["variant_index"]),
                difficulty=int(data["difficulty"]),
                section_count=int(data["section_count"]),
                max_list_depth=int(data["max_list_depth"]),
                list_item_count=int(data["list_item_count"]),
                blockquote_count=int(data["blockquote_count"]),
                allowed_blocks=frozenset(BlockType(b) for b in data["allowed_blocks"]),
                wrap_width=None if data.get("wrap_width") is None else int(data["wrap_width"]),
                validator_version=str(data.get("validator_version", VALIDATOR_VERSION)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolation(f"invalid spec record: {exc}") from exc


@dataclass(frozen=True, slots=True)
class PaddingSlot:
    """Filler that satisfies a slot count without carrying source content."""

    position: int
    text: str

    def __post_init__(self) -> None:
        if self.text not in SENTINELS:
            raise ContractViolation(f"padding text outside the sentinel set: {self.text!r}")


# A unit index (synthesized documents), a padding slot, or literal text
# (generated labels, and everything in a parsed document).
Slot = Union[int, PaddingSlot, str]


class ListItem(NamedTuple):
    depth: int
    slot: Slot


@dataclass(frozen=True)
class Heading:
    level: int
    title: Slot


@dataclass(frozen=True)
class Paragraph:
    units: tuple[Slot, ...]


@dataclass(frozen=True)
class BulletList:
    items: tuple[ListItem, ...]


@dataclass(frozen=True)
class OrderedList:
    items: tuple[ListItem, ...]


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[tuple[Slot, ...], ...]
    has_separator: bool = True


@dataclass(frozen=True)
class Blockquote:
    units: tuple[Slot, ...]


@dataclass(frozen=True)
class CodeFence:
    info_tag: str
    lines: tuple[Slot, ...]
    closed: bool = True


@dataclass(frozen=True)
class MetadataSection:
    fields: tuple[Slot, ...]


Block = Union[Heading, Paragraph, BulletList, OrderedList, Table, Blockquote, CodeFence, MetadataSection]

BLOCK_TYPE_OF: dict[type, BlockType] = {
    BulletList: BlockType.BULLET_LIST,
    OrderedList: BlockType.ORDERED_LIST,
    Table: BlockType.TABLE,
    Blockquote: BlockType.BLOCKQUOTE,
    CodeFence: BlockType.CODE_FENCE,
}


@dataclass(frozen=True)
class MarkdownDocument:
    blocks: tuple[Block, ...]
    source_unit_count: int = 0
    padding_count: int = 0


def block_slots(block: Block) -> Iterator[Slot]:
    """Yield every content slot of a block in reading order."""
    if isinstance(block, Heading):
        yield block.title
    elif isinstance(block, (Paragraph, Blockquote)):
        yield from block.units
    elif isinstance(block, (BulletList, OrderedList)):
        for item in block.items:
            yield item.slot
    elif isinstance(block, Table):
        yield from block.header
        for row in block.rows:
            yield from row
    elif isinstance(block, CodeFence):
        yield from block.lines
    elif isinstance(block, MetadataSection):
        yield from block.fields
    else:  # pragma: no cover - closed union
        raise TypeError(f"unknown block {block!r}")


def _is_unit_ref(slot: Slot) -> bool:
    # bool is an int subclass; never treat it as a unit reference
    return isinstance(slot, int) and not isinstance(slot, bool)


def traversal_units(doc: MarkdownDocument) -> list[int]:
    """In-order unit indices of a document, padding and literal text excluded."""
    return [slot for block in doc.blocks for slot in block_slots(block) if _is_unit_ref(slot)]


def count_padding(doc: MarkdownDocument) -> int:
    return sum(isinstance(s, PaddingSlot) for block in doc.blocks for s in block_slots(block))


def slot_text(slot: Slot, units: Sequence[AtomicUnit] | None = None) -> str:
    if isinstance(slot, PaddingSlot):
        return slot.text
    if isinstance(slot, str):
        return slot
    if units is None:
        raise ContractViolation("unit reference needs the unit sequence to resolve")
    return units[slot].text


def document_problems(doc: MarkdownDocument) -> list[str]:
    """Check block and document invariants in a single pass; empty means valid."""
    problems: list[str] = []
    prev_level = 1
    seen: list[int] = []
    padding = 0
    for pos, block in enumerate(doc.blocks):
        if isinstance(block, Heading):
            if not 1 <= block.level <= 6:
                problems.append(f"block {pos}: heading level {block.level} outside 1..6")
            elif block.level > prev_level + 1:
                problems.append(f"block {pos}: heading level skips from {prev_level} to {block.level}")
            prev_level = block.level
        elif isinstance(block, Table):
            for r, row in enumerate(block.rows):
                if len(row) != len(block.header):
                    problems.append(f"block {pos}: row {r} has {len(row)} cells, header has {len(block.header)}")
        elif isinstance(block, (BulletList, OrderedList)):
            prev_depth = 0
            for item in block.items:
                if item.depth < 1 or item.depth > prev_depth + 1:
                    problems.append(f"block {pos}: list depth {item.depth} after {prev_depth}")
                prev_depth = item.depth
        for slot in block_slots(block):
            if _is_unit_ref(slot):
                if not 0 <= slot < doc.source_unit_count:
                    problems.append(f"block {pos}: unit {slot} outside 0..{doc.source_unit_count - 1}")
                seen.append(slot)
            elif isinstance(slot, PaddingSlot):
                padding += 1
    if seen != list(range(doc.source_unit_count)):
        problems.append("unit traversal is not exactly 0..source_unit_count-1 in order")
    if padding != doc.padding_count:
        problems.append(f"padding_count {doc.padding_count} but {padding} padding slots present")
    return problems


__all__ = [
    "AtomicUnit",
    "Block",
    "BLOCK_ROTATION",
    "BLOCK_TYPE_OF",
    "BlockType",
    "Blockquote",
    "BulletList",
    "CodeFence",
    "Heading",
    "ListItem",
    "MarkdownDocument",
    "MetadataSection",
    "METADATA_RE",
    "OrderedList",
    "PaddingSlot",
    "Paragraph",
    "SAMPLER_VERSION",
    "SENTINELS",
    "Slot",
    "StructuralSpec",
    "Table",
    "UnitKind",
    "VALIDATOR_VERSION",
    "block_slots",
    "check_unit_sequence",
    "count_padding",
    "document_problems",
    "slot_text",
    "traversal_units",
]
