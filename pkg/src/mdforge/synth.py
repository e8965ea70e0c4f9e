"""Structure-constrained document construction and canonical rendering.

Units are consumed strictly in index order. Each section gets one paragraph
followed by one block per permitted type, in a rotation that shifts by one
position per section. Blocks that need more slots than there are units left
are filled with padding sentinels.
"""

from __future__ import annotations

import re
from typing import Sequence

from .errors import DegenerateInputError
from .model import (
    BLOCK_ROTATION,
    SENTINELS,
    AtomicUnit,
    Block,
    Blockquote,
    BlockType,
    BulletList,
    CodeFence,
    Heading,
    ListItem,
    MarkdownDocument,
    MetadataSection,
    OrderedList,
    PaddingSlot,
    Paragraph,
    Slot,
    StructuralSpec,
    Table,
    UnitKind,
    check_unit_sequence,
    slot_text,
)

METADATA_TITLE = "Metadata"
TABLE_HEADER = ("Item", "Content")
FENCE_INFO = "text"
BULLET_INDENT = 2
ORDERED_INDENT = 3


class _Padder:
    """Hands out sentinels in fixed cyclic order across one document."""

    def __init__(self) -> None:
        self.count = 0

    def __call__(self, position: int) -> PaddingSlot:
        slot = PaddingSlot(position, SENTINELS[self.count % len(SENTINELS)])
        self.count += 1
        return slot


def _fill(available: list[int], size: int, pad: _Padder) -> list[Slot]:
    """Take up to ``size`` units from the front of ``available``; pad the rest."""
    taken: list[Slot] = list(available[:size])
    del available[:size]
    while len(taken) < size:
        taken.append(pad(len(taken)))
    return taken


def _split_even(items: list[int], parts: int) -> list[list[int]]:
    base, extra = divmod(len(items), parts)
    out, start = [], 0
    for k in range(parts):
        size = base + (1 if k < extra else 0)
        out.append(items[start:start + size])
        start += size
    return out


def section_block_types(spec: StructuralSpec, section: int) -> list[BlockType]:
    """Structured block types for one section, quotes expanded per count."""
    allowed = [b for b in BLOCK_ROTATION if b in spec.allowed_blocks]
    if not allowed:
        return []
    shift = section % len(allowed)
    rotated = allowed[shift:] + allowed[:shift]
    quotes_here = len(range(section, spec.blockquote_count, spec.section_count))
    out: list[BlockType] = []
    for block_type in rotated:
        if block_type is BlockType.BLOCKQUOTE:
            out.extend([block_type] * quotes_here)
        else:
            out.append(block_type)
    return out


def _slot_demand(spec: StructuralSpec, block_type: BlockType) -> int:
    if block_type in (BlockType.BLOCKQUOTE, BlockType.CODE_FENCE):
        return 1
    return spec.list_item_count


def _build_block(block_type: BlockType, slots: list[Slot], spec: StructuralSpec) -> Block:
    if block_type in (BlockType.BULLET_LIST, BlockType.ORDERED_LIST):
        items = tuple(ListItem(k % spec.max_list_depth + 1, s) for k, s in enumerate(slots))
        return BulletList(items) if block_type is BlockType.BULLET_LIST else OrderedList(items)
    if block_type is BlockType.TABLE:
        return Table(TABLE_HEADER, tuple((str(k + 1), s) for k, s in enumerate(slots)))
    if block_type is BlockType.BLOCKQUOTE:
        return Blockquote(tuple(slots))
    return CodeFence(FENCE_INFO, tuple(slots))


def _plan_chunks(body: list[AtomicUnit], sections: int) -> list[tuple[Slot, list[int]]]:
    """Assign body units to exactly ``sections`` (title, content) pairs."""
    chunks: list[tuple[int | None, list[int]]] = [(None, [])]
    for unit in body:
        if unit.kind is UnitKind.HEADING:
            chunks.append((unit.index, []))
        else:
            chunks[-1][1].append(unit.index)
    if not chunks[0][1] and len(chunks) > 1:
        chunks.pop(0)

    # surplus headings are demoted into the last kept section, in place
    if len(chunks) > sections:
        keep, extra = chunks[:sections], chunks[sections:]
        tail = keep[-1][1]
        for title, content in extra:
            tail.append(title)
            tail.extend(content)
        chunks = keep

    share = [1] * len(chunks)
    for _ in range(sections - len(chunks)):
        best = max(range(len(chunks)), key=lambda c: (len(chunks[c][1]) / share[c], -c))
        share[best] += 1

    planned: list[tuple[Slot, list[int]]] = []
    for (title, content), parts in zip(chunks, share):
        for k, piece in enumerate(_split_even(content, parts)):
            if k == 0 and title is not None:
                planned.append((title, piece))
            else:
                planned.append((f"Section {len(planned) + 1}", piece))
    return planned


def _metadata_run(units: Sequence[AtomicUnit]) -> tuple[int, int] | None:
    """Span [start, end) of the leading metadata run, if it is preceded only by headings."""
    start = 0
    while start < len(units) and units[start].kind is UnitKind.HEADING:
        start += 1
    end = start
    while end < len(units) and units[end].kind is UnitKind.METADATA:
        end += 1
    return (start, end) if end > start else None


def synthesize(units: Sequence[AtomicUnit], spec: StructuralSpec) -> MarkdownDocument:
    if not units:
        raise DegenerateInputError("cannot build a document from zero units")
    check_unit_sequence(units)
    pad = _Padder()
    blocks: list[Block] = []

    body = list(units)
    run = _metadata_run(units)
    if run is not None:
        start, end = run
        blocks.extend(Heading(1, u.index) for u in units[:start])
        blocks.append(Heading(2, METADATA_TITLE))
        blocks.append(MetadataSection(tuple(u.index for u in units[start:end])))
        body = list(units[end:])

    for section, (title, content) in enumerate(_plan_chunks(body, spec.section_count)):
        blocks.append(Heading(2, title))
        types = section_block_types(spec, section)
        demand = sum(_slot_demand(spec, t) for t in types)
        available = list(content)
        blocks.append(Paragraph(tuple(_fill(available, max(1, len(available) - demand), pad))))
        for block_type in types:
            blocks.append(_build_block(block_type, _fill(available, _slot_demand(spec, block_type), pad), spec))
        assert not available

    return MarkdownDocument(tuple(blocks), len(units), pad.count)


# ---------------------------------------------------------------- rendering

_ESCAPE_FIRST = frozenset("#-+*>|`~<=_\\")
_ORDERED_START = re.compile(r"^(\d{1,9})([.)])")
_ORDERED_ESCAPED = re.compile(r"^(\d{1,9})\\([.)])")


def escape_line_start(line: str) -> str:
    """Backslash-escape a prose line that would otherwise open a block."""
    if line[:1] in _ESCAPE_FIRST:
        return "\\" + line
    m = _ORDERED_START.match(line)
    if m:
        return m.group(1) + "\\" + line[len(m.group(1)):]
    return line


def unescape_line_start(line: str) -> str:
    if len(line) >= 2 and line[0] == "\\" and line[1] in _ESCAPE_FIRST:
        return line[1:]
    m = _ORDERED_ESCAPED.match(line)
    if m:
        return m.group(1) + line[len(m.group(1)) + 1:]
    return line


def wrap_prose(text: str, first_prefix: str, rest_prefix: str, width: int | None) -> list[str]:
    """Greedy word wrap with line-start escaping; words are never broken.

    Escapes count toward the width. A single word wider than the available
    space gets a line of its own.
    """
    words = text.split()
    lines: list[str] = []
    current: str | None = None
    for word in words:
        if current is None:
            current = word
            continue
        prefix = rest_prefix if lines else first_prefix
        candidate = current + " " + word
        if width is None or len(prefix) + len(escape_line_start(candidate)) <= width:
            current = candidate
        else:
            lines.append(current)
            current = word
    if current is not None:
        lines.append(current)
    return [
        (first_prefix if k == 0 else rest_prefix) + escape_line_start(line)
        for k, line in enumerate(lines)
    ]


def escape_cell(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|")


def _fence_for(lines: list[str]) -> str:
    longest = 0
    for line in lines:
        m = re.match(r"^`+", line)
        if m:
            longest = max(longest, len(m.group(0)))
    return "`" * max(3, longest + 1)


def _render_list(items: Sequence[ListItem], ordered: bool, units, width) -> list[str]:
    out: list[str] = []
    counters: list[int] = []
    for item in items:
        del counters[item.depth:]
        while len(counters) < item.depth:
            counters.append(0)
        counters[item.depth - 1] += 1
        if ordered:
            indent = " " * (ORDERED_INDENT * (item.depth - 1))
            marker = f"{counters[item.depth - 1]}. "
        else:
            indent = " " * (BULLET_INDENT * (item.depth - 1))
            marker = "- "
        first = indent + marker
        out.extend(wrap_prose(slot_text(item.slot, units), first, " " * len(first), width))
    return out


def render_block(block: Block, units: Sequence[AtomicUnit], width: int | None) -> list[str]:
    if isinstance(block, Heading):
        return ["#" * block.level + " " + slot_text(block.title, units)]
    if isinstance(block, Paragraph):
        return [line for s in block.units for line in wrap_prose(slot_text(s, units), "", "", width)]
    if isinstance(block, Blockquote):
        return [line for s in block.units for line in wrap_prose(slot_text(s, units), "> ", "> ", width)]
    if isinstance(block, BulletList):
        return _render_list(block.items, False, units, width)
    if isinstance(block, OrderedList):
        return _render_list(block.items, True, units, width)
    if isinstance(block, MetadataSection):
        return [line for s in block.fields for line in wrap_prose(slot_text(s, units), "- ", "  ", width)]
    if isinstance(block, Table):
        def row(cells) -> str:
            return "| " + " | ".join(escape_cell(slot_text(c, units)) for c in cells) + " |"
        lines = [row(block.header), "| " + " | ".join("---" for _ in block.header) + " |"]
        lines.extend(row(r) for r in block.rows)
        return lines
    if isinstance(block, CodeFence):
        body = [slot_text(s, units) for s in block.lines]
        fence = _fence_for(body)
        return [fence + block.info_tag, *body, fence]
    raise TypeError(f"unknown block {block!r}")


def render_markdown(doc: MarkdownDocument, units: Sequence[AtomicUnit], spec: StructuralSpec) -> str:
    if not doc.blocks:
        return ""
    parts = ["\n".join(render_block(b, units, spec.wrap_width)) for b in doc.blocks]
    return "\n\n".join(parts) + "\n"


# ---------------------------------------------------------------- prompt

_BLOCK_NAMES = {
    BlockType.BULLET_LIST: "bullet lists",
    BlockType.TABLE: "pipe tables",
    BlockType.BLOCKQUOTE: "blockquotes",
    BlockType.ORDERED_LIST: "ordered lists",
    BlockType.CODE_FENCE: "fenced code blocks",
}


def render_prompt(spec: StructuralSpec) -> str:
    allowed = [b for b in BLOCK_ROTATION if b in spec.allowed_blocks]
    lines = [
        "Reformat the source document below into Markdown.",
        "",
        "Hard constraints:",
        "1. Output Markdown only. Do not add any text before or after the document.",
        "2. Preserve the content strictly: every heading, metadata field and sentence of the"
        " source must appear exactly once, unmodified. Do not add, drop, merge or split content.",
        "3. Keep the original order of all content.",
        "",
        "Structural requirements:",
        f"- Organize the body into exactly {spec.section_count} level-2 (##) sections.",
        "- If the source begins with metadata fields (Key: Value lines), list them first"
        f" under a '## {METADATA_TITLE}' heading; that heading does not count as a section.",
        "- Permitted block types besides headings and paragraphs: "
        + (", ".join(_BLOCK_NAMES[b] for b in allowed) if allowed else "none")
        + ".",
    ]
    if BlockType.BULLET_LIST in spec.allowed_blocks or BlockType.ORDERED_LIST in spec.allowed_blocks:
        lines.append(
            f"- Each list has {spec.list_item_count} items and nests exactly to depth"
            f" {spec.max_list_depth}, going at most one level deeper per item."
        )
    if BlockType.TABLE in spec.allowed_blocks:
        lines.append(
            f"- Each table has a header row, a separator row and {spec.list_item_count} body rows,"
            " with the same number of cells in every row."
        )
    lines.append(f"- Use exactly {spec.blockquote_count} blockquote(s).")
    if BlockType.CODE_FENCE in spec.allowed_blocks:
        lines.append(
            f"- Include fenced code blocks opened and closed with ``` and the info tag '{FENCE_INFO}'."
        )
    if spec.wrap_width is not None:
        lines.append(
            f"- Wrap prose lines at {spec.wrap_width} characters without breaking words;"
            " do not wrap table rows or code."
        )
    lines.append("- Where a block needs more content than remains, fill slots with"
                 " one of: " + ", ".join(f'"{s}"' for s in SENTINELS) + ".")
    return "\n".join(lines) + "\n"
