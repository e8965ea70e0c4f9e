"""Single-edit structural corruptions of rendered Markdown.

Each mutation takes rendered text and its spec and returns the corrupted
text, or None when the document has nothing for it to act on. Used to probe
that the validator notices every kind of structural damage.
"""

from __future__ import annotations

from typing import Callable, Optional

from .model import Blockquote, BulletList, CodeFence, OrderedList, StructuralSpec, Table
from .parser import _list_marker, parse_markdown
from .checks import section_headings
from .synth import BULLET_INDENT, ORDERED_INDENT

Mutation = Callable[[str, StructuralSpec], Optional[str]]


def _lines(text: str) -> list[str]:
    return text.split("\n")


def delete_closing_fence(text: str, spec: StructuralSpec) -> str | None:
    parse = parse_markdown(text)
    closed = [span for block, span in zip(parse.blocks, parse.spans)
              if isinstance(block, CodeFence) and block.closed]
    if not closed:
        return None
    lines = _lines(text)
    del lines[closed[-1][1] - 1]
    return "\n".join(lines)


def _drop_last_cell(row: str) -> str:
    # position of every unescaped pipe
    pipes = []
    i = 0
    while i < len(row):
        if row[i] == "\\":
            i += 2
            continue
        if row[i] == "|":
            pipes.append(i)
        i += 1
    return row[: pipes[-2] + 1]


def drop_table_cell(text: str, spec: StructuralSpec) -> str | None:
    parse = parse_markdown(text)
    for block, (start, _) in zip(parse.blocks, parse.spans):
        if isinstance(block, Table) and block.has_separator and block.rows and len(block.header) > 1:
            lines = _lines(text)
            lines[start + 2] = _drop_last_cell(lines[start + 2])
            return "\n".join(lines)
    return None


def skip_heading_level(text: str, spec: StructuralSpec) -> str | None:
    parse = parse_markdown(text)
    sections = section_headings(parse)
    if not sections:
        return None
    target = next(k for k, b in enumerate(parse.blocks) if b is sections[0])
    start = parse.spans[target][0]
    lines = _lines(text)
    lines[start] = lines[start].replace("## ", "#### ", 1)
    return "\n".join(lines)


def exceed_list_depth(text: str, spec: StructuralSpec) -> str | None:
    """Nest one item a level below a deepest-allowed item.

    The item right after a depth-``max`` item is re-indented (with its
    wrapped lines) to depth ``max + 1``, making it that item's child.
    """
    parse = parse_markdown(text)
    lines = _lines(text)
    for block, (start, end) in zip(parse.blocks, parse.spans):
        if not isinstance(block, (BulletList, OrderedList)):
            continue
        markers = [i for i in range(start, end) if _list_marker(lines[i])]
        for k in range(1, len(block.items)):
            if block.items[k - 1].depth != spec.max_list_depth:
                continue
            step = ORDERED_INDENT if isinstance(block, OrderedList) else BULLET_INDENT
            shift = step * spec.max_list_depth - _list_marker(lines[markers[k]])[0]
            stop = markers[k + 1] if k + 1 < len(markers) else end
            for i in range(markers[k], stop):
                if lines[i].strip():
                    lines[i] = " " * shift + lines[i]
            return "\n".join(lines)
    return None


def delete_blockquote(text: str, spec: StructuralSpec) -> str | None:
    parse = parse_markdown(text)
    for block, (start, end) in zip(parse.blocks, parse.spans):
        if isinstance(block, Blockquote):
            lines = _lines(text)
            if end < len(lines) and not lines[end].strip():
                end += 1
            elif start > 0 and not lines[start - 1].strip():
                start -= 1
            del lines[start:end]
            return "\n".join(lines)
    return None


def flatten_lists(text: str, spec: StructuralSpec) -> str | None:
    """Bring every nested list item back to the left margin."""
    parse = parse_markdown(text)
    lines = _lines(text)
    changed = False
    for block, (start, end) in zip(parse.blocks, parse.spans):
        if isinstance(block, (BulletList, OrderedList)):
            for i in range(start, end):
                stripped = lines[i].lstrip(" ")
                changed |= stripped != lines[i]
                lines[i] = stripped
    return "\n".join(lines) if changed else None


CANONICAL_MUTATIONS: dict[str, Mutation] = {
    "delete-closing-fence": delete_closing_fence,
    "drop-table-cell": drop_table_cell,
    "skip-heading-level": skip_heading_level,
    "exceed-list-depth": exceed_list_depth,
    "delete-blockquote": delete_blockquote,
}
