"""Best-effort block-level Markdown parser.

Covers the block types of the canonical dialect (ATX headings, bullet and
ordered lists, GFM pipe tables, blockquotes, fenced code, paragraphs) and
never raises: malformed input shows up in the parse as unterminated fences,
tables without separators or stray lines, which the checks then judge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    METADATA_RE,
    Block,
    Blockquote,
    BulletList,
    CodeFence,
    Heading,
    ListItem,
    MarkdownDocument,
    MetadataSection,
    OrderedList,
    Paragraph,
    Table,
)
from .synth import METADATA_TITLE, unescape_line_start

_FENCE_OPEN = re.compile(r"^ {0,3}(`{3,}|~{3,})(.*)$")
_ATX = re.compile(r"^ {0,3}(#{1,6})(?:[ \t]+(.*?))?[ \t]*$")
_CLOSING = re.compile(r"(?:^|[ \t]+)#+[ \t]*$")
_QUOTE = re.compile(r"^ {0,3}> ?(.*)$")
_BULLET = re.compile(r"^( *)([-*+])(?: +(.*)|$)")
_ORDERED = re.compile(r"^( *)(\d{1,9})([.)])(?: +(.*)|$)")
_TABLE = re.compile(r"^ {0,3}\|")
_SEPARATOR_CELL = re.compile(r"^:?-+:?$")
_THEMATIC = re.compile(r"^ {0,3}([-*_=])(?:[ \t]*\1){2,}[ \t]*$")
_HTML = re.compile(r"^ {0,3}</?[A-Za-z!?][^>]*>?")
_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class ProseLine:
    """A rendered prose line and its content after the block prefix."""

    line: str
    content: str


@dataclass
class ParsedMarkdown:
    blocks: list[Block] = field(default_factory=list)
    prose_lines: list[ProseLine] = field(default_factory=list)
    stray_lines: list[int] = field(default_factory=list)
    nonblank_lines: int = 0
    # (first line, end line exclusive) of each block, parallel to ``blocks``
    spans: list[tuple[int, int]] = field(default_factory=list)

    def as_document(self) -> MarkdownDocument:
        return MarkdownDocument(tuple(self.blocks), 0, 0)


def _norm(text: str) -> str:
    return _WS.sub(" ", text).strip()


def _list_marker(line: str):
    """Return (indent, ordered, text) for a list item line, else None."""
    m = _BULLET.match(line)
    if m:
        # "---" style lines are thematic breaks, not items
        if _THEMATIC.match(line):
            return None
        return len(m.group(1)), False, m.group(3) or ""
    m = _ORDERED.match(line)
    if m:
        return len(m.group(1)), True, m.group(4) or ""
    return None


def _starts_block(line: str) -> bool:
    return bool(
        _FENCE_OPEN.match(line)
        or _ATX.match(line)
        or _QUOTE.match(line)
        or _list_marker(line)
        or _TABLE.match(line)
        or _THEMATIC.match(line)
        or _HTML.match(line)
    )


def split_cells(line: str) -> list[str]:
    """Split a pipe-table row on unescaped pipes, unescaping cell text."""
    body = line.strip()
    cells: list[str] = []
    current: list[str] = []
    closed = False
    i = 0
    while i < len(body):
        ch = body[i]
        closed = False
        if ch == "\\" and i + 1 < len(body):
            current.append(body[i + 1])
            i += 2
            continue
        if ch == "|":
            cells.append("".join(current))
            current = []
            closed = True
        else:
            current.append(ch)
        i += 1
    if not closed:
        cells.append("".join(current))
    # the leading pipe opens the row
    if body.startswith("|"):
        cells = cells[1:]
    return [c.strip() for c in cells]


def _heading(line: str) -> Heading | None:
    m = _ATX.match(line)
    if not m:
        return None
    text = (m.group(2) or "").strip()
    text = _CLOSING.sub("", text).strip()
    return Heading(len(m.group(1)), _norm(text))


class _Parser:
    def __init__(self, text: str) -> None:
        text = text.replace("\r\n", "\n").replace("\r", "\n")
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.i = 0
        self.out = ParsedMarkdown()
        self.out.nonblank_lines = sum(1 for line in self.lines if line.strip())

    def prose(self, line: str, content: str) -> None:
        self.out.prose_lines.append(ProseLine(line, content))

    def run(self) -> ParsedMarkdown:
        while self.i < len(self.lines):
            line = self.lines[self.i]
            start, count = self.i, len(self.out.blocks)
            if not line.strip():
                self.i += 1
            elif _FENCE_OPEN.match(line):
                self.fence()
            elif _ATX.match(line):
                self.out.blocks.append(_heading(line))
                self.i += 1
            elif _QUOTE.match(line):
                self.quote()
            elif _list_marker(line):
                self.list_block()
            elif _TABLE.match(line):
                self.table()
            elif _THEMATIC.match(line) or _HTML.match(line) or line.startswith("    "):
                self.out.stray_lines.append(self.i)
                self.i += 1
            else:
                self.paragraph()
            if len(self.out.blocks) > count:
                self.out.spans.append((start, self.i))
        self._mark_metadata()
        return self.out

    def fence(self) -> None:
        m = _FENCE_OPEN.match(self.lines[self.i])
        marker, info = m.group(1), m.group(2).strip()
        closer = re.compile(r"^ {0,3}" + re.escape(marker[0]) + "{" + str(len(marker)) + r",}[ \t]*$")
        body: list[str] = []
        self.i += 1
        while self.i < len(self.lines):
            line = self.lines[self.i]
            self.i += 1
            if closer.match(line):
                self.out.blocks.append(CodeFence(info, tuple(body), True))
                return
            body.append(line)
        self.out.blocks.append(CodeFence(info, tuple(body), False))

    def quote(self) -> None:
        parts: list[str] = []
        while self.i < len(self.lines):
            line = self.lines[self.i]
            m = _QUOTE.match(line)
            if m:
                content = unescape_line_start(m.group(1).strip())
            elif parts and line.strip() and not _starts_block(line):
                content = unescape_line_start(line.strip())
            else:
                break
            self.prose(line, content)
            if content:
                parts.append(content)
            self.i += 1
        self.out.blocks.append(Blockquote((_norm(" ".join(parts)),)))

    def list_block(self) -> None:
        first = _list_marker(self.lines[self.i])
        base, ordered = first[0], first[1]
        raw: list[tuple[int, list[str]]] = []
        while self.i < len(self.lines):
            line = self.lines[self.i]
            marker = _list_marker(line)
            if marker is not None:
                indent, kind, text = marker
                if indent <= base and kind != ordered:
                    break
                raw.append((max(0, indent - base), [unescape_line_start(text.strip())]))
                self.prose(line, text)
                self.i += 1
                continue
            if not line.strip():
                nxt = self._next_nonblank()
                if nxt is None:
                    break
                marker = _list_marker(self.lines[nxt])
                indented = self.lines[nxt].startswith("  ") and not _starts_block(self.lines[nxt].lstrip())
                if (marker and (marker[0] > base or marker[1] == ordered)) or indented:
                    self.i = nxt
                    continue
                break
            if _starts_block(line) and not line.startswith("  "):
                break
            content = unescape_line_start(line.strip())
            raw[-1][1].append(content)
            self.prose(line, content)
            self.i += 1

        positive = [indent for indent, _ in raw if indent > 0]
        step = min(positive) if positive else 1
        items = tuple(ListItem(indent // step + 1, _norm(" ".join(parts))) for indent, parts in raw)
        self.out.blocks.append(OrderedList(items) if ordered else BulletList(items))

    def table(self) -> None:
        rows: list[list[str]] = []
        while self.i < len(self.lines) and _TABLE.match(self.lines[self.i]):
            rows.append(split_cells(self.lines[self.i]))
            self.i += 1
        header = rows[0]
        has_sep = len(rows) > 1 and bool(rows[1]) and all(_SEPARATOR_CELL.match(c) for c in rows[1])
        if has_sep and len(rows[1]) != len(header):
            has_sep = False
        body = rows[2:] if has_sep else rows[1:]
        self.out.blocks.append(
            Table(tuple(_norm(c) for c in header), tuple(tuple(_norm(c) for c in r) for r in body), has_sep)
        )

    def paragraph(self) -> None:
        parts: list[str] = []
        while self.i < len(self.lines):
            line = self.lines[self.i]
            if not line.strip() or (parts and _starts_block(line)):
                break
            content = unescape_line_start(line.strip())
            self.prose(line, content)
            parts.append(content)
            self.i += 1
        self.out.blocks.append(Paragraph((_norm(" ".join(parts)),)))

    def _next_nonblank(self) -> int | None:
        j = self.i
        while j < len(self.lines) and not self.lines[j].strip():
            j += 1
        return j if j < len(self.lines) else None

    def _mark_metadata(self) -> None:
        blocks = self.out.blocks
        for k in range(len(blocks) - 1):
            head, nxt = blocks[k], blocks[k + 1]
            if (
                isinstance(head, Heading)
                and head.level == 2
                and head.title == METADATA_TITLE
                and isinstance(nxt, BulletList)
                and all(item.depth == 1 and METADATA_RE.match(item.slot) for item in nxt.items)
            ):
                blocks[k + 1] = MetadataSection(tuple(item.slot for item in nxt.items))


def parse_markdown(text: str) -> ParsedMarkdown:
    return _Parser(text).run()
