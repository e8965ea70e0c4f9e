"""Executable structural checks, structure score, content preservation, composite.

Each check scores ``1 - violations / opportunities`` floored at zero, and
1.0 exactly when it found nothing to report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ContractViolation
from .model import (
    BLOCK_TYPE_OF,
    SENTINELS,
    VALIDATOR_VERSION,
    AtomicUnit,
    Blockquote,
    BulletList,
    CodeFence,
    Heading,
    MetadataSection,
    OrderedList,
    Paragraph,
    StructuralSpec,
    Table,
    slot_text,
)
from .parser import ParsedMarkdown, parse_markdown
from .segment import normalize_ws

CHECK_NAMES: tuple[str, ...] = (
    "fence-balance",
    "list-nesting",
    "table-consistency",
    "heading-hierarchy",
    "blockquote-count",
    "allowed-blocks",
    "wrap-compliance",
    "markdown-only",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    score: float
    details: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"name": self.name, "score": self.score, "details": list(self.details)}


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]
    structure_score: float
    validator_version: str = VALIDATOR_VERSION

    def to_dict(self) -> dict:
        return {
            "checks": [c.to_dict() for c in self.checks],
            "structure_score": self.structure_score,
            "validator_version": self.validator_version,
        }


@dataclass(frozen=True)
class CompositeScore:
    r_sem: float
    r_struct: float
    lambda1: float = 1.0
    lambda2: float = 1.0
    r: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", self.lambda1 * self.r_sem + self.lambda2 * self.r_struct)

    def to_dict(self) -> dict:
        return {"r_sem": self.r_sem, "r_struct": self.r_struct,
                "lambda1": self.lambda1, "lambda2": self.lambda2, "r": self.r}


def _result(name: str, violations: int, opportunities: int, details: list[str]) -> CheckResult:
    if not details:
        return CheckResult(name, 1.0)
    score = max(0.0, 1.0 - violations / opportunities) if opportunities else 0.0
    return CheckResult(name, score, tuple(details))


def _lists(parse: ParsedMarkdown):
    return [b for b in parse.blocks if isinstance(b, (BulletList, OrderedList))]


def check_fence_balance(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    fences = [b for b in parse.blocks if isinstance(b, CodeFence)]
    open_ = [f for f in fences if not f.closed]
    details = [f"code fence #{k + 1} of {len(fences)} is never closed"
               for k, f in enumerate(fences) if not f.closed]
    return _result("fence-balance", len(open_), len(fences), details)


def check_list_nesting(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    violations = opportunities = 0
    details: list[str] = []
    for n, block in enumerate(_lists(parse), start=1):
        prev = 0
        for item in block.items:
            opportunities += 1
            if item.depth > prev + 1:
                violations += 1
                details.append(f"list {n}: depth jumps from {prev} to {item.depth}")
            elif item.depth > spec.max_list_depth:
                violations += 1
                details.append(f"list {n}: depth {item.depth} exceeds maximum {spec.max_list_depth}")
            prev = item.depth
        # each list must nest as deep as max_list_depth allows, given its item count
        opportunities += 1
        target = min(spec.max_list_depth, len(block.items))
        reached = max((item.depth for item in block.items), default=0)
        if reached < target:
            violations += 1
            details.append(f"list {n}: reaches depth {reached}, required {target}")
    return _result("list-nesting", violations, opportunities, details)


def check_table_consistency(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    violations = opportunities = 0
    details: list[str] = []
    tables = [b for b in parse.blocks if isinstance(b, Table)]
    for n, table in enumerate(tables, start=1):
        opportunities += 1 + len(table.rows)
        if not table.has_separator:
            violations += 1
            details.append(f"table {n}: missing header separator row")
        for r, row in enumerate(table.rows, start=1):
            if len(row) != len(table.header):
                violations += 1
                details.append(f"table {n}: row {r} has {len(row)} cells, header has {len(table.header)}")
    return _result("table-consistency", violations, opportunities, details)


def section_headings(parse: ParsedMarkdown) -> list[Heading]:
    """Level-2 headings that open a section (the metadata heading does not)."""
    blocks = parse.blocks
    out = []
    for k, block in enumerate(blocks):
        if isinstance(block, Heading) and block.level == 2:
            nxt = blocks[k + 1] if k + 1 < len(blocks) else None
            if not isinstance(nxt, MetadataSection):
                out.append(block)
    return out


def check_heading_hierarchy(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    headings = [b for b in parse.blocks if isinstance(b, Heading)]
    details: list[str] = []
    violations = 0
    # the document itself acts as the level-1 root
    prev = 1
    for heading in headings:
        if heading.level > prev + 1:
            violations += 1
            details.append(f"heading {heading.title!r} skips from level {prev} to {heading.level}")
        prev = heading.level
    sections = len(section_headings(parse))
    if sections != spec.section_count:
        violations += 1
        details.append(f"{sections} sections, required {spec.section_count}")
    return _result("heading-hierarchy", violations, len(headings) + 1, details)


def check_blockquote_count(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    observed = sum(isinstance(b, Blockquote) for b in parse.blocks)
    target = spec.blockquote_count
    if observed == target:
        return CheckResult("blockquote-count", 1.0)
    score = max(0.0, 1.0 - abs(observed - target) / max(target, 1))
    return CheckResult("blockquote-count", score, (f"{observed} blockquotes, required {target}",))


def check_allowed_blocks(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    details: list[str] = []
    for k, block in enumerate(parse.blocks):
        block_type = BLOCK_TYPE_OF.get(type(block))
        if block_type is not None and block_type not in spec.allowed_blocks:
            details.append(f"block {k + 1}: {block_type.value} is not permitted")
    return _result("allowed-blocks", len(details), len(parse.blocks), details)


def check_wrap_compliance(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    width = spec.wrap_width
    if width is None:
        return CheckResult("wrap-compliance", 1.0)
    details: list[str] = []
    for prose in parse.prose_lines:
        # a lone unbreakable word may overhang
        if len(prose.line) > width and len(prose.content.split()) > 1:
            details.append(f"line of {len(prose.line)} chars exceeds {width}: {prose.line[:40]!r}...")
    return _result("wrap-compliance", len(details), len(parse.prose_lines), details)


def check_markdown_only(parse: ParsedMarkdown, spec: StructuralSpec) -> CheckResult:
    details = [f"line {i + 1} belongs to no recognized block" for i in parse.stray_lines]
    return _result("markdown-only", len(details), parse.nonblank_lines, details)


CHECK_REGISTRY: dict[str, Callable[[ParsedMarkdown, StructuralSpec], CheckResult]] = {
    "fence-balance": check_fence_balance,
    "list-nesting": check_list_nesting,
    "table-consistency": check_table_consistency,
    "heading-hierarchy": check_heading_hierarchy,
    "blockquote-count": check_blockquote_count,
    "allowed-blocks": check_allowed_blocks,
    "wrap-compliance": check_wrap_compliance,
    "markdown-only": check_markdown_only,
}


def run_checks(parse: ParsedMarkdown, spec: StructuralSpec) -> list[CheckResult]:
    return [CHECK_REGISTRY[name](parse, spec) for name in CHECK_NAMES]


def structure_score(checks: Sequence[CheckResult]) -> float:
    names = sorted(c.name for c in checks)
    if names != sorted(CHECK_NAMES):
        raise ContractViolation(f"checks must cover the registry exactly once, got {names}")
    # fsum keeps the mean independent of check order
    return math.fsum(c.score for c in checks) / len(checks)


def validate_markdown(text: str, spec: StructuralSpec) -> ValidationReport:
    checks = run_checks(parse_markdown(text), spec)
    return ValidationReport(tuple(checks), structure_score(checks))


# ---------------------------------------------------------------- content


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (two-row DP)."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def block_fragments(parse: ParsedMarkdown) -> list[str]:
    """Prose fragments of a parse in reading order, markup already stripped."""
    out: list[str] = []
    for block in parse.blocks:
        if isinstance(block, Heading):
            out.append(block.title)
        elif isinstance(block, (Paragraph, Blockquote)):
            out.extend(block.units)
        elif isinstance(block, (BulletList, OrderedList)):
            out.extend(item.slot for item in block.items)
        elif isinstance(block, MetadataSection):
            out.extend(block.fields)
        elif isinstance(block, Table):
            out.extend(block.header)
            for row in block.rows:
                out.extend(row)
        elif isinstance(block, CodeFence):
            out.extend(block.lines)
    return [f for f in (normalize_ws(x) for x in out) if f]


def extract_units(fragments: Sequence[str], unit_texts: Sequence[str]) -> list[str]:
    """Cut fragments into candidate unit texts.

    Scans each fragment word by word, taking the longest unit text that
    starts at the current word; words matching no unit accumulate into
    leftover pieces. Sentinel pieces are dropped unless they are unit texts.
    """
    by_first: dict[str, list[list[str]]] = {}
    for text in set(unit_texts):
        words = text.split(" ")
        by_first.setdefault(words[0], []).append(words)
    for candidates in by_first.values():
        candidates.sort(key=len, reverse=True)

    pieces: list[str] = []
    for fragment in fragments:
        words = fragment.split(" ")
        leftover: list[str] = []
        i = 0
        while i < len(words):
            match = next(
                (c for c in by_first.get(words[i], ()) if words[i:i + len(c)] == c),
                None,
            )
            if match is None:
                leftover.append(words[i])
                i += 1
                continue
            if leftover:
                pieces.append(" ".join(leftover))
                leftover = []
            pieces.append(" ".join(match))
            i += len(match)
        if leftover:
            pieces.append(" ".join(leftover))
    # a source sentence that happens to read like a sentinel is still content
    sentinels = set(SENTINELS).difference(unit_texts)
    return [p for p in pieces if p not in sentinels]


def preservation_ratio(unit_texts: Sequence[str], extracted: Sequence[str]) -> float:
    if not unit_texts:
        raise ContractViolation("content preservation needs at least one unit")
    return lcs_length(list(unit_texts), list(extracted)) / len(unit_texts)


def aligned_units(unit_texts: Sequence[str], fragments: Sequence[str]) -> int:
    """Most units matchable in order, each to its own word span within one fragment.

    Equals the LCS between the units and the best possible cut of the
    fragments into pieces, so no greedy cutting choice can cost a match.
    """
    words: list[str] = []
    fragment_end: list[int] = []
    for fragment in fragments:
        piece = fragment.split(" ")
        stop = len(words) + len(piece)
        words.extend(piece)
        fragment_end.extend([stop] * len(piece))
    n = len(words)
    starts: dict[str, list[int]] = {}
    for j, w in enumerate(words):
        starts.setdefault(w, []).append(j)

    # best[j]: matches achievable from the current unit onward, starting at word j
    best = [0] * (n + 1)
    for text in reversed(unit_texts):
        target = text.split(" ")
        size = len(target)
        matched = {j for j in starts.get(target[0], ())
                   if j + size <= fragment_end[j] and words[j:j + size] == target}
        row = [0] * (n + 1)
        for j in range(n - 1, -1, -1):
            take = 1 + best[j + size] if j in matched else 0
            row[j] = max(row[j + 1], best[j], take)
        best = row
    return best[0]


def content_preservation(output_text: str, units: Sequence[AtomicUnit]) -> float:
    if not units:
        raise ContractViolation("content preservation needs at least one unit")
    unit_texts = [normalize_ws(u.text) for u in units]
    fragments = block_fragments(parse_markdown(output_text))
    greedy = lcs_length(unit_texts, extract_units(fragments, unit_texts))
    if greedy == len(unit_texts):
        return 1.0
    return aligned_units(unit_texts, fragments) / len(unit_texts)


def composite(r_sem: float, r_struct: float, lambda1: float = 1.0, lambda2: float = 1.0) -> CompositeScore:
    if lambda1 < 0 or lambda2 < 0:
        raise ContractViolation(f"weights must be non-negative, got {lambda1}, {lambda2}")
    for name, value in (("r_sem", r_sem), ("r_struct", r_struct)):
        if not 0.0 <= value <= 1.0:
            raise ContractViolation(f"{name} must lie in [0, 1], got {value}")
    return CompositeScore(r_sem, r_struct, lambda1, lambda2)


# ---------------------------------------------------------------- round trip


def _signature(block, units: Sequence[AtomicUnit] | None) -> tuple:
    def text(slot) -> str:
        return normalize_ws(slot_text(slot, units))

    if isinstance(block, Heading):
        return ("heading", block.level, text(block.title))
    if isinstance(block, Paragraph):
        return ("paragraph", normalize_ws(" ".join(text(s) for s in block.units)))
    if isinstance(block, Blockquote):
        return ("blockquote", normalize_ws(" ".join(text(s) for s in block.units)))
    if isinstance(block, (BulletList, OrderedList)):
        kind = "bullet" if isinstance(block, BulletList) else "ordered"
        return (kind, tuple((item.depth, text(item.slot)) for item in block.items))
    if isinstance(block, Table):
        return ("table", tuple(text(c) for c in block.header),
                tuple(tuple(text(c) for c in row) for row in block.rows), block.has_separator)
    if isinstance(block, CodeFence):
        return ("code", block.info_tag, tuple(slot_text(s, units) for s in block.lines), block.closed)
    if isinstance(block, MetadataSection):
        return ("metadata", tuple(text(s) for s in block.fields))
    raise TypeError(f"unknown block {block!r}")


def document_signature(blocks, units: Sequence[AtomicUnit] | None = None) -> list[tuple]:
    """Comparable structure of a block sequence, with text resolved and normalized."""
    return [_signature(b, units) for b in blocks]
