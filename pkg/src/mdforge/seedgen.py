"""Deterministic procedural seed corpus.

No real seed collection ships with the package, so this produces plain-text
documents of the usual kind: optional title headings and a metadata head,
then headed sections of prose. The text is deliberately awkward in places
(abbreviations, parentheses, pipes, backslashes, backticks, lines that look
like Markdown, CRLF, tabs, control characters) so that every pipeline stage
sees hostile input.
"""

from __future__ import annotations

import json
from typing import IO, Iterator

from .sampler import MASK64, mix64
from .segment import CATEGORIES

_NOUNS = (
    "report", "system", "policy", "method", "sample", "budget", "court", "module",
    "survey", "market", "lesson", "archive", "network", "contract", "figure", "team",
    "process", "record", "service", "standard",
)
_VERBS = (
    "describes", "supports", "requires", "limits", "reviews", "extends", "records",
    "improves", "reduces", "covers", "defines", "tracks",
)
_ADJS = (
    "annual", "formal", "internal", "public", "revised", "detailed", "final", "local",
    "primary", "shared", "legacy", "regional",
)
_TOPICS = (
    "Overview", "Background", "Scope", "Results", "Discussion", "Terms", "Budget",
    "Timeline", "Methods", "Summary", "Appendix", "Risks", "Usage", "Notes",
)
_META_KEYS = ("Author", "Date", "Version", "Status", "Department", "Reference")
_NAMES = ("A. Rivera", "J. Chen", "M. Okafor", "S. Novak", "L. Haddad", "K. Tanaka")


class _Stream:
    """Counter-based pseudo-random stream keyed by document index."""

    def __init__(self, index: int) -> None:
        self.state = mix64((index + 1) * 0x9E3779B97F4A7C15)
        self.counter = 0

    def next(self) -> int:
        self.counter += 1
        return mix64((self.state + self.counter * 0xD1B54A32D192ED03) & MASK64)

    def below(self, n: int) -> int:
        return self.next() % n

    def between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def pick(self, seq):
        return seq[self.below(len(seq))]

    def chance(self, percent: int) -> bool:
        return self.below(100) < percent


def _plain_sentence(rng: _Stream) -> str:
    words = [rng.pick(_ADJS).capitalize(), rng.pick(_NOUNS), rng.pick(_VERBS),
             "the", rng.pick(_ADJS), rng.pick(_NOUNS)]
    for _ in range(rng.between(0, 6)):
        words.append(rng.pick(_NOUNS + _ADJS))
    return " ".join(words)


def _sentence(rng: _Stream) -> str:
    body = _plain_sentence(rng)
    roll = rng.below(20)
    if roll == 0:
        body += " (see e.g. section " + str(rng.between(1, 9)) + ". Details follow)"
    elif roll == 1:
        body += " as noted by " + rng.pick(_NAMES)
    elif roll == 2:
        body += " with options a | b | c"
    elif roll == 3:
        body += " under C:\\data\\" + rng.pick(_NOUNS)
    elif roll == 4:
        body += " via `" + rng.pick(_NOUNS) + "_id`"
    elif roll == 5:
        body = "#" + rng.pick(_NOUNS) + " " + body.lower()
    elif roll == 6:
        body = "- " + body.lower()
    elif roll == 7:
        body = str(rng.between(1, 12)) + ". " + body
    elif roll == 8:
        body = "> " + body
    elif roll == 9:
        body = "```" + rng.pick(_NOUNS) + " " + body.lower()
    elif roll == 10:
        body += " at 3.5 percent"
    end = rng.pick((".", ".", ".", ".", "?", "!"))
    return body + end


def _paragraph(rng: _Stream) -> str:
    sentences = [_sentence(rng) for _ in range(rng.between(1, 6))]
    lines: list[str] = []
    current: list[str] = []
    for sentence in sentences:
        current.append(sentence)
        # hard line breaks inside a paragraph
        if rng.chance(30):
            lines.append(" ".join(current))
            current = []
    if current:
        lines.append(" ".join(current))
    return "\n".join(lines)


def seed_text(index: int) -> str:
    rng = _Stream(index)
    blocks: list[str] = []
    for _ in range(rng.between(0, 2) if rng.chance(60) else 0):
        blocks.append("# " + rng.pick(_ADJS).capitalize() + " " + rng.pick(_NOUNS) + " " + str(index))
    if rng.chance(50):
        keys = list(_META_KEYS)
        fields = []
        for _ in range(rng.between(1, 4)):
            key = keys.pop(rng.below(len(keys)))
            value = rng.pick(_NAMES) if key == "Author" else f"{rng.pick(_ADJS)} {rng.between(1, 2030)}"
            fields.append(f"{key}: {value}")
        blocks.append("\n".join(fields))
    if rng.chance(80):
        blocks.append(_paragraph(rng))
    for _ in range(rng.between(1, 7)):
        level = rng.pick(("##", "##", "###", "#"))
        blocks.append(f"{level} {rng.pick(_TOPICS)}")
        for _ in range(rng.between(0 if rng.chance(10) else 1, 3)):
            blocks.append(_paragraph(rng))
    if len(blocks) == 0 or all(b.startswith("#") for b in blocks):
        blocks.append(_paragraph(rng))

    separators = []
    for _ in range(len(blocks) - 1):
        separators.append("\n" * rng.pick((2, 2, 2, 3, 5)))
    text = blocks[0] + "".join(sep + block for sep, block in zip(separators, blocks[1:]))

    # surface noise that cleaning must remove
    if rng.chance(20):
        text = text.replace("\n", "\r\n")
    if rng.chance(15):
        text = text.replace(" the ", "\tthe ", 1)
    if rng.chance(15):
        text = text.replace(" ", " \x07", 1)
    if rng.chance(20):
        text = text.replace("\n", "   \n", 2)
    if rng.chance(10):
        text = "\n\n" + text + "\n\n\n"
    return text


def seed_records(count: int) -> Iterator[dict]:
    for index in range(count):
        category = CATEGORIES[mix64(index ^ 0x5EED) % len(CATEGORIES)]
        yield {"text": seed_text(index), "category": category}


def write_seeds(count: int, stream: IO[str]) -> None:
    for record in seed_records(count):
        stream.write(json.dumps(record, ensure_ascii=False) + "\n")
