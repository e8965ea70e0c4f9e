import io
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdforge.errors import EmptyDocumentError, IngestError
from mdforge.model import UnitKind
from mdforge.segment import CATEGORIES, clean, heading_text, ingest, segment, split_sentences
from tests.oracles import splitter


def _lines(*records):
    return io.StringIO("".join((r if isinstance(r, str) else json.dumps(r)) + "\n" for r in records))


# ---------------------------------------------------------------- ingest

def test_ingest_discards_empty_text():
    result = ingest(_lines({"text": "One."}, {"text": "   "}, {"text": "Two."}))
    assert [d.raw_text for d in result.documents] == ["One.", "Two."]
    assert [d.id for d in result.documents] == [0, 1]
    assert result.discarded == 1


def test_ingest_empty_stream():
    result = ingest(io.StringIO(""))
    assert result.documents == [] and result.discarded == 0


def test_ingest_malformed_records_are_counted():
    result = ingest(_lines({"body": "x"}, "{not json", "[1, 2]", {"text": 5},
                           {"text": "ok", "category": "poetry"}, {"text": "kept", "category": "legal"}))
    assert result.discarded == 5
    assert [(d.raw_text, d.category) for d in result.documents] == [("kept", "legal")]


def test_ingest_default_category_and_blank_lines():
    result = ingest(io.StringIO('\n{"text": "a"}\n\n'))
    assert result.discarded == 0
    assert result.documents[0].category == "reference"


def test_ingest_unreadable_stream():
    class Broken:
        def __iter__(self):
            raise OSError("disk gone")

    with pytest.raises(IngestError):
        ingest(Broken())


def test_eight_categories():
    assert len(CATEGORIES) == len(set(CATEGORIES)) == 8


# ---------------------------------------------------------------- clean

def test_clean_line_endings_and_tabs():
    # stripping trailing whitespace wins over keeping the spaces a trailing tab expands to
    assert clean("a\r\nb\t") == "a\nb"
    assert clean("a\r\n\tb") == "a\n    b"


def test_clean_blank_runs():
    assert clean("x\n\n\n\n\ny") == "x\n\ny"
    assert clean("x\n\n\ny") == "x\n\n\ny"


def test_clean_control_only():
    with pytest.raises(EmptyDocumentError):
        clean("\x00\x07\x1b")


def test_clean_removes_controls_keeps_text():
    assert clean("a\x07b\x1f\nc\r") == "ab\nc"


raw_text = st.text(alphabet=st.sampled_from(list("ab #:\t\r\n\x00\x07 .?!()XY")), min_size=1, max_size=80)


@given(raw_text)
def test_clean_idempotent(text):
    try:
        once = clean(text)
    except EmptyDocumentError:
        return
    assert clean(once) == once
    assert all(line == line.rstrip() for line in once.split("\n"))
    assert "\t" not in once and "\r" not in once and "\n\n\n\n" not in once


# ---------------------------------------------------------------- segment

def test_segment_example():
    units = segment("## Intro\nDate: 2024-01-01\nIt works. It ships.")
    assert [(u.kind, u.text) for u in units] == [
        (UnitKind.HEADING, "Intro"),
        (UnitKind.METADATA, "Date: 2024-01-01"),
        (UnitKind.SENTENCE, "It works."),
        (UnitKind.SENTENCE, "It ships."),
    ]


def test_abbreviation_not_split():
    assert [u.text for u in segment("See Fig. 3 for details.")] == ["See Fig. 3 for details."]


@pytest.mark.parametrize("text,expected", [
    ("Call J. Smith today. Then stop.", ["Call J. Smith today.", "Then stop."]),
    ("It is (see e.g. Part Two. Really) fine. Next.", ["It is (see e.g. Part Two. Really) fine.", "Next."]),
    ("Why? Because! Done", ["Why?", "Because!", "Done"]),
    ("Version 3.5 shipped. ok then.", ["Version 3.5 shipped. ok then."]),
])
def test_splitter_rules(text, expected):
    assert split_sentences(text) == expected


def test_metadata_only_in_head():
    units = segment("Intro line.\nKey: value")
    assert [u.kind for u in units] == [UnitKind.SENTENCE, UnitKind.SENTENCE]
    units = segment("# T\n\nA: 1\n\nB: 2\n\nBody. More.\nC: 3")
    assert [u.kind for u in units][:3] == [UnitKind.HEADING, UnitKind.METADATA, UnitKind.METADATA]
    assert (units[-1].kind, units[-1].text) == (UnitKind.SENTENCE, "C: 3")


@pytest.mark.parametrize("line,expected", [
    ("# A", "A"), ("###### Deep", "Deep"), ("## Closed ##", "Closed"), ("#NoSpace", None),
    ("####### seven", None), ("## ## double", "double"),
])
def test_heading_text(line, expected):
    assert heading_text(line) == expected


_ABBREV_TRAPS = ("see Fig. 4 above", "by J. Rivera", "(per Note. Two)", "at 2.5 percent", "e.g. the index")


def _sentence(rng: random.Random) -> str:
    words = [rng.choice(("Alpha", "Beta", "Gamma", "Delta"))]
    for _ in range(rng.randint(1, 6)):
        words.append(rng.choice(("one", "two", "three", "four") + _ABBREV_TRAPS))
    return " ".join(words) + rng.choice(".?!")


def test_two_hundred_sentences_against_oracle():
    rng = random.Random(20240101)
    sentences = [_sentence(rng) for _ in range(200)]
    text = " ".join(sentences)
    assert splitter.split(text) == sentences
    units = segment(text)
    assert [u.text for u in units] == sentences
    assert [u.index for u in units] == list(range(200))


@given(st.text(alphabet=st.sampled_from(list("aZ .?!()\n")), max_size=60))
def test_scanner_matches_oracle(text):
    assert split_sentences(text) == splitter.split(text)


prose_line = st.text(alphabet=st.sampled_from(list("Ab c.?!(): -#")), min_size=1, max_size=40)
document = st.lists(st.one_of(prose_line, st.just(""), prose_line.map(lambda s: "## " + s)), min_size=1, max_size=12)


@settings(max_examples=150)
@given(document)
def test_segment_invariants(lines):
    try:
        cleaned = clean("\n".join(lines))
    except EmptyDocumentError:
        return
    units = segment(cleaned)
    assert segment(clean(cleaned)) == units
    assert [u.index for u in units] == list(range(len(units)))
    flat = " ".join(cleaned.split())
    pos = 0
    for unit in units:
        assert unit.text and "\n" not in unit.text and unit.text == unit.text.strip()
        found = flat.find(unit.text, pos)
        assert found >= 0, unit
        pos = found + len(unit.text)
