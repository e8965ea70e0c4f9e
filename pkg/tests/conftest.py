import io
from pathlib import Path

import pytest

from mdforge.dataset import generate, read_entries
from mdforge.seedgen import write_seeds

GOLDEN = Path(__file__).parent / "golden"


def build_corpus(count: int, **kwargs) -> str:
    seeds = io.StringIO()
    write_seeds(count, seeds)
    out = io.StringIO()
    generate(io.StringIO(seeds.getvalue()), out, **kwargs)
    return out.getvalue()


@pytest.fixture(scope="session")
def corpus_text() -> str:
    """The 1,100-entry corpus from procedural seeds, default flags."""
    return build_corpus(1100, workers=1)


@pytest.fixture(scope="session")
def corpus(corpus_text):
    return read_entries(io.StringIO(corpus_text))


@pytest.fixture(scope="session")
def golden_entries():
    with open(GOLDEN / "corpus60.jsonl", encoding="utf-8") as fh:
        return read_entries(fh)


def pytest_terminal_summary(terminalreporter):
    from tests._acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
