import io
import json

import pytest

from mdforge.dataset import (
    DatasetEntry,
    build_entry,
    corpus_stats,
    generate,
    generate_lines,
    is_unimodal,
    score_candidates,
    validate_records,
)
from mdforge.errors import ContractViolation, SelfValidationError
from mdforge.mutations import delete_closing_fence, flatten_lists
from mdforge.segment import SeedDocument
from tests.conftest import GOLDEN, build_corpus


def test_entry_round_trip(golden_entries):
    for entry in golden_entries:
        assert DatasetEntry.from_dict(json.loads(entry.to_json())) == entry


def test_entry_fields(golden_entries):
    entry = golden_entries[0]
    assert set(entry.to_dict()) == {"seed_text", "instruction_prompt", "target_markdown", "spec", "difficulty",
                                    "validator_id", "seed_index", "variant_index", "category", "split"}
    assert all(e.validator_id == e.spec.validator_version == "mdforge-validator/1" for e in golden_entries)
    assert all(e.difficulty == e.spec.difficulty for e in golden_entries)


def test_golden_corpus_reproduced():
    with open(GOLDEN / "seeds60.jsonl", encoding="utf-8") as src:
        out = io.StringIO()
        generate(src, out, workers=1)
    assert out.getvalue() == (GOLDEN / "corpus60.jsonl").read_text(encoding="utf-8")


def test_pool_matches_in_process():
    seeds = [SeedDocument(i, "news", f"Doc {i} starts here. It has two sentences.") for i in range(150)]
    assert generate_lines(seeds, 1, workers=1) == generate_lines(seeds, 1, workers=3)


def test_empty_input():
    out = io.StringIO()
    summary = generate(io.StringIO(""), out)
    assert summary["entries"] == 0 and out.getvalue() == ""


def test_unusable_seeds_are_skipped():
    out = io.StringIO()
    summary = generate(io.StringIO('{"text": "\\u0007\\u0000"}\n{"text": "Fine."}\n'), out, workers=1)
    assert summary["entries"] == 1 and summary["skipped_empty"] == 1


def test_split_stable_across_variant_counts():
    seeds = [SeedDocument(i, "legal", f"Clause {i} applies. It is binding.") for i in range(40)]
    one = {(e["seed_index"], e["variant_index"]): e["split"]
           for e in map(json.loads, generate_lines(seeds, 1, workers=1)[0])}
    three = {(e["seed_index"], e["variant_index"]): e["split"]
             for e in map(json.loads, generate_lines(seeds, 3, workers=1)[0])}
    assert all(three[key] == split for key, split in one.items())
    assert len(three) == 120


def test_bad_arguments():
    seeds = [SeedDocument(0, "news", "A.")]
    with pytest.raises(ContractViolation):
        generate_lines(seeds, 0)
    with pytest.raises(ContractViolation):
        generate_lines(seeds, 1, train_fraction=0.0)
    with pytest.raises(ContractViolation):
        generate_lines(seeds, 1, difficulty_mix=(0, 0, 0))


def test_self_validation_failure_is_fatal(monkeypatch):
    import mdforge.dataset as ds

    monkeypatch.setattr(ds, "render_markdown", lambda doc, units, spec: "broken\n")
    with pytest.raises(SelfValidationError) as info:
        build_entry(SeedDocument(4, "news", "One. Two."), 2)
    assert (info.value.seed_index, info.value.variant_index) == (4, 2)


# ---------------------------------------------------------------- validate

def _records(entries, text_of=lambda e: e.target_markdown, inline=True):
    for e in entries:
        record = {"seed_index": e.seed_index, "variant_index": e.variant_index, "output": text_of(e)}
        if inline:
            record["spec"] = e.spec.to_dict()
        yield json.dumps(record)


def test_validate_own_targets(golden_entries):
    reports, ok = validate_records(e.to_json() for e in golden_entries)
    assert ok and all(r["structure_score"] == 1.0 for r in reports)


def test_validate_mutated_fence(golden_entries):
    entry = golden_entries[0]
    mutated = delete_closing_fence(entry.target_markdown, entry.spec)
    reports, ok = validate_records(_records([entry], lambda e: mutated))
    assert not ok
    # one of six fences left open: (7 + 5/6) / 8
    assert reports[0]["structure_score"] == 0.9791666666666666
    assert reports[0]["structure_score"] == pytest.approx(47 / 48, abs=1e-15)


def test_validate_spec_by_reference(golden_entries):
    index = {(e.seed_index, e.variant_index): e.spec for e in golden_entries}
    reports, ok = validate_records(_records(golden_entries[:5], inline=False), index)
    assert ok and len(reports) == 5


def test_validate_missing_spec():
    reports, ok = validate_records([json.dumps({"output": "## A\n"})])
    assert not ok and "error" in reports[0]


def test_validate_threshold(golden_entries):
    entry = golden_entries[0]
    mutated = delete_closing_fence(entry.target_markdown, entry.spec)
    _, ok = validate_records(_records([entry], lambda e: mutated), threshold=0.95)
    assert ok


# ---------------------------------------------------------------- score

def _candidates(entries, text_of):
    return [json.dumps({"seed_index": e.seed_index, "variant_index": e.variant_index, "output": text_of(e)})
            for e in entries]


def test_score_identity(golden_entries):
    results = score_candidates(_candidates(golden_entries, lambda e: e.target_markdown), golden_entries, workers=1)
    summary = results[-1]["summary"]
    assert summary["mean_structure_score"] == 1.0 and summary["mean_content_preservation"] == 1.0
    assert results[0]["composite"]["r"] == 2.0


def test_score_empty_outputs(golden_entries):
    results = score_candidates(_candidates(golden_entries, lambda e: ""), golden_entries, workers=1)
    assert results[-1]["summary"]["mean_content_preservation"] == 0.0


def test_score_flattened_lists(golden_entries):
    deep = [e for e in golden_entries if e.spec.max_list_depth >= 3]
    assert deep
    results = score_candidates(_candidates(deep, lambda e: flatten_lists(e.target_markdown, e.spec)), deep,
                               workers=1)
    assert results[-1]["summary"]["mean_structure_score"] < 1.0


def test_score_unmatched_key_continues(golden_entries):
    lines = [json.dumps({"seed_index": 999, "variant_index": 0, "output": "x"})]
    lines += _candidates(golden_entries[:2], lambda e: e.target_markdown)
    results = score_candidates(lines, golden_entries, workers=1)
    assert "error" in results[0] and results[-1]["summary"] == {
        "candidates": 2, "errors": 1, "mean_structure_score": 1.0, "mean_content_preservation": 1.0}


def test_score_pool_keeps_order(golden_entries):
    lines = _candidates(golden_entries, lambda e: e.target_markdown[: len(e.target_markdown) // 2])
    many = lines * 2
    assert score_candidates(many, golden_entries, workers=3) == score_candidates(many, golden_entries, workers=1)


# ---------------------------------------------------------------- stats

def test_stats_empty_and_single(golden_entries):
    empty = corpus_stats([])
    assert empty["entries"] == 0 and all(h == {} for h in empty["histograms"].values())
    single = corpus_stats(golden_entries[:1])
    assert all(list(h.values()) == [1] for h in single["histograms"].values())


def test_stats_pinned(corpus):
    stats = corpus_stats(corpus)
    assert stats["histograms"] == {
        "section_count": {"3": 135, "4": 215, "5": 373, "6": 242, "7": 135},
        "max_list_depth": {"1": 174, "2": 354, "3": 363, "4": 209},
        "list_item_count": {"2": 111, "3": 208, "4": 285, "5": 150, "6": 182, "7": 90, "8": 74},
        "blockquote_count": {"0": 123, "1": 236, "2": 375, "3": 239, "4": 127},
    }
    assert stats["by_split"] == {"test": 304, "train": 796}


@pytest.mark.parametrize("hist,expected", [
    ({}, True), ({"1": 3}, True), ({"1": 1, "2": 3, "3": 2}, True), ({"1": 3, "2": 1, "3": 3}, False),
    ({"1": 2, "3": 2}, False), ({"1": 1, "2": 2, "3": 2, "4": 1}, True),
])
def test_unimodal(hist, expected):
    assert is_unimodal(hist) is expected


def test_two_runs_identical():
    assert build_corpus(80, workers=1) == build_corpus(80, workers=2)
