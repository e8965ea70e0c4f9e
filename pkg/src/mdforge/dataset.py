"""Dataset entries, end-to-end generation and the corpus-level tools built on them."""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import IO, Iterable, Iterator, Sequence

from .checks import composite, content_preservation, validate_markdown
from .errors import ContractViolation, DegenerateInputError, EmptyDocumentError, SelfValidationError
from .model import VALIDATOR_VERSION, StructuralSpec
from .sampler import is_test_split, pick_difficulty, sample_spec
from .segment import SeedDocument, clean, ingest, segment
from .synth import render_markdown, render_prompt, synthesize

DEFAULT_TRAIN_FRACTION = 8 / 11
DEFAULT_MIX = (1.0, 1.0, 1.0)
HISTOGRAM_FIELDS = ("section_count", "max_list_depth", "list_item_count", "blockquote_count")


@dataclass(frozen=True)
class DatasetEntry:
    seed_text: str
    instruction_prompt: str
    target_markdown: str
    spec: StructuralSpec
    difficulty: int
    validator_id: str
    seed_index: int
    variant_index: int
    category: str
    split: str

    def __post_init__(self) -> None:
        if self.split not in ("train", "test"):
            raise ContractViolation(f"split must be train or test, got {self.split!r}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["spec"] = self.spec.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetEntry":
        fields = dict(data)
        fields["spec"] = StructuralSpec.from_dict(fields["spec"])
        return cls(**fields)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


@dataclass(frozen=True)
class _Job:
    seed: SeedDocument
    variant_index: int
    difficulty_mix: tuple[float, float, float]
    train_fraction: float


def build_entry(seed: SeedDocument, variant_index: int,
                difficulty_mix: Sequence[float] = DEFAULT_MIX,
                train_fraction: float = DEFAULT_TRAIN_FRACTION) -> DatasetEntry:
    """Run the full pipeline for one (seed, variant) and self-validate the result.

    Raises EmptyDocumentError or DegenerateInputError for seeds with no
    usable content, and SelfValidationError if the target fails its own spec.
    """
    units = segment(clean(seed.raw_text))
    difficulty = pick_difficulty(seed.id, variant_index, tuple(difficulty_mix))
    spec = sample_spec(seed.id, variant_index, difficulty)
    doc = synthesize(units, spec)
    target = render_markdown(doc, units, spec)

    report = validate_markdown(target, spec)
    if report.structure_score != 1.0:
        failing = [c.name for c in report.checks if c.score != 1.0]
        raise SelfValidationError(seed.id, variant_index, f"structure checks failed: {failing}")
    preserved = content_preservation(target, units)
    if preserved != 1.0:
        raise SelfValidationError(seed.id, variant_index, f"content preservation {preserved}")

    return DatasetEntry(
        seed_text=seed.raw_text,
        instruction_prompt=render_prompt(spec),
        target_markdown=target,
        spec=spec,
        difficulty=difficulty,
        validator_id=report.validator_version,
        seed_index=seed.id,
        variant_index=variant_index,
        category=seed.category,
        split="test" if is_test_split(seed.id, variant_index, train_fraction) else "train",
    )


def _run_job(job: _Job) -> str | None:
    try:
        entry = build_entry(job.seed, job.variant_index, job.difficulty_mix, job.train_fraction)
    except (EmptyDocumentError, DegenerateInputError):
        return None
    return entry.to_json()


def worker_count() -> int:
    raw = os.environ.get("MDFORGE_WORKERS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ContractViolation(f"MDFORGE_WORKERS must be an integer, got {raw!r}") from None
    return max(1, min(8, os.cpu_count() or 1))


def _map_ordered(func, jobs: list, workers: int) -> Iterator:
    """Map in input order, fanning out to a process pool when it pays off."""
    if workers <= 1 or len(jobs) < 64:
        yield from map(func, jobs)
        return
    chunk = max(1, len(jobs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(func, jobs, chunksize=chunk)


def generate_lines(seeds: Sequence[SeedDocument], variants_per_seed: int = 1,
                   difficulty_mix: Sequence[float] = DEFAULT_MIX,
                   train_fraction: float = DEFAULT_TRAIN_FRACTION,
                   workers: int | None = None) -> tuple[list[str], int]:
    """Serialized entries in (seed, variant) order, plus the number of skipped pairs."""
    if variants_per_seed < 1:
        raise ContractViolation(f"variants_per_seed must be at least 1, got {variants_per_seed}")
    if not 0.0 < train_fraction < 1.0:
        raise ContractViolation(f"train_fraction must be in (0, 1), got {train_fraction}")
    mix = tuple(float(w) for w in difficulty_mix)
    pick_difficulty(0, 0, mix)  # validates the mix up front
    jobs = [_Job(seed, v, mix, train_fraction) for seed in seeds for v in range(variants_per_seed)]
    lines: list[str] = []
    skipped = 0
    for line in _map_ordered(_run_job, jobs, worker_count() if workers is None else workers):
        if line is None:
            skipped += 1
        else:
            lines.append(line)
    return lines, skipped


def summarize(entries: Iterable[DatasetEntry]) -> dict:
    entries = list(entries)
    return {
        "entries": len(entries),
        "by_split": dict(sorted(Counter(e.split for e in entries).items())),
        "by_difficulty": {str(k): v for k, v in sorted(Counter(e.difficulty for e in entries).items())},
        "by_category": dict(sorted(Counter(e.category for e in entries).items())),
    }


def generate(input_stream: IO[str], output_stream: IO[str], variants_per_seed: int = 1,
             difficulty_mix: Sequence[float] = DEFAULT_MIX,
             train_fraction: float = DEFAULT_TRAIN_FRACTION,
             workers: int | None = None) -> dict:
    """Generate a dataset from a JSONL seed stream; returns the emission summary."""
    result = ingest(input_stream)
    lines, skipped = generate_lines(result.documents, variants_per_seed, difficulty_mix,
                                    train_fraction, workers)
    for line in lines:
        output_stream.write(line + "\n")
    summary = summarize(DatasetEntry.from_dict(json.loads(line)) for line in lines)
    summary["discarded_records"] = result.discarded
    summary["skipped_empty"] = skipped
    return summary


def read_entries(stream: IO[str]) -> list[DatasetEntry]:
    return [DatasetEntry.from_dict(json.loads(line)) for line in stream if line.strip()]


# ---------------------------------------------------------------- validate


def _output_text(record: dict) -> str | None:
    for key in ("output", "target_markdown"):
        if isinstance(record.get(key), str):
            return record[key]
    return None


def _key(record: dict) -> tuple[int, int] | None:
    seed, variant = record.get("seed_index"), record.get("variant_index", 0)
    if isinstance(seed, int) and isinstance(variant, int):
        return seed, variant
    return None


def validate_records(records: Iterable[str], spec_index: dict[tuple[int, int], StructuralSpec] | None = None,
                     threshold: float = 1.0) -> tuple[list[dict], bool]:
    """One report per record; the flag is True iff every record met the threshold."""
    reports: list[dict] = []
    ok = True
    for n, line in enumerate(records):
        if not line.strip():
            continue
        report: dict = {"record": n}
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record is not a JSON object")
            text = _output_text(record)
            if text is None:
                raise ValueError("record has no output text")
            key = _key(record)
            if key is not None:
                report["seed_index"], report["variant_index"] = key
            if isinstance(record.get("spec"), dict):
                spec = StructuralSpec.from_dict(record["spec"])
            elif spec_index is not None and key in spec_index:
                spec = spec_index[key]
            else:
                raise ValueError("no spec: neither inline nor resolvable by (seed_index, variant_index)")
        except (ValueError, TypeError, KeyError) as exc:
            report["error"] = str(exc)
            reports.append(report)
            ok = False
            continue
        result = validate_markdown(text, spec)
        report.update(result.to_dict())
        ok = ok and result.structure_score >= threshold
        reports.append(report)
    return reports, ok


def spec_index_from(stream: IO[str]) -> dict[tuple[int, int], StructuralSpec]:
    """Specs keyed by (seed_index, variant_index), from dataset entries or bare spec records."""
    index: dict[tuple[int, int], StructuralSpec] = {}
    for line in stream:
        if not line.strip():
            continue
        record = json.loads(line)
        spec = StructuralSpec.from_dict(record["spec"] if "spec" in record else record)
        index[(spec.seed_index, spec.variant_index)] = spec
    return index


# ---------------------------------------------------------------- score


def _score_one(args: tuple[str, DatasetEntry]) -> dict:
    text, entry = args
    report = validate_markdown(text, entry.spec)
    units = segment(clean(entry.seed_text))
    preserved = content_preservation(text, units)
    return {
        "seed_index": entry.seed_index,
        "variant_index": entry.variant_index,
        "report": report.to_dict(),
        "content_preservation": preserved,
        "composite": composite(preserved, report.structure_score).to_dict(),
    }


def score_candidates(candidates: Iterable[str], entries: Sequence[DatasetEntry],
                     workers: int | None = None) -> list[dict]:
    """Per-candidate reports in input order, followed by one summary record."""
    by_key = {(e.seed_index, e.variant_index): e for e in entries}
    slots: list[dict | None] = []
    jobs: list[tuple[str, DatasetEntry]] = []
    for n, line in enumerate(candidates):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            key = _key(record) if isinstance(record, dict) else None
            text = _output_text(record) if isinstance(record, dict) else None
            if key is None or text is None:
                raise ValueError("candidate needs seed_index, variant_index and output")
            if key not in by_key:
                raise ValueError(f"no dataset entry for seed {key[0]} variant {key[1]}")
        except ValueError as exc:
            slots.append({"record": n, "error": str(exc)})
            continue
        slots.append(None)
        jobs.append((text, by_key[key]))

    scored = iter(_map_ordered(_score_one, jobs, worker_count() if workers is None else workers))
    out = [slot if slot is not None else next(scored) for slot in slots]
    good = [r for r in out if "error" not in r]
    mean = (lambda xs: sum(xs) / len(xs) if xs else 0.0)
    out.append({
        "summary": {
            "candidates": len(good),
            "errors": len(out) - len(good),
            "mean_structure_score": mean([r["report"]["structure_score"] for r in good]),
            "mean_content_preservation": mean([r["content_preservation"] for r in good]),
        }
    })
    return out


# ---------------------------------------------------------------- stats


def corpus_stats(entries: Sequence[DatasetEntry]) -> dict:
    histograms = {}
    for name in HISTOGRAM_FIELDS:
        counts = Counter(getattr(e.spec, name) for e in entries)
        histograms[name] = {str(k): v for k, v in sorted(counts.items())}
    out = summarize(entries)
    out["histograms"] = histograms
    return out


def is_unimodal(histogram: dict[str, int]) -> bool:
    """True if counts over the contiguous value range rise then fall (plateaus allowed)."""
    if not histogram:
        return True
    values = sorted(int(k) for k in histogram)
    heights = [histogram.get(str(v), 0) for v in range(values[0], values[-1] + 1)]
    k = 0
    while k + 1 < len(heights) and heights[k + 1] >= heights[k]:
        k += 1
    while k + 1 < len(heights) and heights[k + 1] <= heights[k]:
        k += 1
    return k == len(heights) - 1


def relative_range(values: Sequence[int]) -> float:
    mean = sum(values) / len(values)
    return (max(values) - min(values)) / mean


def format_stats(stats: dict) -> str:
    lines = [f"entries: {stats['entries']}"]
    for label in ("by_split", "by_difficulty", "by_category"):
        parts = ", ".join(f"{k}={v}" for k, v in stats[label].items())
        lines.append(f"{label.replace('_', ' ')}: {parts or '-'}")
    for name, hist in stats["histograms"].items():
        lines.append("")
        lines.append(name)
        peak = max(hist.values(), default=0)
        for value, count in hist.items():
            bar = "#" * (round(40 * count / peak) if peak else 0)
            lines.append(f"  {value:>3} {count:>6} {bar}")
    return "\n".join(lines) + "\n"


__all__ = [
    "DEFAULT_TRAIN_FRACTION", "DatasetEntry", "HISTOGRAM_FIELDS", "VALIDATOR_VERSION",
    "build_entry", "corpus_stats", "format_stats", "generate", "generate_lines", "is_unimodal",
    "read_entries", "relative_range", "score_candidates", "spec_index_from", "summarize",
    "validate_records", "worker_count",
]
