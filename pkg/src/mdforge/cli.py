"""Command-line entry point: generate, validate, score, stats and seeds."""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import ExitStack

from . import dataset
from .errors import MdforgeError, SelfValidationError
from .seedgen import write_seeds

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _mix(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated weights, got {text!r}") from None
    if len(parts) != 3 or any(p < 0 for p in parts) or sum(parts) <= 0:
        raise argparse.ArgumentTypeError(f"expected three non-negative weights, got {text!r}")
    return parts


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must be strictly between 0 and 1, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdforge", description="Synthetic Markdown-formatting dataset tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="build a dataset from JSONL seed documents")
    gen.add_argument("--input", required=True, help="JSONL seeds with a 'text' field")
    gen.add_argument("--out", required=True, help="dataset JSONL to write")
    gen.add_argument("--variants", type=_positive, default=1, help="variants per seed (default 1)")
    gen.add_argument("--difficulty-mix", type=_mix, default=dataset.DEFAULT_MIX,
                     help="weights for levels 1,2,3 (default 1,1,1)")
    gen.add_argument("--train-fraction", type=_fraction, default=dataset.DEFAULT_TRAIN_FRACTION,
                     help="expected share of train entries (default 8/11)")

    val = sub.add_parser("validate", help="validate outputs against specs")
    val.add_argument("--in", dest="input", required=True, help="JSONL records with output text")
    val.add_argument("--spec", help="dataset or spec JSONL to resolve specs by (seed_index, variant_index)")
    val.add_argument("--threshold", type=float, default=1.0, help="minimum structure score (default 1.0)")

    sco = sub.add_parser("score", help="score candidate outputs against a dataset")
    sco.add_argument("--candidates", required=True, help="JSONL with seed_index, variant_index, output")
    sco.add_argument("--dataset", required=True)

    sta = sub.add_parser("stats", help="report corpus distributions")
    sta.add_argument("--dataset", required=True)
    sta.add_argument("--json", action="store_true", help="machine-readable output")

    see = sub.add_parser("seeds", help="write a procedural seed corpus")
    see.add_argument("--count", type=int, default=1100)
    see.add_argument("--out", required=True)
    return parser


def _open(path: str, mode: str):
    return open(path, mode, encoding="utf-8", newline="\n")


def _emit(records) -> None:
    for record in records:
        sys.stdout.write(json.dumps(record, ensure_ascii=False) + "\n")


def _generate(args) -> int:
    with _open(args.input, "r") as src, _open(args.out, "w") as dst:
        summary = dataset.generate(src, dst, args.variants, args.difficulty_mix, args.train_fraction)
    _emit([summary])
    return EXIT_OK


def _validate(args) -> int:
    with ExitStack() as stack:
        index = None
        if args.spec:
            index = dataset.spec_index_from(stack.enter_context(_open(args.spec, "r")))
        records = stack.enter_context(_open(args.input, "r"))
        reports, ok = dataset.validate_records(records, index, args.threshold)
    _emit(reports)
    return EXIT_OK if ok else EXIT_FAIL


def _score(args) -> int:
    with _open(args.dataset, "r") as src:
        entries = dataset.read_entries(src)
    with _open(args.candidates, "r") as src:
        results = dataset.score_candidates(src, entries)
    _emit(results)
    return EXIT_FAIL if results[-1]["summary"]["errors"] else EXIT_OK


def _stats(args) -> int:
    with _open(args.dataset, "r") as src:
        stats = dataset.corpus_stats(dataset.read_entries(src))
    if args.json:
        _emit([stats])
    else:
        sys.stdout.write(dataset.format_stats(stats))
    return EXIT_OK


def _seeds(args) -> int:
    with _open(args.out, "w") as dst:
        write_seeds(args.count, dst)
    return EXIT_OK


_COMMANDS = {"generate": _generate, "validate": _validate, "score": _score,
             "stats": _stats, "seeds": _seeds}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SelfValidationError as exc:
        print(f"mdforge: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError, KeyError, MdforgeError) as exc:
        print(f"mdforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
