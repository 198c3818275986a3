"""Command-line interface: single-pair scoring, corpus evaluation, benchmarking.

Exit codes: 0 success, 1 usage error, 2 data error, 3 backend/transport
error. Stdout carries exactly one JSON document on success; all diagnostics
go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .corpus import (
    CorpusEvaluationError,
    CorpusFormatError,
    benchmark,
    evaluate_corpus,
    load_corpus,
)
from .embedding import EmbedderConfig, EmbeddingTransportError
from .scoring import greedy_match_baseline, semascore

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3

SERVICE_URL_ENV = "SEMASCORE_SERVICE_URL"


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; we reserve 2 for data."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("mock", "service"), default="mock",
                        help="embedding backend (default: mock, fully offline)")
    common.add_argument("--service-url", default=None,
                        help=f"embedding service base URL (or ${SERVICE_URL_ENV})")
    common.add_argument("--model-id", default="roberta-base",
                        help="model identifier sent to the embedding service")
    common.add_argument("--seed", type=int, default=0, help="mock backend seed")
    common.add_argument("--keep-case", action="store_true",
                        help="skip lowercasing during normalization")
    common.add_argument("--keep-punct", action="store_true",
                        help="skip punctuation stripping during normalization")
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    parser = _Parser(prog="semascore",
                     description="Segment-wise semantics-aware ASR evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", parents=[common], help="score one transcript pair")
    p_score.add_argument("--gt", required=True, help="ground-truth transcript")
    p_score.add_argument("--h", required=True, help="hypothesis transcript")

    p_eval = sub.add_parser("eval", parents=[common], help="evaluate a corpus file")
    p_eval.add_argument("--input", required=True, help="corpus path (.jsonl or .tsv)")
    p_eval.add_argument("--format", choices=("jsonl", "tsv"), default=None,
                        help="corpus format (default: from file suffix)")
    p_eval.add_argument("--workers", type=int, default=1, help="parallel scoring workers")
    p_eval.add_argument("--csv", default=None, help="also write flattened per-record rows here")

    p_bench = sub.add_parser("bench", parents=[common],
                             help="time the metric against the greedy baseline")
    p_bench.add_argument("--input", required=True, help="corpus path (.jsonl or .tsv)")
    p_bench.add_argument("--format", choices=("jsonl", "tsv"), default=None)

    return parser


def _embedder_config(args, parser: argparse.ArgumentParser) -> EmbedderConfig:
    url = args.service_url or os.environ.get(SERVICE_URL_ENV)
    if args.backend == "service" and not url:
        parser.error(f"--backend service requires --service-url or ${SERVICE_URL_ENV}")
    return EmbedderConfig(
        backend=args.backend,
        service_url=url if args.backend == "service" else None,
        model_id=args.model_id,
        seed=args.seed,
    )


def _emit(document: dict, out: str | None) -> None:
    payload = json.dumps(document, indent=2, allow_nan=False) + "\n"
    if out:
        Path(out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _embedder_config(args, parser)
    norm_opts = {
        "lowercase": not args.keep_case,
        "strip_punctuation": not args.keep_punct,
    }

    try:
        if args.command == "score":
            report = semascore(args.gt, args.h, cfg, **norm_opts)
            base = greedy_match_baseline(args.gt, args.h, cfg, **norm_opts)
            document = report.to_dict()
            document["baseline"] = {
                "score": base.score,
                "cosine_calls": base.cosine_calls,
            }
            _emit(document, args.out)
        elif args.command == "eval":
            records = load_corpus(args.input, args.format)
            report = evaluate_corpus(records, cfg, workers=args.workers, **norm_opts)
            if args.csv:
                _write_csv(report, args.csv)
            _emit(report.to_dict(), args.out)
        else:  # bench
            records = load_corpus(args.input, args.format)
            report = benchmark(records, cfg, **norm_opts)
            _emit(report.to_dict(), args.out)
    except EmbeddingTransportError as exc:
        return _backend_error(exc)
    except CorpusEvaluationError as exc:
        if isinstance(exc.__cause__, EmbeddingTransportError):
            return _backend_error(exc.__cause__)
        sys.stderr.write(f"semascore: data error: {exc}\n")
        return EXIT_DATA
    except (FileNotFoundError, CorpusFormatError, ValueError) as exc:
        sys.stderr.write(f"semascore: data error: {exc}\n")
        return EXIT_DATA
    return EXIT_OK


def _backend_error(exc: EmbeddingTransportError) -> int:
    sys.stderr.write(
        f"semascore: backend error after {exc.attempts} attempt(s) to {exc.url}: {exc}\n"
    )
    return EXIT_BACKEND


def _write_csv(report, path: str) -> None:
    rows = [r.to_row() for r in report.records]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
