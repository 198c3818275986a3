"""Corpus loading, batch evaluation, correlation statistics and benchmarking.

Input corpora are JSONL (one object per line, keys id/gt/h/group) or TSV
(3-4 columns in that order, no header). Evaluation scores every record with
the segment metric, WER and the greedy baseline, aggregates per group, and
reports pairwise metric correlations plus wall-time/cosine-call totals.

The benchmark mode isolates metric cost from embedding cost by warming the
embedder's per-run memo before the timed pass, so the timed metric path
reads embeddings from memory for both backends; embedding time is reported
separately. Benchmarking always runs single-worker.
"""

from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import EmbedderConfig, make_embedder
from .scoring import BaselineResult, ScoreReport, greedy_match_baseline, semascore
from .text_norm import normalize

_METRICS = ("semascore", "wer", "cer", "sentence_mer", "baseline")


class CorpusFormatError(ValueError):
    """Corpus file is malformed; the message names the file and line."""


class CorpusEvaluationError(RuntimeError):
    """A record failed to score; the message names the record id."""


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    gt: str
    h: str
    group: str | None = None


@dataclass(frozen=True)
class RecordResult:
    """One scored record with timings."""

    id: str
    group: str | None
    report: ScoreReport
    baseline: BaselineResult
    semascore_time_s: float
    baseline_time_s: float

    def metric(self, name: str) -> float | None:
        if name == "semascore":
            return self.report.semascore
        if name == "wer":
            return self.report.wer
        if name == "cer":
            return self.report.cer
        if name == "sentence_mer":
            return self.report.sentence_mer
        if name == "baseline":
            return self.baseline.score
        raise KeyError(name)

    def to_row(self) -> dict:
        return {
            "id": self.id,
            "group": self.group,
            "semascore": self.report.semascore,
            "wer": self.report.wer,
            "cer": self.report.cer,
            "sentence_mer": self.report.sentence_mer,
            "baseline": self.baseline.score,
            "semascore_cosine_calls": self.report.cosine_calls,
            "baseline_cosine_calls": self.baseline.cosine_calls,
            "semascore_time_s": self.semascore_time_s,
            "baseline_time_s": self.baseline_time_s,
        }


@dataclass(frozen=True)
class CorpusReport:
    records: tuple[RecordResult, ...]
    groups: dict
    correlation_table: dict
    timing: dict

    def to_dict(self) -> dict:
        return {
            "records": [
                {**r.to_row(), "report": r.report.to_dict()} for r in self.records
            ],
            "groups": self.groups,
            "correlations": self.correlation_table,
            "timing": self.timing,
        }


@dataclass(frozen=True)
class BenchmarkReport:
    record_count: int
    metrics: dict
    embedding: dict
    call_ratios: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "metrics": self.metrics,
            "embedding": self.embedding,
            "call_ratios": list(self.call_ratios),
        }


def load_corpus(path: str | Path, format: str | None = None) -> list[CorpusRecord]:
    """Read a corpus file; format inferred from the suffix when not given."""
    path = Path(path)
    if format is None:
        format = "tsv" if path.suffix.lower() == ".tsv" else "jsonl"
    if format not in ("jsonl", "tsv"):
        raise CorpusFormatError(f"unknown corpus format {format!r}")
    text = path.read_text(encoding="utf-8")

    records: list[CorpusRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if format == "jsonl":
            record = _parse_jsonl_line(line, path, lineno)
        else:
            record = _parse_tsv_line(line, path, lineno)
        if record.id in seen:
            raise CorpusFormatError(f"{path}:{lineno}: duplicate record id {record.id!r}")
        seen.add(record.id)
        records.append(record)
    return records


def _parse_jsonl_line(line: str, path: Path, lineno: int) -> CorpusRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{path}:{lineno}: expected a JSON object")
    missing = [k for k in ("id", "gt", "h") if k not in obj]
    if missing:
        raise CorpusFormatError(f"{path}:{lineno}: missing key(s) {', '.join(missing)}")
    group = obj.get("group")
    return CorpusRecord(
        id=str(obj["id"]),
        gt=str(obj["gt"]),
        h=str(obj["h"]),
        group=None if group is None else str(group),
    )


def _parse_tsv_line(line: str, path: Path, lineno: int) -> CorpusRecord:
    cols = line.split("\t")
    if len(cols) not in (3, 4):
        raise CorpusFormatError(
            f"{path}:{lineno}: expected 3 or 4 tab-separated columns, got {len(cols)}"
        )
    group = cols[3] if len(cols) == 4 else None
    return CorpusRecord(id=cols[0], gt=cols[1], h=cols[2], group=group)


def _score_record(record: CorpusRecord, embedder, normalize_opts: dict) -> RecordResult:
    try:
        t0 = time.perf_counter()
        report = semascore(record.gt, record.h, embedder=embedder, **normalize_opts)
        t1 = time.perf_counter()
        base = greedy_match_baseline(record.gt, record.h, embedder=embedder, **normalize_opts)
        t2 = time.perf_counter()
    except Exception as exc:
        raise CorpusEvaluationError(f"record {record.id!r} failed: {exc}") from exc
    return RecordResult(
        id=record.id,
        group=record.group,
        report=report,
        baseline=base,
        semascore_time_s=t1 - t0,
        baseline_time_s=t2 - t1,
    )


def evaluate_corpus(
    records: list[CorpusRecord],
    cfg: EmbedderConfig | None = None,
    *,
    workers: int = 1,
    lowercase: bool = True,
    strip_punctuation: bool = True,
) -> CorpusReport:
    """Score every record and aggregate; one failing record aborts the run."""
    if not records:
        raise ValueError("cannot evaluate an empty corpus")
    embedder = make_embedder(cfg or EmbedderConfig())
    opts = {"lowercase": lowercase, "strip_punctuation": strip_punctuation}

    if workers <= 1:
        results = [_score_record(r, embedder, opts) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _score_record(r, embedder, opts), records))

    return CorpusReport(
        records=tuple(results),
        groups=_group_stats(results),
        correlation_table=_correlation_table(results),
        timing=_timing_table(results),
    )


def _group_stats(results: list[RecordResult]) -> dict:
    by_group: dict[str, list[RecordResult]] = {}
    for r in results:
        if r.group is not None:
            by_group.setdefault(r.group, []).append(r)
    stats: dict = {}
    for group, rows in sorted(by_group.items()):
        if len(rows) < 2:
            continue  # singleton groups carry no distribution
        entry: dict = {"count": len(rows)}
        for metric in _METRICS:
            values = [v for v in (r.metric(metric) for r in rows) if v is not None]
            if values:
                entry[metric] = {
                    "mean": float(np.mean(values)),
                    "std": float(np.std(values)),
                }
            else:
                entry[metric] = {"mean": None, "std": None}
        stats[group] = entry
    return stats


def _correlation_table(results: list[RecordResult]) -> dict:
    table: dict = {}
    for i, mx in enumerate(_METRICS):
        for my in _METRICS[i + 1:]:
            pairs = [
                (r.metric(mx), r.metric(my))
                for r in results
                if r.metric(mx) is not None and r.metric(my) is not None
            ]
            key = f"{mx}_vs_{my}"
            if len(pairs) < 2:
                table[key] = {"pearson": None, "spearman": None, "n": len(pairs)}
                continue
            xs, ys = zip(*pairs)
            pearson, spearman = correlations(list(xs), list(ys))
            table[key] = {"pearson": pearson, "spearman": spearman, "n": len(pairs)}
    return table


def _timing_table(results: list[RecordResult]) -> dict:
    return {
        "semascore": {
            "mean_time_s": float(np.mean([r.semascore_time_s for r in results])),
            "total_cosine_calls": sum(r.report.cosine_calls for r in results),
        },
        "baseline": {
            "mean_time_s": float(np.mean([r.baseline_time_s for r in results])),
            "total_cosine_calls": sum(r.baseline.cosine_calls for r in results),
        },
    }


def _ranks(values: list[float]) -> list[float]:
    """Average ranks (1-based); ties share the mean of their positions."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(xs: list[float], ys: list[float]) -> float | None:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = float(np.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))
    if denom == 0.0:
        return None  # constant series: correlation undefined
    return float(np.dot(dx, dy) / denom)


def correlations(xs: list[float], ys: list[float]) -> tuple[float | None, float | None]:
    """(Pearson, Spearman) with average-rank ties; None marks undefined."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("correlation requires at least 2 points")
    return _pearson(xs, ys), _pearson(_ranks(xs), _ranks(ys))


def benchmark(
    records: list[CorpusRecord],
    cfg: EmbedderConfig | None = None,
    *,
    lowercase: bool = True,
    strip_punctuation: bool = True,
) -> BenchmarkReport:
    """Timed single-worker comparison of the segment metric vs the baseline.

    A warmup pass embeds every text (timed separately as embedding cost) and
    scores one record untimed, so the timed pass measures metric computation
    only, with embeddings served from the per-run memo.
    """
    if len(records) < 10:
        raise ValueError(f"benchmark needs at least 10 records, got {len(records)}")
    embedder = make_embedder(cfg or EmbedderConfig())
    opts = {"lowercase": lowercase, "strip_punctuation": strip_punctuation}

    embed_times: list[float] = []
    for record in records:
        t0 = time.perf_counter()
        for raw in (record.gt, record.h):
            text = normalize(raw, lowercase=lowercase, strip_punctuation=strip_punctuation).text
            if text:
                embedder.embed_tokens(text)
        embed_times.append(time.perf_counter() - t0)
    _score_record(records[0], embedder, opts)  # warm JIT kernels, untimed

    results = [_score_record(r, embedder, opts) for r in records]

    ratios = tuple(
        r.baseline.cosine_calls / r.report.cosine_calls
        for r in results
        if r.report.cosine_calls > 0
    )
    metrics = {
        "semascore": _bench_entry([r.semascore_time_s for r in results],
                                  sum(r.report.cosine_calls for r in results)),
        "baseline": _bench_entry([r.baseline_time_s for r in results],
                                 sum(r.baseline.cosine_calls for r in results)),
    }
    return BenchmarkReport(
        record_count=len(records),
        metrics=metrics,
        embedding={"mean_time_s": statistics.mean(embed_times)},
        call_ratios=ratios,
    )


def _bench_entry(times: list[float], total_calls: int) -> dict:
    return {
        "mean_time_s": statistics.mean(times),
        "median_time_s": statistics.median(times),
        "total_cosine_calls": total_calls,
    }
