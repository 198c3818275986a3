"""Segment-wise semantic scoring pipeline and the greedy matching baseline.

Pipeline per sentence pair: normalize both sides, character-align, derive
the segment mapping, embed each sentence once, then per segment compute the
clamped cosine similarity of the pooled segment embeddings, penalize it by
(1 - segment character MER), weight it by the segment's importance (cosine
of the ground-truth segment embedding against the whole ground-truth
embedding, floored at epsilon), and return the weighted mean.

Exactly two cosine invocations are charged per segment (similarity and
importance); a one-sided segment still consumes its similarity slot so the
2-per-segment budget stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import error_metrics
from .alignment import char_align, char_codes, map_segments
from .embedding import (
    ALPHA_FLOOR,
    CallCounter,
    EmbedderConfig,
    SegmentEmbedding,
    ZeroVectorError,
    cosine,
    make_embedder,
    pool_segment,
    sentence_embedding,
)
from .text_norm import normalize, tokenize_words


@dataclass(frozen=True)
class SegmentScoreRecord:
    """Per-segment scoring detail: similarity, penalty, weight."""

    segment_index: int
    gt_text: str
    h_text: str
    ss: float
    mer: float
    seg_score: float
    alpha: float

    def to_dict(self) -> dict:
        return {
            "segment_index": self.segment_index,
            "gt_text": self.gt_text,
            "h_text": self.h_text,
            "ss": self.ss,
            "mer": self.mer,
            "seg_score": self.seg_score,
            "alpha": self.alpha,
        }


@dataclass(frozen=True)
class ScoreReport:
    """Final score plus companion metrics and per-segment breakdown.

    ``wer``/``cer`` are None when the normalized reference is empty (the
    classical rates are undefined there; the condition is flagged).
    """

    semascore: float
    segments: tuple[SegmentScoreRecord, ...]
    alpha_sum: float
    wer: float | None
    cer: float | None
    sentence_mer: float
    cosine_calls: int
    degenerate_flags: tuple[str, ...]
    gt_normalized: str = ""
    h_normalized: str = ""

    def to_dict(self) -> dict:
        return {
            "semascore": self.semascore,
            "wer": self.wer,
            "cer": self.cer,
            "sentence_mer": self.sentence_mer,
            "alpha_sum": self.alpha_sum,
            "cosine_calls": self.cosine_calls,
            "gt_normalized": self.gt_normalized,
            "h_normalized": self.h_normalized,
            "degenerate_flags": list(self.degenerate_flags),
            "segments": [s.to_dict() for s in self.segments],
        }


@dataclass(frozen=True)
class BaselineResult:
    """Greedy embedding-matching score and its cosine-call cost."""

    score: float
    cosine_calls: int


def segment_score(ss: float, m: float) -> float:
    """Similarity penalized by the match error rate: ss * (1 - m)."""
    if not 0.0 <= ss <= 1.0:
        raise ValueError(f"similarity {ss} outside [0, 1]")
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"MER {m} outside [0, 1]")
    return ss * (1.0 - m)


def importance_weight(
    seg: SegmentEmbedding,
    sent: SegmentEmbedding,
    counter: CallCounter | None = None,
) -> float:
    """Segment importance: cosine against the sentence embedding, in [eps, 1]."""
    try:
        value = cosine(seg.vector, sent.vector, counter)
    except ZeroVectorError:
        return ALPHA_FLOOR
    return min(max(value, ALPHA_FLOOR), 1.0)


def _clamped_similarity(
    seg_gt: SegmentEmbedding,
    seg_h: SegmentEmbedding,
    counter: CallCounter,
    flags: list[str],
    label: str,
) -> float:
    try:
        value = cosine(seg_gt.vector, seg_h.vector, counter)
    except ZeroVectorError:
        flags.append(f"zero embedding vector in segment {label}; similarity set to 0")
        return 0.0
    return min(max(value, 0.0), 1.0)


def semascore(
    gt: str,
    h: str,
    cfg: EmbedderConfig | None = None,
    *,
    embedder=None,
    lowercase: bool = True,
    strip_punctuation: bool = True,
) -> ScoreReport:
    """Score a hypothesis transcript against its ground truth.

    Accepts raw strings; normalization is applied internally. An existing
    ``embedder`` may be passed to share its per-run memoization across many
    calls (the corpus evaluator does this); otherwise one is built from
    ``cfg``.
    """
    if embedder is None:
        embedder = make_embedder(cfg or EmbedderConfig())

    gt_norm = normalize(gt, lowercase=lowercase, strip_punctuation=strip_punctuation)
    h_norm = normalize(h, lowercase=lowercase, strip_punctuation=strip_punctuation)
    flags: list[str] = []

    gt_words = tokenize_words(gt_norm)
    h_words = tokenize_words(h_norm)

    if gt_norm.text:
        word_wer = error_metrics.wer([w.word for w in gt_words], [w.word for w in h_words])
        char_cer = error_metrics.cer(gt_norm.text, h_norm.text)
    else:
        word_wer = None
        char_cer = None
        flags.append("empty ground truth after normalization: wer/cer undefined")
    sent_mer = error_metrics.mer(gt_norm.text, h_norm.text)

    if not gt_norm.text and not h_norm.text:
        flags.append("both inputs empty after normalization: score defined as 1")
        return ScoreReport(
            semascore=1.0, segments=(), alpha_sum=0.0, wer=word_wer, cer=char_cer,
            sentence_mer=sent_mer, cosine_calls=0, degenerate_flags=tuple(flags),
            gt_normalized=gt_norm.text, h_normalized=h_norm.text,
        )
    if not gt_norm.text or not h_norm.text:
        side = "ground truth" if not gt_norm.text else "hypothesis"
        flags.append(f"empty {side} after normalization: score defined as 0")
        return ScoreReport(
            semascore=0.0, segments=(), alpha_sum=0.0, wer=word_wer, cer=char_cer,
            sentence_mer=sent_mer, cosine_calls=0, degenerate_flags=tuple(flags),
            gt_normalized=gt_norm.text, h_normalized=h_norm.text,
        )

    alignment = char_align(gt_norm.text, h_norm.text)
    mapping = map_segments(gt_words, h_words, alignment)
    flags.extend(mapping.notes)

    # segment texts are substrings of the sentences, so per-segment MER can
    # run on slices of one encoding pass
    gt_codes = char_codes(gt_norm.text)
    h_codes = char_codes(h_norm.text)

    counter = CallCounter()
    gt_tokens = embedder.embed_tokens(gt_norm.text)
    h_tokens = embedder.embed_tokens(h_norm.text)
    gt_sentence = sentence_embedding(gt_tokens)

    records: list[SegmentScoreRecord] = []
    score_sum = 0.0
    alpha_sum = 0.0
    for i, seg in enumerate(mapping.segments):
        if seg.gt_words:
            g0, g1 = seg.gt_words[0].start, seg.gt_words[-1].end
            seg_pool = pool_segment(gt_tokens, (g0, g1))
        else:
            g0 = g1 = 0
            seg_pool = pool_segment(h_tokens, _span(seg.h_words))
        if seg.gt_words and seg.h_words:
            h0, h1 = seg.h_words[0].start, seg.h_words[-1].end
            ss = _clamped_similarity(
                seg_pool, pool_segment(h_tokens, (h0, h1)), counter, flags,
                f"{i} ({seg.gt_text!r} vs {seg.h_text!r})",
            )
            seg_mer = error_metrics.mer_codes(gt_codes[g0:g1], h_codes[h0:h1])
        else:
            # One-sided segment: similarity is 0 by definition, but its
            # cosine slot is still charged so every segment costs exactly
            # two calls.
            counter.add()
            flags.append(
                f"one-sided segment {i} ({(seg.gt_text or seg.h_text)!r}): similarity 0"
            )
            ss = 0.0
            h_span = _span(seg.h_words) if seg.h_words else (0, 0)
            seg_mer = error_metrics.mer_codes(
                gt_codes[g0:g1], h_codes[h_span[0]:h_span[1]]
            )
        alpha = importance_weight(seg_pool, gt_sentence, counter)
        if alpha == ALPHA_FLOOR and not seg_pool.vector.any():
            flags.append(f"zero segment embedding at segment {i}; importance floored")
        value = segment_score(ss, seg_mer)
        records.append(SegmentScoreRecord(
            segment_index=i, gt_text=seg.gt_text, h_text=seg.h_text,
            ss=ss, mer=seg_mer, seg_score=value, alpha=alpha,
        ))
        score_sum += alpha * value
        alpha_sum += alpha

    final = min(max(score_sum / alpha_sum, 0.0), 1.0)
    return ScoreReport(
        semascore=final, segments=tuple(records), alpha_sum=alpha_sum,
        wer=word_wer, cer=char_cer, sentence_mer=sent_mer,
        cosine_calls=counter.count, degenerate_flags=tuple(flags),
        gt_normalized=gt_norm.text, h_normalized=h_norm.text,
    )


def _span(words) -> tuple[int, int]:
    return words[0].start, words[-1].end


def greedy_match_baseline(
    gt: str,
    h: str,
    cfg: EmbedderConfig | None = None,
    *,
    embedder=None,
    lowercase: bool = True,
    strip_punctuation: bool = True,
) -> BaselineResult:
    """Greedy token-matching score; costs n*m cosine calls by construction.

    All pairwise token cosines are computed, each token greedily takes its
    best match on the other side, and the two directions combine F1-style.
    No idf weighting, no rescaling: this exists for call-count benchmarking
    and correlation comparison, not as a faithful matching metric.
    """
    if embedder is None:
        embedder = make_embedder(cfg or EmbedderConfig())
    gt_norm = normalize(gt, lowercase=lowercase, strip_punctuation=strip_punctuation)
    h_norm = normalize(h, lowercase=lowercase, strip_punctuation=strip_punctuation)
    if not gt_norm.text and not h_norm.text:
        return BaselineResult(score=1.0, cosine_calls=0)
    if not gt_norm.text or not h_norm.text:
        return BaselineResult(score=0.0, cosine_calls=0)

    counter = CallCounter()
    gt_vecs = embedder.embed_tokens(gt_norm.text).vectors
    h_vecs = embedder.embed_tokens(h_norm.text).vectors
    n, m = len(gt_vecs), len(h_vecs)
    best_gt = [0.0] * n
    best_h = [0.0] * m
    for i in range(n):
        u = gt_vecs[i]
        for j in range(m):
            try:
                sim = cosine(u, h_vecs[j], counter)
            except ZeroVectorError:
                sim = 0.0
            sim = min(max(sim, 0.0), 1.0)
            if sim > best_gt[i]:
                best_gt[i] = sim
            if sim > best_h[j]:
                best_h[j] = sim
    recall = sum(best_gt) / n
    precision = sum(best_h) / m
    if precision + recall == 0.0:
        return BaselineResult(score=0.0, cosine_calls=counter.count)
    return BaselineResult(
        score=2.0 * precision * recall / (precision + recall),
        cosine_calls=counter.count,
    )
