"""Segment-wise semantics-aware evaluation of ASR transcripts.

Public surface: the scoring pipeline (``semascore``, ``greedy_match_baseline``),
classical error rates (``wer``, ``cer``, ``mer``), the alignment primitives,
embedding backends, and corpus-level evaluation/benchmark helpers.
"""

from .alignment import (
    CharAlignment,
    EditOp,
    EditOpKind,
    SegmentMapping,
    SegmentPair,
    char_align,
    map_segments,
)
from .corpus import (
    BenchmarkReport,
    CorpusEvaluationError,
    CorpusFormatError,
    CorpusRecord,
    CorpusReport,
    benchmark,
    correlations,
    evaluate_corpus,
    load_corpus,
)
from .embedding import (
    ALPHA_FLOOR,
    CallCounter,
    EmbedderConfig,
    EmbeddingTransportError,
    MockEmbedder,
    SegmentEmbedding,
    ServiceEmbedder,
    TokenEmbeddings,
    ZeroVectorError,
    cosine,
    make_embedder,
    pool_segment,
    sentence_embedding,
)
from .error_metrics import EditCounts, cer, edit_counts, mer, wer
from .scoring import (
    BaselineResult,
    ScoreReport,
    SegmentScoreRecord,
    greedy_match_baseline,
    importance_weight,
    segment_score,
    semascore,
)
from .text_norm import NormalizedText, WordSpan, normalize, tokenize_words

__version__ = "0.1.0"

__all__ = [
    "ALPHA_FLOOR",
    "BaselineResult",
    "BenchmarkReport",
    "CallCounter",
    "CharAlignment",
    "CorpusEvaluationError",
    "CorpusFormatError",
    "CorpusRecord",
    "CorpusReport",
    "EditCounts",
    "EditOp",
    "EditOpKind",
    "EmbedderConfig",
    "EmbeddingTransportError",
    "MockEmbedder",
    "NormalizedText",
    "ScoreReport",
    "SegmentEmbedding",
    "SegmentMapping",
    "SegmentPair",
    "SegmentScoreRecord",
    "ServiceEmbedder",
    "TokenEmbeddings",
    "WordSpan",
    "ZeroVectorError",
    "benchmark",
    "cer",
    "char_align",
    "correlations",
    "cosine",
    "edit_counts",
    "evaluate_corpus",
    "greedy_match_baseline",
    "importance_weight",
    "load_corpus",
    "make_embedder",
    "map_segments",
    "mer",
    "normalize",
    "pool_segment",
    "segment_score",
    "semascore",
    "sentence_embedding",
    "tokenize_words",
    "wer",
]
