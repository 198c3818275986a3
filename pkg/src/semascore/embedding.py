"""Embedding backends, span pooling and counted cosine similarity.

Two backends produce per-token vectors with character offsets:

* ``mock`` — deterministic seeded vectors, one token per word. A word's
  base vector is a hash-seeded random unit vector; a token's contextual
  vector mixes 80% of its own word with 20% of the mean of the adjacent
  words' vectors, renormalized. Cheap, reproducible, and context-sensitive
  enough that reordering or corrupting words visibly moves scores.
* ``service`` — JSON-over-HTTP client for the embedding service
  (POST /embed), which serves contextual transformer embeddings with
  tokenizer character offsets.

``cosine`` increments a per-evaluation call counter at entry (degenerate
invocations included) so scoring can assert its cosine-call budget exactly.
"""

from __future__ import annotations

import bisect
import hashlib
import threading
import time
from dataclasses import dataclass, field

import numpy as np
import requests

MOCK_DIM = 768  # matches roberta-base's hidden size
ALPHA_FLOOR = 1e-6


class ZeroVectorError(ValueError):
    """Cosine similarity is undefined for an all-zero vector."""


class EmbeddingTransportError(RuntimeError):
    """Embedding service call failed; carries retry metadata."""

    def __init__(self, message: str, *, url: str, attempts: int):
        super().__init__(message)
        self.url = url
        self.attempts = attempts


@dataclass
class CallCounter:
    """Per-evaluation cosine invocation counter."""

    count: int = 0

    def add(self, n: int = 1) -> None:
        self.count += n


@dataclass(frozen=True)
class TokenEmbeddings:
    """Per-token vectors (tokens x dim) with character spans into the text."""

    vectors: np.ndarray
    offsets: tuple[tuple[int, int], ...]
    dim: int
    # derived, for O(log n) span lookup (offsets are ordered and disjoint)
    starts: tuple[int, ...] = field(init=False, repr=False)
    ends: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(s for s, _ in self.offsets))
        object.__setattr__(self, "ends", tuple(e for _, e in self.offsets))


@dataclass(frozen=True)
class SegmentEmbedding:
    vector: np.ndarray
    token_count: int


@dataclass(frozen=True)
class EmbedderConfig:
    """Backend selection; the service backend needs a URL."""

    backend: str = "mock"
    service_url: str | None = None
    model_id: str = "roberta-base"
    seed: int = 0

    def __post_init__(self):
        if self.backend not in ("mock", "service"):
            raise ValueError(f"unknown embedding backend {self.backend!r}")
        if self.backend == "service" and not self.service_url:
            raise ValueError("service backend requires a service URL")


def cosine(u: np.ndarray, v: np.ndarray, counter: CallCounter | None = None) -> float:
    """Cosine similarity in [-1, 1]; every invocation counts, even failing ones.

    Bit-identical vectors return exactly 1.0 (the float dot/norm route would
    be off by an ulp, and identical inputs must score a perfect 1).
    """
    if counter is not None:
        counter.add()
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    uu = float(np.dot(u, u))
    vv = float(np.dot(v, v))
    if uu == 0.0 or vv == 0.0:
        raise ZeroVectorError("cosine similarity of a zero vector is undefined")
    if u is v or np.array_equal(u, v):
        return 1.0
    return float(np.dot(u, v)) / (uu**0.5 * vv**0.5)


def _mean_rows(vectors: np.ndarray) -> np.ndarray:
    # shared by segment pooling and sentence pooling so a full-span pool is
    # bit-identical to the sentence embedding
    return np.add.reduce(vectors, axis=0) / vectors.shape[0]


def pool_segment(emb: TokenEmbeddings, span: tuple[int, int]) -> SegmentEmbedding:
    """Mean of the token vectors overlapping a character span.

    A span touching no token (e.g. whitespace-only) falls back to the
    single nearest token by character distance.
    """
    if len(emb.offsets) == 0:
        raise ValueError("cannot pool from empty TokenEmbeddings")
    start, end = span
    # tokens overlap iff token.start < end and token.end > start
    lo = bisect.bisect_right(emb.ends, start)
    hi = bisect.bisect_left(emb.starts, end)
    if lo >= hi:
        nearest = min(
            range(len(emb.offsets)),
            key=lambda i: max(emb.offsets[i][0] - end, start - emb.offsets[i][1], 0),
        )
        lo, hi = nearest, nearest + 1
    return SegmentEmbedding(
        vector=_mean_rows(emb.vectors[lo:hi]),
        token_count=hi - lo,
    )


def sentence_embedding(emb: TokenEmbeddings) -> SegmentEmbedding:
    """Mean over all token vectors; equals pooling the full text span."""
    if len(emb.offsets) == 0:
        raise ValueError("cannot pool from empty TokenEmbeddings")
    return SegmentEmbedding(
        vector=_mean_rows(emb.vectors),
        token_count=len(emb.offsets),
    )


class MockEmbedder:
    """Deterministic seeded embedder; one token per space-separated word."""

    backend = "mock"

    def __init__(self, seed: int = 0, dim: int = MOCK_DIM):
        self.seed = seed
        self.dim = dim
        self._word_vectors: dict[str, np.ndarray] = {}
        self._memo: dict[str, TokenEmbeddings] = {}

    def word_vector(self, word: str) -> np.ndarray:
        vec = self._word_vectors.get(word)
        if vec is None:
            digest = hashlib.sha256(f"{self.seed}\x00{word}".encode()).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:16], "little"))
            vec = rng.standard_normal(self.dim)
            vec /= np.linalg.norm(vec)
            vec.flags.writeable = False
            self._word_vectors[word] = vec
        return vec

    def embed_tokens(self, text: str) -> TokenEmbeddings:
        if not text:
            raise ValueError("cannot embed empty text")
        cached = self._memo.get(text)
        if cached is not None:
            return cached
        words = text.split(" ")
        bases = [self.word_vector(w) for w in words]
        vectors = np.empty((len(words), self.dim))
        offsets = []
        pos = 0
        for i, word in enumerate(words):
            neighbors = [bases[j] for j in (i - 1, i + 1) if 0 <= j < len(words)]
            if neighbors:
                vec = 0.8 * bases[i] + 0.2 * np.mean(neighbors, axis=0)
                vec /= np.linalg.norm(vec)
            else:
                vec = bases[i]
            vectors[i] = vec
            offsets.append((pos, pos + len(word)))
            pos += len(word) + 1
        vectors.flags.writeable = False
        emb = TokenEmbeddings(vectors=vectors, offsets=tuple(offsets), dim=self.dim)
        self._memo[text] = emb
        return emb


class ServiceEmbedder:
    """HTTP client for the embedding service; serializes in-flight requests."""

    backend = "service"

    _RETRIES = 3
    _BACKOFF_S = 0.2

    def __init__(self, url: str, model_id: str = "roberta-base", timeout: float = 60.0):
        self.url = url.rstrip("/")
        self.model_id = model_id
        self.timeout = timeout
        self._session = requests.Session()
        self._lock = threading.Lock()
        self._memo: dict[str, TokenEmbeddings] = {}

    def embed_tokens(self, text: str) -> TokenEmbeddings:
        if not text:
            raise ValueError("cannot embed empty text")
        cached = self._memo.get(text)
        if cached is not None:
            return cached
        payload = self._post(text)
        emb = self._parse(payload, text)
        self._memo[text] = emb
        return emb

    def _post(self, text: str) -> dict:
        endpoint = f"{self.url}/embed"
        last_error: Exception | None = None
        for attempt in range(1, self._RETRIES + 1):
            try:
                with self._lock:
                    resp = self._session.post(
                        endpoint,
                        json={"text": text, "model": self.model_id},
                        timeout=self.timeout,
                    )
            except requests.RequestException as exc:
                last_error = exc
                time.sleep(self._BACKOFF_S * attempt)
                continue
            if resp.status_code != 200:
                raise EmbeddingTransportError(
                    f"embedding service returned HTTP {resp.status_code}: {resp.text[:200]}",
                    url=endpoint,
                    attempts=attempt,
                )
            return resp.json()
        raise EmbeddingTransportError(
            f"embedding service unreachable after {self._RETRIES} attempts: {last_error}",
            url=endpoint,
            attempts=self._RETRIES,
        ) from last_error

    def _parse(self, payload: dict, text: str) -> TokenEmbeddings:
        try:
            dim = int(payload["dim"])
            tokens = payload["tokens"]
            vectors = np.array([t["vector"] for t in tokens], dtype=float)
            offsets = tuple((int(t["start"]), int(t["end"])) for t in tokens)
        except (KeyError, TypeError, ValueError) as exc:
            raise EmbeddingTransportError(
                f"malformed embedding service response: {exc}",
                url=self.url,
                attempts=1,
            ) from exc
        if vectors.ndim != 2 or vectors.shape[0] == 0 or vectors.shape[1] != dim:
            raise EmbeddingTransportError(
                f"embedding service returned inconsistent vectors for {text!r}",
                url=self.url,
                attempts=1,
            )
        vectors.flags.writeable = False
        return TokenEmbeddings(vectors=vectors, offsets=offsets, dim=dim)


def make_embedder(cfg: EmbedderConfig):
    if cfg.backend == "mock":
        return MockEmbedder(seed=cfg.seed)
    return ServiceEmbedder(cfg.service_url, model_id=cfg.model_id)
