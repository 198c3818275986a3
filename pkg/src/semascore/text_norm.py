"""Transcript normalization and word tokenization.

Every other module consumes the single textual form produced here:
lowercased (optional), punctuation-stripped (optional), whitespace
collapsed to single spaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Stripped by default. Hyphens and apostrophes are deliberately absent so
# "well-being" and "don't" survive normalization.
DEFAULT_PUNCTUATION = '.,!?;:"'

_WHITESPACE_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class NormalizedText:
    """A canonical transcript: no leading/trailing/double whitespace."""

    text: str
    source: str


@dataclass(frozen=True)
class WordSpan:
    """One word and its character span (end exclusive) in the normalized text."""

    word: str
    start: int
    end: int


def normalize(
    raw: str,
    *,
    lowercase: bool = True,
    strip_punctuation: bool = True,
    punctuation: str = DEFAULT_PUNCTUATION,
) -> NormalizedText:
    """Canonicalize a raw transcript.

    Lowercases, removes the configured punctuation characters, collapses
    whitespace runs to single spaces and trims the ends. Empty output is
    legal (e.g. for punctuation-only input).
    """
    text = raw.lower() if lowercase else raw
    if strip_punctuation and punctuation:
        text = text.translate(str.maketrans("", "", punctuation))
    text = _WHITESPACE_RE.sub(" ", text).strip()
    return NormalizedText(text=text, source=raw)


def tokenize_words(t: NormalizedText) -> list[WordSpan]:
    """Split normalized text into words with character offsets."""
    spans: list[WordSpan] = []
    if not t.text:
        return spans
    pos = 0
    for word in t.text.split(" "):
        spans.append(WordSpan(word=word, start=pos, end=pos + len(word)))
        pos += len(word) + 1
    return spans
