"""Classical ASR error rates: WER, CER and the bounded match error rate.

All rates derive from the same minimum-cost unit-cost alignment (fixed
tie-break, see :mod:`semascore.alignment`), at character level for
mer/cer/edit_counts and at word level for wer. MER is bounded in [0, 1],
which is why it (not CER) is the per-segment penalty term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alignment import _op_counts, sequence_counts


@dataclass(frozen=True)
class EditCounts:
    """Hit/substitution/deletion/insertion tallies of one alignment."""

    hits: int
    substitutions: int
    deletions: int
    insertions: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def edit_counts(ref: str, hyp: str) -> EditCounts:
    """Character-level edit counts between two strings."""
    hits, subs, dels, ins = sequence_counts(ref, hyp)
    return EditCounts(hits=hits, substitutions=subs, deletions=dels, insertions=ins)


def mer(ref: str, hyp: str) -> float:
    """Match error rate (S+D+I)/(H+S+D+I) over characters; in [0, 1].

    Two empty strings agree vacuously and score 0.
    """
    return _mer_from_counts(*sequence_counts(ref, hyp))


def mer_codes(ref_codes: np.ndarray, hyp_codes: np.ndarray) -> float:
    """MER over pre-encoded codepoint arrays; the scorer's per-segment path.

    Identical by construction to ``mer`` on the corresponding strings
    (segment texts are slices of the sentence, so their code arrays are
    slices of the sentence's code array).
    """
    return _mer_from_counts(*_op_counts(ref_codes, hyp_codes))


def _mer_from_counts(hits: int, subs: int, dels: int, ins: int) -> float:
    errors = subs + dels + ins
    total = hits + errors
    if total == 0:
        return 0.0
    return errors / total


def wer(gt_words: Sequence[str], h_words: Sequence[str]) -> float:
    """Word error rate (S+D+I)/len(reference); may exceed 1."""
    if not gt_words:
        raise ValueError("WER is undefined for an empty reference")
    _, subs, dels, ins = sequence_counts(list(gt_words), list(h_words))
    return (subs + dels + ins) / len(gt_words)


def cer(gt: str, h: str) -> float:
    """Character error rate (S+D+I)/len(reference); may exceed 1."""
    if not gt:
        raise ValueError("CER is undefined for an empty reference")
    _, subs, dels, ins = sequence_counts(gt, h)
    return (subs + dels + ins) / len(gt)
