"""Character-level edit alignment and word segment mapping.

The alignment is a minimum-cost Levenshtein alignment under unit costs with
a fixed backtrace tie-break (Match/Substitute, then Delete, then Insert,
resolved back-to-front). The tie-break is part of the contract: the edit-op
mix, and therefore the match error rate, depends on it.

Segment mapping turns the character alignment into corresponding word
groups: ground-truth word g and hypothesis word h are linked when a match
or substitution connects a non-space character of g to a non-space
character of h, and connected groups of linked words become segments.
Spaces take part in the character alignment (they are what detects word
splits and merges) but never create links, otherwise adjacent words would
fuse into one segment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numba
import numpy as np

from .text_norm import WordSpan

_MATCH, _SUB, _DEL, _INS = 0, 1, 2, 3


class EditOpKind(enum.Enum):
    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE = "delete"
    INSERT = "insert"


class EditOp(NamedTuple):
    kind: EditOpKind
    gt_index: int | None
    h_index: int | None


@dataclass(frozen=True)
class CharAlignment:
    """Ordered edit ops covering every character of both strings once."""

    ops: tuple[EditOp, ...]
    distance: int


@dataclass(frozen=True)
class SegmentPair:
    """Aligned word groups; at most one side is empty."""

    gt_words: tuple[WordSpan, ...]
    h_words: tuple[WordSpan, ...]
    gt_text: str
    h_text: str


@dataclass(frozen=True)
class SegmentMapping:
    """Ordered segments partitioning both word lists.

    ``notes`` carries mapping warnings (e.g. hypothesis insertions before
    any linked word, which attach forward); scoring surfaces them in the
    report flags.
    """

    segments: tuple[SegmentPair, ...]
    notes: tuple[str, ...] = field(default=())


@numba.njit(cache=True)
def _align_ops(a, b):  # pragma: no cover - exercised via char_align
    """DP fill plus back-to-front backtrace; ties: diagonal > delete > insert.

    Returns (distance, kinds, a_idx, b_idx) with ops in front-to-back order;
    index -1 marks an absent side.
    """
    n, m = a.shape[0], b.shape[0]
    M = np.empty((n + 1, m + 1), dtype=np.int32)
    for j in range(m + 1):
        M[0, j] = j
    for i in range(1, n + 1):
        M[i, 0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = M[i - 1, j - 1] + cost
            up = M[i - 1, j] + 1
            if up < best:
                best = up
            left = M[i, j - 1] + 1
            if left < best:
                best = left
            M[i, j] = best

    total = 0
    i, j = n, m
    kinds = np.empty(n + m, dtype=np.int8)
    a_idx = np.empty(n + m, dtype=np.int64)
    b_idx = np.empty(n + m, dtype=np.int64)
    k = n + m  # fill from the back so ops come out in order
    while i > 0 or j > 0:
        k -= 1
        if i > 0 and j > 0:
            cost = 0 if a[i - 1] == b[j - 1] else 1
            if M[i - 1, j - 1] + cost == M[i, j]:
                kinds[k] = _MATCH if cost == 0 else _SUB
                a_idx[k] = i - 1
                b_idx[k] = j - 1
                i -= 1
                j -= 1
                total += 1
                continue
        if i > 0 and M[i - 1, j] + 1 == M[i, j]:
            kinds[k] = _DEL
            a_idx[k] = i - 1
            b_idx[k] = -1
            i -= 1
            total += 1
            continue
        kinds[k] = _INS
        a_idx[k] = -1
        b_idx[k] = j - 1
        j -= 1
        total += 1
    return M[n, m], kinds[n + m - total:], a_idx[n + m - total:], b_idx[n + m - total:]


@numba.njit(cache=True)
def _op_counts(a, b):  # pragma: no cover - exercised via error_metrics
    """Tally (hits, substitutions, deletions, insertions) without op objects."""
    n, m = a.shape[0], b.shape[0]
    M = np.empty((n + 1, m + 1), dtype=np.int32)
    for j in range(m + 1):
        M[0, j] = j
    for i in range(1, n + 1):
        M[i, 0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = M[i - 1, j - 1] + cost
            up = M[i - 1, j] + 1
            if up < best:
                best = up
            left = M[i, j - 1] + 1
            if left < best:
                best = left
            M[i, j] = best

    hits = subs = dels = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if a[i - 1] == b[j - 1] else 1
            if M[i - 1, j - 1] + cost == M[i, j]:
                if cost == 0:
                    hits += 1
                else:
                    subs += 1
                i -= 1
                j -= 1
                continue
        if i > 0 and M[i - 1, j] + 1 == M[i, j]:
            dels += 1
            i -= 1
            continue
        ins += 1
        j -= 1
    return hits, subs, dels, ins


def char_codes(s: str) -> np.ndarray:
    """Codepoint array for a string; slices of it align with text slices."""
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)


def code_counts(a: np.ndarray, b: np.ndarray) -> tuple[int, int, int, int]:
    """(hits, subs, dels, ins) for two pre-encoded code arrays."""
    hits, subs, dels, ins = _op_counts(a, b)
    return int(hits), int(subs), int(dels), int(ins)


def sequence_counts(ref: Sequence, hyp: Sequence) -> tuple[int, int, int, int]:
    """(hits, subs, dels, ins) for two token sequences under the fixed tie-break."""
    if isinstance(ref, str) and isinstance(hyp, str):
        a, b = char_codes(ref), char_codes(hyp)
    else:
        ids: dict = {}
        a = np.array([ids.setdefault(t, len(ids)) for t in ref], dtype=np.int64)
        b = np.array([ids.setdefault(t, len(ids)) for t in hyp], dtype=np.int64)
    return code_counts(a, b)


_KIND_BY_CODE = {
    _MATCH: EditOpKind.MATCH,
    _SUB: EditOpKind.SUBSTITUTE,
    _DEL: EditOpKind.DELETE,
    _INS: EditOpKind.INSERT,
}


def char_align(gt: str, h: str) -> CharAlignment:
    """Minimum-cost character alignment of two normalized strings."""
    dist, kinds, gi, hj = _align_ops(char_codes(gt), char_codes(h))
    by_code = _KIND_BY_CODE
    ops = tuple(
        EditOp(by_code[k], g if g >= 0 else None, j if j >= 0 else None)
        for k, g, j in zip(kinds.tolist(), gi.tolist(), hj.tolist())
    )
    return CharAlignment(ops=ops, distance=int(dist))


def _char_to_word(words: list[WordSpan], text_len: int, side: str) -> list[int | None]:
    owner: list[int | None] = [None] * text_len
    for wi, span in enumerate(words):
        if span.end > text_len:
            raise ValueError(f"{side} word span {span} exceeds aligned text length {text_len}")
        for k in range(span.start, span.end):
            owner[k] = wi
    return owner


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def map_segments(
    gt_words: list[WordSpan],
    h_words: list[WordSpan],
    a: CharAlignment,
) -> SegmentMapping:
    """Derive the segment mapping from a character alignment.

    Linked words form connected components; a component's words are expanded
    to contiguous ranges on both sides (absorbing enclosed unlinked words).
    Remaining ground-truth words become one-word deletion segments; remaining
    hypothesis words attach to the segment holding the nearest preceding
    assigned hypothesis word, or forward when nothing precedes them.
    """
    expect_gt = gt_words[-1].end if gt_words else 0
    expect_h = h_words[-1].end if h_words else 0

    notes: list[str] = []
    G, H = len(gt_words), len(h_words)
    if G == 0 and H == 0:
        if a.ops:
            raise ValueError("word lists inconsistent with alignment: no words, but alignment has ops")
        return SegmentMapping(segments=())
    if G == 0:
        covered = sum(1 for op in a.ops if op.h_index is not None)
        if covered != expect_h or any(op.gt_index is not None for op in a.ops):
            _reject_inconsistent(a, expect_gt, expect_h)
        seg = _make_segment((), tuple(h_words))
        return SegmentMapping(segments=(seg,), notes=("hypothesis-only mapping: ground truth is empty",))

    gt_owner = _char_to_word(gt_words, expect_gt, "gt")
    h_owner = _char_to_word(h_words, expect_h, "hypothesis")

    # Single pass: validate coverage and union words linked by a
    # match/substitution between non-space characters.
    uf = _UnionFind(G + H)
    match, substitute = EditOpKind.MATCH, EditOpKind.SUBSTITUTE
    gt_seen = h_seen = 0
    try:
        for kind, gi, hj in a.ops:
            if kind is match or kind is substitute:
                gt_seen += 1
                h_seen += 1
                gw = gt_owner[gi]
                hw = h_owner[hj]
                if gw is not None and hw is not None:
                    uf.union(gw, G + hw)
            elif gi is not None:
                gt_seen += 1
            else:
                h_seen += 1
    except IndexError:
        _reject_inconsistent(a, expect_gt, expect_h)
    if gt_seen != expect_gt or h_seen != expect_h:
        _reject_inconsistent(a, expect_gt, expect_h)

    # Collect ranges only for components that contain at least one link
    # (singleton roots are unlinked words, handled below).
    comp_ranges: dict[int, list[int]] = {}  # root -> [gt_min, gt_max, h_min, h_max]
    linked_roots: set[int] = set()
    for node in range(G + H):
        root = uf.find(node)
        if root != node:
            linked_roots.add(root)
    for node in range(G + H):
        root = uf.find(node)
        if root not in linked_roots:
            continue
        r = comp_ranges.setdefault(root, [G, -1, H, -1])
        if node < G:
            r[0] = min(r[0], node)
            r[1] = max(r[1], node)
        else:
            hw = node - G
            r[2] = min(r[2], hw)
            r[3] = max(r[3], hw)

    # Expand to contiguous ranges and merge any overlapping components.
    ranges = sorted(comp_ranges.values())
    merged: list[list[int]] = []
    for r in ranges:
        if merged and (r[0] <= merged[-1][1] or r[2] <= merged[-1][3]):
            last = merged[-1]
            last[1] = max(last[1], r[1])
            last[3] = max(last[3], r[3])
        else:
            merged.append(r)

    seg_of_gt: list[int | None] = [None] * G
    seg_of_h: list[int | None] = [None] * H
    pieces: list[tuple[list[int], list[int]]] = []

    comp_iter = iter(merged)
    current = next(comp_iter, None)
    gw = 0
    while gw < G:
        if current is not None and gw == current[0]:
            piece = (list(range(current[0], current[1] + 1)), list(range(current[2], current[3] + 1)))
            idx = len(pieces)
            pieces.append(piece)
            for g in piece[0]:
                seg_of_gt[g] = idx
            for hh in piece[1]:
                seg_of_h[hh] = idx
            gw = current[1] + 1
            current = next(comp_iter, None)
        else:
            idx = len(pieces)
            pieces.append(([gw], []))
            seg_of_gt[gw] = idx
            gw += 1

    # Attach leftover hypothesis words (pure insertions) to the preceding
    # assigned word's segment; a run before any anchor attaches forward.
    orphan_prefix: list[int] = []
    for hw in range(H):
        if seg_of_h[hw] is not None:
            continue
        if hw > 0 and seg_of_h[hw - 1] is not None:
            seg_of_h[hw] = seg_of_h[hw - 1]
            pieces[seg_of_h[hw]][1].append(hw)
        else:
            orphan_prefix.append(hw)
    if orphan_prefix:
        target = next((i for i, p in enumerate(pieces) if p[1]), 0)
        for hw in orphan_prefix:
            seg_of_h[hw] = target
            pieces[target][1].append(hw)
        words = " ".join(h_words[hw].word for hw in orphan_prefix)
        notes.append(
            f"leading hypothesis insertion(s) {words!r} attached forward to segment {target}"
        )

    segments = tuple(
        _make_segment(
            tuple(gt_words[g] for g in sorted(p[0])),
            tuple(h_words[hh] for hh in sorted(p[1])),
        )
        for p in pieces
    )
    return SegmentMapping(segments=segments, notes=tuple(notes))


def _reject_inconsistent(a: CharAlignment, expect_gt: int, expect_h: int):
    covered_gt = sum(1 for op in a.ops if op.gt_index is not None)
    covered_h = sum(1 for op in a.ops if op.h_index is not None)
    raise ValueError(
        f"word lists inconsistent with alignment: alignment covers "
        f"{covered_gt}/{covered_h} chars, word spans cover {expect_gt}/{expect_h}"
    )


def _make_segment(gt: tuple[WordSpan, ...], h: tuple[WordSpan, ...]) -> SegmentPair:
    return SegmentPair(
        gt_words=gt,
        h_words=h,
        gt_text=" ".join(w.word for w in gt),
        h_text=" ".join(w.word for w in h),
    )
