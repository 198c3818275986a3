"""Transformer embedding backend: tokenize with offsets, run the encoder.

Serves the last hidden layer per non-special token. Input text is stripped
before tokenization so surrounding whitespace never changes the token set;
offsets refer to the stripped text.
"""

from __future__ import annotations

import torch
from transformers import AutoModel, AutoTokenizer


class EmptyTextError(ValueError):
    """Request text is empty after trimming."""


class TextTooLongError(ValueError):
    """Request text exceeds the configured token budget."""


class EmbeddingModel:
    """A loaded tokenizer + encoder pair; inference only, deterministic."""

    def __init__(self, model_id: str, max_tokens: int | None = None):
        self.model_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id)
        self.model.eval()
        self.dim = int(self.model.config.hidden_size)
        if max_tokens is None:
            positions = int(getattr(self.model.config, "max_position_embeddings", 514))
            max_tokens = min(512, positions - 2)
        self.max_tokens = max_tokens

    def embed(self, text: str) -> tuple[int, list[dict]]:
        """(dim, tokens) for one text; tokens carry start/end/vector."""
        text = text.strip()
        if not text:
            raise EmptyTextError("text is empty after trimming")
        encoded = self.tokenizer(
            text,
            return_tensors="pt",
            return_offsets_mapping=True,
            return_special_tokens_mask=True,
        )
        n_tokens = int(encoded["input_ids"].shape[1])
        if n_tokens > self.max_tokens:
            raise TextTooLongError(
                f"{n_tokens} tokens exceed the configured maximum of {self.max_tokens}"
            )
        with torch.no_grad():
            output = self.model(
                input_ids=encoded["input_ids"],
                attention_mask=encoded["attention_mask"],
            )
        hidden = output.last_hidden_state[0]

        tokens: list[dict] = []
        special = encoded["special_tokens_mask"][0].tolist()
        offsets = encoded["offset_mapping"][0].tolist()
        prev_end = 0
        for i, (is_special, (start, end)) in enumerate(zip(special, offsets)):
            if is_special or start >= end:
                continue
            # defensive monotonicity: offsets must be ordered and disjoint
            start = max(start, prev_end)
            if start >= end:
                continue
            prev_end = end
            tokens.append({
                "start": int(start),
                "end": int(end),
                "vector": hidden[i].tolist(),
            })
        return self.dim, tokens
