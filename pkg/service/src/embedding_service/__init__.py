"""Embedding service: transformer token vectors with character offsets over HTTP."""

from .app import DEFAULT_MODEL_ID, EmbedRequest, EmbedResponse, create_app
from .model import EmbeddingModel, EmptyTextError, TextTooLongError

__all__ = [
    "DEFAULT_MODEL_ID",
    "EmbedRequest",
    "EmbedResponse",
    "EmbeddingModel",
    "EmptyTextError",
    "TextTooLongError",
    "create_app",
]
