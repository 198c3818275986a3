"""FastAPI application exposing the embedding wire protocol.

POST /embed  {"text": str, "model": str} -> {"dim": int, "tokens": [...]}
GET  /health -> {"status": "ok", "model": ..., "dim": ...} once loaded;
503 before the model is ready or when loading failed.

The served model is chosen at startup (argument or MODEL_ID env var); the
service is stateless between requests.
"""

from __future__ import annotations

import logging
import os
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .model import EmbeddingModel, EmptyTextError, TextTooLongError

logger = logging.getLogger("embedding_service")

DEFAULT_MODEL_ID = "roberta-base"


class EmbedRequest(BaseModel):
    text: str
    model: str = Field(default=DEFAULT_MODEL_ID)


class TokenVector(BaseModel):
    start: int
    end: int
    vector: list[float]


class EmbedResponse(BaseModel):
    dim: int
    tokens: list[TokenVector]


def create_app(model_id: str | None = None, preloaded: EmbeddingModel | None = None) -> FastAPI:
    """Build the service; model loading happens during startup unless
    an already-loaded model is injected."""
    target_id = model_id or os.environ.get("MODEL_ID", DEFAULT_MODEL_ID)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.model is None:
            try:
                app.state.model = EmbeddingModel(target_id)
                logger.info("loaded model %s (dim=%d)", target_id, app.state.model.dim)
            except Exception as exc:
                app.state.load_error = str(exc)
                logger.error("failed to load model %s: %s", target_id, exc)
        yield

    app = FastAPI(title="embedding-service", lifespan=lifespan)
    app.state.model = preloaded
    app.state.load_error = None

    @app.get("/health")
    def health():
        model: EmbeddingModel | None = app.state.model
        if model is None:
            detail = app.state.load_error or "model not loaded yet"
            return JSONResponse(status_code=503, content={"status": "unavailable", "detail": detail})
        return {"status": "ok", "model": model.model_id, "dim": model.dim}

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest):
        model: EmbeddingModel | None = app.state.model
        if model is None:
            detail = app.state.load_error or "model not loaded yet"
            return JSONResponse(status_code=503, content={"detail": detail})
        if request.model != model.model_id:
            return JSONResponse(
                status_code=400,
                content={"detail": f"this instance serves {model.model_id!r}, not {request.model!r}"},
            )
        try:
            dim, tokens = model.embed(request.text)
        except EmptyTextError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        except TextTooLongError as exc:
            return JSONResponse(status_code=413, content={"detail": str(exc)})
        return {"dim": dim, "tokens": tokens}

    return app
