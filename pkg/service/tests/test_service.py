from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from embedding_service import EmbeddingModel, create_app


@pytest.fixture(scope="session")
def model(mini_model_dir):
    return EmbeddingModel(mini_model_dir)


@pytest.fixture
def client(model):
    with TestClient(create_app(preloaded=model)) as client:
        yield client


def _embed(client, text, model_id):
    return client.post("/embed", json={"text": text, "model": model_id})


class TestHealth:
    def test_ok_after_load(self, client, model):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["model"] == model.model_id
        assert body["dim"] == 768

    def test_503_when_model_failed_to_load(self, tmp_path):
        with TestClient(create_app(model_id=str(tmp_path / "nope"))) as client:
            assert client.get("/health").status_code == 503
            response = client.post("/embed", json={"text": "x", "model": "nope"})
            assert response.status_code == 503

    def test_503_before_lifespan_ran(self, tmp_path):
        # raw app, startup never executed: the model is still unloaded
        app = create_app(model_id=str(tmp_path / "nope"))
        client = TestClient(app)  # no context manager -> no lifespan
        assert client.get("/health").status_code == 503

    def test_unknown_path_404(self, client):
        assert client.get("/nothing-here").status_code == 404


class TestEmbed:
    def test_tokens_with_offsets(self, client, model):
        response = _embed(client, "i want to have a sandwich", model.model_id)
        assert response.status_code == 200
        body = response.json()
        assert body["dim"] == 768
        assert len(body["tokens"]) >= 1
        prev_end = 0
        for token in body["tokens"]:
            assert 0 <= token["start"] < token["end"] <= 26
            assert token["start"] >= prev_end
            prev_end = token["end"]
            assert len(token["vector"]) == 768

    def test_empty_text_400(self, client, model):
        assert _embed(client, "", model.model_id).status_code == 400
        assert _embed(client, "   ", model.model_id).status_code == 400

    def test_oversize_text_413(self, client, model):
        long_text = " ".join("wordiness" for _ in range(300))
        assert _embed(client, long_text, model.model_id).status_code == 413

    def test_wrong_model_id_400(self, client):
        response = _embed(client, "hello", "some-other-model")
        assert response.status_code == 400
        assert "serves" in response.json()["detail"]

    def test_span_text_comes_from_input(self, client, model):
        text = "thank you lord"
        body = _embed(client, text, model.model_id).json()
        for token in body["tokens"]:
            piece = text[token["start"]:token["end"]]
            assert piece  # non-empty and, by construction, within the input
            assert all(c in text for c in piece)

    def test_trailing_whitespace_same_tokens(self, client, model):
        plain = _embed(client, "sandwich", model.model_id).json()
        padded = _embed(client, "sandwich \n", model.model_id).json()
        assert plain == padded


class TestDeterminism:
    def test_identical_requests_identical_bodies(self, client, model):
        first = _embed(client, "smoking something", model.model_id)
        second = _embed(client, "smoking something", model.model_id)
        assert first.content == second.content

    def test_fresh_model_same_vectors(self, mini_model_dir, client, model):
        reloaded = EmbeddingModel(mini_model_dir)
        _, tokens_a = model.embed("thank you lord")
        _, tokens_b = reloaded.embed("thank you lord")
        assert tokens_a == tokens_b
