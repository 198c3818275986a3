from __future__ import annotations

import numpy as np
import pytest

from semascore import EmbedderConfig, MockEmbedder, TokenEmbeddings


@pytest.fixture
def mock_cfg() -> EmbedderConfig:
    return EmbedderConfig(backend="mock", seed=0)


@pytest.fixture
def mock_embedder() -> MockEmbedder:
    return MockEmbedder(seed=0)


class TableEmbedder:
    """Test embedder with hand-picked per-word vectors (one token per word)."""

    backend = "table"

    def __init__(self, table: dict[str, list[float]]):
        self.table = {w: np.asarray(v, dtype=float) for w, v in table.items()}

    def embed_tokens(self, text: str) -> TokenEmbeddings:
        if not text:
            raise ValueError("cannot embed empty text")
        words = text.split(" ")
        vectors = np.stack([self.table[w] for w in words])
        offsets = []
        pos = 0
        for w in words:
            offsets.append((pos, pos + len(w)))
            pos += len(w) + 1
        return TokenEmbeddings(vectors=vectors, offsets=tuple(offsets), dim=vectors.shape[1])


@pytest.fixture
def table_embedder_factory():
    return TableEmbedder


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status in ("passed", "failed", "skipped", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "acceptance" not in nodeid.rsplit("::", 1)[0]:
                continue
            # pass/fail matter at call phase; skips may be raised during setup
            if status in ("passed", "failed") and getattr(report, "when", "call") != "call":
                continue
            name = nodeid.split("::")[-1]
            detail = ""
            if status == "skipped":
                reason = getattr(report, "longrepr", None)
                if isinstance(reason, tuple):
                    detail = f" ({reason[2]})"
            lines.append(f"ACCEPTANCE {name}: {status.upper()}{detail}")
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
