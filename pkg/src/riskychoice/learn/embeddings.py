"""Text embeddings and embedding-difference task representations.

Precomputed vectors live in a JSON-lines file. The first line is a header
``{"format": "riskychoice-embeddings", "version": 1, "model_id": ..., "dim": N}``
and every following line is ``{"key": sha256(text), "vector": [...]}``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..core import ChoiceTask
from ..llm.client import DiskCache
from .models import DimensionMismatch

EMBED_FORMAT = "riskychoice-embeddings"
EMBED_VERSION = 1


def text_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EmbeddingStore:
    """In-memory map from text hash to vector, loadable from and savable to disk.

    ``texts`` maps raw option texts to vectors; they are stored under their hash.
    """

    def __init__(self, texts: Optional[dict] = None, model_id: str = "precomputed"):
        self.model_id = model_id
        self.vectors: dict[str, np.ndarray] = {}
        self.dim: Optional[int] = None
        for text, v in (texts or {}).items():
            self.add(text, v)

    def _put(self, key: str, vector) -> None:
        v = np.asarray(vector, dtype=float)
        if self.dim is None:
            self.dim = v.shape[0]
        elif v.shape[0] != self.dim:
            raise DimensionMismatch(f"vector of length {v.shape[0]} in a {self.dim}-dim store")
        self.vectors[key] = v

    def add(self, text: str, vector) -> None:
        self._put(text_key(text), vector)

    def get(self, text: str) -> Optional[np.ndarray]:
        return self.vectors.get(text_key(text))

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            header = {"format": EMBED_FORMAT, "version": EMBED_VERSION, "model_id": self.model_id, "dim": self.dim}
            fh.write(json.dumps(header) + "\n")
            for key in sorted(self.vectors):
                fh.write(json.dumps({"key": key, "vector": self.vectors[key].tolist()}) + "\n")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EmbeddingStore":
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != EMBED_FORMAT or header.get("version") != EMBED_VERSION:
                raise ValueError(f"{path}: not a version-{EMBED_VERSION} embedding file")
            store = cls(model_id=header.get("model_id", "precomputed"))
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    store._put(rec["key"], rec["vector"])
        if header.get("dim") is not None and store.dim not in (None, header["dim"]):
            raise DimensionMismatch(f"{path}: header says dim {header['dim']}, vectors have {store.dim}")
        return store


def embed_text(
    text: str,
    provider=None,
    cache: Optional[DiskCache] = None,
    *,
    store: Optional[EmbeddingStore] = None,
    model_id: str = "text-embedding-3-large",
) -> np.ndarray:
    """Vector for ``text`` from a precomputed store or an embedding provider."""
    if not text:
        raise ValueError("cannot embed empty text")
    if store is not None:
        v = store.get(text)
        if v is not None:
            return v
        if provider is None:
            raise KeyError(f"no precomputed vector for text {text[:40]!r}")
    if provider is None:
        raise ValueError("embed_text needs a provider or a precomputed store")
    key = hashlib.sha256(f"embed|{model_id}|{text}".encode("utf-8")).hexdigest()
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return np.asarray(json.loads(hit), dtype=float)
    vec = provider.embed([text], model_id)[0]
    if cache is not None:
        cache.put(key, json.dumps(vec), {"model_id": model_id, "text_sha256": text_key(text)})
    return np.asarray(vec, dtype=float)


def task_representation(v_a, v_b) -> np.ndarray:
    a = np.asarray(v_a, dtype=float)
    b = np.asarray(v_b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"option vectors have shapes {a.shape} and {b.shape}")
    return a - b


def check_dims(vectors: Iterable[np.ndarray]) -> int:
    dims = {np.asarray(v).shape[0] for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatch(f"mixed embedding dimensionalities {sorted(dims)}")
    return dims.pop() if dims else 0


def embed_tasks(tasks: Sequence[ChoiceTask], **embed_kwargs) -> np.ndarray:
    """Stack d = v_A - v_B for every task; all vectors must share one dimensionality."""
    rows = []
    for t in tasks:
        if not t.has_text:
            raise ValueError(f"task {t.task_id} has no option texts")
        va = embed_text(t.option_a_text, **embed_kwargs)
        vb = embed_text(t.option_b_text, **embed_kwargs)
        rows.append(task_representation(va, vb))
    check_dims(rows)
    return np.vstack(rows) if rows else np.empty((0, 0))
