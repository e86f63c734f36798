"""Level-3 routing: embedding similarity against per-category task vectors.

Queries the rule layer cannot confidently place are embedded and compared
(cosine) to one centroid per complexity category.  The embedding provider is
pluggable: the in-repo reference is a deterministic token-hash embedder, so
every test is hermetic; a remote HTTP provider preserves fidelity to real
sentence-transformer deployments.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import numpy as np
import requests
import yaml

from .domain import QueryCategory
from .errors import ConfigError, EmbeddingProviderError

MIN_SEEDS_PER_CATEGORY = 8

# Score bridge from categorical verdicts to the 0-100 scale: band midpoints,
# far enough inside each tier band that bounded threshold drift (see adapt)
# cannot flip them.
CATEGORY_SCORE = {
    QueryCategory.SIMPLE: 17,
    QueryCategory.MEDIUM: 50,
    QueryCategory.COMPLEX: 83,
}


class EmbeddingProvider(Protocol):
    @property
    def dimension(self) -> int: ...

    def embed(self, text: str) -> np.ndarray: ...


class HashingEmbedder:
    """Deterministic reference embedder.

    Lowercase alphanumeric tokens are hashed into ``dimension`` signed
    buckets (+-1 contributions) and the result is L2-normalized.  Texts with
    no tokens embed to the zero vector, which downstream code treats as a
    degenerate input.  Stable across processes (keyed blake2b, not the
    builtin salted hash).
    """

    def __init__(self, dimension: int = 256) -> None:
        if dimension < 2:
            raise ValueError("dimension must be >= 2")
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        return self._dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self._dimension, dtype=np.float64)
        for token in _tokenize(text):
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "little")
            bucket = h % self._dimension
            sign = 1.0 if (h >> 32) & 1 == 0 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


class RemoteEmbedder:
    """Client for an embedding HTTP endpoint.

    Wire shape: ``POST {base_url}/embed`` with ``{"text": ...}`` returning
    ``{"vector": [...]}`` of the declared dimension.
    """

    def __init__(
        self,
        base_url: str,
        dimension: int,
        timeout_s: float = 10.0,
        session: requests.Session | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self._dimension = dimension
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    @property
    def dimension(self) -> int:
        return self._dimension

    def embed(self, text: str) -> np.ndarray:
        try:
            resp = self._session.post(
                f"{self.base_url}/embed", json={"text": text}, timeout=self.timeout_s
            )
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise EmbeddingProviderError(f"embedding endpoint failed: {exc}") from exc
        vector = payload.get("vector") if isinstance(payload, Mapping) else None
        if vector is None:
            raise EmbeddingProviderError("embedding response missing 'vector'")
        arr = np.asarray(vector, dtype=np.float64)
        if arr.shape != (self._dimension,):
            raise EmbeddingProviderError(
                f"embedding dimension mismatch: expected {self._dimension}, got {arr.shape}"
            )
        norm = np.linalg.norm(arr)
        if norm > 0:
            arr /= norm
        return arr


def _tokenize(text: str) -> list[str]:
    import re

    return re.findall(r"[a-z0-9]+", text.lower())


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; defined as 0 when either vector has zero norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0:
        return 0.0
    return float(np.dot(a, b) / denom)


@dataclass(frozen=True)
class TaskVector:
    category: QueryCategory
    vector: np.ndarray
    seed_phrases: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class SemanticVerdict:
    category: QueryCategory
    similarities: Mapping[QueryCategory, float]
    score: int
    confidence: float


TaskVectorRegistry = Mapping[QueryCategory, TaskVector]


def build_task_vectors(
    provider: EmbeddingProvider, seeds: Mapping[QueryCategory, Sequence[str]]
) -> dict[QueryCategory, TaskVector]:
    """Build one centroid per category as the normalized mean of seed embeddings."""
    registry: dict[QueryCategory, TaskVector] = {}
    for category in QueryCategory:
        phrases = seeds.get(category)
        if phrases is None:
            raise ConfigError(f"seed list missing for category {category.label!r}")
        if len(phrases) < MIN_SEEDS_PER_CATEGORY:
            raise ConfigError(
                f"category {category.label!r} has {len(phrases)} seed phrases, "
                f"needs >= {MIN_SEEDS_PER_CATEGORY}"
            )
        mean = np.mean([provider.embed(p) for p in phrases], axis=0)
        norm = np.linalg.norm(mean)
        if norm > 0:
            mean = mean / norm
        registry[category] = TaskVector(
            category=category, vector=mean, seed_phrases=tuple(phrases)
        )
    return registry


def classify_semantic(
    registry: TaskVectorRegistry, provider: EmbeddingProvider, text: str
) -> SemanticVerdict:
    """Classify by cosine similarity to the task vectors.

    Ties and degenerate (zero) embeddings resolve toward the larger tier:
    when in doubt, escalate rather than degrade quality.  Confidence is the
    top-minus-second similarity margin clamped to [0, 1].
    """
    query_vec = provider.embed(text)
    if np.linalg.norm(query_vec) == 0:
        sims = {category: 0.0 for category in QueryCategory}
        return SemanticVerdict(
            category=QueryCategory.COMPLEX,
            similarities=sims,
            score=CATEGORY_SCORE[QueryCategory.COMPLEX],
            confidence=0.0,
        )
    sims = {
        category: cosine(query_vec, registry[category].vector) for category in QueryCategory
    }
    # max() keeps the first maximum; iterate complex-first so ties escalate
    best = max(reversed(QueryCategory), key=lambda c: sims[c])
    ranked = sorted(sims.values(), reverse=True)
    confidence = min(1.0, max(0.0, ranked[0] - ranked[1]))
    return SemanticVerdict(
        category=best,
        similarities=sims,
        score=CATEGORY_SCORE[best],
        confidence=confidence,
    )


# Reference seed phrases, >= 8 per category.  Deliberately vocabulary-heavy in
# each category's register so the hash embedder separates them cleanly; the
# test suite asserts every seed classifies into its own category.
DEFAULT_SEEDS: dict[QueryCategory, tuple[str, ...]] = {
    QueryCategory.SIMPLE: (
        "hi there",
        "hello how are you today",
        "good morning to you",
        "thanks for the help",
        "what time is it right now",
        "what is the capital of france",
        "who wrote hamlet",
        "is it going to rain today",
        "goodbye and see you later",
        "what day is it today",
    ),
    QueryCategory.MEDIUM: (
        "explain how photosynthesis works in plants",
        "describe the causes of the french revolution",
        "summarize the main arguments about climate change",
        "compare electric cars and petrol cars",
        "why do interest rates affect inflation",
        "explain the difference between tcp and udp",
        "describe how vaccines train the immune system",
        "give an overview of renewable energy sources",
        "compare the roman empire and the greek city states",
        "why is the sky blue during the day",
    ),
    QueryCategory.COMPLEX: (
        "write a python function that parses a csv file",
        "implement a binary search tree with insert and delete",
        "design a step by step plan to migrate a monolith to microservices",
        "debug this stack trace and fix the underlying bug",
        "write sql to find the top customers by total revenue",
        "draft a multi step strategy for launching a new product",
        "implement an http server with routing and middleware",
        "design the architecture for a distributed message queue",
        "write a script to batch rename thousands of files",
        "prove the algorithm terminates and analyze its complexity",
    ),
}


def load_seeds(path: str | Path) -> dict[QueryCategory, tuple[str, ...]]:
    """Load per-category seed phrase lists from a YAML seeds file."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, Mapping) or "seeds" not in raw:
        raise ConfigError(f"{path}: expected a mapping with a 'seeds' section")
    section = raw["seeds"]
    seeds: dict[QueryCategory, tuple[str, ...]] = {}
    for category in QueryCategory:
        phrases = section.get(category.label)
        if phrases is None:
            raise ConfigError(f"{path}: seeds.{category.label} is missing")
        if not isinstance(phrases, list):
            raise ConfigError(f"{path}: seeds.{category.label} must be a list")
        seeds[category] = tuple(str(p) for p in phrases)
    return seeds


def dump_seeds(seeds: Mapping[QueryCategory, Sequence[str]], path: str | Path) -> None:
    payload = {"seeds": {cat.label: list(phrases) for cat, phrases in seeds.items()}}
    Path(path).write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
