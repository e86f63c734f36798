"""Core routing vocabulary: tiers, thresholds, scores, and query records.

Everything here is immutable after construction and safe to share across
concurrent request handlers.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class ModelTier(enum.IntEnum):
    """Model size tiers, totally ordered Small < Medium < Large."""

    SMALL = 0
    MEDIUM = 1
    LARGE = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()


class QueryCategory(enum.IntEnum):
    """Complexity categories used by the semantic classifier and eval labels."""

    SIMPLE = 0
    MEDIUM = 1
    COMPLEX = 2

    @property
    def label(self) -> str:
        return self.name.lower()


# Tier <-> category identification used for routing ground truth.
TIER_FOR_CATEGORY = {
    QueryCategory.SIMPLE: ModelTier.SMALL,
    QueryCategory.MEDIUM: ModelTier.MEDIUM,
    QueryCategory.COMPLEX: ModelTier.LARGE,
}
CATEGORY_FOR_TIER = {tier: cat for cat, tier in TIER_FOR_CATEGORY.items()}


class RoutingLevel(enum.Enum):
    """Which stage of the waterfall resolved a query."""

    L1_CACHE = "L1Cache"
    L2_RULES = "L2Rules"
    L3_SEMANTIC = "L3Semantic"


def clamp_score(value: int | float) -> int:
    """Clamp a raw complexity score into the canonical [0, 100] integer range."""
    return max(0, min(100, int(value)))


@dataclass(frozen=True, slots=True)
class TierThresholds:
    """Score boundaries of the three tier bands.

    ``score <= small_max`` routes Small, ``score <= medium_max`` routes
    Medium, anything above routes Large.  The bands must keep a gap of at
    least 10 points so that bounded adaptive drift can never collapse them.
    """

    small_max: int = 33
    medium_max: int = 66

    MIN_BAND_GAP = 10

    def __post_init__(self) -> None:
        if not (0 <= self.small_max < self.medium_max <= 99):
            raise ValueError(
                f"thresholds must satisfy 0 <= small_max < medium_max <= 99, "
                f"got {self.small_max}/{self.medium_max}"
            )
        if self.medium_max - self.small_max < self.MIN_BAND_GAP:
            raise ValueError(
                f"medium_max - small_max must be >= {self.MIN_BAND_GAP}, "
                f"got {self.medium_max - self.small_max}"
            )


@dataclass(frozen=True, slots=True)
class QueryRecord:
    """One inbound query; the unit of routing."""

    id: str
    session_id: str
    text: str
    received_at_ns: int


@dataclass(frozen=True, slots=True)
class RoutingOutcome:
    """The routing decision for one query.

    ``rule_confidence`` carries the L2 verdict's confidence even when the
    query escalated to L3; it is what the waterfall-discipline checks and
    the JSONL log inspect.  It is None for L1 replays.
    """

    level: RoutingLevel
    score: int
    confidence: float
    tier: ModelTier
    model_name: str
    decision_latency_ns: int
    rule_confidence: float | None = None
    category_hint: str | None = None


_WHITESPACE_RUN = re.compile(r"\s+")


def normalize_query_text(text: str) -> str:
    """Canonicalize query text for cache keys and classifiers.

    Lowercases, strips leading/trailing whitespace, and collapses internal
    whitespace runs to single spaces.  Punctuation is preserved on purpose:
    it is a routing signal for code- and math-like queries.  Idempotent.
    """
    return _WHITESPACE_RUN.sub(" ", text.strip()).lower()


def tier_for_score(score: int, thresholds: TierThresholds) -> ModelTier:
    """Map a complexity score onto a model tier.

    Piecewise constant and monotone non-decreasing in the score; every score
    in [0, 100] maps to exactly one tier.
    """
    score = clamp_score(score)
    if score <= thresholds.small_max:
        return ModelTier.SMALL
    if score <= thresholds.medium_max:
        return ModelTier.MEDIUM
    return ModelTier.LARGE
