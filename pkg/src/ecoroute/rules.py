"""Level-2 routing: deterministic pattern matching over normalized query text.

A rule table pairs regex/keyword matchers with score contributions and
confidence weights.  Classification takes the single strongest matched rule
(max contribution, earliest table position on ties) plus a small length
bonus, so stacking weak signals can never outrank one strong signal.
Unrecognized phrasings get a deliberately low confidence (0.3) that falls
below the default escalation threshold, forcing them to the semantic layer:
L2 only decides what it recognizes.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml

from .domain import clamp_score, normalize_query_text
from .errors import RuleTableError


class RuleCategory(enum.Enum):
    GREETING = "greeting"
    FACTUAL_SHORT = "factual_short"
    EXPLANATION = "explanation"
    MATH = "math"
    CODE = "code"
    MULTI_STEP = "multi_step"


NO_MATCH_BASE_SCORE = 10
NO_MATCH_CONFIDENCE = 0.3
LENGTH_BONUS_CAP = 15
TOKENS_PER_BONUS_POINT = 8


@dataclass(frozen=True, slots=True)
class PatternRule:
    """One row of the rule table.

    ``kind`` selects the matcher: ``regex`` uses ``pattern`` as a regular
    expression searched against the normalized text; ``keywords`` matches any
    of ``keywords`` as whole-word phrases.  ``max_tokens``, when set, further
    requires the query to have fewer than that many whitespace tokens.
    ``examples`` are phrases that must classify into this rule's category;
    the test suite checks them for self-consistency.
    """

    id: str
    category: RuleCategory
    kind: str  # "regex" | "keywords"
    score_contribution: int
    confidence_weight: float
    pattern: str = ""
    keywords: tuple[str, ...] = ()
    max_tokens: int | None = None
    examples: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.score_contribution <= 100:
            raise RuleTableError(f"rule {self.id!r}: score_contribution out of [0, 100]")
        if not 0.0 <= self.confidence_weight <= 1.0:
            raise RuleTableError(f"rule {self.id!r}: confidence_weight out of [0, 1]")
        if self.kind not in ("regex", "keywords"):
            raise RuleTableError(f"rule {self.id!r}: unknown matcher kind {self.kind!r}")
        if self.kind == "regex" and not self.pattern:
            raise RuleTableError(f"rule {self.id!r}: regex rule needs a pattern")
        if self.kind == "keywords" and not self.keywords:
            raise RuleTableError(f"rule {self.id!r}: keyword rule needs a keyword list")


@dataclass(frozen=True, slots=True)
class RuleVerdict:
    score: int
    confidence: float
    matched_rule_ids: tuple[str, ...]
    category_hint: RuleCategory | None


@dataclass(frozen=True, slots=True)
class _CompiledRule:
    rule: PatternRule
    matcher: re.Pattern
    position: int

    def matches(self, text: str, token_count: int) -> bool:
        if self.rule.max_tokens is not None and token_count >= self.rule.max_tokens:
            return False
        return self.matcher.search(text) is not None


class RuleEngine:
    """Immutable compiled rule table; ``classify`` is a pure function of it."""

    def __init__(self, compiled: Sequence[_CompiledRule]) -> None:
        self._compiled = tuple(compiled)
        self.categories = tuple(sorted({c.rule.category.value for c in compiled}))

    @property
    def rules(self) -> tuple[PatternRule, ...]:
        return tuple(c.rule for c in self._compiled)

    def classify(self, text: str) -> RuleVerdict:
        """Score a normalized query.

        Empty text is a declared degenerate: score 0, confidence 1.0,
        category greeting (nothing to classify, nothing to escalate).
        """
        if not text:
            return RuleVerdict(
                score=0, confidence=1.0, matched_rule_ids=(), category_hint=RuleCategory.GREETING
            )
        token_count = len(text.split())
        length_bonus = min(LENGTH_BONUS_CAP, token_count // TOKENS_PER_BONUS_POINT)

        matched = [c for c in self._compiled if c.matches(text, token_count)]
        if not matched:
            return RuleVerdict(
                score=clamp_score(NO_MATCH_BASE_SCORE + length_bonus),
                confidence=NO_MATCH_CONFIDENCE,
                matched_rule_ids=(),
                category_hint=None,
            )
        best = max(matched, key=lambda c: (c.rule.score_contribution, -c.position))
        return RuleVerdict(
            score=clamp_score(best.rule.score_contribution + length_bonus),
            confidence=best.rule.confidence_weight,
            matched_rule_ids=tuple(c.rule.id for c in matched),
            category_hint=best.rule.category,
        )


def needs_escalation(verdict: RuleVerdict, escalation_threshold: float) -> bool:
    """Low-confidence rule verdicts escalate to the semantic layer.

    Strict less-than: a verdict exactly at the threshold stays at L2.
    """
    if not 0.0 <= escalation_threshold <= 1.0:
        raise ValueError("escalation_threshold must be in [0, 1]")
    return verdict.confidence < escalation_threshold


def _keyword_regex(keywords: Iterable[str]) -> str:
    # lookarounds instead of \b so keywords ending in punctuation ("c++") work
    parts = sorted((re.escape(k) for k in keywords), key=len, reverse=True)
    return r"(?<!\w)(?:%s)(?!\w)" % "|".join(parts)


def compile_rules(rules: Sequence[PatternRule]) -> RuleEngine:
    """Compile a rule table, failing fast on duplicate ids or bad patterns."""
    if not rules:
        raise RuleTableError("rule table is empty")
    seen: set[str] = set()
    compiled: list[_CompiledRule] = []
    for position, rule in enumerate(rules):
        if rule.id in seen:
            raise RuleTableError(f"duplicate rule id {rule.id!r}")
        seen.add(rule.id)
        source = rule.pattern if rule.kind == "regex" else _keyword_regex(rule.keywords)
        try:
            matcher = re.compile(source)
        except re.error as exc:
            raise RuleTableError(f"rule {rule.id!r}: pattern does not compile: {exc}") from exc
        compiled.append(_CompiledRule(rule=rule, matcher=matcher, position=position))
    return RuleEngine(compiled)


# Reference rule table.  Covers the structural signal classes the router
# keys on (greetings, short factual questions, explanation requests,
# mathematical operators, programming syntax, multi-step task framing).
# Deployments grow this table through the rules file; matching is against
# normalized (lowercased, whitespace-collapsed) text.
DEFAULT_RULES: tuple[PatternRule, ...] = (
    PatternRule(
        id="greeting-opener",
        category=RuleCategory.GREETING,
        kind="regex",
        pattern=r"^(hi|hiya|hello|hey|yo|howdy|greetings|good (morning|afternoon|evening|night))\b",
        score_contribution=5,
        confidence_weight=0.95,
        examples=("hi", "hello there", "good morning", "hey what's up"),
    ),
    PatternRule(
        id="greeting-closer",
        category=RuleCategory.GREETING,
        kind="regex",
        pattern=r"^(thanks|thank you|thx|cheers|bye|goodbye|see you)\b",
        score_contribution=5,
        confidence_weight=0.95,
        examples=("thanks a lot", "thank you", "goodbye for now"),
    ),
    PatternRule(
        id="factual-interrogative",
        category=RuleCategory.FACTUAL_SHORT,
        kind="regex",
        pattern=r"^(what|who|whom|whose|when|where|which|is|are|was|were|do|does|did|can|could|name|define)\b",
        score_contribution=20,
        confidence_weight=0.7,
        max_tokens=12,
        examples=(
            "what is the capital of france",
            "who wrote hamlet",
            "when did the first moon landing happen",
            "is the sun a star",
        ),
    ),
    PatternRule(
        id="explanation-request",
        category=RuleCategory.EXPLANATION,
        kind="keywords",
        keywords=(
            "explain",
            "describe",
            "summarize",
            "summarise",
            "compare",
            "contrast",
            "why",
            "elaborate",
            "overview",
            "difference between",
            "walk me through",
        ),
        score_contribution=45,
        confidence_weight=0.7,
        examples=(
            "explain how photosynthesis works",
            "describe the water cycle",
            "compare cats and dogs as pets",
            "why do seasons change",
            "give an overview of renewable energy sources",
        ),
    ),
    PatternRule(
        id="math-operators",
        category=RuleCategory.MATH,
        kind="regex",
        # digit-operator-digit co-occurrence or explicit math glyphs; a bare
        # hyphen is too common in prose to count as a minus sign
        pattern=r"\d\s*[-+*/^=]\s*\d|[∑∫√±≤≥≠]|\bx\^?2\b",
        score_contribution=55,
        confidence_weight=0.75,
        examples=("what is 12 * 8 - 4", "evaluate 144 / 12 + 7"),
    ),
    PatternRule(
        id="math-task",
        category=RuleCategory.MATH,
        kind="keywords",
        keywords=(
            "solve",
            "derive",
            "prove",
            "integrate",
            "differentiate",
            "equation",
            "theorem",
            "factorize",
            "square root",
        ),
        score_contribution=55,
        confidence_weight=0.75,
        examples=(
            "solve 3x + 5 = 20 for x",
            "prove that the square root of 2 is irrational",
            "derive the quadratic formula",
        ),
    ),
    PatternRule(
        id="code-syntax",
        category=RuleCategory.CODE,
        kind="regex",
        pattern=r"```|\bdef\s+\w+\(|\{[^}]*;|;[^{]*\}",
        score_contribution=80,
        confidence_weight=0.9,
        examples=("``` for i in range(3): print(i) ```", "what does int x = 5; { x++; } do"),
    ),
    PatternRule(
        id="code-task",
        category=RuleCategory.CODE,
        kind="keywords",
        keywords=(
            "implement",
            "write a function",
            "write a script",
            "write a program",
            "write code",
            "write sql",
            "debug",
            "refactor",
            "stack trace",
            "unit test",
            "fix this bug",
        ),
        score_contribution=80,
        confidence_weight=0.9,
        examples=(
            "write a function to reverse a string",
            "implement a linked list with insert and delete",
            "debug this null pointer exception",
        ),
    ),
    PatternRule(
        id="code-language",
        category=RuleCategory.CODE,
        kind="keywords",
        keywords=(
            "python",
            "javascript",
            "typescript",
            "java",
            "c++",
            "rust",
            "golang",
            "sql",
            "bash",
            "regex",
            "numpy",
        ),
        score_contribution=80,
        confidence_weight=0.9,
        examples=("how do i read a csv file in python", "what is a slice in golang"),
    ),
    PatternRule(
        id="multi-step-framing",
        category=RuleCategory.MULTI_STEP,
        kind="keywords",
        keywords=(
            "step by step",
            "step-by-step",
            "design",
            "architect",
            "architecture",
            "workflow",
            "roadmap",
            "outline a plan",
            "outline a strategy",
            "multi-step",
            "action plan",
        ),
        score_contribution=75,
        confidence_weight=0.8,
        examples=(
            "design a step by step migration plan for moving a monolith to microservices",
            "outline a strategy to reduce cloud costs in three phases",
            "propose an architecture for the new billing system",
        ),
    ),
    PatternRule(
        id="multi-step-enumeration",
        category=RuleCategory.MULTI_STEP,
        kind="regex",
        pattern=r"\b\d+\.\s|\bfirst\b.*\bthen\b|\bstep \d+\b",
        score_contribution=75,
        confidence_weight=0.8,
        examples=(
            "first gather the requirements then propose a rollout sequence for the new billing flow",
            "1. collect logs 2. find the bottleneck 3. recommend a remediation",
        ),
    ),
)


def default_engine() -> RuleEngine:
    return compile_rules(DEFAULT_RULES)


def _rule_to_record(rule: PatternRule) -> dict:
    record: dict = {
        "id": rule.id,
        "category": rule.category.value,
        "kind": rule.kind,
        "score_contribution": rule.score_contribution,
        "confidence_weight": rule.confidence_weight,
    }
    if rule.kind == "regex":
        record["pattern"] = rule.pattern
    else:
        record["keywords"] = list(rule.keywords)
    if rule.max_tokens is not None:
        record["max_tokens"] = rule.max_tokens
    if rule.examples:
        record["examples"] = list(rule.examples)
    return record


def _rule_from_record(record: Mapping, index: int) -> PatternRule:
    try:
        category = RuleCategory(record["category"])
    except (KeyError, ValueError) as exc:
        raise RuleTableError(f"rules[{index}]: bad or missing category: {exc}") from exc
    missing = {"id", "kind", "score_contribution", "confidence_weight"} - set(record)
    if missing:
        raise RuleTableError(f"rules[{index}]: missing fields {sorted(missing)}")
    return PatternRule(
        id=str(record["id"]),
        category=category,
        kind=str(record["kind"]),
        score_contribution=int(record["score_contribution"]),
        confidence_weight=float(record["confidence_weight"]),
        pattern=str(record.get("pattern", "")),
        keywords=tuple(record.get("keywords", ())),
        max_tokens=record.get("max_tokens"),
        examples=tuple(record.get("examples", ())),
    )


def load_rules(path: str | Path) -> tuple[PatternRule, ...]:
    """Load a rule table from a YAML rules file (``rules:`` list of records)."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, Mapping) or "rules" not in raw:
        raise RuleTableError(f"{path}: expected a mapping with a 'rules' list")
    records = raw["rules"]
    if not isinstance(records, list) or not records:
        raise RuleTableError(f"{path}: 'rules' must be a non-empty list")
    return tuple(_rule_from_record(r, i) for i, r in enumerate(records))


def dump_rules(rules: Sequence[PatternRule], path: str | Path) -> None:
    """Write a rule table in the rules-file format (the load_rules inverse)."""
    payload = {"rules": [_rule_to_record(r) for r in rules]}
    Path(path).write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
