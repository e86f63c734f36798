"""Level-1 routing: in-memory LRU cache with TTL.

Repeated queries are resolved here without touching the classifiers or the
backend.  All TTL logic runs against an injected clock; expiry is lazy (on
access) plus an opportunistic purge when inserting at capacity, so there is
no background sweeper thread.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from collections import OrderedDict

from .clock import Clock, MonotonicClock
from .domain import RoutingOutcome


@dataclass(frozen=True, slots=True)
class CacheConfig:
    capacity: int = 1024
    ttl_seconds: float = 300.0
    # On a hit, serve the cached response text directly (True) or only reuse
    # the routing decision and re-generate (False).
    serve_responses: bool = True

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        if self.ttl_seconds <= 0:
            raise ValueError("cache ttl_seconds must be > 0")


@dataclass(slots=True)
class CacheEntry:
    key: str
    outcome: RoutingOutcome
    response_text: str | None
    inserted_at_ns: int
    last_access_ns: int


@dataclass(frozen=True, slots=True)
class CacheStats:
    hits: int
    misses: int
    evictions: int
    expirations: int
    size: int

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


class RouteCache:
    """LRU + TTL cache keyed by normalized query text.

    Operations are linearizable: a single internal lock guards the order
    structure and the counters, so concurrent request handlers can share one
    instance.
    """

    def __init__(self, config: CacheConfig | None = None, clock: Clock | None = None) -> None:
        self.config = config or CacheConfig()
        self._clock = clock or MonotonicClock()
        self._entries: OrderedDict[str, CacheEntry] = OrderedDict()
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0
        self._evictions = 0
        self._expirations = 0

    def _expired(self, entry: CacheEntry, now_ns: int) -> bool:
        return (now_ns - entry.inserted_at_ns) > self.config.ttl_seconds * 1e9

    def get(self, key: str) -> CacheEntry | None:
        """Look up a normalized key; a miss is a normal outcome, not an error."""
        now_ns = self._clock.now_ns()
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                self._misses += 1
                return None
            if self._expired(entry, now_ns):
                del self._entries[key]
                self._expirations += 1
                self._misses += 1
                return None
            entry.last_access_ns = now_ns
            self._entries.move_to_end(key)
            self._hits += 1
            return entry

    def put(self, key: str, outcome: RoutingOutcome, response_text: str | None = None) -> None:
        """Insert or overwrite an entry, evicting the LRU live entry at capacity.

        Expired entries are purged before any live entry is sacrificed.
        """
        now_ns = self._clock.now_ns()
        entry = CacheEntry(
            key=key,
            outcome=outcome,
            response_text=response_text,
            inserted_at_ns=now_ns,
            last_access_ns=now_ns,
        )
        with self._lock:
            if key in self._entries:
                del self._entries[key]
            elif len(self._entries) >= self.config.capacity:
                self._purge_expired(now_ns)
                while len(self._entries) >= self.config.capacity:
                    self._entries.popitem(last=False)
                    self._evictions += 1
            self._entries[key] = entry

    def _purge_expired(self, now_ns: int) -> None:
        stale = [k for k, e in self._entries.items() if self._expired(e, now_ns)]
        for k in stale:
            del self._entries[k]
        self._expirations += len(stale)

    def stats(self) -> CacheStats:
        with self._lock:
            return CacheStats(
                hits=self._hits,
                misses=self._misses,
                evictions=self._evictions,
                expirations=self._expirations,
                size=len(self._entries),
            )

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
