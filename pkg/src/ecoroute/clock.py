"""Injectable clocks.

Everything time-dependent (cache TTL, generation durations, power sampling)
consumes a clock object instead of calling ``time`` directly, so tests and
mock-backend runs never have to sleep for real.
"""

from __future__ import annotations

import threading
import time
from typing import Callable, Protocol


class Clock(Protocol):
    def now_ns(self) -> int: ...

    def sleep(self, seconds: float) -> None: ...


class MonotonicClock:
    """Real monotonic clock backed by ``time``."""

    def now_ns(self) -> int:
        return time.monotonic_ns()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class SimulatedClock:
    """Manually advanced clock with periodic tick callbacks.

    ``sleep`` advances simulated time by the full requested amount while
    consuming only ``seconds * wall_scale`` of wall time (``wall_scale=0``
    makes sleeps instantaneous).  Callbacks registered with ``on_tick`` fire
    at their period boundaries whenever simulated time moves past them; the
    power sampler hooks in here, which is what makes mock-backend energy
    integration deterministic.
    """

    def __init__(self, start_ns: int = 0, wall_scale: float = 0.0) -> None:
        if wall_scale < 0:
            raise ValueError("wall_scale must be >= 0")
        self._now_ns = start_ns
        self._wall_scale = wall_scale
        self._lock = threading.RLock()
        # list of [next_fire_ns, period_ns, callback]
        self._ticks: list[list] = []

    def now_ns(self) -> int:
        with self._lock:
            return self._now_ns

    def on_tick(self, callback: Callable[[int], None], period_s: float) -> None:
        """Register ``callback(now_ns)`` to fire every ``period_s`` of simulated time."""
        if period_s <= 0:
            raise ValueError("period_s must be > 0")
        period_ns = int(period_s * 1e9)
        with self._lock:
            self._ticks.append([self._now_ns + period_ns, period_ns, callback])

    def advance(self, seconds: float) -> None:
        """Move simulated time forward, firing due tick callbacks in order."""
        if seconds < 0:
            raise ValueError("cannot advance backwards")
        with self._lock:
            target = self._now_ns + int(seconds * 1e9)
            while True:
                due = [t for t in self._ticks if t[0] <= target]
                if not due:
                    break
                nxt = min(due, key=lambda t: t[0])
                self._now_ns = nxt[0]
                nxt[2](self._now_ns)
                nxt[0] += nxt[1]
            self._now_ns = target

    def sleep(self, seconds: float) -> None:
        self.advance(seconds)
        if self._wall_scale > 0:
            time.sleep(seconds * self._wall_scale)
