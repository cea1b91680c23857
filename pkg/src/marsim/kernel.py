"""Discrete-event core: virtual clock, event queue and per-concern random streams.

Events run in (time, insertion sequence) order, so two runs fed the same
schedule and the same seeds execute identically.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np

# stream ids, one per concern
MOBILITY = 0
CHANNEL = 1
TRAFFIC = 2
JITTER = 3
GNSS = 4


class EventHandle:
    __slots__ = ("time", "cancelled")

    def __init__(self, time: float):
        self.time = time
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True


class Kernel:
    """Event scheduler with a monotone clock.

    Callbacks are plain callables; ``schedule`` returns a handle that can be
    cancelled before the event fires.
    """

    def __init__(self) -> None:
        self.now = 0.0
        self._queue: list = []
        self._seq = itertools.count()
        self.executed = 0

    def schedule(self, at: float, callback, *args) -> EventHandle:
        if at < self.now:
            raise ValueError(f"cannot schedule at t={at!r} before now={self.now!r}")
        handle = EventHandle(at)
        heapq.heappush(self._queue, (at, next(self._seq), handle, callback, args))
        return handle

    def schedule_in(self, delay: float, callback, *args) -> EventHandle:
        return self.schedule(self.now + delay, callback, *args)

    def post(self, at: float, callback, *args) -> None:
        # Non-cancellable fast path for the bulk of packet deliveries.
        heapq.heappush(self._queue, (at, next(self._seq), None, callback, args))

    def every(self, period: float, callback, start: float | None = None) -> None:
        """Fire ``callback()`` at start, start+period, ... (k*period, no drift)."""
        if period <= 0:
            raise ValueError("period must be positive")
        first = period if start is None else start
        origin = first
        counter = itertools.count(1)

        def tick():
            callback()
            self.post(origin + next(counter) * period, tick)

        self.schedule(first, tick)

    def pending(self) -> int:
        return len(self._queue)

    def run_until(self, t_end: float) -> int:
        if t_end < self.now:
            raise ValueError(f"t_end={t_end!r} is before now={self.now!r}")
        queue = self._queue
        pop = heapq.heappop
        count = 0
        while queue and queue[0][0] <= t_end:
            at, _, handle, callback, args = pop(queue)
            if handle is not None and handle.cancelled:
                continue
            self.now = at
            callback(*args)
            count += 1
        self.now = t_end
        self.executed += count
        return count


class RandomStream:
    """Reproducible stream keyed by (seed, stream_id).

    Backed by PCG64 seeded through ``SeedSequence(seed, spawn_key=(stream_id,))``,
    which is platform independent and gives unrelated sequences per id.
    """

    def __init__(self, seed: int, stream_id: int):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=(self.stream_id,))
        self.rng = np.random.Generator(np.random.PCG64(ss))

    def uniform(self, lo: float, hi: float) -> float:
        if lo > hi:
            raise ValueError(f"uniform: lo={lo} > hi={hi}")
        if lo == hi:
            return float(lo)
        value = lo + (hi - lo) * self.rng.random()
        # rounding can land exactly on hi for wide intervals
        return value if value < hi else float(np.nextafter(hi, lo))

    def random(self) -> float:
        return self.rng.random()

    def integers(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        return int(self.rng.integers(lo, hi))


def uniform(stream: RandomStream, lo: float, hi: float) -> float:
    return stream.uniform(lo, hi)
