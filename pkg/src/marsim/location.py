"""Location service and trajectory prediction.

Every node keeps a LocationTable with the last few mobility entries of each
node it has heard of (itself included).  Prediction walks the planned
waypoint path at the speed estimated from the history, or extrapolates the
steering vector when no waypoints are known.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .kernel import RandomStream


class UnknownNode(KeyError):
    pass


@dataclass
class MobilityEntry:
    node: int
    timestamp: float
    position: np.ndarray
    steering: np.ndarray = field(default_factory=lambda: np.zeros(3))
    waypoints: list = field(default_factory=list)


@dataclass(frozen=True)
class PredictionConfig:
    np_width: int = 15
    dt_update: float = 0.25
    e_max: float = 0.0

    def __post_init__(self):
        if self.np_width < 0 or self.dt_update <= 0 or self.e_max < 0:
            raise ValueError(f"invalid prediction config {self}")

    @property
    def horizon(self) -> float:
        return self.np_width * self.dt_update


class LocationTable:
    """node -> ring buffer of the newest ``history`` entries, oldest first."""

    def __init__(self, history: int = 5):
        if history < 1:
            raise ValueError("history size must be >= 1")
        self.history = history
        self.entries: dict[int, deque] = {}
        self.version = 0
        self._cache: dict = {}

    def record_update(self, entry: MobilityEntry) -> bool:
        """Append ``entry``; returns False if it was stale and discarded."""
        buf = self.entries.get(entry.node)
        if buf is None:
            buf = self.entries[entry.node] = deque(maxlen=self.history)
        elif buf and entry.timestamp <= buf[-1].timestamp:
            return False
        buf.append(entry)
        self.version += 1
        self._cache.pop(entry.node, None)
        return True

    def __contains__(self, node) -> bool:
        return node in self.entries

    def __getitem__(self, node) -> deque:
        try:
            return self.entries[node]
        except KeyError:
            raise UnknownNode(node) from None

    def newest(self, node) -> MobilityEntry:
        return self[node][-1]

    def predict(self, node, horizon: float) -> np.ndarray:
        hit = self._cache.get(node)
        if hit is not None and hit[0] == horizon:
            return hit[1]
        pos = predict_position(self[node], horizon)
        self._cache[node] = (horizon, pos)
        return pos


def record_update(table: LocationTable, entry: MobilityEntry) -> LocationTable:
    table.record_update(entry)
    return table


def apply_gnss_noise(true_pos, e_max: float, stream: RandomStream) -> np.ndarray:
    """Offset by a uniformly oriented vector of length uniform in [0, e_max]."""
    if e_max < 0:
        raise ValueError("e_max must be non-negative")
    true_pos = np.asarray(true_pos, dtype=float)
    if e_max == 0:
        return true_pos.copy()
    direction = stream.rng.standard_normal(3)
    n = math.sqrt(float(direction @ direction))
    r = stream.uniform(0.0, e_max)
    return true_pos + direction * (r / n)


def _dist(a, b) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def estimate_speed(history) -> float:
    if len(history) == 1:
        s = history[-1].steering
        return math.sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
    speeds = [_dist(b.position, a.position) / (b.timestamp - a.timestamp)
              for a, b in zip(history, list(history)[1:])]
    return sum(speeds) / len(speeds)


def walk_path(start, waypoints, distance: float) -> np.ndarray:
    """Point reached after ``distance`` meters along start -> waypoints[0] -> ...

    Stops at the final waypoint if the path is shorter than ``distance``.
    """
    here = np.asarray(start, dtype=float)
    left = distance
    for wp in waypoints:
        wp = np.asarray(wp, dtype=float)
        seg = _dist(here, wp)
        if seg >= left:
            if seg == 0.0:
                return here.copy()
            return here + (wp - here) * (left / seg)
        left -= seg
        here = wp
    return here.copy()


def predict_position(history, horizon: float) -> np.ndarray:
    if not history:
        raise UnknownNode("unknown node")
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    newest = history[-1]
    if horizon == 0:
        return np.array(newest.position, dtype=float)
    travel = estimate_speed(history) * horizon
    if newest.waypoints:
        return walk_path(newest.position, newest.waypoints, travel)
    s = newest.steering
    n = math.sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
    if n == 0.0:
        return np.array(newest.position, dtype=float)
    return np.asarray(newest.position, dtype=float) + np.asarray(s, dtype=float) * (travel / n)


def predicted_distance(table: LocationTable, a, b, horizon: float) -> float:
    if a == b:
        table[a]
        return 0.0
    return _dist(table.predict(a, horizon), table.predict(b, horizon))
