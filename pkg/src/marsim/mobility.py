"""Reynolds-style mobility: steerings, weighted combination, locomotion, traces.

Vectors are numpy float arrays of shape (3,), meters or meters/second.
Steerings return an absolute desired velocity plus a weight; the engine takes
the weighted mean over the active ones and hands it to the locomotion layer,
which clamps speed and keeps the node inside the mission box.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .kernel import RandomStream

KMH = 1000.0 / 3600.0
UAV_SPEED = 50 * KMH  # 13.889 m/s

LOOKAHEAD = 3
ARRIVAL_RADIUS = 5.0
_PLUS_X = np.array([1.0, 0.0, 0.0])


def vec(x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def norm(v) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def unit(v) -> np.ndarray:
    n = norm(v)
    if n == 0.0:
        return np.zeros(3)
    return np.asarray(v, dtype=float) / n


@dataclass(frozen=True)
class MissionArea:
    extents: tuple = (500.0, 500.0, 250.0)

    def __post_init__(self):
        if len(self.extents) != 3 or min(self.extents) <= 0:
            raise ValueError(f"mission area extents must be 3 positive lengths, got {self.extents}")

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.extents, dtype=float)

    def contains(self, p, slack: float = 0.0) -> bool:
        return all(-slack <= p[i] <= self.extents[i] + slack for i in range(3))

    def clamp(self, p) -> np.ndarray:
        return np.clip(p, 0.0, self.upper)

    def random_point(self, stream: RandomStream) -> np.ndarray:
        return np.array([stream.uniform(0.0, e) for e in self.extents])


@dataclass
class SteeringOutput:
    desired: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("steering weight must be non-negative")


def combine_steerings(outputs) -> np.ndarray:
    """Weighted mean of the desired velocities of all outputs."""
    total = 0.0
    acc = np.zeros(3)
    for out in outputs:
        if out.weight > 0:
            acc += out.weight * np.asarray(out.desired, dtype=float)
            total += out.weight
    if total == 0.0:
        raise ValueError("no active steering (all weights are zero)")
    return acc / total


class WaypointQueue:
    """Look-ahead list of random targets inside the mission area."""

    def __init__(self, area: MissionArea, stream: RandomStream,
                 length: int = LOOKAHEAD, arrival_radius: float = ARRIVAL_RADIUS,
                 waypoints=None):
        self.area = area
        self.stream = stream
        self.length = length
        self.arrival_radius = arrival_radius
        self.waypoints = [np.asarray(w, dtype=float) for w in (waypoints or [])]
        for w in self.waypoints:
            if not area.contains(w):
                raise ValueError(f"waypoint {w} outside mission area")
        self.refill()

    def refill(self) -> None:
        while len(self.waypoints) < self.length:
            self.waypoints.append(self.area.random_point(self.stream))

    @property
    def head(self) -> np.ndarray:
        return self.waypoints[0]

    def advance(self) -> None:
        self.waypoints.pop(0)
        self.refill()

    def __len__(self):
        return len(self.waypoints)


def controlled_waypoint_step(pos, queue: WaypointQueue, speed: float, weight: float = 1.0) -> SteeringOutput:
    pos = np.asarray(pos, dtype=float)
    if norm(queue.head - pos) <= queue.arrival_radius:
        queue.advance()
    return SteeringOutput(speed * unit(queue.head - pos), weight)


def collision_avoidance_step(pos, neighbor_positions, min_distance: float,
                             v_max: float = 1.0, weight: float = 10.0) -> SteeringOutput:
    """Linear potential-field repulsion from every neighbor closer than min_distance.

    Outside the threshold the output is inert (weight 0) so that it does not
    dilute the other steerings.
    """
    if min_distance <= 0:
        raise ValueError("min_distance must be positive")
    pos = np.asarray(pos, dtype=float)
    force = np.zeros(3)
    triggered = False
    for nbr in neighbor_positions:
        diff = pos - np.asarray(nbr, dtype=float)
        d = norm(diff)
        if d >= min_distance:
            continue
        triggered = True
        if d == 0.0:
            force += _PLUS_X
        else:
            force += (diff / d) * ((min_distance - d) / min_distance)
    if not triggered:
        return SteeringOutput(np.zeros(3), 0.0)
    return SteeringOutput(force * v_max, weight)


def cohesion_step(pos, neighbor_positions, v_max: float, weight: float = 1.0) -> SteeringOutput:
    """Attraction toward the centroid of the neighbors."""
    if len(neighbor_positions) == 0:
        return SteeringOutput(np.zeros(3), 0.0)
    centroid = np.mean(np.asarray(neighbor_positions, dtype=float), axis=0)
    return SteeringOutput(v_max * unit(centroid - np.asarray(pos, dtype=float)), weight)


def alignment_step(neighbor_steerings, weight: float = 1.0) -> SteeringOutput:
    """Match the mean steering vector of the neighbors."""
    if len(neighbor_steerings) == 0:
        return SteeringOutput(np.zeros(3), 0.0)
    return SteeringOutput(np.mean(np.asarray(neighbor_steerings, dtype=float), axis=0), weight)


def locomotion_apply(pos, desired_velocity, dt: float, v_max: float, area: MissionArea) -> np.ndarray:
    if dt <= 0 or v_max <= 0:
        raise ValueError("dt and v_max must be positive")
    v = np.asarray(desired_velocity, dtype=float)
    speed = norm(v)
    if speed > v_max:
        v = v * (v_max / speed)
    return area.clamp(np.asarray(pos, dtype=float) + v * dt)


@dataclass
class SteeringConfig:
    waypoint_weight: float = 1.0
    avoidance_weight: float = 10.0
    min_distance: float = 30.0
    avoidance: bool = True
    cohesion_weight: float = 0.0
    alignment_weight: float = 0.0
    neighbor_radius: float = 100.0


@dataclass
class Agent:
    node: int
    pos: np.ndarray
    queue: WaypointQueue | None = None
    steering: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def waypoints(self):
        return [] if self.queue is None else list(self.queue.waypoints)


class SwarmMobility:
    """Steers a set of agents with synchronous ticks of length dt.

    All steerings of a tick are evaluated on the positions at the start of the
    tick, then every agent moves.
    """

    def __init__(self, agents, area: MissionArea, speed: float = UAV_SPEED,
                 steering: SteeringConfig | None = None):
        self.agents = list(agents)
        self.area = area
        self.speed = speed
        self.cfg = steering or SteeringConfig()

    @classmethod
    def random(cls, count: int, area: MissionArea, stream: RandomStream, first_id: int = 0, **kw):
        agents = []
        for i in range(count):
            pos = area.random_point(stream)
            agents.append(Agent(first_id + i, pos, WaypointQueue(area, stream)))
        return cls(agents, area, **kw)

    def positions(self) -> dict:
        return {a.node: a.pos for a in self.agents}

    def desired_velocity(self, agent: Agent, others) -> np.ndarray:
        cfg = self.cfg
        outs = [controlled_waypoint_step(agent.pos, agent.queue, self.speed, cfg.waypoint_weight)]
        if cfg.avoidance:
            outs.append(collision_avoidance_step(agent.pos, [o.pos for o in others],
                                                 cfg.min_distance, self.speed, cfg.avoidance_weight))
        if cfg.cohesion_weight > 0 or cfg.alignment_weight > 0:
            near = [o for o in others if norm(o.pos - agent.pos) <= cfg.neighbor_radius]
            if cfg.cohesion_weight > 0:
                outs.append(cohesion_step(agent.pos, [o.pos for o in near], self.speed, cfg.cohesion_weight))
            if cfg.alignment_weight > 0:
                outs.append(alignment_step([o.steering for o in near], cfg.alignment_weight))
        return combine_steerings(outs)

    def tick(self, dt: float) -> None:
        desired = []
        for agent in self.agents:
            others = [o for o in self.agents if o is not agent]
            desired.append(self.desired_velocity(agent, others))
        for agent, v in zip(self.agents, desired):
            agent.steering = v
            agent.pos = locomotion_apply(agent.pos, v, dt, self.speed, self.area)


# -- traces ---------------------------------------------------------------

class TraceError(ValueError):
    pass


def load_trace(source) -> dict:
    """Parse ``t,node_id,x,y,z`` lines into {node: (times, positions)}.

    ``source`` is a path or an open text stream. Lines starting with ``#``
    and blank lines are skipped.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load_trace(fh)
    samples: dict[int, list] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise TraceError(f"line {lineno}: expected 5 fields, got {len(parts)}")
        try:
            t = float(parts[0])
            node = int(parts[1])
            xyz = [float(p) for p in parts[2:]]
        except ValueError as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in [t, *xyz]):
            raise TraceError(f"line {lineno}: non-finite value")
        samples.setdefault(node, []).append((lineno, t, xyz))
    if not samples:
        raise TraceError("no samples")
    trace = {}
    for node, rows in samples.items():
        for (_, t0, _), (ln, t1, _) in zip(rows, rows[1:]):
            if t1 <= t0:
                raise TraceError(f"line {ln}: timestamps for node {node} not increasing")
        trace[node] = (np.array([r[1] for r in rows]), np.array([r[2] for r in rows]))
    return trace


def parse_trace(text: str) -> dict:
    return load_trace(io.StringIO(text))


def write_trace(fh, samples) -> None:
    """Write (t, node, pos) samples; repr floats so replay is exact."""
    fh.write("# t,node_id,x,y,z\n")
    for t, node, p in samples:
        fh.write(f"{t!r},{node},{float(p[0])!r},{float(p[1])!r},{float(p[2])!r}\n")


def trace_position(trace: dict, node: int, t: float) -> np.ndarray:
    times, pos = trace[node]
    if t <= times[0]:
        return pos[0].copy()
    if t >= times[-1]:
        return pos[-1].copy()
    k = int(np.searchsorted(times, t, side="right"))
    t0, t1 = times[k - 1], times[k]
    if t == t0:
        return pos[k - 1].copy()
    f = (t - t0) / (t1 - t0)
    return pos[k - 1] + f * (pos[k] - pos[k - 1])


class TraceMobility:
    """Replays a loaded trace; positions are interpolated at every tick."""

    def __init__(self, trace: dict, area: MissionArea):
        self.trace = trace
        self.area = area
        self.t = 0.0
        self._ticks = 0
        self.agents = [Agent(n, trace_position(trace, n, 0.0)) for n in sorted(trace)]

    def positions(self) -> dict:
        return {a.node: a.pos for a in self.agents}

    def tick(self, dt: float) -> None:
        self._ticks += 1
        self.t = self._ticks * dt
        for a in self.agents:
            new = trace_position(self.trace, a.node, self.t)
            a.steering = (new - a.pos) / dt
            a.pos = new
