"""One simulation run: agents, base station, protocol instances and CBR traffic."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel as K
from .channel import Medium, Transmission
from .config import ScenarioConfig
from .location import LocationTable, MobilityEntry, apply_gnss_noise
from .mobility import MissionArea, SteeringConfig, SwarmMobility, TraceMobility
from .routing.batman import Batman, BatMobile
from .routing.olsr import MAOLSR, OLSR
from .routing.packets import TYPE_NAMES, DataPacket


@dataclass
class RunStats:
    sent: int = 0
    delivered: int = 0
    originated: int = 0
    control_bytes: int = 0
    no_route: int = 0
    channel_losses: int = 0
    ttl_expired: int = 0
    latencies: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.delivered <= self.sent:
            raise ValueError("delivered must lie in [0, sent]")


def make_protocol(cfg: ScenarioConfig, node: int, net):
    name = cfg.protocol
    if name == "OLSR":
        return OLSR(node, net, cfg.hello_interval, cfg.tc_interval, topology_hold=cfg.topology_hold)
    # the agents assume the same mean path loss as the simulated channel
    assumed = cfg.channel_model("friis")
    if name == "MA-OLSR":
        return MAOLSR(node, net, assumed, cfg.horizon, cfg.dt_update, cfg.telemetry_every,
                      hello_interval=cfg.hello_interval, tc_interval=cfg.tc_interval,
                      topology_hold=cfg.topology_hold)
    if name == "BATMAN":
        return Batman(node, net, cfg.ogm_interval, cfg.window)
    if name == "BATMOBILE":
        return BatMobile(node, net, assumed, cfg.horizon, ogm_interval=cfg.ogm_interval,
                         window=cfg.window)
    raise ValueError(f"unknown protocol {name}")


class Network:
    """Wires kernel, mobility, medium and per-node protocol state for one run.

    Nodes 0..agents-1 are the UAVs; node ``agents`` is the static base station.
    """

    def __init__(self, cfg: ScenarioConfig, seed: int | None = None, trace: dict | None = None,
                 dump=None, source: int | None = None, mobility=None):
        cfg.validate()
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.kernel = K.Kernel()
        self.streams = {sid: K.RandomStream(self.seed, sid)
                        for sid in (K.MOBILITY, K.CHANNEL, K.TRAFFIC, K.JITTER, K.GNSS)}
        self.area = MissionArea(cfg.area)
        if mobility is not None:
            self.mobility = mobility
        elif trace is not None:
            self.mobility = TraceMobility(trace, self.area)
        else:
            steer = SteeringConfig(cfg.waypoint_weight, cfg.avoidance_weight, cfg.min_distance,
                                   avoidance=cfg.avoidance_weight > 0)
            self.mobility = SwarmMobility.random(cfg.agents, self.area, self.streams[K.MOBILITY],
                                                 speed=cfg.speed, steering=steer)
        self.agents = len(self.mobility.agents)
        self.sink = self.agents
        n = self.agents + 1
        self.positions = np.zeros((n, 3))
        self._sync_positions()
        self.positions[self.sink] = cfg.base_station
        self.tables = [LocationTable(cfg.nh) for _ in range(n)]
        self.medium = Medium(cfg.channel_model(), self.streams[K.CHANNEL], cfg.mac_bitrate)
        self.stats = RunStats()
        self.dump = dump
        self.tick = 0
        self.protocols = [make_protocol(cfg, i, self) for i in range(n)]
        if source is None:
            source = self.streams[K.TRAFFIC].integers(0, self.agents)
        self.source = source
        self._data_seq = 0

    @property
    def now(self) -> float:
        return self.kernel.now

    def phase(self, interval: float) -> float:
        jitter = self.cfg.jitter
        if jitter <= 0:
            return interval
        return interval + self.streams[K.JITTER].uniform(0.0, min(jitter, interval))

    def _sync_positions(self) -> None:
        for i, agent in enumerate(self.mobility.agents):
            self.positions[i] = agent.pos

    def _record_own(self) -> None:
        t = self.tick * self.cfg.dt_update
        gnss = self.streams[K.GNSS]
        e_max = self.cfg.e_max
        for i, agent in enumerate(self.mobility.agents):
            measured = apply_gnss_noise(agent.pos, e_max, gnss)
            self.tables[i].record_update(MobilityEntry(i, t, measured, agent.steering.copy(),
                                                       agent.waypoints))
        self.tables[self.sink].record_update(
            MobilityEntry(self.sink, t, self.positions[self.sink].copy()))

    def on_mobility_tick(self) -> None:
        self.tick += 1
        self.mobility.tick(self.cfg.dt_update)
        self._sync_positions()
        self._record_own()
        for proto in self.protocols:
            proto.on_mobility_tick(self.tick)

    # medium ------------------------------------------------------------------

    def broadcast(self, sender: int, pkt) -> None:
        self.stats.control_bytes += pkt.size
        tx = Transmission(sender, pkt.size, self.kernel.now, self.medium.bitrate)
        post = self.kernel.post
        for receiver, t in self.medium.broadcast(tx, self.positions):
            post(t, self._deliver, receiver, sender, pkt)

    def _deliver(self, receiver: int, sender: int, pkt) -> None:
        if self.dump is not None:
            self._dump(pkt, sender, receiver)
        self.protocols[receiver].on_packet(pkt, sender)

    def _dump(self, pkt, sender: int, receiver: int) -> None:
        self.dump.write(f"{self.kernel.now!r},{TYPE_NAMES[pkt.kind]},{pkt.origin},"
                        f"{sender},{receiver},{pkt.sequence}\n")

    # traffic -----------------------------------------------------------------

    def originate(self) -> None:
        now = self.kernel.now
        self._data_seq += 1
        counted = now >= self.cfg.warmup
        pkt = DataPacket(self.source, self.sink, self._data_seq, now, counted=counted)
        self.stats.originated += 1
        if counted:
            self.stats.sent += 1
        self.forward(self.source, pkt, self.source)

    def forward(self, node: int, pkt: DataPacket, sender: int) -> None:
        if self.dump is not None and node != sender:
            self._dump(pkt, sender, node)
        stats = self.stats
        if node == pkt.destination:
            if pkt.counted:
                stats.delivered += 1
                if self.cfg.record_latency:
                    stats.latencies.append(self.kernel.now - pkt.created)
            return
        hop = self.protocols[node].next_hop(pkt.destination)
        if hop is None:
            stats.no_route += 1
            return
        if pkt.ttl <= 0:
            stats.ttl_expired += 1
            return
        pkt.ttl -= 1
        tx = Transmission(node, pkt.size, self.kernel.now, self.medium.bitrate)
        t = self.medium.unicast(tx, hop, self.positions)
        if t is None:
            stats.channel_losses += 1
            return
        self.kernel.post(t, self.forward, hop, pkt, node)

    # driver ------------------------------------------------------------------

    def start(self) -> None:
        cfg = self.cfg
        self._record_own()
        self.kernel.every(cfg.dt_update, self.on_mobility_tick)
        for proto in self.protocols:
            proto.start()
        self.kernel.every(cfg.cbr_interval, self.originate)

    def run(self) -> RunStats:
        self.start()
        self.kernel.run_until(self.cfg.duration)
        return self.stats


def run_scenario(cfg: ScenarioConfig, seed: int | None = None, **kw) -> RunStats:
    return Network(cfg, seed, **kw).run()


__all__ = ["Network", "RunStats", "run_scenario", "make_protocol"]
