"""OLSR-lite and its mobility-aware variant.

No MPR selection: every node forwards each TC flood once.  The link map is
the node's own HELLO-sensed links plus the links advertised in the latest
unexpired TC of every other node.
"""

from __future__ import annotations

import math

from .base import MobilityAwareRouting, RoutingProtocol, find_best_neighbor, first_hop, link
from .packets import (HELLO, MOBILITY, TC, Hello, TopologyControl, entry_from_mobility_packet,
                      mobility_packet_from_entry)


class OLSR(RoutingProtocol):
    name = "olsr"

    def __init__(self, node: int, net, hello_interval: float = 0.5, tc_interval: float = 1.0,
                 neighbor_hold: float | None = None, topology_hold: float = 3.0):
        RoutingProtocol.__init__(self, node, net)
        self.hello_interval = hello_interval
        self.tc_interval = tc_interval
        self.neighbor_hold = 2 * hello_interval if neighbor_hold is None else neighbor_hold
        self.topology_hold = topology_hold
        self.heard: dict[int, float] = {}
        self.topology: dict[int, tuple] = {}  # origin -> (received at, links)
        self.tc_seen: dict[int, int] = {}
        self.hello_seq = 0
        self.tc_seq = 0
        self.version = 0
        self._routes: dict = {}
        self._routes_key = None
        self._routes_until = -math.inf

    def start(self) -> None:
        k = self.net.kernel
        k.every(self.hello_interval, self.send_hello, start=self.net.phase(self.hello_interval))
        k.every(self.tc_interval, self.send_tc, start=self.net.phase(self.tc_interval))

    # neighbor sensing / topology ------------------------------------------

    def neighbors(self) -> list:
        now = self.net.now
        hold = self.neighbor_hold
        return sorted(n for n, t in self.heard.items() if now - t <= hold)

    def send_hello(self) -> None:
        self.hello_seq += 1
        self.send(Hello(self.node, self.hello_seq, tuple(self.neighbors())))

    def send_tc(self) -> None:
        self.tc_seq += 1
        links = tuple(link(self.node, n) for n in self.neighbors())
        self.send(TopologyControl(self.node, self.tc_seq, links))

    def on_packet(self, pkt, sender: int) -> None:
        kind = pkt.kind
        if kind == HELLO:
            last = self.heard.get(sender)
            if last is None or self.net.now - last > self.neighbor_hold:
                self.version += 1
            self.heard[sender] = self.net.now
        elif kind == TC:
            origin = pkt.origin
            if origin == self.node or pkt.sequence <= self.tc_seen.get(origin, -1):
                return
            self.tc_seen[origin] = pkt.sequence
            self.topology[origin] = (self.net.now, pkt.links)
            self.version += 1
            self.send(pkt)

    def link_map(self) -> list:
        """Current links as sorted (a, b) pairs, plus the time the set next changes."""
        links, _ = self._link_map()
        return links

    def _link_map(self):
        now = self.net.now
        me = self.node
        until = math.inf
        found = set()
        for n, t in self.heard.items():
            if now - t <= self.neighbor_hold:
                found.add(link(me, n))
                until = min(until, t + self.neighbor_hold)
        for origin, (t, links) in self.topology.items():
            if now - t > self.topology_hold:
                continue
            until = min(until, t + self.topology_hold)
            for a, b in links:
                if a != me and b != me:
                    found.add((a, b))
        return sorted(found), until

    # routing ---------------------------------------------------------------

    def _state_key(self):
        return self.version

    def next_hop(self, destination: int) -> int | None:
        now = self.net.now
        key = self._state_key()
        if key != self._routes_key or now > self._routes_until:
            self._links, self._routes_until = self._link_map()
            self._routes_key = key
            self._routes = {}
        try:
            return self._routes[destination]
        except KeyError:
            hop = self._routes[destination] = self.compute_next_hop(destination, self._links)
            return hop

    def compute_next_hop(self, destination: int, links) -> int | None:
        return first_hop(self.node, destination, links)


class MAOLSR(OLSR, MobilityAwareRouting):
    """OLSR whose forwarder is chosen over links predicted to survive the horizon.

    Mobility updates are flooded every ``telemetry_every`` mobility ticks; when
    the pruned graph has no path the plain OLSR next hop is used.
    """

    name = "ma-olsr"

    def __init__(self, node: int, net, channel_model, horizon: float, dt_update: float = 0.25,
                 telemetry_every: int = 1, **olsr_kw):
        OLSR.__init__(self, node, net, **olsr_kw)
        self._init_mobility(channel_model, horizon)
        self.dt_update = dt_update
        self.telemetry_every = telemetry_every
        self.mob_seen: dict[int, int] = {}
        # route recomputations that found no predicted path
        self.fallbacks = 0

    def on_mobility_tick(self, tick: int) -> None:
        if tick % self.telemetry_every == 0:
            own = self.table.newest(self.node)
            self.mob_seen[self.node] = tick
            self.send(mobility_packet_from_entry(own, tick))

    def on_packet(self, pkt, sender: int) -> None:
        if pkt.kind != MOBILITY:
            OLSR.on_packet(self, pkt, sender)
            return
        origin = pkt.origin
        if origin == self.node or pkt.sequence <= self.mob_seen.get(origin, -1):
            return
        self.mob_seen[origin] = pkt.sequence
        self.table.record_update(entry_from_mobility_packet(pkt, pkt.sequence * self.dt_update))
        self.send(pkt)

    def _state_key(self):
        return (self.version, self.table.version)

    def compute_next_hop(self, destination: int, links) -> int | None:
        hop = find_best_neighbor(self.node, destination, links, self.channel_model,
                                 self.table, self.horizon)
        if hop is None:
            self.fallbacks += 1
            hop = first_hop(self.node, destination, links)
        return hop
