"""Routing base classes, link maps and predictive geo-based path search."""

from __future__ import annotations

from collections import deque

import numpy as np

from ..channel import ChannelModel, max_distance
from ..location import LocationTable, UnknownNode, predicted_distance


def link(a: int, b: int) -> tuple:
    if a == b:
        raise ValueError(f"self-link on node {a}")
    return (a, b) if a < b else (b, a)


class LinkMap:
    """Undirected links with the time each was last confirmed."""

    def __init__(self, links=(), now: float = 0.0):
        self._links: dict[tuple, float] = {}
        for a, b in links:
            self.add(a, b, now)

    def add(self, a: int, b: int, now: float = 0.0) -> None:
        self._links[link(a, b)] = now

    def discard(self, a: int, b: int) -> None:
        self._links.pop(link(a, b), None)

    def confirmed(self, a: int, b: int) -> float:
        return self._links[link(a, b)]

    def __contains__(self, pair) -> bool:
        a, b = pair
        return a != b and link(a, b) in self._links

    def __iter__(self):
        return iter(sorted(self._links))

    def __len__(self):
        return len(self._links)


def hop_distances(destination: int, links) -> dict:
    """BFS hop count from every reachable node to ``destination``."""
    adj: dict[int, list] = {}
    for a, b in links:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    dist = {destination: 0}
    frontier = deque([destination])
    while frontier:
        u = frontier.popleft()
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                frontier.append(v)
    return dist


def first_hop(source: int, destination: int, links) -> int | None:
    """First hop of a minimum-hop path (unit weights); lowest id wins ties."""
    if source == destination:
        raise ValueError("destination equals source")
    links = list(links)
    dist = hop_distances(destination, links)
    if source not in dist:
        return None
    want = dist[source] - 1
    best = None
    for a, b in links:
        if a == source:
            other = b
        elif b == source:
            other = a
        else:
            continue
        if dist.get(other) == want and (best is None or other < best):
            best = other
    return best


def prune_links(link_map, table: LocationTable, d_max: float, horizon: float) -> list:
    """Links whose endpoints are predicted closer than d_max after ``horizon``."""
    kept = []
    for a, b in link_map:
        try:
            d = predicted_distance(table, a, b, horizon)
        except UnknownNode:
            continue
        if d < d_max:
            kept.append((a, b))
    return kept


def find_best_neighbor(source: int, destination: int, link_map, channel_model: ChannelModel,
                       table: LocationTable, horizon: float) -> int | None:
    """Predictive geo-based Dijkstra: drop links that will not survive, then route."""
    d_max = max_distance(channel_model)
    return first_hop(source, destination, prune_links(link_map, table, d_max, horizon))


class RoutingProtocol:
    """Per-node protocol instance.

    ``net`` supplies the clock (``net.now``), the kernel, ``net.broadcast``
    and the node's location table.
    """

    name = "none"

    def __init__(self, node: int, net):
        self.node = node
        self.net = net

    def start(self) -> None:
        pass

    def on_mobility_tick(self, tick: int) -> None:
        pass

    def on_packet(self, pkt, sender: int) -> None:
        pass

    def next_hop(self, destination: int) -> int | None:
        return None

    def send(self, pkt) -> None:
        self.net.broadcast(self.node, pkt)


class MobilityAwareRouting(RoutingProtocol):
    """Base for protocols that use current and predicted mobility data."""

    def __init__(self, node: int, net, channel_model: ChannelModel, horizon: float):
        super().__init__(node, net)
        self._init_mobility(channel_model, horizon)

    def _init_mobility(self, channel_model: ChannelModel, horizon: float) -> None:
        # channel_model is the node's own assumption, used only for d_max
        self.channel_model = channel_model
        self.d_max = max_distance(channel_model)
        self.horizon = horizon

    @property
    def table(self) -> LocationTable:
        return self.net.tables[self.node]

    def current_position(self, node: int | None = None) -> np.ndarray:
        return self.table.newest(self.node if node is None else node).position

    def predicted_position(self, node: int | None = None) -> np.ndarray:
        return self.table.predict(self.node if node is None else node, self.horizon)

    def predicted_distance(self, a: int, b: int) -> float:
        return predicted_distance(self.table, a, b, self.horizon)
