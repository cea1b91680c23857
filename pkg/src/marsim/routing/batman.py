"""B.A.T.M.A.N.-lite and the stigmergic B.A.T.Mobile variant.

Both keep, per originator, a sliding window of the newest W sequence numbers
and remember which neighbor delivered which of them.  BATMAN ranks neighbors
by how many sequence numbers they delivered; B.A.T.Mobile stores the path
score carried by each packet instead and ranks by the window mean, where
missing sequence numbers count as zero.
"""

from __future__ import annotations

import math

from .base import MobilityAwareRouting, RoutingProtocol
from .packets import OGM, PATHSCORE, OriginatorMessage, PathScorePacket

WINDOW = 64


def _dist(a, b) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def path_score_update(s_in: float, d_now: float, d_pred: float, d_max: float,
                      w_distance: float = 0.5, w_prediction: float = 0.5) -> float:
    """Multiply the incoming score by the quality of the last hop.

    The hop factor mixes the current and the predicted forwarder distance,
    each mapped linearly from 1 (co-located) to 0 (at d_max), clamped to [0, 1].
    """
    if not 0.0 <= s_in <= 1.0:
        raise ValueError(f"score {s_in} outside [0, 1]")
    if d_max <= 0:
        raise ValueError("d_max must be positive")
    factor = w_distance * (1.0 - d_now / d_max) + w_prediction * (1.0 - d_pred / d_max)
    factor = min(1.0, max(0.0, factor))
    return s_in * factor


class OriginatorWindow:
    """Sequence-number window for one originator, split by delivering neighbor."""

    def __init__(self, size: int = WINDOW):
        if size < 1:
            raise ValueError("window size must be >= 1")
        self.size = size
        self.newest: int | None = None
        self.via: dict[int, dict] = {}
        self._sums: dict[int, float] = {}

    def _lowest(self) -> int:
        return self.newest - self.size + 1

    def seen(self, neighbor: int, seq: int) -> bool:
        return seq in self.via.get(neighbor, ())

    def seen_any(self, seq: int) -> bool:
        return any(seq in entries for entries in self.via.values())

    def record(self, neighbor: int, seq: int, score: float = 1.0) -> bool:
        """Store ``seq`` as delivered by ``neighbor``; False for duplicates and stale numbers."""
        if self.newest is not None and seq < self._lowest():
            return False
        entries = self.via.get(neighbor)
        if entries is None:
            entries = self.via[neighbor] = {}
        elif seq in entries:
            return False
        if self.newest is None or seq > self.newest:
            old_low = None if self.newest is None else self._lowest()
            self.newest = seq
            if old_low is not None:
                self._evict(old_low)
        entries[seq] = score
        self._sums[neighbor] = math.fsum(entries.values())
        return True

    def _evict(self, old_low: int) -> None:
        low = self._lowest()
        gap = low - old_low
        for nbr, entries in self.via.items():
            if not entries:
                continue
            if gap <= len(entries):
                gone = [s for s in range(old_low, low) if s in entries]
            else:
                gone = [s for s in entries if s < low]
            if gone:
                for s in gone:
                    del entries[s]
                self._sums[nbr] = math.fsum(entries.values())

    def count(self, neighbor: int) -> int:
        return len(self.via.get(neighbor, ()))

    def mean_score(self, neighbor: int) -> float:
        return self._sums.get(neighbor, 0.0) / self.size

    def best(self, by_score: bool = False) -> int | None:
        best, best_value = None, 0.0
        for nbr in sorted(self.via):
            value = self._sums[nbr] if by_score else len(self.via[nbr])
            if value > best_value:
                best, best_value = nbr, value
        return best


def batman_select_next_hop(windows: dict, destination: int) -> int | None:
    window = windows.get(destination)
    return None if window is None else window.best()


class _WindowedFlooding(RoutingProtocol):
    by_score = False

    def __init__(self, node: int, net, ogm_interval: float = 0.5, window: int = WINDOW):
        RoutingProtocol.__init__(self, node, net)
        self.ogm_interval = ogm_interval
        self.window_size = window
        self.windows: dict[int, OriginatorWindow] = {}
        self.sequence = 0
        self._forwarded: dict[int, set] = {}
        self._best: dict[int, int | None] = {}

    def start(self) -> None:
        self.net.kernel.every(self.ogm_interval, self.originate, start=self.net.phase(self.ogm_interval))

    def originate(self) -> None:
        raise NotImplementedError

    def window(self, origin: int) -> OriginatorWindow:
        w = self.windows.get(origin)
        if w is None:
            w = self.windows[origin] = OriginatorWindow(self.window_size)
        return w

    def _accept(self, origin: int, seq: int, sender: int, score: float) -> bool:
        """Record the packet; True if it must be rebroadcast."""
        w = self.window(origin)
        if not w.record(sender, seq, score):
            return False
        best = self._best[origin] = w.best(self.by_score)
        if best != sender:
            return False
        done = self._forwarded.setdefault(origin, set())
        if seq in done:
            return False
        done.add(seq)
        if len(done) > 2 * self.window_size:
            low = w.newest - self.window_size
            self._forwarded[origin] = {s for s in done if s >= low}
        return True

    def next_hop(self, destination: int) -> int | None:
        return self._best.get(destination)


class Batman(_WindowedFlooding):
    name = "batman"

    def originate(self) -> None:
        self.sequence += 1
        self.send(OriginatorMessage(self.node, self.sequence))

    def on_packet(self, pkt, sender: int) -> None:
        if pkt.kind != OGM or pkt.origin == self.node:
            return
        # Only the first copy of a sequence number is credited.  Later copies
        # are mostly echoes of our own rebroadcast and, without a hop penalty,
        # would tie with the real path and cause loops.
        w = self.windows.get(pkt.origin)
        if w is not None and w.seen_any(pkt.sequence):
            return
        if self._accept(pkt.origin, pkt.sequence, sender, 1.0):
            self.send(pkt)


class BatMobile(_WindowedFlooding, MobilityAwareRouting):
    name = "batmobile"
    by_score = True

    def __init__(self, node: int, net, channel_model, horizon: float,
                 w_distance: float = 0.5, w_prediction: float = 0.5, **kw):
        _WindowedFlooding.__init__(self, node, net, **kw)
        self._init_mobility(channel_model, horizon)
        self.w_distance = w_distance
        self.w_prediction = w_prediction

    def originate(self) -> None:
        self.sequence += 1
        self.send(PathScorePacket(self.node, self.sequence, self.current_position(),
                                  self.predicted_position(), 1.0, 0))

    def on_packet(self, pkt, sender: int) -> None:
        if pkt.kind != PATHSCORE or pkt.origin == self.node:
            return
        w = self.windows.get(pkt.origin)
        if w is not None and w.seen(sender, pkt.sequence):
            return
        here = self.current_position()
        ahead = self.predicted_position()
        score = path_score_update(pkt.score, _dist(here, pkt.forwarder_position),
                                  _dist(ahead, pkt.forwarder_predicted_position), self.d_max,
                                  self.w_distance, self.w_prediction)
        if self._accept(pkt.origin, pkt.sequence, sender, score):
            self.send(PathScorePacket(pkt.origin, pkt.sequence, here, ahead, score,
                                      pkt.hop_count + 1))
