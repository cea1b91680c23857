"""Log-distance path loss, Nakagami-m fading and an abstract broadcast medium.

The medium has no contention or collisions: a frame reaches every receiver
whose reception draw succeeds, after airtime plus propagation delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import RandomStream

C = 2.998e8


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


@dataclass(frozen=True)
class ChannelModel:
    frequency: float = 2.4e9
    alpha: float = 2.75
    nakagami_m: float = 2.0
    reference_distance: float = 1.0
    tx_power: float = 20.0  # dBm, 100 mW
    sensitivity: float = -83.0  # dBm
    stochastic: bool = False

    def __post_init__(self):
        if self.alpha < 2 or self.nakagami_m < 1 or self.reference_distance <= 0:
            raise ValueError(f"invalid channel parameters: {self}")

    @property
    def pl0(self) -> float:
        return 20.0 * math.log10(4.0 * math.pi * self.reference_distance * self.frequency / C)

    @classmethod
    def friis(cls, **kw) -> ChannelModel:
        return cls(stochastic=False, **kw)

    @classmethod
    def nakagami(cls, **kw) -> ChannelModel:
        kw.setdefault("nakagami_m", 2.0)
        return cls(stochastic=True, **kw)


def path_loss_db(model: ChannelModel, d: float) -> float:
    if d <= 0:
        raise ValueError("distance must be positive")
    d = max(d, model.reference_distance)
    return model.pl0 + 10.0 * model.alpha * math.log10(d / model.reference_distance)


def max_distance(model: ChannelModel) -> float:
    budget = model.tx_power - model.sensitivity
    if budget <= 0:
        raise ValueError("tx power does not exceed receiver sensitivity: no range")
    return model.reference_distance * 10.0 ** ((budget - model.pl0) / (10.0 * model.alpha))


def mean_rx_dbm(model: ChannelModel, d: float) -> float:
    return model.tx_power - path_loss_db(model, d)


def success_probability(model: ChannelModel, d: float) -> float:
    """Closed-form reception probability at distance ``d``."""
    margin = mean_rx_dbm(model, d) - model.sensitivity
    if not model.stochastic:
        return 1.0 if margin >= 0 else 0.0
    from scipy.special import gammaincc
    m = model.nakagami_m
    # P(X >= s) with X ~ Gamma(m, mean/m)
    return float(gammaincc(m, m * 10.0 ** (-margin / 10.0)))


def reception_success(model: ChannelModel, d: float, stream: RandomStream) -> bool:
    if d <= 0:
        raise ValueError("distance must be positive")
    mean_dbm = mean_rx_dbm(model, d)
    if not model.stochastic:
        return mean_dbm >= model.sensitivity
    mean = dbm_to_mw(mean_dbm)
    m = model.nakagami_m
    return stream.rng.gamma(m, mean / m) >= dbm_to_mw(model.sensitivity)


def airtime(size_bytes: int, bitrate: float) -> float:
    t = size_bytes * 8.0 / bitrate
    if t <= 0:
        raise ValueError("airtime must be positive")
    return t


@dataclass
class Transmission:
    sender: int
    size: int
    start: float
    bitrate: float = 54e6

    @property
    def airtime(self) -> float:
        return airtime(self.size, self.bitrate)


class Medium:
    """Interference-free broadcast medium over a fixed node set.

    Positions are read from ``positions`` (an (n, 3) array indexed by node id)
    at transmission time.  Fading draws use ``stream`` in receiver-id order.
    """

    def __init__(self, model: ChannelModel, stream: RandomStream, bitrate: float = 54e6):
        self.model = model
        self.stream = stream
        self.bitrate = bitrate
        m = model
        self._sens_mw = dbm_to_mw(m.sensitivity)
        # mean received power in mW at distance d = k * d**-alpha
        self._k = dbm_to_mw(m.tx_power - m.pl0) * m.reference_distance ** m.alpha

    def _success(self, d: np.ndarray) -> np.ndarray:
        m = self.model
        d = np.maximum(d, m.reference_distance)
        if not m.stochastic:
            rx = m.tx_power - (m.pl0 + 10.0 * m.alpha * np.log10(d / m.reference_distance))
            return rx >= m.sensitivity
        mean = self._k * d ** (-m.alpha)
        draws = self.stream.rng.gamma(m.nakagami_m, mean / m.nakagami_m)
        return draws >= self._sens_mw

    def broadcast(self, tx: Transmission, positions: np.ndarray) -> list:
        """[(receiver, delivery_time)] for every other node that decodes the frame."""
        n = len(positions)
        if n <= 1:
            return []
        others = np.array([i for i in range(n) if i != tx.sender], dtype=int)
        d = np.sqrt(((positions[others] - positions[tx.sender]) ** 2).sum(axis=1))
        ok = self._success(d)
        base = tx.start + tx.airtime
        return [(int(r), base + float(dist) / C) for r, dist, good in zip(others, d, ok) if good]

    def unicast(self, tx: Transmission, receiver: int, positions: np.ndarray):
        """Delivery time at ``receiver`` or None; only the addressee is evaluated."""
        p = positions[tx.sender]
        q = positions[receiver]
        d = math.sqrt((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 + (p[2] - q[2]) ** 2)
        if d <= 0:
            d = self.model.reference_distance
        m = self.model
        dd = max(d, m.reference_distance)
        if not m.stochastic:
            ok = mean_rx_dbm(m, dd) >= m.sensitivity
        else:
            mean = self._k * dd ** (-m.alpha)
            ok = self.stream.rng.gamma(m.nakagami_m, mean / m.nakagami_m) >= self._sens_mw
        if not ok:
            return None
        return tx.start + tx.airtime + d / C
