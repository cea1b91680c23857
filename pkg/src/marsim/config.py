"""Scenario configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

from .channel import ChannelModel, mw_to_dbm
from .mobility import KMH

PROTOCOLS = ("OLSR", "MA-OLSR", "BATMAN", "BATMOBILE")
CHANNELS = ("friis", "nakagami")

_PROTOCOL_ALIASES = {
    "olsr": "OLSR",
    "ma-olsr": "MA-OLSR", "maolsr": "MA-OLSR", "ma_olsr": "MA-OLSR",
    "batman": "BATMAN", "b.a.t.m.a.n.": "BATMAN",
    "batmobile": "BATMOBILE", "b.a.t.mobile": "BATMOBILE", "bat-mobile": "BATMOBILE",
}


class ConfigError(ValueError):
    pass


def protocol_name(name: str) -> str:
    try:
        return _PROTOCOL_ALIASES[name.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown protocol {name!r}; choose from {', '.join(PROTOCOLS)}") from None


def channel_name(name: str) -> str:
    key = name.strip().lower()
    if key not in CHANNELS:
        raise ConfigError(f"unknown channel {name!r}; choose from {', '.join(CHANNELS)}")
    return key


@dataclass
class ScenarioConfig:
    """Scenario parameters; the defaults are the reference scenario."""

    area: tuple = (500.0, 500.0, 250.0)
    agents: int = 10
    waypoint_weight: float = 1.0
    avoidance_weight: float = 10.0
    min_distance: float = 30.0
    dt_update: float = 0.25
    speed_kmh: float = 50.0
    channel: str = "friis"
    alpha: float = 2.75
    nakagami_m: float = 2.0
    cbr_bitrate: float = 2e6
    cbr_packet_size: int = 1460
    telemetry_interval: float = 0.25
    telemetry_size: int = 1000
    ogm_interval: float = 0.5
    hello_interval: float = 0.5
    tc_interval: float = 1.0
    mac_bitrate: float = 54e6
    tx_power_mw: float = 100.0
    frequency: float = 2.4e9
    sensitivity: float = -83.0
    duration: float = 300.0
    runs: int = 50
    nh: int = 5
    np: int = 15
    # additions beyond the reference parameter set
    seed: int = 1
    protocol: str = "OLSR"
    e_max: float = 0.0
    base_station: tuple = (250.0, 0.0, 0.0)
    warmup: float = 10.0
    jitter: float = 0.0
    window: int = 64
    topology_hold: float = 3.0
    record_latency: bool = False

    def __post_init__(self):
        self.protocol = protocol_name(self.protocol)
        self.channel = channel_name(self.channel)
        self.area = tuple(float(v) for v in self.area)
        self.base_station = tuple(float(v) for v in self.base_station)

    @property
    def speed(self) -> float:
        return self.speed_kmh * KMH

    @property
    def cbr_interval(self) -> float:
        return self.cbr_packet_size * 8.0 / self.cbr_bitrate

    @property
    def horizon(self) -> float:
        return self.np * self.dt_update

    @property
    def telemetry_every(self) -> int:
        return int(round(self.telemetry_interval / self.dt_update))

    def channel_model(self, channel: str | None = None) -> ChannelModel:
        stochastic = (channel or self.channel) == "nakagami"
        return ChannelModel(frequency=self.frequency, alpha=self.alpha, nakagami_m=self.nakagami_m,
                            tx_power=mw_to_dbm(self.tx_power_mw), sensitivity=self.sensitivity,
                            stochastic=stochastic)

    def validate(self) -> ScenarioConfig:
        problems = []
        for name in ("dt_update", "telemetry_interval", "ogm_interval", "hello_interval",
                     "tc_interval", "duration", "cbr_bitrate", "mac_bitrate", "speed_kmh",
                     "tx_power_mw", "frequency", "min_distance"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                problems.append(f"{name} must be > 0 (got {value!r})")
        if self.agents < 2:
            problems.append(f"agents must be >= 2 (got {self.agents})")
        if len(self.area) != 3 or min(self.area) <= 0:
            problems.append(f"area must have three positive extents (got {self.area})")
        if self.cbr_packet_size <= 0 or self.telemetry_size <= 0:
            problems.append("packet sizes must be positive")
        if self.nh < 1 or self.np < 0 or self.window < 1 or self.runs < 1:
            problems.append("nh, window and runs must be >= 1 and np >= 0")
        if self.e_max < 0 or self.warmup < 0 or self.jitter < 0:
            problems.append("e_max, warmup and jitter must be non-negative")
        if self.waypoint_weight < 0 or self.avoidance_weight < 0:
            problems.append("steering weights must be non-negative")
        if self.alpha < 2 or self.nakagami_m < 1:
            problems.append("alpha must be >= 2 and nakagami_m >= 1")
        if mw_to_dbm(self.tx_power_mw) <= self.sensitivity:
            problems.append("tx power must exceed receiver sensitivity")
        if self.dt_update > 0:
            ratio = self.telemetry_interval / self.dt_update
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                problems.append("telemetry_interval must be a whole multiple of dt_update")
        if len(self.base_station) != 3 or not all(
                0 <= self.base_station[i] <= self.area[i] for i in range(3)):
            problems.append(f"base_station {self.base_station} outside the mission area")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_TUPLE_FIELDS = {"area", "base_station"}


def _parse_value(name: str, raw: str):
    default = _FIELDS[name].default
    try:
        if name in _TUPLE_FIELDS:
            parts = [p for p in raw.replace("x", ",").replace(" ", ",").split(",") if p]
            if len(parts) != 3:
                raise ValueError("expected three numbers")
            return tuple(float(p) for p in parts)
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError("expected a boolean")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r} ({exc})") from None


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, value)
    cfg = dataclasses.replace(base or ScenarioConfig(), **values)
    return cfg.validate()


def load_config(path: str | os.PathLike) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def format_config(cfg: ScenarioConfig) -> str:
    lines = []
    for name in _FIELDS:
        value = getattr(cfg, name)
        if name in _TUPLE_FIELDS:
            value = ",".join(repr(float(v)) for v in value)
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"
