"""Packet types and their big-endian wire layouts.

Every control packet starts with a 9-byte header: origin (u32), sequence (u32),
type (u8).  Positions are three float64 values in meters.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

HELLO, TC, OGM, MOBILITY, PATHSCORE, DATA = 1, 2, 3, 4, 5, 6
TYPE_NAMES = {HELLO: "HELLO", TC: "TC", OGM: "OGM", MOBILITY: "MOBILITY",
              PATHSCORE: "PATHSCORE", DATA: "DATA"}

MOBILITY_SIZE = 1000
PATHSCORE_SIZE = 67
DATA_SIZE = 1460

_HEADER = struct.Struct(">IIB")
_VEC = struct.Struct(">ddd")
_MOB_FIXED = struct.Struct(">IIBddddddB")
_PATHSCORE = struct.Struct(">IIBddddddd H")
_U32 = struct.Struct(">I")
_PAIR = struct.Struct(">II")

MAX_WAYPOINTS = (MOBILITY_SIZE - _MOB_FIXED.size) // _VEC.size


class PacketError(ValueError):
    pass


def _vec_tuple(v) -> tuple:
    return tuple(float(x) for x in v)


@dataclass(slots=True)
class Hello:
    origin: int
    sequence: int
    neighbors: tuple = ()
    kind = HELLO

    @property
    def size(self) -> int:
        return 9 + 4 * len(self.neighbors)


@dataclass(slots=True)
class TopologyControl:
    origin: int
    sequence: int
    links: tuple = ()
    kind = TC

    @property
    def size(self) -> int:
        return 9 + 8 * len(self.links)


@dataclass(slots=True)
class OriginatorMessage:
    origin: int
    sequence: int
    kind = OGM

    @property
    def size(self) -> int:
        return 9


@dataclass(slots=True)
class MobilityUpdatePacket:
    origin: int
    sequence: int
    position: tuple
    steering: tuple = (0.0, 0.0, 0.0)
    waypoints: tuple = ()
    kind = MOBILITY

    def __post_init__(self):
        self.position = _vec_tuple(self.position)
        self.steering = _vec_tuple(self.steering)
        self.waypoints = tuple(_vec_tuple(w) for w in self.waypoints)
        if len(self.waypoints) > MAX_WAYPOINTS:
            raise PacketError(f"at most {MAX_WAYPOINTS} waypoints fit in a mobility update")

    @property
    def size(self) -> int:
        return MOBILITY_SIZE


@dataclass(slots=True)
class PathScorePacket:
    origin: int
    sequence: int
    forwarder_position: tuple
    forwarder_predicted_position: tuple
    score: float = 1.0
    hop_count: int = 0
    kind = PATHSCORE

    def __post_init__(self):
        self.forwarder_position = _vec_tuple(self.forwarder_position)
        self.forwarder_predicted_position = _vec_tuple(self.forwarder_predicted_position)
        if not 0.0 <= self.score <= 1.0:
            raise PacketError(f"path score {self.score} outside [0, 1]")

    @property
    def size(self) -> int:
        return PATHSCORE_SIZE


@dataclass(slots=True)
class DataPacket:
    source: int
    destination: int
    sequence: int
    created: float
    ttl: int = 32
    counted: bool = True
    kind = DATA

    @property
    def origin(self) -> int:
        return self.source

    @property
    def size(self) -> int:
        return DATA_SIZE


def serialize_packet(pkt) -> bytes:
    kind = pkt.kind
    if kind == HELLO:
        return _HEADER.pack(pkt.origin, pkt.sequence, HELLO) + b"".join(
            _U32.pack(n) for n in pkt.neighbors)
    if kind == TC:
        return _HEADER.pack(pkt.origin, pkt.sequence, TC) + b"".join(
            _PAIR.pack(a, b) for a, b in pkt.links)
    if kind == OGM:
        return _HEADER.pack(pkt.origin, pkt.sequence, OGM)
    if kind == MOBILITY:
        body = _MOB_FIXED.pack(pkt.origin, pkt.sequence, MOBILITY, *pkt.position,
                               *pkt.steering, len(pkt.waypoints))
        body += b"".join(_VEC.pack(*w) for w in pkt.waypoints)
        return body.ljust(MOBILITY_SIZE, b"\0")
    if kind == PATHSCORE:
        return _PATHSCORE.pack(pkt.origin, pkt.sequence, PATHSCORE, *pkt.forwarder_position,
                               *pkt.forwarder_predicted_position, pkt.score, pkt.hop_count)
    raise PacketError(f"no wire layout for packet kind {kind}")


def deserialize_packet(data: bytes):
    if len(data) < _HEADER.size:
        raise PacketError("truncated header")
    origin, seq, kind = _HEADER.unpack_from(data)
    body = len(data) - _HEADER.size
    if kind == HELLO:
        if body % 4:
            raise PacketError("HELLO body is not a whole number of node ids")
        nbrs = tuple(_U32.unpack_from(data, 9 + 4 * i)[0] for i in range(body // 4))
        return Hello(origin, seq, nbrs)
    if kind == TC:
        if body % 8:
            raise PacketError("TC body is not a whole number of links")
        links = tuple(_PAIR.unpack_from(data, 9 + 8 * i) for i in range(body // 8))
        return TopologyControl(origin, seq, links)
    if kind == OGM:
        if body:
            raise PacketError("OGM carries no body")
        return OriginatorMessage(origin, seq)
    if kind == MOBILITY:
        if len(data) != MOBILITY_SIZE:
            raise PacketError(f"mobility update must be {MOBILITY_SIZE} bytes, got {len(data)}")
        f = _MOB_FIXED.unpack_from(data)
        count = f[9]
        if count > MAX_WAYPOINTS:
            raise PacketError(f"waypoint count {count} exceeds {MAX_WAYPOINTS}")
        wps = tuple(_VEC.unpack_from(data, _MOB_FIXED.size + 24 * i) for i in range(count))
        if any(data[_MOB_FIXED.size + 24 * count:]):
            raise PacketError("non-zero padding in mobility update")
        return MobilityUpdatePacket(origin, seq, f[3:6], f[6:9], wps)
    if kind == PATHSCORE:
        if len(data) != PATHSCORE_SIZE:
            raise PacketError(f"path score packet must be {PATHSCORE_SIZE} bytes, got {len(data)}")
        f = _PATHSCORE.unpack(data)
        return PathScorePacket(origin, seq, f[3:6], f[6:9], f[9], f[10])
    raise PacketError(f"unknown packet type {kind}")


def mobility_packet_from_entry(entry, sequence: int) -> MobilityUpdatePacket:
    return MobilityUpdatePacket(entry.node, sequence, entry.position, entry.steering,
                                entry.waypoints)


def entry_from_mobility_packet(pkt: MobilityUpdatePacket, timestamp: float):
    from ..location import MobilityEntry
    return MobilityEntry(pkt.origin, timestamp, np.array(pkt.position),
                         np.array(pkt.steering), [np.array(w) for w in pkt.waypoints])

