"""Packet and trace domain model.

A :class:`Packet` is an immutable record of one frame: link/network/transport
header fields, optional payload bytes, and a provenance tag telling original
traffic apart from crafted insertions. A :class:`TrafficTrace` is an ordered,
timestamp-sorted sequence of packets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence


class Protocol(enum.Enum):
    TCP = "tcp"
    UDP = "udp"
    ICMP = "icmp"
    OTHER = "other"


class Provenance(enum.Enum):
    ORIGINAL = "original"
    CRAFTED = "crafted"


# TCP flag bits
FIN = 0x01
SYN = 0x02
RST = 0x04
PSH = 0x08
ACK = 0x10
URG = 0x20

ETH_HEADER_LEN = 14
IPV4_HEADER_LEN = 20
TCP_HEADER_LEN = 20
UDP_HEADER_LEN = 8
ICMP_HEADER_LEN = 8

MAX_PAYLOAD = 1460  # Ethernet MTU minus IPv4+TCP headers


@dataclass(frozen=True)
class Packet:
    timestamp: float
    src_mac: bytes = b"\x00" * 6
    dst_mac: bytes = b"\x00" * 6
    protocol: Protocol = Protocol.OTHER
    src_ip: Optional[str] = None
    dst_ip: Optional[str] = None
    src_port: Optional[int] = None
    dst_port: Optional[int] = None
    tcp_flags: Optional[int] = None
    seq: Optional[int] = None
    ack: Optional[int] = None
    ttl: Optional[int] = None
    icmp_type: Optional[int] = None
    icmp_code: Optional[int] = None
    payload_len: int = 0
    payload: Optional[bytes] = None
    provenance: Provenance = Provenance.ORIGINAL
    raw: Optional[bytes] = None  # original wire frame, kept for lossless pcap round-trips

    def __post_init__(self):
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be >= 0, got {self.timestamp}")
        if self.payload_len < 0:
            raise ValueError("payload_len must be >= 0")
        if self.payload is not None and len(self.payload) != self.payload_len:
            raise ValueError(
                f"payload_len={self.payload_len} but payload carries {len(self.payload)} bytes"
            )
        if self.protocol in (Protocol.TCP, Protocol.UDP):
            if self.src_port is None or self.dst_port is None:
                raise ValueError(f"{self.protocol.value} packet needs ports")
        else:
            if self.src_port is not None or self.dst_port is not None:
                raise ValueError(f"{self.protocol.value} packet must not carry ports")
        if self.protocol is Protocol.TCP:
            if self.seq is None or self.ack is None or self.tcp_flags is None:
                raise ValueError("tcp packet needs seq/ack/flags")
        else:
            if self.seq is not None or self.ack is not None or self.tcp_flags is not None:
                raise ValueError("seq/ack/flags are tcp-only fields")
        if self.protocol is Protocol.ICMP:
            if self.icmp_type is None or self.icmp_code is None:
                raise ValueError("icmp packet needs type/code")
        else:
            if self.icmp_type is not None or self.icmp_code is not None:
                raise ValueError("icmp type/code are icmp-only fields")

    @property
    def frame_len(self) -> int:
        """Wire size in bytes; used as the packet-size feature."""
        if self.raw is not None:
            return len(self.raw)
        base = ETH_HEADER_LEN + IPV4_HEADER_LEN
        if self.protocol is Protocol.TCP:
            base += TCP_HEADER_LEN
        elif self.protocol is Protocol.UDP:
            base += UDP_HEADER_LEN
        elif self.protocol is Protocol.ICMP:
            base += ICMP_HEADER_LEN
        return base + self.payload_len

    def content_key(self) -> tuple:
        """Everything except timestamp and provenance; the identity used by
        safety checks (timestamps are legitimately mutated)."""
        return (
            self.src_mac, self.dst_mac, self.protocol,
            self.src_ip, self.dst_ip, self.src_port, self.dst_port,
            self.tcp_flags, self.seq, self.ack, self.ttl,
            self.icmp_type, self.icmp_code,
            self.payload_len, self.payload,
        )

    def has_flag(self, bit: int) -> bool:
        return self.tcp_flags is not None and bool(self.tcp_flags & bit)

    def at_time(self, t: float) -> "Packet":
        return replace(self, timestamp=t)


@dataclass(frozen=True)
class TrafficTrace:
    packets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pkts = tuple(self.packets)
        object.__setattr__(self, "packets", pkts)
        for a, b in zip(pkts, pkts[1:]):
            if b.timestamp < a.timestamp:
                raise ValueError("trace timestamps must be non-decreasing")

    def __len__(self) -> int:
        return len(self.packets)

    def __iter__(self):
        return iter(self.packets)

    @property
    def elapsed(self) -> float:
        if len(self.packets) < 2:
            return 0.0
        return self.packets[-1].timestamp - self.packets[0].timestamp

    @property
    def byte_volume(self) -> int:
        return sum(p.frame_len for p in self.packets)

    def originals(self) -> list:
        return [p for p in self.packets if p.provenance is Provenance.ORIGINAL]

    def crafted(self) -> list:
        return [p for p in self.packets if p.provenance is Provenance.CRAFTED]

    @staticmethod
    def from_packets(packets: Iterable[Packet]) -> "TrafficTrace":
        return TrafficTrace(tuple(packets))


@dataclass(frozen=True)
class OverheadBudget:
    """Mutation overhead caps: crafted-packet ratio and elapsed-time stretch."""

    craft_ratio: float = 0.5   # crafted packets / original packets
    time_stretch: float = 5.0  # mutated elapsed / original elapsed

    def __post_init__(self):
        if self.craft_ratio < 0:
            raise ValueError("craft_ratio must be >= 0")
        if self.time_stretch < 1:
            raise ValueError("time_stretch must be >= 1")

    def craft_pool(self, n_original: int) -> int:
        """Global cap on crafted packets for a trace of n_original packets."""
        return int(self.craft_ratio * n_original + 1e-9)

    def max_elapsed(self, original_elapsed: float) -> float:
        return self.time_stretch * original_elapsed


def trace_to_csv(trace: TrafficTrace) -> str:
    """Line-oriented dump of a trace for inspection."""
    lines = [
        "timestamp,protocol,src_ip,src_port,dst_ip,dst_port,tcp_flags,payload_len,frame_len,provenance"
    ]
    for p in trace.packets:
        lines.append(
            f"{p.timestamp!r},{p.protocol.value},{p.src_ip or ''},"
            f"{'' if p.src_port is None else p.src_port},{p.dst_ip or ''},"
            f"{'' if p.dst_port is None else p.dst_port},"
            f"{'' if p.tcp_flags is None else p.tcp_flags},"
            f"{p.payload_len},{p.frame_len},{p.provenance.value}"
        )
    return "\n".join(lines) + "\n"
