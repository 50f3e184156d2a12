"""Classic pcap reading and writing.

Accepts both endiannesses and both the microsecond and nanosecond magic
variants on input. Output is canonical: little-endian, microsecond
timestamps, Ethernet link type, snaplen 65535. Only Ethernet (linktype 1)
captures are accepted.
"""

from __future__ import annotations

import struct

from ..errors import MalformedPcap
from .frames import decode_frame, with_frame
from .model import Packet, TrafficTrace

MAGIC_US = 0xA1B2C3D4
MAGIC_NS = 0xA1B23C4D
_HEADER_LEN = 24
_RECORD_HEADER_LEN = 16
_SNAPLEN = 65535
LINKTYPE_ETHERNET = 1


def _header_format(data: bytes):
    """Return (endianness, ts_unit) for the global header magic."""
    if len(data) < 4:
        raise MalformedPcap("input shorter than pcap magic")
    for endian in ("<", ">"):
        magic = struct.unpack(endian + "I", data[:4])[0]
        if magic == MAGIC_US:
            return endian, 1e-6
        if magic == MAGIC_NS:
            return endian, 1e-9
    raise MalformedPcap(f"bad pcap magic {data[:4].hex()}")


def parse_pcap(data: bytes) -> TrafficTrace:
    """Parse pcap bytes into a trace of ORIGINAL-provenance packets."""
    endian, ts_unit = _header_format(data)
    if len(data) < _HEADER_LEN:
        raise MalformedPcap("truncated global header")
    _, _, _, _, _, linktype = struct.unpack(endian + "HHiIII", data[4:_HEADER_LEN])
    if linktype != LINKTYPE_ETHERNET:
        raise MalformedPcap(f"unsupported link type {linktype}")

    packets = []
    off = _HEADER_LEN
    while off < len(data):
        if off + _RECORD_HEADER_LEN > len(data):
            raise MalformedPcap("truncated record header")
        ts_sec, ts_frac, incl_len, _orig_len = struct.unpack(
            endian + "IIII", data[off:off + _RECORD_HEADER_LEN]
        )
        off += _RECORD_HEADER_LEN
        if off + incl_len > len(data):
            raise MalformedPcap("truncated record body")
        frame = data[off:off + incl_len]
        off += incl_len
        packets.append(decode_frame(ts_sec + ts_frac * ts_unit, frame))
    return TrafficTrace.from_packets(packets)


def serialize_pcap(trace: TrafficTrace) -> bytes:
    """Write a trace as canonical little-endian microsecond pcap bytes."""
    out = [struct.pack("<IHHiIII", MAGIC_US, 2, 4, 0, 0, _SNAPLEN, LINKTYPE_ETHERNET)]
    for pkt in trace.packets:
        frame = with_frame(pkt).raw
        sec = int(pkt.timestamp)
        usec = int(round((pkt.timestamp - sec) * 1e6))
        if usec >= 1_000_000:
            sec += 1
            usec -= 1_000_000
        out.append(struct.pack("<IIII", sec, usec, len(frame), len(frame)))
        out.append(frame)
    return b"".join(out)


def write_pcap(path, trace: TrafficTrace) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_pcap(trace))


def read_pcap(path) -> TrafficTrace:
    with open(path, "rb") as fh:
        return parse_pcap(fh.read())
