"""Ethernet/IPv4 frame encoding and decoding.

Only Ethernet II + IPv4 with TCP/UDP/ICMP is decoded into header fields;
anything else is kept as an opaque OTHER packet (raw bytes preserved).
"""

from __future__ import annotations

import struct
from typing import Optional

from .model import (
    ICMP_HEADER_LEN,
    IPV4_HEADER_LEN,
    TCP_HEADER_LEN,
    UDP_HEADER_LEN,
    Packet,
    Protocol,
    Provenance,
)

ETHERTYPE_IPV4 = 0x0800
IPPROTO_ICMP = 1
IPPROTO_TCP = 6
IPPROTO_UDP = 17


def _checksum(data: bytes) -> int:
    if len(data) % 2:
        data += b"\x00"
    total = sum(struct.unpack(f"!{len(data) // 2}H", data))
    while total > 0xFFFF:
        total = (total & 0xFFFF) + (total >> 16)
    return (~total) & 0xFFFF


def ip_to_bytes(ip: str) -> bytes:
    parts = [int(x) for x in ip.split(".")]
    if len(parts) != 4 or any(not 0 <= p <= 255 for p in parts):
        raise ValueError(f"bad IPv4 address {ip!r}")
    return bytes(parts)


def bytes_to_ip(b: bytes) -> str:
    return ".".join(str(x) for x in b)


def encode_frame(pkt: Packet) -> bytes:
    """Build the canonical wire frame for a packet constructed in memory."""
    if pkt.protocol is Protocol.OTHER:
        if pkt.raw is None:
            raise ValueError("cannot encode an OTHER packet without raw bytes")
        return pkt.raw
    if pkt.src_ip is None or pkt.dst_ip is None:
        raise ValueError("cannot encode a packet without IP addresses")

    payload = pkt.payload if pkt.payload is not None else b"\x00" * pkt.payload_len

    if pkt.protocol is Protocol.TCP:
        l4 = struct.pack(
            "!HHIIBBHHH",
            pkt.src_port, pkt.dst_port, pkt.seq, pkt.ack,
            (TCP_HEADER_LEN // 4) << 4, pkt.tcp_flags, 65535, 0, 0,
        )
        proto = IPPROTO_TCP
    elif pkt.protocol is Protocol.UDP:
        l4 = struct.pack("!HHHH", pkt.src_port, pkt.dst_port, UDP_HEADER_LEN + len(payload), 0)
        proto = IPPROTO_UDP
    else:  # ICMP
        l4 = struct.pack("!BBHI", pkt.icmp_type, pkt.icmp_code, 0, 0)
        proto = IPPROTO_ICMP
    l4 += payload

    if pkt.protocol is Protocol.ICMP:
        csum = _checksum(l4)
        l4 = l4[:2] + struct.pack("!H", csum) + l4[4:]

    total_len = IPV4_HEADER_LEN + len(l4)
    ttl = pkt.ttl if pkt.ttl is not None else 64
    ip_hdr = struct.pack(
        "!BBHHHBBH4s4s",
        0x45, 0, total_len, 0, 0, ttl, proto, 0,
        ip_to_bytes(pkt.src_ip), ip_to_bytes(pkt.dst_ip),
    )
    ip_hdr = ip_hdr[:10] + struct.pack("!H", _checksum(ip_hdr)) + ip_hdr[12:]

    eth = pkt.dst_mac + pkt.src_mac + struct.pack("!H", ETHERTYPE_IPV4)
    return eth + ip_hdr + l4


def decode_frame(timestamp: float, frame: bytes) -> Packet:
    """Parse one Ethernet frame into a Packet; falls back to OTHER on anything
    that is not plain IPv4 TCP/UDP/ICMP."""

    def other() -> Packet:
        return Packet(timestamp=timestamp, protocol=Protocol.OTHER, raw=frame,
                      payload_len=0, provenance=Provenance.ORIGINAL)

    if len(frame) < 14:
        return other()
    dst_mac, src_mac = frame[0:6], frame[6:12]
    ethertype = struct.unpack("!H", frame[12:14])[0]
    if ethertype != ETHERTYPE_IPV4 or len(frame) < 14 + IPV4_HEADER_LEN:
        return other()

    ip = frame[14:]
    version_ihl = ip[0]
    if version_ihl >> 4 != 4:
        return other()
    ihl = (version_ihl & 0x0F) * 4
    if ihl < IPV4_HEADER_LEN or len(ip) < ihl:
        return other()
    total_len = struct.unpack("!H", ip[2:4])[0]
    ttl = ip[8]
    proto = ip[9]
    src_ip = bytes_to_ip(ip[12:16])
    dst_ip = bytes_to_ip(ip[16:20])
    l4 = ip[ihl:total_len] if total_len <= len(ip) else ip[ihl:]

    common = dict(timestamp=timestamp, src_mac=src_mac, dst_mac=dst_mac,
                  src_ip=src_ip, dst_ip=dst_ip, ttl=ttl, raw=frame,
                  provenance=Provenance.ORIGINAL)

    if proto == IPPROTO_TCP and len(l4) >= TCP_HEADER_LEN:
        sport, dport, seq, ack = struct.unpack("!HHII", l4[0:12])
        data_off = (l4[12] >> 4) * 4
        flags = l4[13]
        payload = l4[data_off:]
        return Packet(protocol=Protocol.TCP, src_port=sport, dst_port=dport,
                      seq=seq, ack=ack, tcp_flags=flags,
                      payload_len=len(payload), payload=payload, **common)
    if proto == IPPROTO_UDP and len(l4) >= UDP_HEADER_LEN:
        sport, dport, _ulen, _ = struct.unpack("!HHHH", l4[0:8])
        payload = l4[8:]
        return Packet(protocol=Protocol.UDP, src_port=sport, dst_port=dport,
                      payload_len=len(payload), payload=payload, **common)
    if proto == IPPROTO_ICMP and len(l4) >= ICMP_HEADER_LEN:
        itype, icode = l4[0], l4[1]
        payload = l4[8:]
        return Packet(protocol=Protocol.ICMP, icmp_type=itype, icmp_code=icode,
                      payload_len=len(payload), payload=payload, **common)
    return other()


def with_frame(pkt: Packet) -> Packet:
    """Return the packet with its canonical raw frame attached."""
    if pkt.raw is not None:
        return pkt
    from dataclasses import replace
    return replace(pkt, raw=encode_frame(pkt))
