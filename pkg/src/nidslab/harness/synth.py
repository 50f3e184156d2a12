"""Synthetic desk-scale traffic generation.

Benign traffic is a mix of TCP and UDP conversations with jittered
inter-arrivals and varied payload sizes; SCAN is a rapid burst of bare SYN
probes from a single attacker across many ports of one victim; FLOOD is a
high-rate stream of identical UDP datagrams at one destination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..traffic.frames import with_frame
from ..traffic.model import ACK, PSH, SYN, Packet, Protocol, Provenance, TrafficTrace


def _mac_for(ip: str) -> bytes:
    parts = [int(x) for x in ip.split(".")]
    return bytes([0x02, 0x00] + parts)


@dataclass
class BenignSpec:
    n_packets: int = 2000
    n_flows: int = 40
    n_clients: int = 8
    n_servers: int = 4
    mean_iat: float = 0.05      # per-flow inter-arrival scale (seconds)
    payload_mean: float = 400.0
    udp_fraction: float = 0.3
    start_time: float = 0.0


@dataclass
class ScanSpec:
    n_packets: int = 500
    n_ports: int = 100
    iat: float = 0.01
    attacker_ip: str = "10.0.9.9"
    victim_ip: str = "10.0.1.1"
    start_time: float = 0.0


@dataclass
class FloodSpec:
    n_packets: int = 500
    iat: float = 0.002
    payload_size: int = 512
    attacker_ip: str = "10.0.9.9"
    victim_ip: str = "10.0.1.1"
    victim_port: int = 80
    start_time: float = 0.0


SERVER_PORTS = (80, 443, 53, 8080, 25)


def synth_benign(spec: BenignSpec, rng: np.random.Generator) -> TrafficTrace:
    """Interleaved two-way conversations; deterministic given the generator."""
    clients = [f"10.0.0.{i + 1}" for i in range(spec.n_clients)]
    servers = [f"10.0.1.{i + 1}" for i in range(spec.n_servers)]

    # spread the packet budget across flows, at least 4 packets each
    weights = rng.dirichlet(np.ones(spec.n_flows))
    counts = np.maximum((weights * spec.n_packets).astype(int), 4)

    packets = []
    for f in range(spec.n_flows):
        client = clients[int(rng.integers(0, len(clients)))]
        server = servers[int(rng.integers(0, len(servers)))]
        sport = int(rng.integers(1024, 65536))
        dport = int(SERVER_PORTS[int(rng.integers(0, len(SERVER_PORTS)))])
        is_udp = rng.random() < spec.udp_fraction
        t = spec.start_time + float(rng.uniform(0.0, spec.mean_iat * spec.n_packets / spec.n_flows))
        flow_iat = spec.mean_iat * float(rng.uniform(0.5, 2.0))
        c_mac, s_mac = _mac_for(client), _mac_for(server)

        if is_udp:
            for k in range(int(counts[f])):
                t += float(rng.exponential(flow_iat))
                size = int(np.clip(rng.normal(spec.payload_mean, spec.payload_mean / 2), 8, 1460))
                fwd = k % 2 == 0
                body = rng.integers(0, 256, size=size, dtype=np.uint8).tobytes()
                packets.append(Packet(
                    timestamp=t,
                    src_mac=c_mac if fwd else s_mac, dst_mac=s_mac if fwd else c_mac,
                    protocol=Protocol.UDP,
                    src_ip=client if fwd else server, dst_ip=server if fwd else client,
                    src_port=sport if fwd else dport, dst_port=dport if fwd else sport,
                    ttl=64, payload_len=size, payload=body,
                ))
        else:
            seq_c = int(rng.integers(1 << 20, 1 << 28))
            seq_s = int(rng.integers(1 << 20, 1 << 28))

            def tcp_pkt(ts, fwd, flags, seq, ack, size):
                body = rng.integers(0, 256, size=size, dtype=np.uint8).tobytes()
                return Packet(
                    timestamp=ts,
                    src_mac=c_mac if fwd else s_mac, dst_mac=s_mac if fwd else c_mac,
                    protocol=Protocol.TCP,
                    src_ip=client if fwd else server, dst_ip=server if fwd else client,
                    src_port=sport if fwd else dport, dst_port=dport if fwd else sport,
                    tcp_flags=flags, seq=seq, ack=ack, ttl=64,
                    payload_len=size, payload=body,
                )

            packets.append(tcp_pkt(t, True, SYN, seq_c, 0, 0))
            t += float(rng.exponential(flow_iat))
            packets.append(tcp_pkt(t, False, SYN | ACK, seq_s, seq_c + 1, 0))
            t += float(rng.exponential(flow_iat))
            seq_c += 1
            seq_s += 1
            packets.append(tcp_pkt(t, True, ACK, seq_c, seq_s, 0))
            for k in range(max(int(counts[f]) - 3, 0)):
                t += float(rng.exponential(flow_iat))
                size = int(np.clip(rng.normal(spec.payload_mean, spec.payload_mean / 2), 1, 1460))
                fwd = k % 2 == 0
                flags = ACK | (PSH if size > 0 else 0)
                if fwd:
                    packets.append(tcp_pkt(t, True, flags, seq_c, seq_s, size))
                    seq_c += size
                else:
                    packets.append(tcp_pkt(t, False, flags, seq_s, seq_c, size))
                    seq_s += size

    packets.sort(key=lambda p: p.timestamp)
    return TrafficTrace.from_packets(with_frame(p) for p in packets)


def synth_malicious(kind: str, spec, rng: np.random.Generator) -> TrafficTrace:
    if kind.upper() == "SCAN":
        return _synth_scan(spec, rng)
    if kind.upper() == "FLOOD":
        return _synth_flood(spec, rng)
    raise ValueError(f"unknown malicious kind {kind!r}")


def _synth_scan(spec: ScanSpec, rng: np.random.Generator) -> TrafficTrace:
    a_mac, v_mac = _mac_for(spec.attacker_ip), _mac_for(spec.victim_ip)
    t = spec.start_time
    packets = []
    for k in range(spec.n_packets):
        t += float(rng.exponential(spec.iat))
        port = 1 + (k % spec.n_ports)
        packets.append(Packet(
            timestamp=t, src_mac=a_mac, dst_mac=v_mac,
            protocol=Protocol.TCP,
            src_ip=spec.attacker_ip, dst_ip=spec.victim_ip,
            src_port=int(rng.integers(1024, 65536)), dst_port=port,
            tcp_flags=SYN, seq=int(rng.integers(1 << 20, 1 << 28)), ack=0,
            ttl=64, payload_len=0, payload=b"",
        ))
    return TrafficTrace.from_packets(with_frame(p) for p in packets)


def _synth_flood(spec: FloodSpec, rng: np.random.Generator) -> TrafficTrace:
    a_mac, v_mac = _mac_for(spec.attacker_ip), _mac_for(spec.victim_ip)
    body = rng.integers(0, 256, size=spec.payload_size, dtype=np.uint8).tobytes()
    sport = int(rng.integers(1024, 65536))
    t = spec.start_time
    packets = []
    for _ in range(spec.n_packets):
        t += float(rng.exponential(spec.iat))
        packets.append(Packet(
            timestamp=t, src_mac=a_mac, dst_mac=v_mac,
            protocol=Protocol.UDP,
            src_ip=spec.attacker_ip, dst_ip=spec.victim_ip,
            src_port=sport, dst_port=spec.victim_port,
            ttl=64, payload_len=spec.payload_size, payload=body,
        ))
    return TrafficTrace.from_packets(with_frame(p) for p in packets)
