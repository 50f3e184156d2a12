"""Flow-based feature extraction.

Packets are grouped into bidirectional flows keyed by the transport
5-tuple (the first-seen direction is "forward"); a flow is split when it
idles longer than the timeout. Each flow yields one fixed-order feature
vector; see FLOW_FEATURE_NAMES for the exact layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..traffic.model import ACK, FIN, PSH, Packet, Protocol, Provenance, RST, SYN, TrafficTrace

IDLE_TIMEOUT = 120.0  # seconds of silence that closes a flow

FLOW_FEATURE_NAMES = [
    "duration",
    "fwd_packets", "bwd_packets", "fwd_bytes", "bwd_bytes",
    "size_min", "size_mean", "size_max", "size_std",
    "iat_min", "iat_mean", "iat_max", "iat_std",
    "fwd_size_mean", "fwd_size_std", "bwd_size_mean", "bwd_size_std",
    "fwd_iat_mean", "fwd_iat_std", "bwd_iat_mean", "bwd_iat_std",
    "syn_count", "ack_count", "fin_count", "rst_count", "psh_count",
]


@dataclass
class FlowRecord:
    key: tuple                      # (protocol, src_ip, src_port, dst_ip, dst_port)
    start: float
    end: float
    packet_count: int
    has_original: bool              # any packet with ORIGINAL provenance
    all_crafted: bool

    @property
    def duration(self) -> float:
        return self.end - self.start


def _flow_key(p: Packet) -> tuple:
    return (p.protocol, p.src_ip, p.src_port, p.dst_ip, p.dst_port)


def _stats(values: list) -> tuple:
    if not values:
        return 0.0, 0.0, 0.0, 0.0
    arr = np.asarray(values, dtype=float)
    return float(arr.min()), float(arr.mean()), float(arr.max()), float(arr.std())


def flow_extract(trace: TrafficTrace,
                 idle_timeout: float = IDLE_TIMEOUT) -> List[Tuple[FlowRecord, np.ndarray]]:
    """Split a trace into flows and compute one feature vector per flow.

    Flows are listed in order of their first packet; an idle gap longer than
    the timeout closes the flow and a later packet of the same 5-tuple opens
    a new one.
    """
    flows: list = []        # every flow ever opened, in first-packet order
    active: dict = {}       # canonical key -> index into flows

    for pkt in trace.packets:
        fwd = _flow_key(pkt)
        rev = (pkt.protocol, pkt.dst_ip, pkt.dst_port, pkt.src_ip, pkt.src_port)
        key = fwd if fwd in active else (rev if rev in active else fwd)
        idx = active.get(key)
        if idx is not None and pkt.timestamp - flows[idx]["last_t"] > idle_timeout:
            del active[key]
            key, idx = fwd, None
        if idx is None:
            flows.append({"fwd": [], "bwd": [], "key": fwd, "last_t": pkt.timestamp})
            idx = len(flows) - 1
            active[fwd] = idx
            key = fwd
        direction = "fwd" if key == fwd else "bwd"
        flows[idx][direction].append(pkt)
        flows[idx]["last_t"] = pkt.timestamp

    return [_featureize(flow) for flow in flows]


def _featureize(flow: dict) -> Tuple[FlowRecord, np.ndarray]:
    fwd, bwd = flow["fwd"], flow["bwd"]
    pkts = sorted(fwd + bwd, key=lambda p: p.timestamp)
    times = [p.timestamp for p in pkts]
    sizes = [p.frame_len for p in pkts]
    iats = list(np.diff(times)) if len(times) > 1 else []

    def dir_stats(group):
        g_sizes = [p.frame_len for p in group]
        g_times = [p.timestamp for p in group]
        g_iats = list(np.diff(g_times)) if len(g_times) > 1 else []
        _, s_mean, _, s_std = _stats(g_sizes)
        _, i_mean, _, i_std = _stats(g_iats)
        return s_mean, s_std, i_mean, i_std

    f_s_mean, f_s_std, f_i_mean, f_i_std = dir_stats(fwd)
    b_s_mean, b_s_std, b_i_mean, b_i_std = dir_stats(bwd)
    s_min, s_mean, s_max, s_std = _stats(sizes)
    i_min, i_mean, i_max, i_std = _stats(iats)

    flags = {SYN: 0, ACK: 0, FIN: 0, RST: 0, PSH: 0}
    for p in pkts:
        if p.protocol is Protocol.TCP:
            for bit in flags:
                if p.has_flag(bit):
                    flags[bit] += 1

    vec = np.array([
        times[-1] - times[0] if times else 0.0,
        len(fwd), len(bwd),
        sum(p.frame_len for p in fwd), sum(p.frame_len for p in bwd),
        s_min, s_mean, s_max, s_std,
        i_min, i_mean, i_max, i_std,
        f_s_mean, f_s_std, b_s_mean, b_s_std,
        f_i_mean, f_i_std, b_i_mean, b_i_std,
        flags[SYN], flags[ACK], flags[FIN], flags[RST], flags[PSH],
    ], dtype=float)

    record = FlowRecord(
        key=flow["key"],
        start=times[0] if times else 0.0,
        end=times[-1] if times else 0.0,
        packet_count=len(pkts),
        has_original=any(p.provenance is Provenance.ORIGINAL for p in pkts),
        all_crafted=all(p.provenance is Provenance.CRAFTED for p in pkts),
    )
    return record, vec
