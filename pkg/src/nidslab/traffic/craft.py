"""Crafted-packet recipes.

Each recipe builds one stealthy packet anchored on an original packet: same
endpoints, content chosen so the victim's stack is obliged to ignore it
(duplicate SYN, out-of-window data, unsolicited echo replies, deprecated
ICMP types, padding). Nothing here may establish a fresh valid connection
or deliver in-window data.
"""

from __future__ import annotations

import enum
from dataclasses import replace
from typing import Optional

import numpy as np

from ..errors import InapplicableRecipe
from .frames import with_frame
from .model import ACK, MAX_PAYLOAD, SYN, Packet, Protocol, Provenance

SEQ_MOD = 1 << 32
RECV_WINDOW = 65535        # window size assumed when judging in/out of window
TTL_TRICK_MAX = 3          # TTL low enough to die before the victim

# Deprecated/obsolete ICMP types (source quench, alternate host address,
# information request/reply, traceroute, conversion error, mobile redirects).
DEPRECATED_ICMP_TYPES = (4, 6, 15, 16, 30, 31, 32)


class RecipeKind(enum.Enum):
    TTL_TRICK = "ttl_trick"
    TCP_RESYN = "tcp_resyn"
    TCP_BAD_SEQ = "tcp_bad_seq"
    TCP_BAD_ACK = "tcp_bad_ack"
    UDP_PAD = "udp_pad"
    ICMP_PAD = "icmp_pad"
    ICMP_DEPRECATED = "icmp_deprecated"


# network-layer crafts vs transport-layer crafts
LAYER3_RECIPES = (RecipeKind.ICMP_PAD, RecipeKind.ICMP_DEPRECATED)


def _is_established(anchor: Packet) -> bool:
    # mid-flow packets carry ACK; a bare SYN is only establishing
    return anchor.has_flag(ACK)


def applicable_recipes(anchor: Packet, layers: int, enable_ttl_trick: bool = False) -> list:
    """Recipes valid for this anchor at the requested protocol layer.

    Layer 3 crafts ICMP packets between the anchor's endpoints; layer 4
    crafts packets inside the anchor's own transport flow. Returns an empty
    list when the anchor cannot host a craft (no IPs at all).
    """
    if anchor.src_ip is None or anchor.dst_ip is None:
        return []
    kinds: list = []
    if layers >= 4 and anchor.protocol is Protocol.TCP:
        kinds.append(RecipeKind.TCP_RESYN)
        if _is_established(anchor):
            kinds.append(RecipeKind.TCP_BAD_SEQ)
            kinds.append(RecipeKind.TCP_BAD_ACK)
    elif layers >= 4 and anchor.protocol is Protocol.UDP:
        kinds.append(RecipeKind.UDP_PAD)
    else:
        kinds.extend(LAYER3_RECIPES)
    if enable_ttl_trick and anchor.protocol is not Protocol.OTHER:
        kinds.append(RecipeKind.TTL_TRICK)
    return kinds


def craft_packet(kind: RecipeKind, anchor: Packet, payload_size: int,
                 rng: np.random.Generator) -> Packet:
    """Build one crafted packet of the given kind anchored on `anchor`.

    The caller supplies the timestamp later (the packet is created at the
    anchor's time and repositioned during rebuild).
    """
    if anchor.src_ip is None or anchor.dst_ip is None:
        raise InapplicableRecipe(f"{kind.value}: anchor has no IP endpoints")
    payload_size = int(min(max(payload_size, 0), MAX_PAYLOAD))

    common = dict(
        timestamp=anchor.timestamp,
        src_mac=anchor.src_mac, dst_mac=anchor.dst_mac,
        src_ip=anchor.src_ip, dst_ip=anchor.dst_ip,
        ttl=anchor.ttl if anchor.ttl is not None else 64,
        provenance=Provenance.CRAFTED,
    )

    if kind is RecipeKind.TCP_RESYN:
        if anchor.protocol is not Protocol.TCP:
            raise InapplicableRecipe("tcp_resyn needs a TCP anchor")
        pkt = Packet(protocol=Protocol.TCP, src_port=anchor.src_port,
                     dst_port=anchor.dst_port, seq=anchor.seq, ack=0,
                     tcp_flags=SYN, payload_len=0, payload=b"", **common)
    elif kind is RecipeKind.TCP_BAD_SEQ:
        if anchor.protocol is not Protocol.TCP or not _is_established(anchor):
            raise InapplicableRecipe("tcp_bad_seq needs an established TCP anchor")
        if rng.random() < 0.5:  # entirely below the window: already acknowledged
            seq = (anchor.seq - payload_size - int(rng.integers(1, 1 << 16))) % SEQ_MOD
        else:  # entirely above it
            seq = (anchor.seq + anchor.payload_len + RECV_WINDOW + 1
                   + int(rng.integers(0, 1 << 16))) % SEQ_MOD
        body = rng.integers(0, 256, size=payload_size, dtype=np.uint8).tobytes()
        pkt = Packet(protocol=Protocol.TCP, src_port=anchor.src_port,
                     dst_port=anchor.dst_port, seq=seq, ack=anchor.ack,
                     tcp_flags=ACK, payload_len=len(body), payload=body, **common)
    elif kind is RecipeKind.TCP_BAD_ACK:
        if anchor.protocol is not Protocol.TCP or not _is_established(anchor):
            raise InapplicableRecipe("tcp_bad_ack needs an established TCP anchor")
        if rng.random() < 0.5:
            bad_ack = (anchor.ack - int(rng.integers(1, 1 << 20))) % SEQ_MOD
        else:
            bad_ack = (anchor.ack + RECV_WINDOW + 1 + int(rng.integers(0, 1 << 16))) % SEQ_MOD
        pkt = Packet(protocol=Protocol.TCP, src_port=anchor.src_port,
                     dst_port=anchor.dst_port, seq=anchor.seq, ack=bad_ack,
                     tcp_flags=ACK, payload_len=0, payload=b"", **common)
    elif kind is RecipeKind.UDP_PAD:
        if anchor.protocol is not Protocol.UDP:
            raise InapplicableRecipe("udp_pad needs a UDP anchor")
        body = rng.integers(0, 256, size=payload_size, dtype=np.uint8).tobytes()
        pkt = Packet(protocol=Protocol.UDP, src_port=anchor.src_port,
                     dst_port=anchor.dst_port, payload_len=len(body),
                     payload=body, **common)
    elif kind is RecipeKind.ICMP_PAD:
        # unsolicited echo reply: carries padding, never answered
        body = rng.integers(0, 256, size=payload_size, dtype=np.uint8).tobytes()
        pkt = Packet(protocol=Protocol.ICMP, icmp_type=0, icmp_code=0,
                     payload_len=len(body), payload=body, **common)
    elif kind is RecipeKind.ICMP_DEPRECATED:
        itype = int(rng.choice(DEPRECATED_ICMP_TYPES))
        body = rng.integers(0, 256, size=payload_size, dtype=np.uint8).tobytes()
        pkt = Packet(protocol=Protocol.ICMP, icmp_type=itype, icmp_code=0,
                     payload_len=len(body), payload=body, **common)
    elif kind is RecipeKind.TTL_TRICK:
        # copy of the anchor that expires before reaching the victim
        if anchor.protocol is Protocol.OTHER:
            raise InapplicableRecipe("ttl_trick needs a decoded anchor")
        body = rng.integers(0, 256, size=payload_size, dtype=np.uint8).tobytes()
        low_ttl = int(rng.integers(1, TTL_TRICK_MAX + 1))
        common["ttl"] = low_ttl
        if anchor.protocol is Protocol.TCP:
            pkt = Packet(protocol=Protocol.TCP, src_port=anchor.src_port,
                         dst_port=anchor.dst_port, seq=anchor.seq, ack=anchor.ack,
                         tcp_flags=anchor.tcp_flags, payload_len=len(body),
                         payload=body, **common)
        elif anchor.protocol is Protocol.UDP:
            pkt = Packet(protocol=Protocol.UDP, src_port=anchor.src_port,
                         dst_port=anchor.dst_port, payload_len=len(body),
                         payload=body, **common)
        else:
            pkt = Packet(protocol=Protocol.ICMP, icmp_type=anchor.icmp_type,
                         icmp_code=anchor.icmp_code, payload_len=len(body),
                         payload=body, **common)
    else:
        raise InapplicableRecipe(f"unknown recipe {kind}")

    return with_frame(pkt)


def _seq_rel(a: int, b: int) -> int:
    """Signed distance a-b on the 32-bit sequence circle."""
    return ((a - b + (SEQ_MOD // 2)) % SEQ_MOD) - (SEQ_MOD // 2)


def crafted_is_structurally_safe(crafted: Packet, reference: Optional[Packet]) -> bool:
    """Judge one crafted packet against the nearest original packet of the
    same flow (`reference`, may be None when no flow neighbour exists).

    Accepts exactly the shapes the recipes emit: duplicate SYNs, data outside
    the receive window, bad acknowledgements, padded UDP, response-less or
    deprecated ICMP, and low-TTL copies.
    """
    if crafted.ttl is not None and crafted.ttl <= TTL_TRICK_MAX:
        return True  # dies before the victim regardless of content
    if crafted.protocol is Protocol.TCP:
        if reference is None or reference.protocol is not Protocol.TCP:
            return False
        if crafted.tcp_flags == SYN and crafted.payload_len == 0:
            return True  # re-establishment request on an existing flow
        if crafted.has_flag(ACK) and not crafted.has_flag(SYN):
            if crafted.payload_len == 0:
                rel_ack = _seq_rel(crafted.ack, reference.ack)
                return rel_ack != 0 and (rel_ack < 0 or rel_ack > RECV_WINDOW)
            rel = _seq_rel(crafted.seq, reference.seq)
            below = rel + crafted.payload_len <= 0
            above = rel >= reference.payload_len + RECV_WINDOW + 1
            return below or above
        return False
    if crafted.protocol is Protocol.UDP:
        return reference is not None and reference.protocol is Protocol.UDP
    if crafted.protocol is Protocol.ICMP:
        if crafted.icmp_type in DEPRECATED_ICMP_TYPES:
            return True
        return crafted.icmp_type == 0 and crafted.icmp_code == 0
    return False
