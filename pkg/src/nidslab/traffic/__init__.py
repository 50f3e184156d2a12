from .model import (
    ACK, FIN, MAX_PAYLOAD, PSH, RST, SYN, URG,
    OverheadBudget, Packet, Protocol, Provenance, TrafficTrace, trace_to_csv,
)
from .frames import decode_frame, encode_frame, with_frame
from .pcap import parse_pcap, read_pcap, serialize_pcap, write_pcap
from .craft import (
    DEPRECATED_ICMP_TYPES, RecipeKind, applicable_recipes, craft_packet,
    crafted_is_structurally_safe,
)
from .metainfo import (
    MetaInfoLayout, MetaInfoVector, default_craft_capacity, rebuild, vectorize,
)
from .safety import SafetyReport, check_safety
from .baselines import random_dup, random_st

__all__ = [
    "ACK", "FIN", "MAX_PAYLOAD", "PSH", "RST", "SYN", "URG",
    "OverheadBudget", "Packet", "Protocol", "Provenance", "TrafficTrace",
    "trace_to_csv", "decode_frame", "encode_frame", "with_frame",
    "parse_pcap", "read_pcap", "serialize_pcap", "write_pcap",
    "DEPRECATED_ICMP_TYPES", "RecipeKind", "applicable_recipes",
    "craft_packet", "crafted_is_structurally_safe",
    "MetaInfoLayout", "MetaInfoVector", "default_craft_capacity",
    "rebuild", "vectorize", "SafetyReport", "check_safety",
    "random_dup", "random_st",
]
