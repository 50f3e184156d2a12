"""Functionality-preservation audit for mutated traffic.

A mutation is considered safe when (a) every original packet survives with
identical content in the original relative order, (b) the crafted-packet
count stays inside the budget pool, (c) the elapsed time stays inside the
stretch budget, and (d) every crafted packet is structurally inert (a
duplicate of original content, or one of the recipe shapes).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .craft import crafted_is_structurally_safe
from .model import OverheadBudget, Packet, Protocol, Provenance, TrafficTrace

ELAPSED_TOL = 1e-9


@dataclass
class SafetyReport:
    originals_preserved: bool
    craft_count_ok: bool
    elapsed_ok: bool
    crafted_rules_ok: bool
    crafted_count: int = 0
    elapsed_ratio: float = 1.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.originals_preserved and self.craft_count_ok
                and self.elapsed_ok and self.crafted_rules_ok)


def _flow_key(p: Packet):
    return (p.protocol, p.src_ip, p.dst_ip, p.src_port, p.dst_port)


def _nearest_flow_reference(mutated: TrafficTrace, idx: int) -> Optional[Packet]:
    """Closest ORIGINAL packet of the same flow: the next one if any (crafted
    packets sit right before their anchor), else the previous one."""
    target = _flow_key(mutated.packets[idx])
    n = len(mutated.packets)
    for k in range(idx + 1, n):
        p = mutated.packets[k]
        if p.provenance is Provenance.ORIGINAL and _flow_key(p) == target:
            return p
    for k in range(idx - 1, -1, -1):
        p = mutated.packets[k]
        if p.provenance is Provenance.ORIGINAL and _flow_key(p) == target:
            return p
    return None


def check_safety(original: TrafficTrace, mutated: TrafficTrace,
                 budget: OverheadBudget) -> SafetyReport:
    notes: list = []

    # (a) originals preserved: content equality in the same relative order
    mutated_originals = [p.content_key() for p in mutated.packets
                         if p.provenance is Provenance.ORIGINAL]
    original_keys = [p.content_key() for p in original.packets]
    originals_ok = mutated_originals == original_keys
    if not originals_ok:
        notes.append(
            f"original packets altered: {len(original_keys)} expected, "
            f"{len(mutated_originals)} matched in order"
        )

    # (b) crafted count inside the global pool
    crafted = [(i, p) for i, p in enumerate(mutated.packets)
               if p.provenance is Provenance.CRAFTED]
    pool = budget.craft_pool(len(original))
    count_ok = len(crafted) <= pool
    if not count_ok:
        notes.append(f"{len(crafted)} crafted packets exceed pool {pool}")

    # (c) elapsed stretch inside budget
    max_elapsed = budget.max_elapsed(original.elapsed)
    elapsed_ok = mutated.elapsed <= max_elapsed + ELAPSED_TOL * max(1.0, max_elapsed)
    ratio = (mutated.elapsed / original.elapsed) if original.elapsed > 0 else 1.0
    if not elapsed_ok:
        notes.append(f"elapsed {mutated.elapsed:.6g} exceeds {max_elapsed:.6g}")

    # (d) every crafted packet structurally inert
    original_contents = set(original_keys)
    original_endpoints = {(p.src_ip, p.dst_ip) for p in original.packets}
    rules_ok = True
    for idx, pkt in crafted:
        if pkt.content_key() in original_contents:
            continue  # duplicate of an original packet (retransmission-like)
        if (pkt.src_ip, pkt.dst_ip) not in original_endpoints:
            rules_ok = False
            notes.append(f"crafted packet #{idx} uses endpoints absent from the original traffic")
            continue
        ref = _nearest_flow_reference(mutated, idx)
        if pkt.protocol is Protocol.ICMP:
            ref = None  # ICMP crafts are judged on their own type/code
        if not crafted_is_structurally_safe(pkt, ref):
            rules_ok = False
            notes.append(f"crafted packet #{idx} violates its recipe shape")

    return SafetyReport(
        originals_preserved=originals_ok,
        craft_count_ok=count_ok,
        elapsed_ok=elapsed_ok,
        crafted_rules_ok=rules_ok,
        crafted_count=len(crafted),
        elapsed_ratio=ratio,
        notes=notes,
    )
