"""Invertible meta-info encoding of a mutated trace.

A trace of N original packets is flattened into a vector of
``N * (2 + 3*K)`` numbers: per packet one timestamp, one crafted-packet
count, and K craft sub-slots of (interarrival-before-anchor, protocol
layer, payload size). The vector is the traffic-mutation search space;
``rebuild`` turns any valid vector back into a concrete trace with the
crafted packets inserted immediately before their anchors.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import BudgetViolation, EmptyTrace, LayoutMismatch
from .craft import applicable_recipes, craft_packet
from .model import MAX_PAYLOAD, OverheadBudget, Packet, Protocol, TrafficTrace

ELAPSED_TOL = 1e-9
LAYER_MIN, LAYER_MAX = 3, 4


def default_craft_capacity(budget: OverheadBudget) -> int:
    """Per-packet craft sub-slot count: at least one slot, enough to spend the
    whole ratio on a single packet when the ratio exceeds one."""
    return max(1, math.ceil(budget.craft_ratio))


@dataclass(frozen=True)
class MetaInfoLayout:
    """Shape and bounds of the flattened search space for one trace."""

    n_pkts: int
    capacity: int                       # craft sub-slots per packet (K)
    budget: OverheadBudget
    base_timestamps: np.ndarray         # original packet timestamps
    craftable: np.ndarray               # bool per packet: may anchor crafted traffic
    gap_hi: float = field(init=False)   # upper bound for craft interarrival dims

    def __post_init__(self):
        if self.n_pkts <= 0:
            raise EmptyTrace("cannot lay out an empty trace")
        if self.capacity < 0:
            raise ValueError("craft capacity must be >= 0")
        mean_gap = self.elapsed0 / max(self.n_pkts - 1, 1)
        object.__setattr__(self, "gap_hi", max(mean_gap * self.budget.time_stretch, 1e-6))

    @property
    def block(self) -> int:
        return 2 + 3 * self.capacity

    @property
    def dims(self) -> int:
        return self.n_pkts * self.block

    @property
    def t0(self) -> float:
        return float(self.base_timestamps[0])

    @property
    def elapsed0(self) -> float:
        return float(self.base_timestamps[-1] - self.base_timestamps[0])

    @property
    def ts_max(self) -> float:
        return self.t0 + self.budget.max_elapsed(self.elapsed0)

    @property
    def craft_pool(self) -> int:
        return self.budget.craft_pool(self.n_pkts)

    # --- index helpers -------------------------------------------------
    def ts_index(self, i: int) -> int:
        return i * self.block

    def count_index(self, i: int) -> int:
        return i * self.block + 1

    def craft_index(self, i: int, j: int, offset: int) -> int:
        return i * self.block + 2 + 3 * j + offset

    @property
    def ts_slice(self) -> slice:
        return slice(0, self.dims, self.block)

    @property
    def count_slice(self) -> slice:
        return slice(1, self.dims, self.block)

    def bounds(self) -> tuple:
        """(lo, hi) arrays for clipping positions, one entry per dimension."""
        lo = np.zeros(self.dims)
        hi = np.zeros(self.dims)
        lo[self.ts_slice] = self.t0
        hi[self.ts_slice] = self.ts_max
        hi[self.count_slice] = np.where(self.craftable, float(self.capacity), 0.0)
        for j in range(self.capacity):
            for i in range(self.n_pkts):
                base = self.craft_index(i, j, 0)
                hi[base] = self.gap_hi
                lo[base + 1], hi[base + 1] = LAYER_MIN, LAYER_MAX
                hi[base + 2] = MAX_PAYLOAD
        return lo, hi


@dataclass
class MetaInfoVector:
    layout: MetaInfoLayout
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.layout.dims,):
            raise LayoutMismatch(
                f"expected {self.layout.dims} dims, got {self.values.shape}"
            )

    @property
    def timestamps(self) -> np.ndarray:
        return self.values[self.layout.ts_slice]

    @property
    def craft_counts(self) -> np.ndarray:
        return self.values[self.layout.count_slice]

    def craft_field(self, i: int, j: int, offset: int) -> float:
        return float(self.values[self.layout.craft_index(i, j, offset)])

    def total_crafted(self) -> int:
        return int(np.rint(self.craft_counts).sum())

    def copy(self) -> "MetaInfoVector":
        return MetaInfoVector(self.layout, self.values.copy())

    def validate(self) -> None:
        lay = self.layout
        ts = self.timestamps
        if np.any(np.diff(ts) < -ELAPSED_TOL):
            raise ValueError("meta-info timestamps must be non-decreasing")
        max_elapsed = lay.budget.max_elapsed(lay.elapsed0)
        if ts[-1] - ts[0] > max_elapsed + ELAPSED_TOL * max(1.0, max_elapsed):
            raise BudgetViolation(
                f"elapsed {ts[-1] - ts[0]:.6g} exceeds budget {max_elapsed:.6g}"
            )
        if self.total_crafted() > lay.craft_pool:
            raise BudgetViolation(
                f"{self.total_crafted()} crafted slots exceed pool {lay.craft_pool}"
            )


def vectorize(trace: TrafficTrace, budget: OverheadBudget,
              capacity: Optional[int] = None,
              attacker_ip: Optional[str] = None) -> MetaInfoVector:
    """Flatten a trace into its identity meta-info vector (no mutation yet).

    `attacker_ip` restricts craft anchoring to packets sent by that host;
    by default every original packet may anchor crafted traffic.
    """
    if len(trace) == 0:
        raise EmptyTrace("cannot vectorize an empty trace")
    if capacity is None:
        capacity = default_craft_capacity(budget)
    base_ts = np.array([p.timestamp for p in trace.packets], dtype=float)
    if attacker_ip is None:
        craftable = np.ones(len(trace), dtype=bool)
    else:
        craftable = np.array([p.src_ip == attacker_ip for p in trace.packets])
    layout = MetaInfoLayout(len(trace), capacity, budget, base_ts, craftable)
    values = np.zeros(layout.dims)
    values[layout.ts_slice] = base_ts
    return MetaInfoVector(layout, values)


def _rebuild_rng(miv: MetaInfoVector, seed: int) -> np.random.Generator:
    """Deterministic generator keyed on the position itself, so the same
    vector always rebuilds to the same trace."""
    digest = hashlib.sha256(np.ascontiguousarray(miv.values).tobytes()).digest()
    words = [int.from_bytes(digest[k:k + 4], "little") for k in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF] + words))


def rebuild(miv: MetaInfoVector, original: TrafficTrace,
            rng: Optional[np.random.Generator] = None, *, seed: int = 0,
            enable_ttl_trick: bool = False) -> TrafficTrace:
    """Materialise the trace a meta-info vector describes.

    Original packets keep their content and order, timestamps come from the
    vector; each active craft sub-slot inserts one crafted packet immediately
    before its anchor, no later than the anchor and no earlier than the
    previous original packet.
    """
    lay = miv.layout
    if lay.n_pkts != len(original):
        raise LayoutMismatch(
            f"layout is for {lay.n_pkts} packets, trace has {len(original)}"
        )
    miv.validate()
    if rng is None:
        rng = _rebuild_rng(miv, seed)

    ts = miv.timestamps
    counts = np.rint(miv.craft_counts).astype(int)
    out: list = []
    for i, anchor0 in enumerate(original.packets):
        anchor = anchor0.at_time(float(ts[i]))
        n_here = int(np.clip(counts[i], 0, lay.capacity if lay.craftable[i] else 0))
        crafted_here = []
        for j in range(n_here):
            layers = int(np.clip(np.rint(miv.craft_field(i, j, 1)), LAYER_MIN, LAYER_MAX))
            payload_size = int(np.clip(np.rint(miv.craft_field(i, j, 2)), 0, MAX_PAYLOAD))
            kinds = applicable_recipes(anchor, layers, enable_ttl_trick)
            if not kinds:
                continue
            kind = kinds[int(rng.integers(0, len(kinds)))]
            pkt = craft_packet(kind, anchor, payload_size, rng)
            gap = max(float(miv.craft_field(i, j, 0)), 0.0)
            floor_t = float(ts[i - 1]) if i > 0 else float(ts[0])
            crafted_here.append((max(anchor.timestamp - gap, floor_t), j, pkt))
        crafted_here.sort(key=lambda item: (item[0], item[1]))
        out.extend(pkt.at_time(t) for t, _, pkt in crafted_here)
        out.append(anchor)

    mutated = TrafficTrace.from_packets(out)
    max_elapsed = lay.budget.max_elapsed(original.elapsed)
    if mutated.elapsed > max_elapsed + ELAPSED_TOL * max(1.0, max_elapsed):
        raise BudgetViolation("rebuilt trace exceeds the elapsed budget")
    n_crafted = len(mutated.crafted())
    if n_crafted > lay.craft_pool:
        raise BudgetViolation(
            f"rebuilt trace carries {n_crafted} crafted packets, pool is {lay.craft_pool}"
        )
    return mutated
