"""One-shot random mutation baselines: interval spreading and duplication."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .model import OverheadBudget, Provenance, TrafficTrace


def random_st(trace: TrafficTrace, budget: OverheadBudget,
              rng: np.random.Generator) -> TrafficTrace:
    """Randomly spread inter-arrival times.

    Each gap is scaled by an independent factor in [1, time_stretch], so the
    total elapsed time never exceeds the budget and never shrinks.
    """
    if len(trace) < 2:
        return trace
    ts = np.array([p.timestamp for p in trace.packets])
    gaps = np.diff(ts)
    factors = 1.0 + rng.random(gaps.shape) * (budget.time_stretch - 1.0)
    new_ts = np.concatenate([[ts[0]], ts[0] + np.cumsum(gaps * factors)])
    return TrafficTrace.from_packets(
        p.at_time(float(t)) for p, t in zip(trace.packets, new_ts)
    )


def random_dup(trace: TrafficTrace, budget: OverheadBudget,
               rng: np.random.Generator) -> TrafficTrace:
    """Duplicate randomly chosen original packets next to their source.

    Spends the whole crafted-packet pool; duplicates carry CRAFTED provenance
    and identical content (retransmission-like, so structurally inert).
    """
    n = len(trace)
    pool = min(budget.craft_pool(n), n)
    if pool == 0 or n == 0:
        return trace
    chosen = set(rng.choice(n, size=pool, replace=False).tolist())
    out = []
    for i, pkt in enumerate(trace.packets):
        out.append(pkt)
        if i in chosen:
            out.append(replace(pkt, provenance=Provenance.CRAFTED))
    return TrafficTrace.from_packets(out)
