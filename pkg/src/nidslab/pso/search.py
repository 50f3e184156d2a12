"""Particle-swarm search over meta-info vectors.

Each particle is a candidate traffic mutant: its position is a flattened
meta-info vector, its fitness is how close the mutant's extracted features
land to a target feature set (lower is better). Positions are clipped,
discretized, and budget-repaired after every velocity step so the swarm
never leaves the space of valid mutants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..features.surrogate import FeaturePipeline
from ..traffic.metainfo import MetaInfoLayout, MetaInfoVector, rebuild, vectorize
from ..traffic.model import OverheadBudget, Provenance, TrafficTrace


@dataclass
class PsoConfig:
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    swarm_size: int = 10
    iterations: int = 5
    time_sections: int = 10   # candidate timestamp positions per original gap
    k_nearest: Optional[int] = None  # None = average over the whole target set
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.time_sections < 1:
            raise ValueError("time_sections must be >= 1")


@dataclass
class Swarm:
    layout: MetaInfoLayout
    positions: np.ndarray       # (n, D)
    velocities: np.ndarray      # (n, D)
    best_positions: np.ndarray  # (n, D)
    best_fits: np.ndarray       # (n,)
    global_best: np.ndarray = field(default=None)
    global_best_fit: float = np.inf

    @property
    def size(self) -> int:
        return self.positions.shape[0]


def enforce_craft_pool(values: np.ndarray, layout: MetaInfoLayout) -> None:
    """Round craft counts, clip to per-packet capacity, then shave the
    largest counts (lowest index first) until the global pool holds."""
    counts = np.floor(values[layout.count_slice] + 0.5)
    caps = np.where(layout.craftable, layout.capacity, 0)
    counts = np.clip(counts, 0, caps)
    excess = counts.sum() - layout.craft_pool
    while excess > 0:
        i = int(np.argmax(counts))
        counts[i] -= 1
        excess -= 1
    values[layout.count_slice] = counts


def clip_position(values: np.ndarray, layout: MetaInfoLayout) -> np.ndarray:
    """Project an arbitrary vector back into the valid search space."""
    lo, hi = layout.bounds()
    out = np.clip(values, lo, hi)
    out[layout.ts_slice] = np.sort(out[layout.ts_slice])
    enforce_craft_pool(out, layout)
    for j in range(layout.capacity):
        for i in range(layout.n_pkts):
            idx = layout.craft_index(i, j, 1)
            out[idx] = float(np.floor(out[idx] + 0.5))
    return out


def initialize(trace: TrafficTrace, budget: OverheadBudget, config: PsoConfig,
               rng: np.random.Generator,
               attacker_ip: Optional[str] = None) -> Swarm:
    """Disperse the swarm: craft fields uniform in range, craft counts
    random under the pool, timestamps snapped to one of `time_sections`
    evenly spaced stretch points per original gap. Velocities start at zero.
    """
    identity = vectorize(trace, budget, attacker_ip=attacker_ip)
    layout = identity.layout
    base_ts = layout.base_timestamps
    gaps = np.diff(base_ts)
    m = config.time_sections

    positions = np.zeros((config.swarm_size, layout.dims))
    for p in range(config.swarm_size):
        x = np.zeros(layout.dims)
        sections = rng.integers(1, m + 1, size=len(gaps)) if len(gaps) else np.zeros(0)
        stretched = gaps * budget.time_stretch * (sections / m)
        x[layout.ts_slice] = np.concatenate([[layout.t0], layout.t0 + np.cumsum(stretched)])
        x[layout.count_slice] = rng.integers(0, layout.capacity + 1, size=layout.n_pkts)
        for i in range(layout.n_pkts):
            for j in range(layout.capacity):
                x[layout.craft_index(i, j, 0)] = rng.uniform(0.0, layout.gap_hi)
                x[layout.craft_index(i, j, 1)] = float(rng.integers(3, 5))
                x[layout.craft_index(i, j, 2)] = float(rng.integers(0, 1461))
        positions[p] = clip_position(x, layout)

    fits = np.full(config.swarm_size, np.inf)
    return Swarm(layout=layout, positions=positions,
                 velocities=np.zeros_like(positions),
                 best_positions=positions.copy(), best_fits=fits)


def update_velocity(velocity: np.ndarray, position: np.ndarray,
                    best_position: np.ndarray, global_best: np.ndarray,
                    config: PsoConfig, rng: np.random.Generator) -> np.ndarray:
    """v' = inertia*v + r1*c1*(b - x) + r2*c2*(g - x); r1, r2 are scalars
    drawn once per particle per iteration."""
    r1 = rng.random()
    r2 = rng.random()
    return (config.inertia * velocity
            + r1 * config.cognitive * (best_position - position)
            + r2 * config.social * (global_best - position))


def update_position(position: np.ndarray, velocity: np.ndarray,
                    layout: MetaInfoLayout) -> np.ndarray:
    return clip_position(position + velocity, layout)


class FitnessEvaluator:
    """Rebuild a mutant, extract its features from the primed snapshot, and
    reduce them to one number.

    target mode: mean over malicious rows of the mean Euclidean distance to
    the target feature set (or its k nearest members).
    score mode: mean detector score over malicious rows (the white-box
    baseline's objective).
    """

    def __init__(self, original: TrafficTrace, budget: OverheadBudget,
                 pipeline: FeaturePipeline,
                 targets: Optional[np.ndarray] = None,
                 score_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 k_nearest: Optional[int] = None,
                 row_filter: Optional[Sequence[int]] = None,
                 rebuild_seed: int = 0,
                 attacker_ip: Optional[str] = None):
        if (targets is None) == (score_fn is None):
            raise ValueError("provide exactly one of targets / score_fn")
        self.original = original
        self.budget = budget
        self.pipeline = pipeline
        self.targets = None if targets is None else np.atleast_2d(targets)
        self.score_fn = score_fn
        self.k_nearest = k_nearest
        self.row_filter = None if row_filter is None else list(row_filter)
        self.rebuild_seed = rebuild_seed
        self.attacker_ip = attacker_ip
        self._layout = vectorize(original, budget, attacker_ip=attacker_ip).layout

    def rebuild_trace(self, values: np.ndarray) -> TrafficTrace:
        miv = MetaInfoVector(self._layout, np.asarray(values, dtype=float))
        return rebuild(miv, self.original, seed=self.rebuild_seed)

    def malicious_rows(self, trace: TrafficTrace) -> np.ndarray:
        rows, mal = self.pipeline.extract_normalized(trace)
        rows = rows[mal]
        if self.row_filter is not None:
            rows = rows[self.row_filter]
        return rows

    def __call__(self, values: np.ndarray) -> float:
        return self.evaluate_trace(self.rebuild_trace(values))

    def evaluate_trace(self, trace: TrafficTrace) -> float:
        rows = self.malicious_rows(trace)
        if rows.shape[0] == 0:
            return float(np.inf)
        if self.score_fn is not None:
            return float(np.mean(self.score_fn(rows)))
        diff = rows[:, None, :] - self.targets[None, :, :]
        dists = np.sqrt((diff * diff).sum(axis=2))
        k = self.k_nearest
        if k is not None and k < dists.shape[1]:
            dists = np.sort(dists, axis=1)[:, :k]
        return float(dists.mean(axis=1).mean())


def mutate(trace: TrafficTrace, evaluator: FitnessEvaluator, config: PsoConfig,
           budget: OverheadBudget,
           attacker_ip: Optional[str] = None) -> Tuple[TrafficTrace, List[float]]:
    """Run the swarm and return (best mutant, global-best fitness trail).

    The trail has one entry for the initial population and one per
    iteration; it is non-increasing by construction.
    """
    rng = np.random.default_rng(config.seed)
    swarm = initialize(trace, budget, config, rng, attacker_ip=attacker_ip)

    def evaluate_all():
        for p in range(swarm.size):
            fit = evaluator(swarm.positions[p])
            if fit < swarm.best_fits[p]:
                swarm.best_fits[p] = fit
                swarm.best_positions[p] = swarm.positions[p].copy()
            if fit < swarm.global_best_fit:
                swarm.global_best_fit = fit
                swarm.global_best = swarm.positions[p].copy()

    evaluate_all()
    history = [swarm.global_best_fit]
    for _ in range(config.iterations):
        for p in range(swarm.size):
            v = update_velocity(swarm.velocities[p], swarm.positions[p],
                                swarm.best_positions[p], swarm.global_best,
                                config, rng)
            swarm.velocities[p] = v
            swarm.positions[p] = update_position(swarm.positions[p], v, swarm.layout)
        evaluate_all()
        history.append(swarm.global_best_fit)

    best_trace = evaluator.rebuild_trace(swarm.global_best)
    return best_trace, history
