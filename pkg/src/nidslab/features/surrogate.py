"""Feature pipelines and surrogate-extractor construction.

A :class:`FeaturePipeline` bundles an extractor kind, the dimension mask it
exposes, and a fitted normalization; it is what detectors and the mutation
search consume. ``build_surrogate`` degrades a target pipeline to what an
attacker with partial feature knowledge could assemble: a random subset of
the real dimensions plus the always-computable common pool.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..traffic.model import Provenance, TrafficTrace
from .flow import FLOW_FEATURE_NAMES, flow_extract
from .normalize import Normalization, fit_normalization, normalize
from .packet import DEFAULT_LAMBDAS, PacketFeatureExtractor


class ExtractorKind(enum.Enum):
    PACKET_DAMPED = "packet_damped"
    FLOW = "flow"


@dataclass
class ExtractorConfig:
    kind: ExtractorKind = ExtractorKind.PACKET_DAMPED
    lambdas: tuple = DEFAULT_LAMBDAS
    include_pool: bool = False
    known_mask: Optional[np.ndarray] = None    # over the target's dims; None = all
    normalization: Optional[Normalization] = None


class FeaturePipeline:
    """Extraction -> column selection -> normalization, with state fork.

    For the packet extractor the pipeline owns a stateful
    :class:`PacketFeatureExtractor` that can be primed with context traffic
    and forked for replaying alternative segments. The flow extractor is
    stateless per trace.
    """

    def __init__(self, config: ExtractorConfig):
        self.config = config
        if config.kind is ExtractorKind.PACKET_DAMPED:
            self._state = PacketFeatureExtractor(config.lambdas, config.include_pool)
            raw_names = self._state.feature_names()
        else:
            self._state = None
            raw_names = list(FLOW_FEATURE_NAMES)
        if config.known_mask is None:
            self.mask = np.ones(len(raw_names), dtype=bool)
        else:
            self.mask = np.asarray(config.known_mask, dtype=bool)
            if len(self.mask) != len(raw_names):
                raise ValueError("known_mask length does not match extractor dims")
        self._raw_names = raw_names

    # -- shape ------------------------------------------------------------
    @property
    def n_dims(self) -> int:
        return int(self.mask.sum())

    def feature_names(self) -> List[str]:
        return [n for n, keep in zip(self._raw_names, self.mask) if keep]

    # -- state ------------------------------------------------------------
    def prime(self, trace: TrafficTrace) -> np.ndarray:
        """Feed context traffic through the stateful extractor; returns the
        masked rows of that traffic."""
        if self._state is None:
            return self._raw_rows(trace)[0][:, self.mask]
        return self._state.process_trace(trace)[:, self.mask]

    def fork(self) -> "FeaturePipeline":
        other = FeaturePipeline.__new__(FeaturePipeline)
        other.config = self.config
        other.mask = self.mask
        other._raw_names = self._raw_names
        other._state = self._state.fork() if self._state is not None else None
        return other

    # -- extraction ---------------------------------------------------------
    def _raw_rows(self, trace: TrafficTrace) -> Tuple[np.ndarray, np.ndarray]:
        """(raw feature rows, bool array marking rows from original packets)."""
        if self.config.kind is ExtractorKind.PACKET_DAMPED:
            state = self._state.fork()
            rows = state.process_trace(trace)
            mal = np.array([p.provenance is Provenance.ORIGINAL for p in trace.packets])
        else:
            pairs = flow_extract(trace)
            if pairs:
                rows = np.vstack([vec for _, vec in pairs])
                mal = np.array([rec.has_original for rec, _ in pairs])
            else:
                rows = np.zeros((0, len(FLOW_FEATURE_NAMES)))
                mal = np.zeros(0, dtype=bool)
        return rows, mal

    def extract(self, trace: TrafficTrace) -> Tuple[np.ndarray, np.ndarray]:
        """Masked raw rows for a trace plus the original-row marker.

        Stateful extraction forks the primed state, so repeated calls see
        the same context.
        """
        rows, mal = self._raw_rows(trace)
        return rows[:, self.mask], mal

    def fit_normalization(self, rows: np.ndarray) -> None:
        self.config.normalization = fit_normalization(rows)

    def apply_normalization(self, rows: np.ndarray) -> np.ndarray:
        if self.config.normalization is None:
            raise ValueError("normalization has not been fitted")
        return normalize(rows, self.config.normalization)

    def extract_normalized(self, trace: TrafficTrace) -> Tuple[np.ndarray, np.ndarray]:
        rows, mal = self.extract(trace)
        return self.apply_normalization(rows), mal


def build_surrogate(target: FeaturePipeline, knowledge_fraction: float,
                    rng: np.random.Generator) -> FeaturePipeline:
    """Attacker-side stand-in for the target's feature extractor.

    fraction 1.0 is the gray-box case: the exact target pipeline (fresh
    state, unfitted normalization). Below 1.0 the surrogate keeps a random
    ``floor(fraction * n_known)`` subset of the target's dimensions and adds
    the whole common pool; fraction 0.0 is the pool alone.
    """
    if not 0.0 <= knowledge_fraction <= 1.0:
        raise ValueError("knowledge_fraction must be in [0, 1]")
    if target.config.kind is not ExtractorKind.PACKET_DAMPED:
        raise ValueError("surrogates are built for the packet extractor")

    if knowledge_fraction == 1.0:
        cfg = ExtractorConfig(
            kind=target.config.kind,
            lambdas=target.config.lambdas,
            include_pool=target.config.include_pool,
            known_mask=target.mask.copy(),
        )
        return FeaturePipeline(cfg)

    target_dims = np.flatnonzero(target.mask)
    n_keep = int(knowledge_fraction * len(target_dims))
    kept = rng.choice(target_dims, size=n_keep, replace=False) if n_keep else np.array([], dtype=int)

    probe = PacketFeatureExtractor(target.config.lambdas, include_pool=True)
    full_dims = probe.n_dims
    target_block = PacketFeatureExtractor(target.config.lambdas, include_pool=False).n_dims
    mask = np.zeros(full_dims, dtype=bool)
    mask[kept] = True
    mask[target_block:] = True  # the common pool is always available
    cfg = ExtractorConfig(
        kind=ExtractorKind.PACKET_DAMPED,
        lambdas=target.config.lambdas,
        include_pool=True,
        known_mask=mask,
    )
    return FeaturePipeline(cfg)
