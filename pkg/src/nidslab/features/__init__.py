from dataclasses import dataclass, field

import numpy as np

from .damped import DampedStat, damped_update
from .kernels import BACKEND, StatsPool, get_stats_pool_class
from .packet import (
    DEFAULT_LAMBDAS, PacketFeatureExtractor, packet_extract,
    packet_feature_names, pool_feature_names,
)
from .flow import FLOW_FEATURE_NAMES, FlowRecord, flow_extract
from .normalize import Normalization, fit_normalization, normalize
from .surrogate import ExtractorConfig, ExtractorKind, FeaturePipeline, build_surrogate
from .csvio import feature_csv, read_feature_csv, write_feature_csv


@dataclass
class FeatureVector:
    """One extracted vector plus the mask of enabled dimensions."""

    values: np.ndarray
    mask: np.ndarray = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.mask is None:
            self.mask = np.ones(len(self.values), dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
        if len(self.mask) != len(self.values):
            raise ValueError("mask and values lengths differ")

    def enabled(self) -> np.ndarray:
        return self.values[self.mask]


__all__ = [
    "BACKEND", "DEFAULT_LAMBDAS", "FLOW_FEATURE_NAMES", "DampedStat",
    "ExtractorConfig", "ExtractorKind", "FeaturePipeline", "FeatureVector",
    "FlowRecord", "Normalization", "PacketFeatureExtractor", "StatsPool",
    "build_surrogate", "damped_update", "feature_csv", "fit_normalization",
    "flow_extract", "get_stats_pool_class", "normalize", "packet_extract",
    "packet_feature_names", "pool_feature_names", "read_feature_csv",
    "write_feature_csv",
]
