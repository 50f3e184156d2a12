"""Target detector zoo, training factory, and JSON persistence."""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from ..errors import EmptyTraining
from .base import AnomalyDetector, Label, calibrate_threshold
from .grouping import correlation_distance, feature_group
from .autoencoder import EnsembleAutoencoderDetector, train_autoencoder
from .mlp import MlpDetector
from .logreg import LogisticDetector
from .iforest import IsolationForestDetector

_REGISTRY = {
    cls.kind: cls
    for cls in (EnsembleAutoencoderDetector, MlpDetector, LogisticDetector,
                IsolationForestDetector)
}

UNSUPERVISED_KINDS = ("ensemble_ae", "iforest")
SUPERVISED_KINDS = ("mlp", "logreg")


def train_detector(kind: str, rows: np.ndarray,
                   labels: Optional[np.ndarray] = None,
                   hyper: Optional[dict] = None,
                   rng: Optional[np.random.Generator] = None) -> AnomalyDetector:
    """Train one detector; unsupervised kinds expect benign-only rows,
    supervised kinds expect labels (0 benign / 1 malicious)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size == 0:
        raise EmptyTraining(f"{kind}: no training rows")
    hyper = dict(hyper or {})
    if rng is None:
        rng = np.random.default_rng(hyper.pop("seed", 0))
    if kind not in _REGISTRY:
        raise ValueError(f"unknown detector kind {kind!r}")
    if kind in SUPERVISED_KINDS:
        if labels is None:
            raise EmptyTraining(f"{kind} is supervised and needs labels")
        return _REGISTRY[kind].train(rows, np.asarray(labels, dtype=float),
                                     rng=rng, **hyper)
    return _REGISTRY[kind].train(rows, rng=rng, **hyper)


def load_detector(obj: dict) -> AnomalyDetector:
    kind = obj.get("kind")
    if kind not in _REGISTRY:
        raise ValueError(f"unknown detector kind {kind!r}")
    return _REGISTRY[kind].from_dict(obj)


def load_detector_json(path) -> AnomalyDetector:
    with open(path) as fh:
        return load_detector(json.load(fh))


__all__ = [
    "AnomalyDetector", "EnsembleAutoencoderDetector", "IsolationForestDetector",
    "Label", "LogisticDetector", "MlpDetector", "SUPERVISED_KINDS",
    "UNSUPERVISED_KINDS", "calibrate_threshold", "correlation_distance",
    "feature_group", "load_detector", "load_detector_json", "train_autoencoder",
    "train_detector",
]
