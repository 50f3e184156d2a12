"""Anomaly-detector contract shared by every target model.

A detector exposes a nonnegative score (higher = more malicious), holds a
calibrated threshold, and predicts MALICIOUS exactly when score > threshold.
Trained detectors are immutable and safe to share across threads.
"""

from __future__ import annotations

import enum
import json
import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from ..errors import DimensionMismatch


class Label(enum.Enum):
    BENIGN = 0
    MALICIOUS = 1


class AnomalyDetector(ABC):
    kind: str = "abstract"

    def __init__(self):
        self.threshold: float = math.inf
        self.n_dims: Optional[int] = None

    @abstractmethod
    def score_batch(self, rows: np.ndarray) -> np.ndarray:
        """Nonnegative anomaly scores, one per row."""

    def score(self, fv: np.ndarray) -> float:
        return float(self.score_batch(np.atleast_2d(fv))[0])

    def predict(self, fv: np.ndarray) -> Label:
        return Label.MALICIOUS if self.score(fv) > self.threshold else Label.BENIGN

    def predict_batch(self, rows: np.ndarray) -> np.ndarray:
        return self.score_batch(rows) > self.threshold

    def _check_dims(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if self.n_dims is not None and rows.shape[1] != self.n_dims:
            raise DimensionMismatch(
                f"detector was trained on {self.n_dims} dims, got {rows.shape[1]}"
            )
        return rows

    # -- persistence --------------------------------------------------------
    @abstractmethod
    def to_dict(self) -> dict: ...

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)


def calibrate_threshold(scores: Sequence[float], percentile: float = 99.0) -> float:
    """Nearest-rank percentile of benign validation scores."""
    scores = np.asarray(scores, dtype=float)
    if scores.size < 10:
        raise ValueError("need at least 10 validation scores to calibrate")
    if not 0 < percentile <= 100:
        raise ValueError("percentile must be in (0, 100]")
    ordered = np.sort(scores)
    rank = max(int(math.ceil(percentile / 100.0 * ordered.size)), 1)
    return float(ordered[rank - 1])
