"""Isolation forest with the standard path-length anomaly score.

score(x) = 2 ** (-E[path(x)] / c(subsample)), strictly inside (0, 1).
Trees are plain nested dicts so the whole model serializes to JSON.
"""

from __future__ import annotations

import math
from typing import List, Optional

import numpy as np

from ..errors import EmptyTraining
from .base import AnomalyDetector

DEFAULT_TREES = 100
DEFAULT_SUBSAMPLE = 256

_EULER = 0.5772156649015329


def harmonic_path_norm(n: int) -> float:
    """Average unsuccessful-search depth c(n) in a binary search tree."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    return 2.0 * (math.log(n - 1.0) + _EULER) - 2.0 * (n - 1.0) / n


def _build_tree(rows: np.ndarray, depth: int, max_depth: int,
                rng: np.random.Generator) -> dict:
    n = rows.shape[0]
    if depth >= max_depth or n <= 1:
        return {"size": int(n)}
    spans = rows.max(axis=0) - rows.min(axis=0)
    usable = np.flatnonzero(spans > 0)
    if usable.size == 0:
        return {"size": int(n)}
    dim = int(rng.choice(usable))
    lo, hi = float(rows[:, dim].min()), float(rows[:, dim].max())
    split = float(rng.uniform(lo, hi))
    mask = rows[:, dim] < split
    return {
        "dim": dim,
        "split": split,
        "left": _build_tree(rows[mask], depth + 1, max_depth, rng),
        "right": _build_tree(rows[~mask], depth + 1, max_depth, rng),
    }


def _path_length(tree: dict, x: np.ndarray, depth: int = 0) -> float:
    if "size" in tree:
        return depth + harmonic_path_norm(tree["size"])
    branch = tree["left"] if x[tree["dim"]] < tree["split"] else tree["right"]
    return _path_length(branch, x, depth + 1)


class IsolationForestDetector(AnomalyDetector):
    kind = "iforest"

    def __init__(self):
        super().__init__()
        self.trees: List[dict] = []
        self.subsample: int = DEFAULT_SUBSAMPLE

    @staticmethod
    def train(rows: np.ndarray, n_trees: int = DEFAULT_TREES,
              subsample: int = DEFAULT_SUBSAMPLE,
              rng: Optional[np.random.Generator] = None) -> "IsolationForestDetector":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if rows.size == 0:
            raise EmptyTraining("isolation forest needs training rows")
        if rng is None:
            rng = np.random.default_rng(0)

        det = IsolationForestDetector()
        det.n_dims = rows.shape[1]
        det.subsample = min(subsample, rows.shape[0])
        max_depth = max(1, math.ceil(math.log2(max(det.subsample, 2))))
        for _ in range(n_trees):
            idx = rng.choice(rows.shape[0], size=det.subsample, replace=False)
            det.trees.append(_build_tree(rows[idx], 0, max_depth, rng))
        return det

    def score_batch(self, rows: np.ndarray) -> np.ndarray:
        rows = self._check_dims(rows)
        norm = harmonic_path_norm(self.subsample)
        scores = np.empty(rows.shape[0])
        for i, x in enumerate(rows):
            mean_path = sum(_path_length(t, x) for t in self.trees) / len(self.trees)
            scores[i] = math.pow(2.0, -mean_path / norm)
        return scores

    def to_dict(self) -> dict:
        return {"kind": self.kind, "threshold": self.threshold,
                "n_dims": self.n_dims, "subsample": self.subsample,
                "trees": self.trees}

    @staticmethod
    def from_dict(obj: dict) -> "IsolationForestDetector":
        det = IsolationForestDetector()
        det.threshold = obj["threshold"]
        det.n_dims = obj["n_dims"]
        det.subsample = obj["subsample"]
        det.trees = obj["trees"]
        return det
