"""Logistic-regression detector with optional L1 penalty.

Full-batch gradient descent with a proximal soft-threshold step for the L1
term; the sparse weights double as the ranking for embedded feature
selection.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import EmptyTraining
from .base import AnomalyDetector

DEFAULT_EPOCHS = 400
DEFAULT_LR = 0.5
_CLAMP = 1e-7


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -50.0, 50.0)))


class LogisticDetector(AnomalyDetector):
    kind = "logreg"

    def __init__(self):
        super().__init__()
        self.w: Optional[np.ndarray] = None
        self.b: float = 0.0

    @staticmethod
    def train(rows: np.ndarray, labels: np.ndarray,
              epochs: int = DEFAULT_EPOCHS, lr: float = DEFAULT_LR,
              l1: float = 0.0,
              rng: Optional[np.random.Generator] = None) -> "LogisticDetector":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        labels = np.asarray(labels, dtype=float)
        if rows.size == 0 or labels.size == 0:
            raise EmptyTraining("logistic regression needs labeled rows")
        if rng is None:
            rng = np.random.default_rng(0)

        det = LogisticDetector()
        det.n_dims = rows.shape[1]
        det.w = rng.normal(0.0, 0.01, size=rows.shape[1])
        det.b = 0.0
        n = rows.shape[0]
        for _ in range(epochs):
            pred = _sigmoid(rows @ det.w + det.b)
            err = pred - labels
            grad_w = rows.T @ err / n
            grad_b = float(err.mean())
            det.w -= lr * grad_w
            det.b -= lr * grad_b
            if l1 > 0.0:
                shrink = lr * l1
                det.w = np.sign(det.w) * np.maximum(np.abs(det.w) - shrink, 0.0)
        return det

    def score_batch(self, rows: np.ndarray) -> np.ndarray:
        rows = self._check_dims(rows)
        return _sigmoid(rows @ self.w + self.b)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "threshold": self.threshold,
                "n_dims": self.n_dims, "w": self.w.tolist(), "b": self.b}

    @staticmethod
    def from_dict(obj: dict) -> "LogisticDetector":
        det = LogisticDetector()
        det.threshold = obj["threshold"]
        det.n_dims = obj["n_dims"]
        det.w = np.asarray(obj["w"], dtype=float)
        det.b = float(obj["b"])
        return det
