"""Supervised MLP detector: the sigmoid output is the malicious probability."""

from __future__ import annotations

from typing import List, Optional

import numpy as np

from ..errors import EmptyTraining
from ..nn import DenseNet
from .base import AnomalyDetector

HIDDEN = (32, 16)
DEFAULT_EPOCHS = 60
DEFAULT_LR = 0.01
DEFAULT_BATCH = 32
_CLAMP = 1e-7


def bce_loss(pred: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(pred, _CLAMP, 1.0 - _CLAMP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def bce_dout(pred: np.ndarray, y: np.ndarray) -> np.ndarray:
    p = np.clip(pred, _CLAMP, 1.0 - _CLAMP)
    return (-(y / p) + (1.0 - y) / (1.0 - p)) / y.size


class MlpDetector(AnomalyDetector):
    kind = "mlp"

    def __init__(self):
        super().__init__()
        self.net: Optional[DenseNet] = None
        self.history: List[float] = []

    @staticmethod
    def train(rows: np.ndarray, labels: np.ndarray,
              epochs: int = DEFAULT_EPOCHS, lr: float = DEFAULT_LR,
              batch: int = DEFAULT_BATCH,
              rng: Optional[np.random.Generator] = None) -> "MlpDetector":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        labels = np.asarray(labels, dtype=float).reshape(-1, 1)
        if rows.size == 0 or labels.size == 0:
            raise EmptyTraining("mlp training needs labeled rows")
        if rng is None:
            rng = np.random.default_rng(0)

        det = MlpDetector()
        det.n_dims = rows.shape[1]
        det.net = DenseNet([rows.shape[1], *HIDDEN, 1], hidden_activation="relu",
                           output_activation="sigmoid", rng=rng)
        n = rows.shape[0]
        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                idx = order[start:start + batch]
                out, cache = det.net.forward(rows[idx])
                grads, _ = det.net.backward(cache, bce_dout(out, labels[idx]))
                det.net.sgd_step(grads, lr)
            det.history.append(bce_loss(det.net.predict(rows), labels))
        return det

    def score_batch(self, rows: np.ndarray) -> np.ndarray:
        rows = self._check_dims(rows)
        return self.net.predict(rows)[:, 0]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "threshold": self.threshold,
                "n_dims": self.n_dims, "net": self.net.to_dict()}

    @staticmethod
    def from_dict(obj: dict) -> "MlpDetector":
        det = MlpDetector()
        det.threshold = obj["threshold"]
        det.n_dims = obj["n_dims"]
        det.net = DenseNet.from_dict(obj["net"])
        return det
