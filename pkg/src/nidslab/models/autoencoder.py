"""Ensemble-of-autoencoders anomaly detector.

Feature dimensions are clustered into small groups; one sigmoid
autoencoder reconstructs each group, and an output autoencoder over the
min-max-normalized per-group reconstruction errors produces the final
anomaly score (its own reconstruction RMSE).
"""

from __future__ import annotations

import math
from typing import List, Optional

import numpy as np

from ..errors import EmptyTraining
from ..nn import DenseNet
from .base import AnomalyDetector
from .grouping import feature_group

DEFAULT_M_MAX = 10
DEFAULT_EPOCHS = 150
DEFAULT_LR = 0.01
DEFAULT_BATCH = 32
_EPS = 1e-12


def _ae_shape(n: int) -> list:
    return [n, max(1, math.ceil(0.75 * n)), n]


def train_autoencoder(net: DenseNet, rows: np.ndarray, epochs: int, lr: float,
                      batch: int, rng: np.random.Generator) -> List[float]:
    """Minibatch SGD on mean squared reconstruction error; returns the
    post-epoch loss trail."""
    n = rows.shape[0]
    history = []
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            x = rows[idx]
            out, cache = net.forward(x)
            d_out = 2.0 * (out - x) / out.size
            grads, _ = net.backward(cache, d_out)
            net.sgd_step(grads, lr)
        out, _ = net.forward(rows)
        history.append(float(np.mean((out - rows) ** 2)))
    return history


def reconstruction_rmse(net: DenseNet, rows: np.ndarray) -> np.ndarray:
    out, _ = net.forward(rows)
    return np.sqrt(np.mean((out - rows) ** 2, axis=1))


class EnsembleAutoencoderDetector(AnomalyDetector):
    kind = "ensemble_ae"

    def __init__(self):
        super().__init__()
        self.groups: List[List[int]] = []
        self.group_nets: List[DenseNet] = []
        self.output_net: Optional[DenseNet] = None
        self.rmse_lo: Optional[np.ndarray] = None
        self.rmse_hi: Optional[np.ndarray] = None
        self.history: List[float] = []

    @staticmethod
    def train(rows: np.ndarray, m_max: int = DEFAULT_M_MAX,
              epochs: int = DEFAULT_EPOCHS, lr: float = DEFAULT_LR,
              batch: int = DEFAULT_BATCH,
              rng: Optional[np.random.Generator] = None) -> "EnsembleAutoencoderDetector":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if rows.size == 0:
            raise EmptyTraining("no training rows")
        if rng is None:
            rng = np.random.default_rng(0)

        det = EnsembleAutoencoderDetector()
        det.n_dims = rows.shape[1]
        det.groups = feature_group(rows, m_max)
        per_group_losses = []
        for group in det.groups:
            net = DenseNet(_ae_shape(len(group)), hidden_activation="sigmoid",
                           output_activation="sigmoid", rng=rng)
            losses = train_autoencoder(net, rows[:, group], epochs, lr, batch, rng)
            det.group_nets.append(net)
            per_group_losses.append(losses)

        errors = det._group_errors(rows)
        det.rmse_lo = errors.min(axis=0)
        det.rmse_hi = errors.max(axis=0)
        scaled = det._scale_errors(errors)
        det.output_net = DenseNet(_ae_shape(len(det.groups)), hidden_activation="sigmoid",
                                  output_activation="sigmoid", rng=rng)
        out_losses = train_autoencoder(det.output_net, scaled, epochs, lr, batch, rng)
        det.history = [float(np.mean(step)) for step in zip(*per_group_losses, out_losses)]
        return det

    def _group_errors(self, rows: np.ndarray) -> np.ndarray:
        cols = [reconstruction_rmse(net, rows[:, group])
                for group, net in zip(self.groups, self.group_nets)]
        return np.stack(cols, axis=1)

    def _scale_errors(self, errors: np.ndarray) -> np.ndarray:
        span = self.rmse_hi - self.rmse_lo
        safe = np.where(span > _EPS, span, 1.0)
        scaled = np.where(span > _EPS, (errors - self.rmse_lo) / safe, 0.0)
        return np.clip(scaled, 0.0, 1.0)

    def score_batch(self, rows: np.ndarray) -> np.ndarray:
        rows = self._check_dims(rows)
        scaled = self._scale_errors(self._group_errors(rows))
        return reconstruction_rmse(self.output_net, scaled)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "n_dims": self.n_dims,
            "groups": self.groups,
            "group_nets": [n.to_dict() for n in self.group_nets],
            "output_net": self.output_net.to_dict(),
            "rmse_lo": self.rmse_lo.tolist(),
            "rmse_hi": self.rmse_hi.tolist(),
        }

    @staticmethod
    def from_dict(obj: dict) -> "EnsembleAutoencoderDetector":
        det = EnsembleAutoencoderDetector()
        det.threshold = obj["threshold"]
        det.n_dims = obj["n_dims"]
        det.groups = [list(g) for g in obj["groups"]]
        det.group_nets = [DenseNet.from_dict(d) for d in obj["group_nets"]]
        det.output_net = DenseNet.from_dict(obj["output_net"])
        det.rmse_lo = np.asarray(obj["rmse_lo"], dtype=float)
        det.rmse_hi = np.asarray(obj["rmse_hi"], dtype=float)
        return det
