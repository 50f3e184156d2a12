"""Per-dimension min-max normalization with clipping to [0, 1]."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

_EPS = 1e-12


@dataclass
class Normalization:
    lo: np.ndarray
    hi: np.ndarray

    @property
    def n_dims(self) -> int:
        return len(self.lo)

    def to_json(self) -> str:
        return json.dumps({"lo": self.lo.tolist(), "hi": self.hi.tolist()})

    @staticmethod
    def from_json(text: str) -> "Normalization":
        obj = json.loads(text)
        return Normalization(np.asarray(obj["lo"], dtype=float),
                             np.asarray(obj["hi"], dtype=float))


def fit_normalization(rows: np.ndarray) -> Normalization:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] < 2:
        raise ValueError("need at least 2 vectors to fit normalization")
    return Normalization(rows.min(axis=0), rows.max(axis=0))


def normalize(rows: np.ndarray, norm: Normalization) -> np.ndarray:
    """Scale into [0, 1]; constant dimensions map to 0, outliers clip."""
    rows = np.asarray(rows, dtype=float)
    span = norm.hi - norm.lo
    safe = np.where(span > _EPS, span, 1.0)
    scaled = (rows - norm.lo) / safe
    scaled = np.where(span > _EPS, scaled, 0.0)
    return np.clip(scaled, 0.0, 1.0)
