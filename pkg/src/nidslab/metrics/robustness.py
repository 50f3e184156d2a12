"""Per-dimension adversarial robustness scoring and feature reduction.

For every (original, mutated) feature pair, each dimension's mimicry ratio
measures how far that dimension moved toward the nearest adversarial
feature. Pairs that evade the detector subtract their ratios (penalty);
pairs that do not add the complement (reward). Dividing by the pair count
bounds every score in [-1, 1]; low-scoring dimensions are the exploitable
ones and get dropped by the reduction defense.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .metrics import nearest_adversarial

_EPS = 1e-12


def adversarial_feature_scores(f_mal: np.ndarray, f_mut: np.ndarray,
                               f_adver: np.ndarray,
                               score_fn: Callable[[np.ndarray], np.ndarray],
                               threshold: float) -> np.ndarray:
    """Robustness score per feature dimension, each in [-1, 1]."""
    f_mal = np.atleast_2d(np.asarray(f_mal, dtype=float))
    f_mut = np.atleast_2d(np.asarray(f_mut, dtype=float))
    f_adver = np.atleast_2d(np.asarray(f_adver, dtype=float))
    if f_mal.shape != f_mut.shape:
        raise ValueError("original and mutated feature sets must be paired")
    n_pairs, n_dims = f_mal.shape

    targets = f_adver[nearest_adversarial(f_mal, f_adver)]
    scores_mal = np.asarray(score_fn(f_mal), dtype=float)
    scores_mut = np.asarray(score_fn(f_mut), dtype=float)
    evaded = (scores_mal > threshold) & (scores_mut < threshold)

    s = np.zeros(n_dims)
    for i in range(n_pairs):
        denom = np.abs(f_mal[i] - targets[i])
        ratio = np.where(denom > _EPS,
                         1.0 - np.abs(f_mut[i] - targets[i]) / np.where(denom > _EPS, denom, 1.0),
                         0.0)
        ratio = np.clip(ratio, 0.0, 1.0)
        if evaded[i]:
            s -= ratio
        else:
            s += 1.0 - ratio
    return s / n_pairs


def afr_reduce(scores: np.ndarray, retain_fraction: float) -> np.ndarray:
    """Mask keeping the ceil(retain_fraction * n) highest-scoring dimensions;
    ties keep the lower index."""
    scores = np.asarray(scores, dtype=float)
    if not 0.0 < retain_fraction <= 1.0:
        raise ValueError("retain_fraction must be in (0, 1]")
    n_keep = math.ceil(retain_fraction * len(scores))
    order = np.argsort(-scores, kind="stable")
    mask = np.zeros(len(scores), dtype=bool)
    mask[order[:n_keep]] = True
    return mask
