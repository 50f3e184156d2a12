"""Detector hardening: adversarial training and embedded feature selection.

Adversarial training splits the adversarial features 80/20, hardens the
detector with the training share, and hands back the held-out share for
evaluation. Supervised detectors are retrained on the augmented labeled
set; unsupervised detectors (which must never ingest malicious rows as
benign) instead tighten their threshold so the adversarial training share
is flagged.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from ..errors import EmptyTraining
from ..models import SUPERVISED_KINDS, AnomalyDetector, train_detector
from ..models.base import calibrate_threshold
from .robustness import afr_reduce  # noqa: F401  (re-exported defense primitive)

ADV_SPLIT = 0.8
ADV_FLAG_QUANTILE = 5.0  # flag at least 95% of the adversarial training share


def split_adversarial(f_adver: np.ndarray, rng: np.random.Generator,
                      train_fraction: float = ADV_SPLIT) -> Tuple[np.ndarray, np.ndarray]:
    f_adver = np.atleast_2d(np.asarray(f_adver, dtype=float))
    if f_adver.size == 0:
        raise EmptyTraining("adversarial training needs a non-empty feature set")
    n = f_adver.shape[0]
    order = rng.permutation(n)
    n_train = int(round(train_fraction * n))
    return f_adver[order[:n_train]], f_adver[order[n_train:]]


def adversarial_training(kind: str, benign_rows: np.ndarray,
                         labels: Optional[np.ndarray],
                         f_adver: np.ndarray,
                         percentile: float,
                         rng: np.random.Generator,
                         malicious_rows: Optional[np.ndarray] = None,
                         hyper: Optional[dict] = None
                         ) -> Tuple[AnomalyDetector, np.ndarray]:
    """Retrain/harden a detector with correctly labeled adversarial features.

    Returns (defended detector, held-out 20% of the adversarial features).
    """
    adv_train, adv_held = split_adversarial(f_adver, rng)

    if kind in SUPERVISED_KINDS:
        base = benign_rows if malicious_rows is None else np.vstack([benign_rows, malicious_rows])
        base_labels = (np.zeros(len(benign_rows)) if malicious_rows is None
                       else np.concatenate([np.zeros(len(benign_rows)),
                                            np.ones(len(malicious_rows))]))
        rows = np.vstack([base, adv_train])
        lab = np.concatenate([base_labels, np.ones(len(adv_train))])
        detector = train_detector(kind, rows, lab, hyper=hyper, rng=rng)
        detector.threshold = calibrate_threshold(
            detector.score_batch(benign_rows), percentile)
        return detector, adv_held

    # unsupervised: keep benign-only training, tighten the threshold until the
    # adversarial training share is flagged
    detector = train_detector(kind, benign_rows, hyper=hyper, rng=rng)
    benign_h = calibrate_threshold(detector.score_batch(benign_rows), percentile)
    adv_scores = detector.score_batch(adv_train)
    rank = max(int(math.ceil(ADV_FLAG_QUANTILE / 100.0 * adv_scores.size)), 1)
    adv_h = float(np.sort(adv_scores)[rank - 1])
    detector.threshold = min(benign_h, math.nextafter(adv_h, -math.inf))
    return detector, adv_held


def feature_selection_l1(rows: np.ndarray, labels: np.ndarray,
                         retain_fraction: float,
                         l1: float = 0.01,
                         rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Embedded selection: L1 logistic regression, keep the dimensions with
    the largest absolute weights."""
    from ..models.logreg import LogisticDetector

    if rng is None:
        rng = np.random.default_rng(0)
    model = LogisticDetector.train(np.asarray(rows, dtype=float),
                                   np.asarray(labels, dtype=float),
                                   l1=l1, rng=rng)
    return afr_reduce(np.abs(model.w), retain_fraction)
