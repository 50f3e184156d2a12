"""Evasion and detection metrics.

Counting convention: `detected_original` is how many malicious units
(packets or flows) the detector flags in the unmutated traffic;
`detected_mutated_original` / `detected_mutated_crafted` split the flags on
the mutated traffic between surviving original units and crafted ones.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import NoValidPairs, ZeroPositives

_EPS = 1e-12


def detection_evasion_rate(detected_original: int, detected_mutated: int) -> float:
    """Share of originally detectable traffic (crafted included) that now
    goes undetected."""
    if detected_original <= 0:
        raise ZeroPositives("no originally detected traffic; rate undefined")
    return 1.0 - detected_mutated / detected_original


def malicious_evasion_rate(detected_original: int, detected_mutated_original: int) -> float:
    """Share of originally detectable malicious (non-crafted) traffic that
    now goes undetected."""
    if detected_original <= 0:
        raise ZeroPositives("no originally detected traffic; rate undefined")
    return 1.0 - detected_mutated_original / detected_original


def probability_decline_rate(original_scores: Sequence[float],
                             mutated_scores: Sequence[float]) -> float:
    """1 - mean over pairs of (mutated score / original score); pairs whose
    original score is not positive are skipped with a warning."""
    orig = np.asarray(original_scores, dtype=float)
    mut = np.asarray(mutated_scores, dtype=float)
    if orig.shape != mut.shape:
        raise ValueError("score collections must be paired")
    valid = orig > 0
    skipped = int((~valid).sum())
    if skipped:
        warnings.warn(f"probability_decline_rate skipped {skipped} non-positive pairs")
    if not valid.any():
        raise NoValidPairs("every pair had a non-positive original score")
    return float(1.0 - np.mean(mut[valid] / orig[valid]))


def nearest_adversarial(features: np.ndarray, adversarial: np.ndarray) -> np.ndarray:
    """Index of the closest adversarial feature for each row."""
    features = np.atleast_2d(features)
    adversarial = np.atleast_2d(adversarial)
    diff = features[:, None, :] - adversarial[None, :, :]
    return np.argmin(np.sqrt((diff * diff).sum(axis=2)), axis=1)


def mimicry_rate(f_mal: np.ndarray, f_mut: np.ndarray, f_adver: np.ndarray) -> float:
    """1 - mean over pairs of dist(mutated, target) / dist(original, target),
    target = the adversarial feature nearest to each original."""
    f_mal = np.atleast_2d(np.asarray(f_mal, dtype=float))
    f_mut = np.atleast_2d(np.asarray(f_mut, dtype=float))
    if f_mal.shape != f_mut.shape:
        raise ValueError("feature sets must be paired")
    targets = np.atleast_2d(np.asarray(f_adver, dtype=float))[
        nearest_adversarial(f_mal, f_adver)
    ]
    base = np.linalg.norm(f_mal - targets, axis=1)
    moved = np.linalg.norm(f_mut - targets, axis=1)
    valid = base > _EPS
    if not valid.any():
        raise NoValidPairs("every original already coincides with its target")
    return float(1.0 - np.mean(moved[valid] / base[valid]))


def precision_recall_f1(labels: Sequence[int], predictions: Sequence[int]
                        ) -> Tuple[float, float, float]:
    """Standard P/R/F1 for the MALICIOUS class; zero divisions yield 0."""
    y = np.asarray(labels, dtype=int)
    p = np.asarray(predictions, dtype=int)
    if y.shape != p.shape:
        raise ValueError("labels and predictions must have equal length")
    tp = int(np.sum((y == 1) & (p == 1)))
    fp = int(np.sum((y == 0) & (p == 1)))
    fn = int(np.sum((y == 1) & (p == 0)))
    if tp + fp == 0:
        warnings.warn("no positive predictions; precision set to 0")
        precision = 0.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        warnings.warn("no positive labels; recall set to 0")
        recall = 0.0
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


@dataclass
class EvaluationReport:
    detected_original: int
    detected_mutated_original: int
    detected_mutated_crafted: int
    detection_evasion_rate: Optional[float] = None
    malicious_evasion_rate: Optional[float] = None
    probability_decline_rate: Optional[float] = None
    mimicry_rate: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None
    meta: dict = field(default_factory=dict)

    @property
    def detected_mutated(self) -> int:
        return self.detected_mutated_original + self.detected_mutated_crafted

    def to_json(self) -> str:
        obj = asdict(self)
        obj["detected_mutated"] = self.detected_mutated
        return json.dumps(obj, sort_keys=True, indent=2)

    @staticmethod
    def from_counts(detected_original: int, detected_mutated_original: int,
                    detected_mutated_crafted: int, **extra) -> "EvaluationReport":
        report = EvaluationReport(detected_original, detected_mutated_original,
                                  detected_mutated_crafted, **extra)
        if detected_original > 0:
            report.detection_evasion_rate = detection_evasion_rate(
                detected_original, report.detected_mutated)
            report.malicious_evasion_rate = malicious_evasion_rate(
                detected_original, detected_mutated_original)
        return report
