from .metrics import (
    EvaluationReport, detection_evasion_rate, malicious_evasion_rate,
    mimicry_rate, nearest_adversarial, precision_recall_f1,
    probability_decline_rate,
)
from .robustness import adversarial_feature_scores, afr_reduce
from .defenses import adversarial_training, feature_selection_l1, split_adversarial

__all__ = [
    "EvaluationReport", "adversarial_feature_scores", "adversarial_training",
    "afr_reduce", "detection_evasion_rate", "feature_selection_l1",
    "malicious_evasion_rate", "mimicry_rate", "nearest_adversarial",
    "precision_recall_f1", "probability_decline_rate", "split_adversarial",
]
