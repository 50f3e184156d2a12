"""nidslab: desk-scale lab for traffic-space evasion attacks on ML-based
network intrusion detectors and robustness-scoring defenses."""

__version__ = "0.1.0"
