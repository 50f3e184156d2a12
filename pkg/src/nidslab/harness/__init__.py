from .config import AttackKind, ExperimentConfig, TrafficConfig, config_from_dict, load_config
from .pipeline import (
    AttackRun, CorrelationResult, CorrelationSample, DefenseOutcome,
    build_traces, correlate, evaluate_attack, pearson, prepare_surrogate,
    prepare_target, run_attack, run_defense, stage_rng,
)
from .synth import BenignSpec, FloodSpec, ScanSpec, synth_benign, synth_malicious

__all__ = [
    "AttackKind", "AttackRun", "BenignSpec", "CorrelationResult",
    "CorrelationSample", "DefenseOutcome", "ExperimentConfig", "FloodSpec",
    "ScanSpec", "TrafficConfig", "build_traces", "config_from_dict",
    "correlate", "evaluate_attack", "load_config", "pearson",
    "prepare_surrogate", "prepare_target", "run_attack", "run_defense",
    "stage_rng", "synth_benign", "synth_malicious",
]
