"""Experiment configuration: JSON in, validated dataclasses out."""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..errors import ConfigError
from ..gan import GanConfig
from ..pso import PsoConfig
from ..traffic.model import OverheadBudget
from .synth import BenignSpec, FloodSpec, ScanSpec


class AttackKind(enum.Enum):
    GAN_PSO = "gan_pso"
    PSO_ONLY = "pso_only"
    RANDOM_ST = "random_st"
    RANDOM_DUP = "random_dup"
    TWA = "twa"


@dataclass
class TrafficConfig:
    malicious_kind: str = "SCAN"              # SCAN or FLOOD
    benign: BenignSpec = field(default_factory=BenignSpec)
    scan: ScanSpec = field(default_factory=ScanSpec)
    flood: FloodSpec = field(default_factory=FloodSpec)
    benign_pcap: Optional[str] = None         # optional ingestion overrides
    malicious_pcap: Optional[str] = None
    segment_gap: float = 1.0                  # quiet time between benign and malicious


@dataclass
class ExperimentConfig:
    seed: int = 0
    attack: AttackKind = AttackKind.GAN_PSO
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    extractor_kind: str = "packet_damped"
    knowledge_fraction: float = 1.0
    detector_kind: str = "ensemble_ae"
    detector_hyper: dict = field(default_factory=dict)
    calibration_percentile: float = 99.0
    gan: GanConfig = field(default_factory=GanConfig)
    pso: PsoConfig = field(default_factory=PsoConfig)
    n_adver: int = 200
    n_per: int = 5                             # candidate draws per malicious feature
    budget: OverheadBudget = field(default_factory=OverheadBudget)

    def validate(self) -> None:
        if not 0.0 <= self.knowledge_fraction <= 1.0:
            raise ConfigError("knowledge_fraction must be in [0, 1]")
        if self.attack is AttackKind.GAN_PSO and self.n_adver < 1:
            raise ConfigError("gan_pso needs n_adver >= 1")
        if self.extractor_kind not in ("packet_damped", "flow"):
            raise ConfigError(f"unknown extractor kind {self.extractor_kind!r}")
        if self.traffic.malicious_kind.upper() not in ("SCAN", "FLOOD"):
            raise ConfigError(f"unknown malicious kind {self.traffic.malicious_kind!r}")

    def to_dict(self) -> dict:
        obj = asdict(self)
        obj["attack"] = self.attack.value
        return obj


def _build(cls, obj: dict, where: str):
    try:
        return cls(**obj)
    except TypeError as exc:
        raise ConfigError(f"bad {where} section: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad {where} section: {exc}") from exc


def config_from_dict(obj: dict) -> ExperimentConfig:
    obj = dict(obj)
    try:
        attack = AttackKind(obj.pop("attack", "gan_pso"))
    except ValueError as exc:
        raise ConfigError(f"unknown attack kind: {exc}") from exc

    traffic_obj = dict(obj.pop("traffic", {}))
    traffic = TrafficConfig(
        malicious_kind=traffic_obj.pop("malicious_kind", "SCAN"),
        benign=_build(BenignSpec, traffic_obj.pop("benign", {}), "traffic.benign"),
        scan=_build(ScanSpec, traffic_obj.pop("scan", {}), "traffic.scan"),
        flood=_build(FloodSpec, traffic_obj.pop("flood", {}), "traffic.flood"),
        benign_pcap=traffic_obj.pop("benign_pcap", None),
        malicious_pcap=traffic_obj.pop("malicious_pcap", None),
        segment_gap=traffic_obj.pop("segment_gap", 1.0),
    )
    if traffic_obj:
        raise ConfigError(f"unknown traffic keys: {sorted(traffic_obj)}")

    cfg = ExperimentConfig(
        seed=int(obj.pop("seed", 0)),
        attack=attack,
        traffic=traffic,
        extractor_kind=obj.pop("extractor_kind", "packet_damped"),
        knowledge_fraction=float(obj.pop("knowledge_fraction", 1.0)),
        detector_kind=obj.pop("detector_kind", "ensemble_ae"),
        detector_hyper=dict(obj.pop("detector_hyper", {})),
        calibration_percentile=float(obj.pop("calibration_percentile", 99.0)),
        gan=_build(GanConfig, obj.pop("gan", {}), "gan"),
        pso=_build(PsoConfig, obj.pop("pso", {}), "pso"),
        n_adver=int(obj.pop("n_adver", 200)),
        n_per=int(obj.pop("n_per", 5)),
        budget=_build(OverheadBudget, obj.pop("budget", {}), "budget"),
    )
    if obj:
        raise ConfigError(f"unknown config keys: {sorted(obj)}")
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(obj)
